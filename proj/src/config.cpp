#include "oppenheim/config.hpp"

#include "oppenheim/errors.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace oppenheim {

namespace {

struct Value {
    bool is_array = false;
    std::string scalar;
    std::vector<Value> items;
};

class ValueParser {
public:
    ValueParser(std::string_view text, int line) : text_(text), line_(line) {}

    Value parse() {
        Value v = value();
        skip_space();
        if (pos_ != text_.size()) fail("trailing characters after value");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("model config line " + std::to_string(line_) + ": " + what);
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    Value value() {
        skip_space();
        if (pos_ >= text_.size()) fail("missing value");
        Value v;
        if (text_[pos_] == '[') {
            v.is_array = true;
            ++pos_;
            skip_space();
            if (pos_ < text_.size() && text_[pos_] == ']') {
                ++pos_;
                return v;
            }
            while (true) {
                v.items.push_back(value());
                skip_space();
                if (pos_ >= text_.size()) fail("unterminated array");
                if (text_[pos_] == ',') {
                    ++pos_;
                    continue;
                }
                if (text_[pos_] == ']') {
                    ++pos_;
                    break;
                }
                fail("expected ',' or ']' in array");
            }
            return v;
        }
        if (text_[pos_] == '"') {
            const auto end = text_.find('"', pos_ + 1);
            if (end == std::string_view::npos) fail("unterminated string");
            v.scalar = std::string(text_.substr(pos_ + 1, end - pos_ - 1));
            pos_ = end + 1;
            return v;
        }
        const auto start = pos_;
        while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ']' &&
               !std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        v.scalar = std::string(text_.substr(start, pos_ - start));
        if (v.scalar.empty()) fail("empty value");
        return v;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_;
};

std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "phi.kind",  "phi.value",  "phi.m",         "phi.include_zero_term", "phi.periods",   "dist.kind",
        "dist.coefficients", "dist.knots", "q.kind", "q.value", "lattice.kind", "lattice.kappa",
        "lattice.values", "lattice.tail_step", "initial.rule", "initial.value"};
    return keys;
}

class Document {
public:
    explicit Document(const std::string& text) {
        std::istringstream in(text);
        std::string raw;
        std::string section;
        int line_no = 0;
        while (std::getline(in, raw)) {
            ++line_no;
            const std::string line = trim(strip_comment(raw));
            if (line.empty()) continue;
            if (line.front() == '[' && line.back() == ']' && line.find('=') == std::string::npos) {
                section = trim(line.substr(1, line.size() - 2));
                if (section != "phi" && section != "dist" && section != "q" && section != "lattice" &&
                    section != "initial")
                    throw ConfigError("model config line " + std::to_string(line_no) + ": unknown section [" +
                                      section + "]");
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("model config line " + std::to_string(line_no) + ": expected key = value");
            std::string key = trim(line.substr(0, eq));
            if (key.find('.') == std::string::npos) {
                if (section.empty())
                    throw ConfigError("model config line " + std::to_string(line_no) + ": key '" + key +
                                      "' outside a section");
                key = section + "." + key;
            }
            if (!known_keys().contains(key))
                throw ConfigError("model config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
            if (values_.contains(key))
                throw ConfigError("model config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
            values_.emplace(key, ValueParser(line.substr(eq + 1), line_no).parse());
        }
    }

    bool has(const std::string& key) const { return values_.contains(key); }

    const Value& get(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("model config: missing key '" + key + "'");
        return it->second;
    }

    std::string scalar(const std::string& key) const {
        const Value& v = get(key);
        if (v.is_array) throw ConfigError("model config: '" + key + "' must be a scalar");
        return v.scalar;
    }

    std::string scalar_or(const std::string& key, const std::string& fallback) const {
        return has(key) ? scalar(key) : fallback;
    }

    const std::vector<Value>& array(const std::string& key) const {
        const Value& v = get(key);
        if (!v.is_array) throw ConfigError("model config: '" + key + "' must be an array");
        return v.items;
    }

private:
    std::map<std::string, Value> values_;
};

std::int64_t to_int(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("model config: '" + key + "' must be an integer, got '" + text + "'");
    }
}

bool to_bool(const std::string& key, const std::string& text) {
    if (text == "true") return true;
    if (text == "false") return false;
    throw ConfigError("model config: '" + key + "' must be true or false");
}

std::vector<std::int64_t> int_list(const Document& doc, const std::string& key) {
    std::vector<std::int64_t> out;
    for (const auto& item : doc.array(key)) {
        if (item.is_array) throw ConfigError("model config: '" + key + "' must be a flat list");
        out.push_back(to_int(key, item.scalar));
    }
    return out;
}

PhiFamily parse_phi(const Document& doc) {
    const std::string kind = doc.scalar("phi.kind");
    if (kind == "constant") return PhiFamily::constant(parse_rational(doc.scalar("phi.value")));
    if (kind == "power_sum") {
        const auto m = to_int("phi.m", doc.scalar("phi.m"));
        if (m < 0) throw ConfigError("model config: phi.m must be nonnegative");
        return PhiFamily::power_sum(static_cast<unsigned>(m),
                                    to_bool("phi.include_zero_term", doc.scalar_or("phi.include_zero_term", "false")));
    }
    if (kind == "reciprocal_periodic") return PhiFamily::reciprocal_periodic(int_list(doc, "phi.periods"));
    throw ConfigError("model config: unknown phi.kind '" + kind + "'");
}

Cdf parse_cdf(const Document& doc) {
    const std::string kind = doc.scalar_or("dist.kind", "linear");
    if (kind == "linear") return Cdf::linear();
    if (kind == "polynomial") {
        std::vector<Rational> coefficients;
        for (const auto& item : doc.array("dist.coefficients")) {
            if (item.is_array) throw ConfigError("model config: dist.coefficients must be a flat list");
            coefficients.push_back(parse_rational(item.scalar));
        }
        return Cdf::polynomial(std::move(coefficients));
    }
    if (kind == "piecewise_linear") {
        std::vector<Cdf::Knot> knots;
        for (const auto& item : doc.array("dist.knots")) {
            if (!item.is_array || item.items.size() != 2 || item.items[0].is_array || item.items[1].is_array)
                throw ConfigError("model config: dist.knots entries must be [\"t\", \"F\"] pairs");
            knots.push_back({parse_rational(item.items[0].scalar), parse_rational(item.items[1].scalar)});
        }
        return Cdf::piecewise_linear(std::move(knots));
    }
    throw ConfigError("model config: unknown dist.kind '" + kind + "'");
}

QSpec parse_q(const Document& doc) {
    const std::string kind = doc.scalar_or("q.kind", "zero");
    if (kind == "zero") return QSpec::zero();
    if (kind == "constant") return QSpec::constant(parse_rational(doc.scalar("q.value")));
    if (kind == "lattice_periodic") return QSpec::lattice_periodic(int_list(doc, "q.value"));
    throw ConfigError("model config: unknown q.kind '" + kind + "'");
}

std::optional<GoodSequence> parse_lattice(const Document& doc) {
    const std::string kind = doc.scalar_or("lattice.kind", "none");
    if (kind == "none") return std::nullopt;
    if (kind == "arithmetic") return GoodSequence::arithmetic(to_int("lattice.kappa", doc.scalar_or("lattice.kappa", "1")));
    if (kind == "explicit")
        return GoodSequence::explicit_list(int_list(doc, "lattice.values"),
                                           to_int("lattice.tail_step", doc.scalar("lattice.tail_step")));
    throw ConfigError("model config: unknown lattice.kind '" + kind + "'");
}

InitialDigit parse_initial(const Document& doc) {
    const std::string rule = doc.scalar_or("initial.rule", "virtual_zeroth");
    if (rule == "virtual_zeroth") return InitialDigit::virtual_zeroth();
    if (rule == "fixed") {
        const auto h = to_int("initial.value", doc.scalar("initial.value"));
        if (h < 1) throw ConfigError("model config: initial.value must be >= 1");
        return InitialDigit::fixed(BigInt(static_cast<long>(h)));
    }
    throw ConfigError("model config: unknown initial.rule '" + rule + "'");
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

template <typename T, typename F>
std::string list(const std::vector<T>& items, F&& fmt) {
    std::string out = "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += fmt(items[i]);
    }
    return out + "]";
}

} // namespace

OppenheimModel parse_model_config(const std::string& text) {
    const Document doc(text);
    OppenheimModel model;
    model.phi = parse_phi(doc);
    model.dist = DistributionFamily(parse_cdf(doc));
    model.q = parse_q(doc);
    model.lattice = parse_lattice(doc);
    model.initial = parse_initial(doc);
    return model;
}

OppenheimModel load_model_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open model file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model_config(buf.str());
}

std::string serialize_model_config(const OppenheimModel& model) {
    std::ostringstream out;
    auto i64 = [](std::int64_t v) { return std::to_string(v); };
    out << "[phi]\n";
    switch (model.phi.kind()) {
    case PhiFamily::Kind::constant:
        out << "kind = \"constant\"\nvalue = " << quoted(to_string(model.phi.constant_value())) << "\n";
        break;
    case PhiFamily::Kind::power_sum:
        out << "kind = \"power_sum\"\nm = " << model.phi.m()
            << "\ninclude_zero_term = " << (model.phi.include_zero_term() ? "true" : "false") << "\n";
        break;
    case PhiFamily::Kind::reciprocal_periodic:
        out << "kind = \"reciprocal_periodic\"\nperiods = " << list(model.phi.periods(), i64) << "\n";
        break;
    }
    if (!model.dist.identical()) throw ConfigError("indexed distribution families have no config-file form");
    const Cdf& f = model.dist.at(1);
    out << "\n[dist]\n";
    switch (f.kind()) {
    case Cdf::Kind::linear:
        out << "kind = \"linear\"\n";
        break;
    case Cdf::Kind::polynomial:
        out << "kind = \"polynomial\"\ncoefficients = "
            << list(f.coefficients(), [](const Rational& r) { return quoted(to_string(r)); }) << "\n";
        break;
    case Cdf::Kind::piecewise_linear:
        out << "kind = \"piecewise_linear\"\nknots = " << list(f.knots(), [](const Cdf::Knot& k) {
            return "[" + quoted(to_string(k.t)) + ", " + quoted(to_string(k.value)) + "]";
        }) << "\n";
        break;
    }
    out << "\n[q]\n";
    switch (model.q.kind()) {
    case QSpec::Kind::zero:
        out << "kind = \"zero\"\n";
        break;
    case QSpec::Kind::constant:
        out << "kind = \"constant\"\nvalue = " << quoted(to_string(model.q.constant_value())) << "\n";
        break;
    case QSpec::Kind::lattice_periodic:
        out << "kind = \"lattice_periodic\"\nvalue = " << list(model.q.values(), i64) << "\n";
        break;
    }
    out << "\n[lattice]\n";
    if (!model.lattice) {
        out << "kind = \"none\"\n";
    } else if (model.lattice->kind() == GoodSequence::Kind::arithmetic) {
        out << "kind = \"arithmetic\"\nkappa = " << model.lattice->kappa() << "\n";
    } else {
        out << "kind = \"explicit\"\nvalues = " << list(model.lattice->prefix(), i64)
            << "\ntail_step = " << model.lattice->tail_step() << "\n";
    }
    out << "\n[initial]\n";
    if (model.initial.rule == InitialDigit::Rule::virtual_zeroth) out << "rule = \"virtual_zeroth\"\n";
    else out << "rule = \"fixed\"\nvalue = " << to_string(model.initial.value) << "\n";
    return out.str();
}

} // namespace oppenheim
