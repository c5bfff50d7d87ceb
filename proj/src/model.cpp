#include "oppenheim/model.hpp"

#include "oppenheim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace oppenheim {

// ---------------------------------------------------------------------------
// PhiFamily

PhiFamily PhiFamily::constant(Rational c) {
    c.canonicalize();
    if (c <= 0) throw ConfigError("constant phi must be positive");
    PhiFamily f;
    f.kind_ = Kind::constant;
    f.constant_ = std::move(c);
    return f;
}

PhiFamily PhiFamily::power_sum(unsigned m, bool include_zero_term) {
    if (m == 0 && !include_zero_term) throw ConfigError("power_sum with m = 0 needs the zero term");
    PhiFamily f;
    f.kind_ = Kind::power_sum;
    f.m_ = m;
    f.include_zero_ = include_zero_term;
    return f;
}

PhiFamily PhiFamily::reciprocal_periodic(std::vector<std::int64_t> periods) {
    if (periods.empty()) throw ConfigError("reciprocal_periodic phi needs at least one period");
    for (auto a : periods)
        if (a < 1) throw ConfigError("reciprocal_periodic phi needs positive integers");
    PhiFamily f;
    f.kind_ = Kind::reciprocal_periodic;
    f.periods_ = std::move(periods);
    return f;
}

Rational PhiFamily::operator()(std::size_t n, const BigInt& h) const {
    switch (kind_) {
    case Kind::constant:
        return constant_;
    case Kind::power_sum: {
        BigInt acc = 0;
        for (unsigned k = m_; k >= 1; --k) acc = (acc + 1) * h;
        if (include_zero_) acc += 1;
        return Rational(acc);
    }
    case Kind::reciprocal_periodic:
        return Rational(1, periods_[n % periods_.size()]);
    }
    return constant_;
}

std::int64_t PhiFamily::kappa() const {
    std::int64_t k = 1;
    for (auto a : periods_) k = std::lcm(k, a);
    return k;
}

// ---------------------------------------------------------------------------
// Cdf

Cdf Cdf::linear() { return Cdf{}; }

Cdf Cdf::polynomial(std::vector<Rational> coefficients) {
    if (coefficients.empty()) throw ConfigError("polynomial CDF needs coefficients");
    Cdf f;
    f.kind_ = Kind::polynomial;
    for (auto& c : coefficients) {
        c.canonicalize();
        f.coefficients_d_.push_back(c.get_d());
    }
    f.coefficients_ = std::move(coefficients);
    return f;
}

Cdf Cdf::piecewise_linear(std::vector<Knot> knots) {
    if (knots.size() < 2) throw ConfigError("piecewise_linear CDF needs at least two knots");
    if (knots.front().t != 0 || knots.back().t != 1)
        throw ConfigError("piecewise_linear CDF knots must start at t = 0 and end at t = 1");
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (knots[i].t <= knots[i - 1].t) throw ConfigError("piecewise_linear knots must increase in t");
    Cdf f;
    f.kind_ = Kind::piecewise_linear;
    for (const auto& k : knots) {
        f.knot_t_d_.push_back(k.t.get_d());
        f.knot_v_d_.push_back(k.value.get_d());
    }
    f.knots_ = std::move(knots);
    return f;
}

Rational Cdf::operator()(const Rational& t_in) const {
    const Rational t = t_in < 0 ? Rational(0) : (t_in > 1 ? Rational(1) : t_in);
    switch (kind_) {
    case Kind::linear:
        return t;
    case Kind::polynomial: {
        Rational acc = 0;
        for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) acc = acc * t + *it;
        return acc;
    }
    case Kind::piecewise_linear:
        for (std::size_t i = 1; i < knots_.size(); ++i) {
            if (t <= knots_[i].t) {
                const auto& a = knots_[i - 1];
                const auto& b = knots_[i];
                return a.value + (b.value - a.value) * (t - a.t) / (b.t - a.t);
            }
        }
        return knots_.back().value;
    }
    return t;
}

double Cdf::operator()(double t) const {
    t = std::clamp(t, 0.0, 1.0);
    switch (kind_) {
    case Kind::linear:
        return t;
    case Kind::polynomial: {
        double acc = 0;
        for (auto it = coefficients_d_.rbegin(); it != coefficients_d_.rend(); ++it) acc = acc * t + *it;
        return acc;
    }
    case Kind::piecewise_linear:
        for (std::size_t i = 1; i < knot_t_d_.size(); ++i) {
            if (t <= knot_t_d_[i]) {
                const double w = (t - knot_t_d_[i - 1]) / (knot_t_d_[i] - knot_t_d_[i - 1]);
                return knot_v_d_[i - 1] + (knot_v_d_[i] - knot_v_d_[i - 1]) * w;
            }
        }
        return knot_v_d_.back();
    }
    return t;
}

double Cdf::alpha_limit() const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (kind_) {
    case Kind::linear:
        return 1.0;
    case Kind::polynomial:
        if (coefficients_[0] != 0) return inf;
        return coefficients_.size() > 1 ? coefficients_d_[1] : 0.0;
    case Kind::piecewise_linear: {
        if (knots_[0].value != 0) return inf;
        const Rational slope = (knots_[1].value - knots_[0].value) / (knots_[1].t - knots_[0].t);
        return slope.get_d();
    }
    }
    return inf;
}

double Cdf::ratio_bound() const { return alpha_limit(); }

double Cdf::ratio_sup(double t_max) const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    t_max = std::clamp(t_max, std::numeric_limits<double>::min(), 1.0);
    switch (kind_) {
    case Kind::linear:
        return 1.0;
    case Kind::polynomial: {
        if (coefficients_[0] != 0) return inf;
        double bound = 0;
        double power = 1;
        for (std::size_t i = 1; i < coefficients_d_.size(); ++i) {
            bound += std::abs(coefficients_d_[i]) * power;
            power *= t_max;
        }
        return bound;
    }
    case Kind::piecewise_linear: {
        if (knots_[0].value != 0) return inf;
        // F(t)/t is monotone on every linear piece, so the sup sits at a piece endpoint.
        double bound = alpha_limit();
        for (std::size_t i = 1; i < knot_t_d_.size() && knot_t_d_[i] <= t_max; ++i)
            bound = std::max(bound, knot_v_d_[i] / knot_t_d_[i]);
        bound = std::max(bound, (*this)(t_max) / t_max);
        return bound;
    }
    }
    return inf;
}

Cdf::Leading Cdf::leading() const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (kind_) {
    case Kind::linear:
        return {1.0, 1};
    case Kind::polynomial:
        if (coefficients_[0] != 0) return {inf, 1};
        for (std::size_t i = 1; i < coefficients_.size(); ++i)
            if (coefficients_[i] != 0) return {coefficients_d_[i], static_cast<unsigned>(i)};
        return {0.0, 0};
    case Kind::piecewise_linear: {
        const double slope = alpha_limit();
        if (slope == 0) return {0.0, 0};
        return {slope, 1};
    }
    }
    return {inf, 1};
}

// ---------------------------------------------------------------------------
// DistributionFamily, QSpec, OppenheimModel

DistributionFamily::DistributionFamily(Cdf shared) { members_.push_back(std::move(shared)); }

DistributionFamily::DistributionFamily(std::vector<Cdf> per_index) : members_(std::move(per_index)) {
    if (members_.empty()) throw ConfigError("distribution family needs at least one CDF");
}

const Cdf& DistributionFamily::at(std::size_t n) const {
    if (n == 0) return members_.front();
    return members_[(n - 1) % members_.size()];
}

double DistributionFamily::ratio_bound() const {
    double bound = 0;
    for (const auto& f : members_) bound = std::max(bound, f.ratio_bound());
    return bound;
}

double DistributionFamily::alpha_limit() const {
    return identical() ? members_.front().alpha_limit() : std::numeric_limits<double>::quiet_NaN();
}

QSpec QSpec::zero() { return QSpec{}; }

QSpec QSpec::constant(Rational c) {
    c.canonicalize();
    if (c < 0) throw ConfigError("q must be nonnegative");
    QSpec q;
    q.kind_ = Kind::constant;
    q.constant_ = std::move(c);
    return q;
}

QSpec QSpec::lattice_periodic(std::vector<std::int64_t> values) {
    if (values.empty()) throw ConfigError("lattice_periodic q needs values");
    for (auto v : values)
        if (v < 1) throw ConfigError("lattice_periodic q values must be positive lattice points");
    QSpec q;
    q.kind_ = Kind::lattice_periodic;
    q.values_ = std::move(values);
    return q;
}

Rational QSpec::operator()(std::size_t n) const {
    switch (kind_) {
    case Kind::zero:
        return 0;
    case Kind::constant:
        return constant_;
    case Kind::lattice_periodic:
        if (n == 0) return 0;
        return Rational(values_[(n - 1) % values_.size()]);
    }
    return 0;
}

std::size_t OppenheimModel::period() const {
    return std::lcm(std::lcm(phi.period(), dist.period()), q.period());
}

namespace {

OppenheimModel standard_model(PhiFamily phi) {
    OppenheimModel m;
    m.phi = std::move(phi);
    m.lattice = GoodSequence::naturals();
    return m;
}

} // namespace

OppenheimModel luroth_model() { return standard_model(PhiFamily::luroth()); }
OppenheimModel engel_model() { return standard_model(PhiFamily::engel()); }
OppenheimModel sylvester_model() { return standard_model(PhiFamily::sylvester()); }

// ---------------------------------------------------------------------------
// Pure evaluation

Rational phi_eval(const OppenheimModel& model, std::size_t n, const BigInt& h) {
    if (h < 1) throw DomainError("phi is defined for h >= 1");
    return model.phi(n, h);
}

Rational delta(const Rational& phi, const Rational& k, const Rational& q) {
    if (k < phi) throw DomainError("delta needs k >= phi(h) (k = " + to_string(k) + ", phi = " + to_string(phi) + ")");
    Rational out = phi * (1 + q) / (k + phi * q);
    return out;
}

Rational delta(const OppenheimModel& model, std::size_t j, const BigInt& h, const Rational& k,
               const Rational& q) {
    return delta(phi_eval(model, j, h), k, q);
}

Rational r_value(const OppenheimModel& model, std::size_t n, const BigInt& h, const BigInt& k,
                 const Rational& q) {
    const Rational phi = phi_eval(model, n, h);
    if (k < phi) throw DomainError("r_value needs k >= phi(h)");
    return (k + phi * q) / (phi * (1 + q));
}

DigitLaw::DigitLaw(Rational phi, Rational q, const Cdf& cdf)
    : phi_(std::move(phi)), q_(std::move(q)), cdf_(&cdf), k_min_(ceil(phi_)) {
    if (phi_ <= 0) throw DomainError("digit law needs phi > 0");
    if (q_ < 0) throw DomainError("digit law needs q >= 0");
    if (k_min_ < 1) k_min_ = 1;
}

Rational DigitLaw::survival_geq(const BigInt& k) const {
    if (k < k_min_) return 1;
    return (*cdf_)(delta(phi_, Rational(k), q_));
}

Rational DigitLaw::mass(const BigInt& k) const {
    if (k < k_min_) return 0;
    return survival_geq(k) - survival_geq(k + 1);
}

bool DigitLaw::proper() const { return survival_geq(k_min_) == 1; }

DigitLaw digit_law(const OppenheimModel& model, std::size_t n, const BigInt& h) {
    DigitLaw law(phi_eval(model, n, h), model.q(n), model.dist.at(n));
    if (!law.proper()) {
        throw ImproperModel("conditional digit law at n = " + std::to_string(n) + ", h = " + to_string(h) +
                            " has total mass " + to_string(law.survival_geq(law.k_min())) + " < 1");
    }
    return law;
}

DigitLaw initial_digit_law(const OppenheimModel& model) { return DigitLaw(1, 0, model.dist.at(0)); }

bool lattice_integrality_check(const OppenheimModel& model, const GoodSequence& lattice, std::int64_t x,
                               const BigInt& h, std::size_t n) {
    if (!lattice.contains(x)) throw DomainError("integrality check needs x in the lattice (x = " + std::to_string(x) + ")");
    const Rational phi = phi_eval(model, n, h);
    const Rational value = x * phi + (x - 1) * model.q(n) * phi;
    return is_integer(value);
}

LatticeCertificate certify_lattice(const OppenheimModel& model, const GoodSequence& lattice) {
    const std::size_t positions = std::min<std::size_t>(std::max<std::size_t>(2 * model.period(), 8), 64);
    constexpr int kStates = 64;
    constexpr int kPoints = 24;
    for (std::size_t n = 1; n <= positions; ++n) {
        for (int h = 1; h <= kStates; ++h) {
            for (int j = 1; j <= kPoints; ++j) {
                const std::int64_t x = lattice[j];
                if (!lattice_integrality_check(model, lattice, x, BigInt(h), n)) {
                    std::ostringstream os;
                    os << "x phi_n(h) + (x-1) q_n phi_n(h) is not an integer at n = " << n << ", h = " << h
                       << ", x = " << x;
                    return {false, os.str()};
                }
            }
        }
    }
    std::ostringstream os;
    os << "integral on " << positions << " positions x " << kStates << " states x " << kPoints << " lattice points";
    return {true, os.str()};
}

Rational survival_at_lattice(const Cdf& cdf, std::int64_t lambda) {
    if (lambda == 0) return 1;
    return cdf(Rational(1, lambda));
}

Rational t_density(const OppenheimModel& model, const GoodSequence& lattice, std::int64_t s,
                   DensityConvention convention, std::size_t n) {
    const Cdf& f = model.dist.at(n);
    if (convention == DensityConvention::paper) {
        if (s < 1) throw DomainError("paper-convention density is indexed by s >= 1");
        return survival_at_lattice(f, lattice[s - 1]) - survival_at_lattice(f, lattice[s]);
    }
    if (s < 0) throw DomainError("floor-convention density is indexed by s >= 0");
    return survival_at_lattice(f, lattice[s]) - survival_at_lattice(f, lattice[s + 1]);
}

// ---------------------------------------------------------------------------
// Validation

bool ValidationReport::ok() const {
    return std::all_of(findings.begin(), findings.end(), [](const Finding& f) { return f.pass; });
}

bool ValidationReport::proper() const {
    for (const char* name : {"dist.endpoints", "dist.monotone", "mass.complete"}) {
        const Finding* f = find(name);
        if (f != nullptr && !f->pass) return false;
    }
    return true;
}

const ValidationReport::Finding* ValidationReport::find(const std::string& check) const {
    for (const auto& f : findings)
        if (f.check == check) return &f;
    return nullptr;
}

namespace {

bool monotone_on_grid(const Cdf& f, std::string& detail) {
    switch (f.kind()) {
    case Cdf::Kind::linear:
        return true;
    case Cdf::Kind::piecewise_linear:
        for (std::size_t i = 1; i < f.knots().size(); ++i) {
            if (f.knots()[i].value < f.knots()[i - 1].value) {
                detail = "knot values decrease at t = " + to_string(f.knots()[i].t);
                return false;
            }
        }
        return true;
    case Cdf::Kind::polynomial: {
        constexpr int kGrid = 1024;
        Rational prev = f(Rational(0));
        for (int i = 1; i <= kGrid; ++i) {
            const Rational t(i, kGrid);
            const Rational v = f(t);
            if (v < prev) {
                detail = "F decreases before t = " + to_string(t);
                return false;
            }
            prev = v;
        }
        return true;
    }
    }
    return true;
}

} // namespace

ValidationReport validate_model(const OppenheimModel& model) {
    ValidationReport report;
    auto add = [&](std::string check, bool pass, std::string detail) {
        report.findings.push_back({std::move(check), pass, std::move(detail)});
    };
    const std::size_t positions = std::min<std::size_t>(std::max<std::size_t>(2 * model.period(), 4), 64);
    constexpr int kStates = 16;

    try {
        {
            bool ok = true;
            std::string detail = "F(0) = 0 and F(1) = 1";
            for (std::size_t i = 0; i < model.dist.members().size(); ++i) {
                const Cdf& f = model.dist.members()[i];
                const Rational f0 = f(Rational(0));
                const Rational f1 = f(Rational(1));
                if (f0 != 0 || f1 != 1) {
                    ok = false;
                    detail = "F[" + std::to_string(i) + "](0) = " + to_string(f0) + ", F(1) = " + to_string(f1);
                    break;
                }
            }
            add("dist.endpoints", ok, detail);
        }
        {
            bool ok = true;
            std::string detail = "nondecreasing on [0,1]";
            for (const auto& f : model.dist.members()) {
                if (!monotone_on_grid(f, detail)) {
                    ok = false;
                    break;
                }
            }
            add("dist.monotone", ok, detail);
        }
        {
            const double bound = model.dist.ratio_bound();
            add("dist.ratio_bound", std::isfinite(bound),
                "sup_n limsup F_n(t)/t = " + std::to_string(bound));
            const double alpha = model.dist.alpha_limit();
            if (model.dist.identical()) {
                add("dist.alpha_limit", std::isfinite(alpha) && alpha == model.dist.members()[0].ratio_bound(),
                    "lim F(t)/t = " + std::to_string(alpha));
            }
        }
        {
            bool ok = true;
            std::string detail = "q_n >= 0 on probed positions";
            for (std::size_t n = 1; n <= positions && ok; ++n) {
                if (model.q(n) < 0) {
                    ok = false;
                    detail = "q_" + std::to_string(n) + " < 0";
                }
            }
            add("q.nonnegative", ok, detail);
            if (model.q.kind() == QSpec::Kind::lattice_periodic) {
                bool in = model.lattice.has_value();
                std::string d = in ? "q values lie in the lattice" : "lattice_periodic q needs an attached lattice";
                if (in) {
                    for (auto v : model.q.values()) {
                        if (!model.lattice->contains(v)) {
                            in = false;
                            d = "q value " + std::to_string(v) + " is not a lattice point";
                            break;
                        }
                    }
                }
                add("q.in_lattice", in, d);
            }
        }
        {
            bool ok = true;
            std::string detail = "delta strictly decreasing in k on probed states";
            for (std::size_t n = 1; n <= positions && ok; ++n) {
                for (int h = 1; h <= kStates && ok; ++h) {
                    const Rational phi = model.phi(n, h);
                    const BigInt k = ceil(phi);
                    if (!(delta(phi, Rational(k), model.q(n)) > delta(phi, Rational(k + 1), model.q(n)))) {
                        ok = false;
                        detail = "delta not decreasing at n = " + std::to_string(n) + ", h = " + std::to_string(h);
                    }
                }
            }
            add("delta.monotone", ok, detail);
        }
        {
            bool ok = true;
            std::string detail = "total conditional mass 1 on probed states";
            if (model.initial.rule == InitialDigit::Rule::virtual_zeroth && !initial_digit_law(model).proper()) {
                ok = false;
                detail = "ImproperModel: initial digit law has mass < 1";
            }
            for (std::size_t n = 1; n <= positions && ok; ++n) {
                for (int h = 1; h <= kStates && ok; ++h) {
                    const DigitLaw law(model.phi(n, h), model.q(n), model.dist.at(n));
                    const Rational total = law.survival_geq(law.k_min());
                    if (total != 1) {
                        ok = false;
                        detail = "ImproperModel: mass F(delta(h, k_min, q)) = " + to_string(total) + " at n = " +
                                 std::to_string(n) + ", h = " + std::to_string(h);
                    }
                }
            }
            add("mass.complete", ok, detail);
        }
        if (model.initial.rule == InitialDigit::Rule::fixed)
            add("initial.value", model.initial.value >= 1, "h_1 = " + to_string(model.initial.value));
        if (model.lattice) {
            add("lattice.gap_bound", true, "ell = " + std::to_string(model.lattice->gap_bound()));
        }
    } catch (const std::exception& e) {
        add("evaluation", false, e.what());
    }
    return report;
}

void require_proper(const OppenheimModel& model) {
    const ValidationReport report = validate_model(model);
    for (const auto& f : report.findings) {
        if (f.pass) continue;
        if (f.check == "mass.complete") throw ImproperModel(f.detail);
        throw ConfigError("model check " + f.check + " failed: " + f.detail);
    }
}

} // namespace oppenheim
