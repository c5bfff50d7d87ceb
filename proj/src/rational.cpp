#include "oppenheim/rational.hpp"

#include "oppenheim/errors.hpp"

#include <cctype>
#include <cmath>

namespace oppenheim {

namespace {

bool valid_integer(std::string_view s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

std::string strip_plus(std::string_view s) {
    return std::string(!s.empty() && s[0] == '+' ? s.substr(1) : s);
}

} // namespace

Rational parse_rational(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    const auto slash = text.find('/');
    const auto num = text.substr(0, slash);
    const auto den = slash == std::string_view::npos ? std::string_view{"1"} : text.substr(slash + 1);
    if (!valid_integer(num) || !valid_integer(den) || den[0] == '-')
        throw ConfigError("malformed rational '" + std::string(text) + "' (expected p/q)");
    BigInt n(strip_plus(num), 10);
    BigInt d(strip_plus(den), 10);
    if (d == 0) throw ConfigError("rational '" + std::string(text) + "' has zero denominator");
    Rational r(n, d);
    r.canonicalize();
    return r;
}

std::string to_string(const Rational& value) { return value.get_str(10); }
std::string to_string(const BigInt& value) { return value.get_str(10); }

BigInt floor(const Rational& value) {
    BigInt out;
    mpz_fdiv_q(out.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
    return out;
}

BigInt ceil(const Rational& value) {
    BigInt out;
    mpz_cdiv_q(out.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
    return out;
}

bool is_integer(const Rational& value) { return value.get_den() == 1; }

Rational exact(double value) {
    if (!std::isfinite(value)) throw DomainError("non-finite value has no exact rational form");
    return Rational(value);
}

double to_double(const Rational& value) { return value.get_d(); }

} // namespace oppenheim
