#include "oppenheim/classic.hpp"

#include "oppenheim/errors.hpp"

namespace oppenheim::classic {

std::string to_string(Scheme scheme) {
    switch (scheme) {
    case Scheme::luroth: return "luroth";
    case Scheme::engel: return "engel";
    case Scheme::sylvester: return "sylvester";
    }
    return "luroth";
}

Scheme parse_scheme(const std::string& name) {
    if (name == "luroth") return Scheme::luroth;
    if (name == "engel") return Scheme::engel;
    if (name == "sylvester") return Scheme::sylvester;
    throw ConfigError("unknown scheme '" + name + "' (expected luroth|engel|sylvester)");
}

DigitSequence expand(Scheme scheme, const Rational& x_in, std::size_t max_digits) {
    if (x_in <= 0 || x_in >= 1) throw DomainError("expansion needs 0 < x < 1, got " + oppenheim::to_string(x_in));
    DigitSequence out;
    out.scheme = scheme;
    Rational x = x_in;
    while (out.digits.size() < max_digits) {
        const Rational recip = 1 / x;
        if (is_integer(recip)) {
            out.digits.push_back(recip.get_num());
            out.terminated = true;
            break;
        }
        const BigInt d = floor(recip) + 1;
        out.digits.push_back(d);
        switch (scheme) {
        case Scheme::luroth: x = d * (d - 1) * x - (d - 1); break;
        case Scheme::engel: x = d * x - 1; break;
        case Scheme::sylvester: x = x - Rational(1) / d; break;
        }
    }
    return out;
}

Rational reconstruct(Scheme scheme, const std::vector<BigInt>& digits, std::size_t k) {
    if (k > digits.size()) k = digits.size();
    Rational sum = 0;
    Rational scale = 1;
    for (std::size_t i = 0; i < k; ++i) {
        const BigInt& d = digits[i];
        switch (scheme) {
        case Scheme::luroth:
            sum += scale / d;
            scale /= d * (d - 1);
            break;
        case Scheme::engel:
            scale /= d;
            sum += scale;
            break;
        case Scheme::sylvester:
            sum += Rational(1) / d;
            break;
        }
    }
    return sum;
}

Rational remainder_bound(Scheme scheme, const std::vector<BigInt>& digits, std::size_t k) {
    if (k == 0 || k > digits.size()) throw DomainError("remainder_bound needs 1 <= k <= digit count");
    switch (scheme) {
    case Scheme::luroth: {
        // remainder = x_{k+1} prod_{j<=k} 1/(d_j (d_j - 1)), x_{k+1} < 1
        Rational scale = 1;
        for (std::size_t i = 0; i < k; ++i) scale /= digits[i] * (digits[i] - 1);
        return scale;
    }
    case Scheme::engel: {
        // remainder = x_{k+1} / (d_1 ... d_k), x_{k+1} < 1/(d_k - 1)
        Rational scale = 1;
        for (std::size_t i = 0; i < k; ++i) scale /= digits[i];
        return scale / (digits[k - 1] - 1);
    }
    case Scheme::sylvester: {
        const BigInt& d = digits[k - 1];
        return Rational(1) / (d * (d - 1));
    }
    }
    return 1;
}

std::vector<Rational> ratio_stream(Scheme scheme, const std::vector<BigInt>& digits) {
    std::vector<Rational> out;
    if (digits.size() < 2) return out;
    for (std::size_t i = 0; i + 1 < digits.size(); ++i) {
        const BigInt& a = digits[i];
        const BigInt& b = digits[i + 1];
        switch (scheme) {
        case Scheme::luroth: out.emplace_back(luroth_to_framework(b)); break;
        case Scheme::engel: out.emplace_back(b, a); break;
        case Scheme::sylvester: out.emplace_back(b, a + a * a); break;
        }
        out.back().canonicalize();
    }
    return out;
}

} // namespace oppenheim::classic
