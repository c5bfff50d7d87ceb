#pragma once

#include "oppenheim/rational.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace oppenheim::classic {

enum class Scheme { luroth, engel, sylvester };

std::string to_string(Scheme scheme);
Scheme parse_scheme(const std::string& name);

struct DigitSequence {
    Scheme scheme = Scheme::luroth;
    std::vector<BigInt> digits;
    /// The expansion is finite and `digits` holds all of it.
    bool terminated = false;
};

/// Digit algorithm for 0 < x < 1: d = floor(1/x) + 1, except that an
/// integer 1/x ends the expansion with d = 1/x. Throws DomainError outside (0,1).
DigitSequence expand(Scheme scheme, const Rational& x, std::size_t max_digits);

/// Partial sum of the first k series terms.
Rational reconstruct(Scheme scheme, const std::vector<BigInt>& digits, std::size_t k);

/// Upper bound on x - reconstruct(k) for a non-terminated expansion (k >= 1).
Rational remainder_bound(Scheme scheme, const std::vector<BigInt>& digits, std::size_t k);

/// Framework ratios R_n of the deterministic trajectory (q == 0):
/// luroth R_n = B_{n+1} with B = d - 1; engel d_{n+1}/d_n; sylvester d_{n+1}/(d_n + d_n^2).
std::vector<Rational> ratio_stream(Scheme scheme, const std::vector<BigInt>& digits);

/// Classical Lüroth digit d (>= 2) to the framework digit B = d - 1 (>= 1), and back.
inline BigInt luroth_to_framework(const BigInt& d) { return d - 1; }
inline BigInt framework_to_luroth(const BigInt& b) { return b + 1; }

} // namespace oppenheim::classic
