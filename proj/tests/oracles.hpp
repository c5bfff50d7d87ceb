#pragma once

// Independent reference computations used by the tests. None of these call
// into the library's algorithms; they re-derive expected values by brute
// force, sorting, bisection or closed forms.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

namespace oracle {

using Q = mpq_class;
using Z = mpz_class;

/// phi (1 + q) / (k + phi q), written out directly.
inline Q delta(const Q& phi, const Q& k, const Q& q) {
    Q d = phi * (1 + q) / (k + phi * q);
    d.canonicalize();
    return d;
}

/// Lüroth digit law with linear F: mass 1/k - 1/(k+1).
inline Q luroth_mass(long k) { return Q(1, k) - Q(1, k + 1); }

/// Engel, linear F, state h: P(B >= j) = h / j for j >= h.
inline Q engel_survival(long h, long j) {
    if (j <= h) return Q(1);
    Q s(h, j);
    s.canonicalize();
    return s;
}

/// Smallest k >= kmin whose survival drops to u or below at k+1, by linear scan.
inline long invert_by_scan(const std::function<Q(long)>& survival_geq, long kmin, const Q& u) {
    long k = kmin;
    while (survival_geq(k + 1) >= u) ++k;
    return k;
}

/// The r largest values (descending) and the sum of the rest, by full sort.
struct TopR {
    std::vector<double> top;
    double rest = 0;
};
inline TopR top_r_by_sort(std::vector<double> v, std::size_t r) {
    std::sort(v.begin(), v.end(), std::greater<>());
    TopR out;
    const std::size_t k = std::min(r, v.size());
    out.top.assign(v.begin(), v.begin() + static_cast<long>(k));
    // Sum the rest smallest-first for accuracy.
    for (std::size_t i = v.size(); i > k; --i) out.rest += v[i - 1];
    return out;
}

/// 1 + (log log n + log tau) / log n.
inline double centering_linear(double n, double tau = 1.0) {
    return 1.0 + (std::log(std::log(n)) + std::log(tau)) / std::log(n);
}

/// Root of y log y = x by bisection on [1, x + 2].
inline double inverse_xlogx(double x) {
    double lo = 1.0, hi = x + 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (mid * std::log(mid) < x ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Smallest lattice value >= u by linear scan over values(j), j = 1, 2, ...
inline std::int64_t lattice_ceiling_scan(const std::function<std::int64_t(std::int64_t)>& values, double u,
                                         std::int64_t* index = nullptr) {
    for (std::int64_t j = 1;; ++j) {
        if (static_cast<double>(values(j)) >= u) {
            if (index) *index = j;
            return values(j);
        }
    }
}

/// Upper-tail p-value of a chi-square with even degrees of freedom (closed form).
inline double chi_square_sf_even(double x, int dof) {
    double term = 1.0, sum = 1.0;
    for (int i = 1; i < dof / 2; ++i) {
        term *= (x / 2) / i;
        sum += term;
    }
    return std::exp(-x / 2) * sum;
}

} // namespace oracle
