#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace oppenheim {

/// Dvoretzky-Kiefer-Wolfowitz half-width sqrt(ln(2/delta) / (2N)).
double dkw_epsilon(std::size_t samples, double delta);

/// Standard deviation of a binomial proportion.
double binomial_sigma(double p, std::size_t samples);

struct ChiSquareResult {
    double statistic = 0;
    double dof = 0;
    double p_value = 1;

    bool rejected(double significance) const { return p_value < significance; }
};

/// Pearson goodness of fit of observed counts against cell probabilities (which must sum to 1).
ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed, std::span<const double> probabilities);

/// Pearson test of independence on a contingency table; all-zero rows and columns are dropped.
ChiSquareResult chi_square_independence(const std::vector<std::vector<std::uint64_t>>& table);

/// Spearman rank correlation (average ranks for ties).
double spearman_rho(std::span<const double> x, std::span<const double> y);

double median(std::vector<double> values);

} // namespace oppenheim
