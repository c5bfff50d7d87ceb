#pragma once

#include "oppenheim/lattice.hpp"
#include "oppenheim/model.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace oppenheim {

/// Running sum with Neumaier compensation.
class CompensatedSum {
public:
    void add(double value) noexcept;
    double value() const noexcept { return sum_ + compensation_; }

private:
    double sum_ = 0;
    double compensation_ = 0;
};

/// Streaming S_n together with the r largest observations (multiset semantics:
/// duplicates occupy separate slots).
class TrimAccumulator {
public:
    explicit TrimAccumulator(std::size_t r);

    /// Throws std::invalid_argument for negative or non-finite values.
    void observe(double value);

    std::size_t order() const noexcept { return r_; }
    std::uint64_t count() const noexcept { return count_; }
    double sum() const noexcept { return sum_.value(); }

    /// M_n^(k), 1 <= k <= min(r, n).
    double maximum(std::size_t k) const;
    /// M_n^(1) >= ... >= M_n^(min(r,n)).
    std::vector<double> maxima() const;
    /// S_n minus the k largest observations, k <= r; 0 when k >= n.
    double trimmed_sum(std::size_t k) const;
    double trimmed_sum() const { return trimmed_sum(r_); }

private:
    std::size_t r_;
    std::uint64_t count_ = 0;
    CompensatedSum sum_;
    std::vector<double> heap_; // min-heap of the current top-r
};

/// A(x) = x log x on [1, inf) and its inverse B.
class Normalizer {
public:
    double A(double x) const;
    /// Root of y log y = x, y >= 1; results are memoized.
    double B(double x) const;

private:
    mutable std::mutex mutex_;
    mutable std::map<double, double> cache_;
};

/// a_n = n log n.
double a_n(double n);

enum class StatisticKind {
    th1,      ///< (S_n - M_n^(1)) / a_n
    conv_r,   ///< ^(k)S_n / a_n^p
    max_ratio ///< M_n^(k) / a_n
};

/// `order` selects k for conv_r and max_ratio (defaults to the accumulator's r).
/// Throws DomainError for n <= 1.
double statistic(const TrimAccumulator& acc, StatisticKind kind, double p = 1.0,
                 std::optional<std::size_t> order = std::nullopt);

enum class CenteringMethod { automatic, closed_form, quadrature };

/// Finite-n centering c_n = -(1/log n)(tau a F(1/(tau a)) - 1) + (1/log n) int_1^{tau a} F(1/x) dx,
/// a = n log n. For linear F the closed form 1 + (log log n + log tau)/log n
/// is used; otherwise adaptive quadrature. Throws QuadratureError when the quadrature does not converge.
double centering_c(double n, const Cdf& cdf, double tau = 1.0, CenteringMethod method = CenteringMethod::automatic);

struct MoriIntegral {
    double estimate = 0;   ///< quadrature part + asymptotic tail
    double quadrature = 0; ///< integral up to the cutoff
    double tail = 0;       ///< asymptotic tail beyond the cutoff
    double tail_bound = 0; ///< rigorous upper bound on the tail (inf when divergent)
    double cutoff = 0;     ///< cutoff in y
    bool finite = false;
};

/// J_s = int_{B(1)}^inf s y^{s-1} F(1/A(y))^s dy.
MoriIntegral mori_J(double s, const Cdf& cdf, const Normalizer& normalizer);

enum class Convention { ceiling, floor };

/// Ceiling: smallest lambda >= value. Floor: largest lambda <= value (lambda_0 = 0
/// for values below lambda_1). Throws DomainError for value < 1.
double discretize(double value, const GoodSequence& lattice, Convention convention);

struct CheckpointRecord {
    std::uint64_t path_id = 0;
    std::uint64_t n = 0;
    double sum = 0;
    std::vector<double> maxima; ///< M^(1..min(r,3))
    double trimmed = 0;         ///< ^(r)S_n
    double stat_th1 = 0;
    double stat_conv = 0;
    double stat_maxratio = 0;
    double c_n = 0;
};

/// Snapshot of `acc` at its current n.
CheckpointRecord make_checkpoint(const TrimAccumulator& acc, std::uint64_t path_id, double p, double c_n);

/// path_id,n,S_n,M1,M2,M3,trimmed_r,stat_th1,stat_conv,stat_maxratio,c_n
std::string checkpoint_csv_header();
std::string to_csv_row(const CheckpointRecord& record);

/// Locale-independent, 17 significant digits.
std::string format_double(double value);

} // namespace oppenheim
