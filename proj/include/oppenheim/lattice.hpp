#pragma once

#include <cstdint>
#include <vector>

namespace oppenheim {

/// A good sequence: strictly increasing, unbounded, lambda_j >= 1 for j >= 1,
/// with lambda_0 = 0. Values are integers.
///
/// Two kinds: arithmetic (lambda_j = kappa * j) and explicit (a finite prefix
/// followed by an affine tail lambda_{m+i} = lambda_m + i * tail_step).
class GoodSequence {
public:
    enum class Kind { arithmetic, explicit_list };

    static GoodSequence arithmetic(std::int64_t kappa);
    static GoodSequence explicit_list(std::vector<std::int64_t> prefix, std::int64_t tail_step);
    static GoodSequence naturals() { return arithmetic(1); }

    Kind kind() const noexcept { return kind_; }
    std::int64_t kappa() const noexcept { return kappa_; }
    const std::vector<std::int64_t>& prefix() const noexcept { return prefix_; }
    std::int64_t tail_step() const noexcept { return tail_step_; }

    /// lambda_j for j >= 0.
    std::int64_t operator[](std::int64_t j) const;

    /// sup_j (lambda_{j+1} - lambda_j), including the first gap lambda_1 - lambda_0.
    std::int64_t gap_bound() const noexcept { return gap_bound_; }

    /// Index j >= 1 with lambda_j == x, or -1.
    std::int64_t index_of(std::int64_t x) const;
    bool contains(std::int64_t x) const { return index_of(x) >= 1; }

    bool operator==(const GoodSequence&) const = default;

private:
    GoodSequence() = default;

    Kind kind_ = Kind::arithmetic;
    std::int64_t kappa_ = 1;
    std::vector<std::int64_t> prefix_;
    std::int64_t tail_step_ = 1;
    std::int64_t gap_bound_ = 1;
};

struct LatticePoint {
    std::int64_t index;
    std::int64_t value;
};

/// The unique j with lambda_{j-1} < u <= lambda_j. Closed form for arithmetic
/// sequences, galloping + binary search otherwise. Throws DomainError for u < 1.
LatticePoint lattice_index(const GoodSequence& lattice, double u);

/// Largest j >= 0 with lambda_j <= u (u >= 0).
LatticePoint lattice_floor(const GoodSequence& lattice, double u);

} // namespace oppenheim
