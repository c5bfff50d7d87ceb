#include "oppenheim/lattice.hpp"

#include "oppenheim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace oppenheim {

namespace {

// Beyond this the int64 lattice values would overflow.
constexpr double kMaxLatticeValue = 9.0e18;

} // namespace

GoodSequence GoodSequence::arithmetic(std::int64_t kappa) {
    if (kappa < 1) throw ConfigError("arithmetic good sequence needs kappa >= 1");
    GoodSequence s;
    s.kind_ = Kind::arithmetic;
    s.kappa_ = kappa;
    s.tail_step_ = kappa;
    s.gap_bound_ = kappa;
    return s;
}

GoodSequence GoodSequence::explicit_list(std::vector<std::int64_t> prefix, std::int64_t tail_step) {
    if (prefix.empty()) throw ConfigError("explicit good sequence needs at least one element");
    if (tail_step < 1) throw ConfigError("explicit good sequence needs tail_step >= 1");
    if (prefix.front() < 1) throw ConfigError("good sequence needs lambda_1 >= 1");
    std::int64_t gap = prefix.front();
    for (std::size_t i = 1; i < prefix.size(); ++i) {
        if (prefix[i] <= prefix[i - 1]) throw ConfigError("good sequence must be strictly increasing");
        gap = std::max(gap, prefix[i] - prefix[i - 1]);
    }
    GoodSequence s;
    s.kind_ = Kind::explicit_list;
    s.kappa_ = 0;
    s.prefix_ = std::move(prefix);
    s.tail_step_ = tail_step;
    s.gap_bound_ = std::max(gap, tail_step);
    return s;
}

std::int64_t GoodSequence::operator[](std::int64_t j) const {
    if (j < 0) throw DomainError("negative lattice index");
    if (j == 0) return 0;
    if (kind_ == Kind::arithmetic) return kappa_ * j;
    const auto m = static_cast<std::int64_t>(prefix_.size());
    if (j <= m) return prefix_[static_cast<std::size_t>(j - 1)];
    return prefix_.back() + (j - m) * tail_step_;
}

std::int64_t GoodSequence::index_of(std::int64_t x) const {
    if (x < 1) return -1;
    if (kind_ == Kind::arithmetic) return x % kappa_ == 0 ? x / kappa_ : -1;
    const LatticePoint p = lattice_index(*this, static_cast<double>(x));
    return p.value == x ? p.index : -1;
}

LatticePoint lattice_index(const GoodSequence& lattice, double u) {
    if (!(u >= 1.0)) throw DomainError("lattice_index needs u >= 1, got " + std::to_string(u));
    if (u > kMaxLatticeValue) throw DomainError("lattice_index argument too large");
    if (lattice.kind() == GoodSequence::Kind::arithmetic) {
        const std::int64_t k = lattice.kappa();
        auto j = static_cast<std::int64_t>(std::ceil(u / static_cast<double>(k)));
        // Repair rounding of u / k.
        while (static_cast<double>(k * j) < u) ++j;
        while (j > 1 && static_cast<double>(k * (j - 1)) >= u) --j;
        return {j, k * j};
    }
    // Galloping: find hi with lambda_hi >= u, then binary search on (lo, hi].
    std::int64_t lo = 0;
    std::int64_t hi = 1;
    while (static_cast<double>(lattice[hi]) < u) {
        lo = hi;
        hi *= 2;
    }
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (static_cast<double>(lattice[mid]) >= u) hi = mid;
        else lo = mid;
    }
    return {hi, lattice[hi]};
}

LatticePoint lattice_floor(const GoodSequence& lattice, double u) {
    if (!(u >= 0.0)) throw DomainError("lattice_floor needs u >= 0");
    if (u < static_cast<double>(lattice[1])) return {0, 0};
    const LatticePoint up = lattice_index(lattice, u);
    if (static_cast<double>(up.value) == u) return up;
    return {up.index - 1, lattice[up.index - 1]};
}

} // namespace oppenheim
