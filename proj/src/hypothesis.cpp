#include "oppenheim/hypothesis.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace oppenheim {

double dkw_epsilon(std::size_t samples, double delta) {
    if (samples == 0 || !(delta > 0 && delta < 1)) throw std::invalid_argument("dkw_epsilon needs N > 0, 0 < delta < 1");
    return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(samples)));
}

double binomial_sigma(double p, std::size_t samples) {
    return std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
}

namespace {

double upper_tail(double statistic, double dof) {
    if (dof < 1) return 1.0;
    const boost::math::chi_squared dist(dof);
    return boost::math::cdf(boost::math::complement(dist, statistic));
}

} // namespace

ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed, std::span<const double> probabilities) {
    if (observed.size() != probabilities.size() || observed.size() < 2)
        throw std::invalid_argument("chi_square_gof needs matching cell vectors with >= 2 cells");
    const double total = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::uint64_t{0}));
    ChiSquareResult out;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double expected = total * probabilities[i];
        if (!(expected > 0)) throw std::invalid_argument("chi_square_gof needs positive cell probabilities");
        const double d = static_cast<double>(observed[i]) - expected;
        out.statistic += d * d / expected;
    }
    out.dof = static_cast<double>(observed.size() - 1);
    out.p_value = upper_tail(out.statistic, out.dof);
    return out;
}

ChiSquareResult chi_square_independence(const std::vector<std::vector<std::uint64_t>>& table_in) {
    std::vector<std::vector<double>> table;
    for (const auto& row : table_in) {
        if (std::any_of(row.begin(), row.end(), [](auto v) { return v > 0; }))
            table.emplace_back(row.begin(), row.end());
    }
    if (table.empty()) throw std::invalid_argument("empty contingency table");
    std::size_t cols = table.front().size();
    std::vector<double> col_sum(cols, 0.0);
    for (const auto& row : table) {
        if (row.size() != cols) throw std::invalid_argument("ragged contingency table");
        for (std::size_t j = 0; j < cols; ++j) col_sum[j] += row[j];
    }
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < cols; ++j)
        if (col_sum[j] > 0) keep.push_back(j);

    double total = 0;
    std::vector<double> row_sum;
    for (const auto& row : table) {
        row_sum.push_back(std::accumulate(row.begin(), row.end(), 0.0));
        total += row_sum.back();
    }
    ChiSquareResult out;
    for (std::size_t i = 0; i < table.size(); ++i) {
        for (std::size_t j : keep) {
            const double expected = row_sum[i] * col_sum[j] / total;
            const double d = table[i][j] - expected;
            out.statistic += d * d / expected;
        }
    }
    out.dof = static_cast<double>((table.size() - 1) * (keep.size() - 1));
    out.p_value = upper_tail(out.statistic, out.dof);
    return out;
}

namespace {

std::vector<double> ranks(std::span<const double> x) {
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) out[order[k]] = avg;
        i = j + 1;
    }
    return out;
}

} // namespace

double spearman_rho(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman_rho needs equal sizes >= 2");
    const auto rx = ranks(x);
    const auto ry = ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median of an empty sample");
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

} // namespace oppenheim
