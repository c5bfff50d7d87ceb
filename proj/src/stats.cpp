#include "oppenheim/stats.hpp"

#include "oppenheim/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace oppenheim {

void CompensatedSum::add(double value) noexcept {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) compensation_ += (sum_ - t) + value;
    else compensation_ += (value - t) + sum_;
    sum_ = t;
}

// ---------------------------------------------------------------------------
// TrimAccumulator

TrimAccumulator::TrimAccumulator(std::size_t r) : r_(r) {
    if (r == 0) throw std::invalid_argument("trim order r must be positive");
    heap_.reserve(r);
}

void TrimAccumulator::observe(double value) {
    if (!std::isfinite(value) || value < 0) throw std::invalid_argument("observe needs a finite nonnegative value");
    ++count_;
    sum_.add(value);
    if (heap_.size() < r_) {
        heap_.push_back(value);
        std::push_heap(heap_.begin(), heap_.end(), std::greater<>{});
    } else if (value > heap_.front()) {
        std::pop_heap(heap_.begin(), heap_.end(), std::greater<>{});
        heap_.back() = value;
        std::push_heap(heap_.begin(), heap_.end(), std::greater<>{});
    }
}

std::vector<double> TrimAccumulator::maxima() const {
    std::vector<double> out(heap_);
    std::sort(out.begin(), out.end(), std::greater<>{});
    return out;
}

double TrimAccumulator::maximum(std::size_t k) const {
    if (k == 0 || k > heap_.size()) throw std::out_of_range("maximum(k) needs 1 <= k <= min(r, n)");
    return maxima()[k - 1];
}

double TrimAccumulator::trimmed_sum(std::size_t k) const {
    if (k > r_) throw std::out_of_range("trimmed_sum(k) needs k <= r");
    if (k >= count_) return 0.0;
    const std::vector<double> top = maxima();
    CompensatedSum removed;
    for (std::size_t i = 0; i < k; ++i) removed.add(top[i]);
    return std::max(0.0, sum() - removed.value());
}

// ---------------------------------------------------------------------------
// Normalizer

double Normalizer::A(double x) const { return x * std::log(x); }

double Normalizer::B(double x) const {
    if (!(x >= 0) || !std::isfinite(x)) throw DomainError("B(x) needs finite x >= 0");
    {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(x); it != cache_.end()) return it->second;
    }
    double y = 1.0;
    if (x > 0) {
        const double hi = std::max(std::exp(1.0), x) + 1.0;
        const double guess = x > std::exp(1.0) ? x / std::log(x) : 1.5;
        std::uintmax_t iterations = 200;
        y = boost::math::tools::newton_raphson_iterate(
            [x](double v) { return std::make_pair(v * std::log(v) - x, std::log(v) + 1.0); }, guess, 1.0, hi,
            std::numeric_limits<double>::digits - 2, iterations);
    }
    std::lock_guard lock(mutex_);
    cache_.emplace(x, y);
    return y;
}

double a_n(double n) { return n * std::log(n); }

double statistic(const TrimAccumulator& acc, StatisticKind kind, double p, std::optional<std::size_t> order) {
    if (acc.count() <= 1) throw DomainError("statistics need n >= 2");
    const std::size_t k = order.value_or(acc.order());
    const double a = a_n(static_cast<double>(acc.count()));
    switch (kind) {
    case StatisticKind::th1:
        return acc.trimmed_sum(1) / a;
    case StatisticKind::conv_r:
        return acc.trimmed_sum(k) / std::pow(a, p);
    case StatisticKind::max_ratio:
        return acc.maximum(k) / a;
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Quadrature helpers

namespace {

struct Integral {
    double value = 0;
    double error = 0;
};

/// Adaptive Gauss-Kronrod on [a, b] split at the given interior breakpoints.
Integral integrate(const std::function<double(double)>& f, double a, double b, std::vector<double> breaks,
                   double tol) {
    using boost::math::quadrature::gauss_kronrod;
    breaks.push_back(a);
    breaks.push_back(b);
    std::sort(breaks.begin(), breaks.end());
    Integral total;
    for (std::size_t i = 1; i < breaks.size(); ++i) {
        const double lo = std::max(a, breaks[i - 1]);
        const double hi = std::min(b, breaks[i]);
        if (!(hi > lo)) continue;
        double err = 0;
        total.value += gauss_kronrod<double, 61>::integrate(f, lo, hi, 20, tol, &err);
        total.error += err;
    }
    return total;
}

/// Kink locations of a piecewise CDF mapped through t -> u with t = e^{-u} (or a caller mapping).
std::vector<double> kinks(const Cdf& cdf, const std::function<double(double)>& to_u) {
    std::vector<double> out;
    if (cdf.kind() != Cdf::Kind::piecewise_linear) return out;
    for (const auto& k : cdf.knots()) {
        const double t = k.t.get_d();
        if (t > 0 && t < 1) out.push_back(to_u(t));
    }
    return out;
}

} // namespace

double centering_c(double n, const Cdf& cdf, double tau, CenteringMethod method) {
    if (!(n >= 2)) throw DomainError("centering_c needs n >= 2");
    if (!(tau > 0)) throw DomainError("centering_c needs tau > 0");
    const double log_n = std::log(n);
    const double top = tau * a_n(n);
    if (!(top >= 1)) throw DomainError("centering_c needs tau n log n >= 1");
    const bool closed = method == CenteringMethod::closed_form ||
                        (method == CenteringMethod::automatic && cdf.is_linear());
    if (closed) {
        if (!cdf.is_linear()) throw DomainError("closed-form centering is only available for linear F");
        return std::log(top) / log_n;
    }
    // int_1^{top} F(1/x) dx = int_{1/top}^1 F(y)/y^2 dy; with y = e^{-t} the
    // integrand becomes F(e^{-t}) e^{t} on [0, log top].
    const double upper = std::log(top);
    auto g = [&cdf](double t) { return cdf(std::exp(-t)) * std::exp(t); };
    const Integral integral =
        integrate(g, 0.0, upper, kinks(cdf, [](double t) { return -std::log(t); }), 1e-12);
    const double tolerance = 1e-8 * std::max(1.0, std::abs(integral.value));
    if (!(integral.error <= tolerance) || !std::isfinite(integral.value))
        throw QuadratureError("centering_c quadrature did not converge", integral.error);
    const double boundary = top * cdf(1.0 / top) - 1.0;
    return (-boundary + integral.value) / log_n;
}

MoriIntegral mori_J(double s, const Cdf& cdf, const Normalizer& normalizer) {
    if (!(s > 0)) throw DomainError("mori_J needs s > 0");
    MoriIntegral out;
    const double u0 = std::log(normalizer.B(1.0));
    constexpr double kCutoff = 600.0;
    out.cutoff = std::exp(kCutoff);
    // y = e^u: J_s = int_{u0}^inf s (F(t)/t)^s u^{-s} du with t = 1/A(y) = e^{-u}/u.
    auto g = [&cdf, s](double u) {
        const double t = std::exp(-u) / u;
        const double ratio = t >= 1.0 ? cdf(1.0) / t : cdf(t) / t;
        return s * std::pow(ratio, s) * std::pow(u, -s);
    };
    std::vector<double> breaks;
    for (double b = 1.0; b < kCutoff; b *= 2) breaks.push_back(b);
    for (double k : kinks(cdf, [](double t) {
             // Solve u e^u = 1/t for u by a few Newton steps.
             double u = std::max(0.5, std::log(1.0 / t));
             for (int i = 0; i < 60; ++i) u -= (u * std::exp(u) - 1.0 / t) / ((u + 1.0) * std::exp(u));
             return u;
         }))
        breaks.push_back(k);
    const Integral integral = integrate(g, u0, kCutoff, breaks, 1e-13);
    out.quadrature = integral.value;

    const Cdf::Leading lead = cdf.leading();
    const double t_cut = std::exp(-kCutoff) / kCutoff;
    if (lead.exponent == 1 && lead.coefficient > 0) {
        if (s <= 1.0) {
            out.finite = false;
            out.tail = std::numeric_limits<double>::infinity();
            out.tail_bound = out.tail;
        } else {
            out.finite = std::isfinite(lead.coefficient);
            out.tail = s * std::pow(lead.coefficient, s) * std::pow(kCutoff, 1.0 - s) / (s - 1.0);
            const double k = cdf.ratio_sup(t_cut);
            out.tail_bound = s * std::pow(k, s) * std::pow(kCutoff, 1.0 - s) / (s - 1.0);
        }
    } else {
        // F(t)/t -> 0 at least linearly: the tail integrand decays like e^{-s(j-1)u}.
        out.finite = true;
        out.tail = 0.0;
        out.tail_bound = 0.0;
    }
    out.estimate = out.quadrature + out.tail;
    return out;
}

double discretize(double value, const GoodSequence& lattice, Convention convention) {
    if (!(value >= 1.0) || !std::isfinite(value)) throw DomainError("discretize needs a finite value >= 1");
    if (convention == Convention::ceiling) return static_cast<double>(lattice_index(lattice, value).value);
    return static_cast<double>(lattice_floor(lattice, value).value);
}

// ---------------------------------------------------------------------------
// Checkpoints

CheckpointRecord make_checkpoint(const TrimAccumulator& acc, std::uint64_t path_id, double p, double c_n) {
    CheckpointRecord rec;
    rec.path_id = path_id;
    rec.n = acc.count();
    rec.sum = acc.sum();
    auto top = acc.maxima();
    if (top.size() > 3) top.resize(3);
    rec.maxima = std::move(top);
    rec.trimmed = acc.trimmed_sum();
    rec.stat_th1 = statistic(acc, StatisticKind::th1);
    rec.stat_conv = statistic(acc, StatisticKind::conv_r, p);
    rec.stat_maxratio = statistic(acc, StatisticKind::max_ratio);
    rec.c_n = c_n;
    return rec;
}

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string checkpoint_csv_header() {
    return "path_id,n,S_n,M1,M2,M3,trimmed_r,stat_th1,stat_conv,stat_maxratio,c_n";
}

std::string to_csv_row(const CheckpointRecord& r) {
    std::string out = std::to_string(r.path_id) + ',' + std::to_string(r.n) + ',' + format_double(r.sum);
    for (std::size_t k = 0; k < 3; ++k) {
        out += ',';
        if (k < r.maxima.size()) out += format_double(r.maxima[k]);
    }
    out += ',' + format_double(r.trimmed) + ',' + format_double(r.stat_th1) + ',' + format_double(r.stat_conv) +
           ',' + format_double(r.stat_maxratio) + ',' + format_double(r.c_n);
    return out;
}

} // namespace oppenheim
