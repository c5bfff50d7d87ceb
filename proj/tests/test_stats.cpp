#include "oracles.hpp"

#include "oppenheim/errors.hpp"
#include "oppenheim/hypothesis.hpp"
#include "oppenheim/stats.hpp"

#include <doctest.h>

#include <random>

using namespace oppenheim;

TEST_CASE("top-r accumulator at the worked points") {
    TrimAccumulator two(2);
    for (double v : {5.0, 1.0, 7.0, 3.0}) two.observe(v);
    CHECK(two.maxima() == std::vector<double>{7.0, 5.0});
    CHECK(two.trimmed_sum() == 4.0);
    CHECK(two.sum() == 16.0);

    TrimAccumulator one(1);
    for (int i = 0; i < 3; ++i) one.observe(2.0);
    CHECK(one.maximum(1) == 2.0);
    CHECK(one.trimmed_sum() == 4.0);

    CHECK_THROWS_AS(one.observe(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(one.observe(std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(one.observe(INFINITY), std::invalid_argument);
}

TEST_CASE("top-r accumulator equals the full-sort oracle") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t len = std::uniform_int_distribution<std::size_t>(1, 400)(rng);
        const std::size_t r = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
        // Integer-valued heavy-tailed data (many ties) keeps every sum exact.
        std::vector<double> v;
        for (std::size_t i = 0; i < len; ++i) v.push_back(std::floor(1.0 / (1.0 - std::generate_canonical<double, 53>(rng))));
        TrimAccumulator acc(r);
        for (double x : v) acc.observe(x);
        const auto expected = oracle::top_r_by_sort(v, r);
        CHECK(acc.maxima() == expected.top);
        CHECK(acc.trimmed_sum() == expected.rest);
    }
}

TEST_CASE("compensated sum") {
    CompensatedSum s;
    s.add(1e16);
    for (int i = 0; i < 10; ++i) s.add(1.0);
    s.add(-1e16);
    CHECK(s.value() == 10.0);
}

TEST_CASE("statistics") {
    TrimAccumulator acc(2);
    for (double v : {4.0, 3.0, 3.0}) acc.observe(v);
    const double a3 = 3 * std::log(3.0);
    CHECK(statistic(acc, StatisticKind::th1) == doctest::Approx(6.0 / a3));
    CHECK(statistic(acc, StatisticKind::conv_r, 2.5) == doctest::Approx(3.0 / std::pow(a3, 2.5)));
    CHECK(statistic(acc, StatisticKind::max_ratio, 1.0, 1) == doctest::Approx(4.0 / a3));
    CHECK(a_n(std::exp(2.0)) == doctest::Approx(2 * std::exp(2.0)));

    TrimAccumulator all(2);
    all.observe(5.0);
    all.observe(5.0);
    CHECK(statistic(all, StatisticKind::conv_r, 2.5) == 0.0);
    CHECK(statistic(all, StatisticKind::max_ratio) == doctest::Approx(5.0 / (2 * std::log(2.0))));

    TrimAccumulator lone(1);
    lone.observe(1.0);
    CHECK_THROWS_AS(statistic(lone, StatisticKind::th1), DomainError);
}

TEST_CASE("centering c_n") {
    const Cdf linear = Cdf::linear();
    CHECK(centering_c(1e6, linear) == doctest::Approx(1.19006).epsilon(1e-5));
    CHECK(centering_c(1e6, linear) == doctest::Approx(oracle::centering_linear(1e6)).epsilon(1e-14));
    CHECK(centering_c(std::exp(std::exp(1.0)), linear) == doctest::Approx(1.0 + 1.0 / std::exp(1.0)));
    for (double n : {10.0, 1e3, 1e4, 1e6, 1e9})
        for (double tau : {0.5, 1.0, 3.0})
            CHECK(std::abs(centering_c(n, linear, tau, CenteringMethod::quadrature) -
                           oracle::centering_linear(n, tau)) <= 1e-6);

    // F(t) = 2t - t^2: c_n = (2 log M - 2 + 2/M) / log n with M = tau n log n.
    const Cdf bump = Cdf::polynomial({Rational(0), Rational(2), Rational(-1)});
    for (double n : {1e3, 1e6}) {
        const double M = n * std::log(n);
        CHECK(centering_c(n, bump) == doctest::Approx((2 * std::log(M) - 2 + 2 / M) / std::log(n)).epsilon(1e-9));
    }
    const Cdf kinked = Cdf::piecewise_linear({{Rational(0), Rational(0)}, {Rational(1, 10), Rational(1, 5)}, {Rational(1), Rational(1)}});
    CHECK(std::isfinite(centering_c(1e6, kinked)));
    CHECK_THROWS_AS(centering_c(1e6, bump, 1.0, CenteringMethod::closed_form), DomainError);
    CHECK_THROWS_AS(centering_c(1.0, linear), DomainError);
}

TEST_CASE("normalizer and Mori integrals") {
    const Normalizer norm;
    const double b1 = norm.B(1.0);
    CHECK(std::abs(b1 - oracle::inverse_xlogx(1.0)) <= 1e-12);
    CHECK(std::abs(b1 - 1.76322) <= 1e-5);
    for (double y : {1.5, 10.0, 1e5}) CHECK(norm.B(norm.A(y)) == doctest::Approx(y).epsilon(1e-12));

    const Cdf linear = Cdf::linear();
    const double closed = 2.0 / std::log(oracle::inverse_xlogx(1.0));
    const MoriIntegral j2 = mori_J(2, linear, norm);
    CHECK(j2.finite);
    CHECK(std::abs(j2.estimate - closed) <= 1e-4 * closed);
    CHECK(j2.estimate == doctest::Approx(3.5266).epsilon(1e-4));
    CHECK_FALSE(mori_J(1, linear, norm).finite);

    // 1 <= F(t)/t <= 2 for F(t) = t(2 - t), so J2 lies between the linear value and four times it.
    const Cdf bump = Cdf::polynomial({Rational(0), Rational(2), Rational(-1)});
    const MoriIntegral b2 = mori_J(2, bump, norm);
    CHECK(b2.finite);
    CHECK(b2.estimate > closed);
    CHECK(b2.estimate <= 4 * closed);
    CHECK(std::isfinite(b2.tail_bound));
    CHECK_FALSE(mori_J(1, bump, norm).finite);

    // F vanishing to second order near 0 makes J1 finite.
    const Cdf square = Cdf::polynomial({Rational(0), Rational(0), Rational(1)});
    CHECK(mori_J(1, square, norm).finite);
}

TEST_CASE("discretize") {
    const auto nat = GoodSequence::naturals();
    const auto three = GoodSequence::arithmetic(3);
    CHECK(discretize(7.3, nat, Convention::ceiling) == 8);
    CHECK(discretize(7.3, nat, Convention::floor) == 7);
    CHECK(discretize(7.0, three, Convention::ceiling) == 9);
    CHECK(discretize(7.0, three, Convention::floor) == 6);
    CHECK(std::abs(discretize(7.0, three, Convention::ceiling) - 7.0) < three.gap_bound());
    CHECK_THROWS_AS(discretize(0.5, nat, Convention::floor), DomainError);
}

TEST_CASE("checkpoint CSV") {
    CHECK(checkpoint_csv_header() == "path_id,n,S_n,M1,M2,M3,trimmed_r,stat_th1,stat_conv,stat_maxratio,c_n");
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(2.0) == "2");
    TrimAccumulator acc(2);
    for (double v : {1.0, 4.0, 2.0}) acc.observe(v);
    const auto rec = make_checkpoint(acc, 7, 2.5, 1.5);
    CHECK(rec.maxima.size() == 2);
    const std::string row = to_csv_row(rec);
    CHECK(row.rfind("7,3,7,4,2,,1,", 0) == 0);
    CHECK(std::count(row.begin(), row.end(), ',') == 10);
}

TEST_CASE("hypothesis helpers") {
    CHECK(dkw_epsilon(100000, 1e-3) == doctest::Approx(std::sqrt(std::log(2000.0) / 200000.0)));
    CHECK(binomial_sigma(0.25, 10000) == doctest::Approx(std::sqrt(0.25 * 0.75 / 10000)));

    const std::vector<std::uint64_t> observed{30, 20, 25, 25};
    const std::vector<double> probs{0.25, 0.25, 0.25, 0.25};
    const auto gof = chi_square_gof(observed, probs);
    CHECK(gof.statistic == doctest::Approx(2.0));
    CHECK(gof.dof == 3);

    // 5 x 5 table, dof 16 (even): p-value against the closed form.
    std::vector<std::vector<std::uint64_t>> table(5, std::vector<std::uint64_t>(5, 40));
    table[0][0] = 70;
    table[4][4] = 10;
    const auto ind = chi_square_independence(table);
    CHECK(ind.dof == 16);
    CHECK(ind.p_value == doctest::Approx(oracle::chi_square_sf_even(ind.statistic, 16)).epsilon(1e-9));

    // An exact outer product has statistic 0; empty rows are dropped.
    std::vector<std::vector<std::uint64_t>> outer{{10, 20, 0}, {30, 60, 0}, {0, 0, 0}};
    const auto zero = chi_square_independence(outer);
    CHECK(zero.statistic == doctest::Approx(0.0));
    CHECK(zero.dof == 1);
    CHECK_FALSE(zero.rejected(1e-3));

    const std::vector<double> x{1, 2, 3, 4, 5}, y{2, 4, 8, 16, 32}, z{5, 4, 3, 2, 1};
    CHECK(spearman_rho(x, y) == doctest::Approx(1.0));
    CHECK(spearman_rho(x, z) == doctest::Approx(-1.0));
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
}
