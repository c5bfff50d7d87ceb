#include "oracles.hpp"

#include "oppenheim/errors.hpp"
#include "oppenheim/hypothesis.hpp"
#include "oppenheim/sampler.hpp"

#include <doctest.h>

#include <random>

using namespace oppenheim;

namespace {

std::shared_ptr<const Sampler> make_sampler(OppenheimModel m, Backend b = Backend::exact) {
    return std::make_shared<const Sampler>(std::make_shared<const OppenheimModel>(std::move(m)), b);
}

Rational q(long p, long d) {
    Rational r(p, d);
    r.canonicalize();
    return r;
}

} // namespace

TEST_CASE("sample_digit at the worked points") {
    const auto luroth = luroth_model();
    const auto engel = engel_model();
    CHECK(sample_digit(luroth, 1, BigInt(1), q(3, 10)) == 3);
    CHECK(sample_digit(luroth, 1, BigInt(1), q(1, 2)) == 2);
    CHECK(sample_digit(engel, 1, BigInt(3), q(1, 4)) == 12);

    const DigitLaw law = digit_law(engel, 1, BigInt(3));
    CHECK(sample_digit_search(law, q(1, 4)) == 12);
    CHECK(sample_digit_search(digit_law(luroth, 1, BigInt(1)), q(3, 10)) == 3);
    CHECK(sample_digit_search(digit_law(luroth, 1, BigInt(1)), q(1, 2)) == 2);
}

TEST_CASE("closed form and search agree on random (h, u)") {
    std::mt19937_64 rng(5);
    UniformStream uniforms(5, 0);
    std::uniform_int_distribution<long> state(1, 1000);
    const auto models = {luroth_model(), engel_model(), sylvester_model()};
    int i = 0;
    for (const auto& model : models) {
        for (int trial = 0; trial < 33334; ++trial, ++i) {
            const DigitLaw law = digit_law(model, 1, BigInt(state(rng)));
            const Rational u = uniforms.next_rational();
            const BigInt closed = sample_digit(law, u);
            CHECK(closed == sample_digit_search(law, u));
            // Bracketing: F(delta(k+1)) < u <= F(delta(k)).
            CHECK(law.survival_geq(closed + 1) < u);
            CHECK(u <= law.survival_geq(closed));
        }
    }
    CHECK(i >= 100000);
}

TEST_CASE("search inversion on a non-linear F matches a linear scan") {
    auto model = engel_model();
    model.dist = DistributionFamily(Cdf::polynomial({Rational(0), Rational(2), Rational(-1)}));
    UniformStream uniforms(17, 3);
    for (long h = 1; h <= 40; ++h) {
        const DigitLaw law = digit_law(model, 1, BigInt(h));
        for (int i = 0; i < 25; ++i) {
            const Rational u = uniforms.next_rational();
            const long expected = oracle::invert_by_scan(
                [&](long k) { return law.survival_geq(BigInt(k)); }, h, u);
            CHECK(sample_digit(law, u) == expected);
        }
    }
}

TEST_CASE("scripted trajectories reproduce the hand-computed steps") {
    auto luroth = PathStream::scripted(make_sampler(luroth_model()), {q(3, 10), q(1, 5)});
    const auto& step = luroth.next();
    CHECK(step.n == 1);
    CHECK(luroth.current_digit() == 5);
    CHECK(step.digit == 5);
    CHECK(step.ratio == 5);
    CHECK(step.value == 5.0);
    CHECK_THROWS_AS(luroth.next(), std::out_of_range);

    auto fixed = engel_model();
    fixed.initial = InitialDigit::fixed(BigInt(1));
    auto engel = PathStream::scripted(make_sampler(fixed), {q(1, 4)});
    const auto& e = engel.next();
    CHECK(e.digit == 4);
    CHECK(e.ratio == 4);

    auto lattice = PathStream::scripted(make_sampler(luroth_model(), Backend::lattice), {q(3, 5), q(1, 3), q(9, 10)});
    CHECK(lattice.next_lattice() == 2.0);
    CHECK(lattice.next_lattice() == 1.0);
    CHECK(lattice.next_lattice() == 9.0);
}

TEST_CASE("first digit under the virtual zeroth rule") {
    // B_1 = 3 from u = 3/10 is the first draw of the scripted Lüroth path above; check it directly.
    const DigitLaw initial = initial_digit_law(engel_model());
    CHECK(initial.k_min() == 1);
    CHECK(sample_digit(initial, q(3, 10)) == 3);
}

TEST_CASE("lattice law inversion agrees with search, including non-linear F") {
    auto model = luroth_model();
    const LatticeLaw linear(std::make_shared<const OppenheimModel>(model));
    model.dist = DistributionFamily(Cdf::polynomial({Rational(0), Rational(2), Rational(-1)}));
    model.lattice = GoodSequence::explicit_list({1, 3, 4, 8}, 2);
    const LatticeLaw curved(std::make_shared<const OppenheimModel>(model));
    UniformStream uniforms(3, 3);
    for (int i = 0; i < 20000; ++i) {
        const double u = uniforms.next();
        CHECK(linear.sample(1, u) == linear.sample_search(1, u));
        CHECK(curved.sample(1, u) == curved.sample_search(1, u));
    }
    CHECK(linear.sample(1, 0.6) == 2);
    CHECK(linear.sample(1, 1.0 - 0x1p-53) > 1'000'000'000'000LL);
}

TEST_CASE("precondition failures") {
    auto no_lattice = luroth_model();
    no_lattice.lattice.reset();
    CHECK_THROWS_AS(make_sampler(no_lattice, Backend::lattice), CertificationMissing);
    auto third = engel_model();
    third.q = QSpec::constant(q(1, 3));
    CHECK_THROWS_AS(make_sampler(third, Backend::lattice), CertificationMissing);
    CHECK_NOTHROW(make_sampler(third, Backend::exact));

    OppenheimModel half;
    half.phi = PhiFamily::constant(q(1, 2));
    CHECK_THROWS_AS(make_sampler(half), ImproperModel);

    auto capped = PathStream::scripted(make_sampler(luroth_model()), {q(1, 2), q(1, 1000)});
    capped.set_digit_cap(BigInt(100));
    CHECK_THROWS_AS(capped.next(), CapExceeded);

    CHECK_NOTHROW(check_envelope(sylvester_model(), Backend::exact, 30));
    CHECK_THROWS_AS(check_envelope(sylvester_model(), Backend::exact, 31), CapExceeded);
    CHECK_THROWS_AS(check_envelope(engel_model(), Backend::exact, 10'000'000), CapExceeded);
    CHECK_NOTHROW(check_envelope(engel_model(), Backend::lattice, 10'000'000));
    CHECK_FALSE(exact_envelope(luroth_model()).max_n.has_value());
    CHECK(parse_backend("exact") == Backend::exact);
    CHECK_THROWS(parse_backend("quantum"));
}

TEST_CASE("uniform stream draws") {
    UniformStream a(1, 2), b(1, 2);
    for (int i = 0; i < 1000; ++i) {
        const auto m = a.next_mantissa();
        CHECK(m >= 1);
        CHECK(m < (std::uint64_t{1} << 53));
        CHECK(b.next_rational() == Rational(static_cast<unsigned long>(m)) / Rational(BigInt(1) << 53));
    }
}

TEST_CASE("spawned streams: determinism, seed sensitivity and cross-path independence") {
    const auto model = std::make_shared<const OppenheimModel>(luroth_model());
    auto a = spawn(42, 0, model, Backend::exact);
    auto b = spawn(42, 0, model, Backend::exact);
    auto c = spawn(43, 0, model, Backend::exact);
    auto d = spawn(42, 1, model, Backend::exact);
    std::vector<double> xs, ys;
    bool differs = false;
    for (int i = 0; i < 10000; ++i) {
        const double x = a.next_value();
        CHECK(x == b.next_value());
        differs = differs || x != c.next_value();
        xs.push_back(x);
        ys.push_back(d.next_value());
    }
    CHECK(differs);
    CHECK(std::abs(spearman_rho(xs, ys)) < 0.05);
}

TEST_CASE("Engel digits never decrease along an exact path") {
    const auto sampler = make_sampler(engel_model());
    for (std::uint64_t path = 0; path < 20; ++path) {
        PathStream s(sampler, 9, path);
        BigInt previous = 0;
        for (int i = 0; i < 200; ++i) {
            const auto& step = s.next();
            CHECK(step.digit >= previous);
            previous = step.digit;
        }
    }
}

TEST_CASE("digit frequencies fit the digit law (chi-square, 20 cells + tail)") {
    struct Case {
        OppenheimModel model;
        long h;
    };
    const std::vector<Case> cases{{luroth_model(), 1}, {engel_model(), 3}, {sylvester_model(), 2}};
    std::uint64_t seed = 100;
    for (const auto& cs : cases) {
        const DigitLaw law = digit_law(cs.model, 1, BigInt(cs.h));
        const long kmin = law.k_min().get_si();
        std::vector<double> probs;
        for (long k = kmin; k < kmin + 20; ++k) probs.push_back(law.mass(BigInt(k)).get_d());
        probs.push_back(law.survival_geq(BigInt(kmin + 20)).get_d());
        std::vector<std::uint64_t> counts(probs.size(), 0);
        UniformStream u(seed++, 0);
        for (int i = 0; i < 20000; ++i) {
            const long k = sample_digit(law, u.next_rational()).get_si();
            ++counts[static_cast<std::size_t>(std::min(k - kmin, 20L))];
        }
        CHECK_FALSE(chi_square_gof(counts, probs).rejected(1e-3));
    }
}
