#include "oppenheim/errors.hpp"
#include "oppenheim/verify.hpp"

#include <doctest.h>

using namespace oppenheim;
using json = nlohmann::ordered_json;

namespace {

VerifyConfig small_config(OppenheimModel model) {
    VerifyConfig c;
    c.model = std::make_shared<const OppenheimModel>(std::move(model));
    c.samples = 20'000;
    c.paths = 30;
    c.checkpoints = {1'000, 10'000, 100'000};
    c.threads = 2;
    return c;
}

OppenheimModel engel_from(long h) {
    auto m = engel_model();
    m.initial = InitialDigit::fixed(BigInt(h));
    return m;
}

const json* find_by(const json& array, const char* key, const json& value) {
    for (const auto& e : array)
        if (e.at(key) == value) return &e;
    return nullptr;
}

void strip_runtime(json& j) {
    if (j.is_object()) {
        j.erase("runtime_seconds");
        for (auto& [k, v] : j.items()) strip_runtime(v);
    } else if (j.is_array()) {
        for (auto& v : j) strip_runtime(v);
    }
}

} // namespace

TEST_CASE("config validation") {
    VerifyConfig c = small_config(luroth_model());
    CHECK_NOTHROW(c.validate());
    c.checkpoints = {100, 10};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = small_config(luroth_model());
    c.p = 2.0;
    CHECK_THROWS_AS(track_conv(c), ConfigError);
    CHECK_THROWS_AS(run_suite(c, "all"), ConfigError);
    CHECK_NOTHROW(run_suite(c, "mori"));
    CHECK_THROWS_AS(run_suite(small_config(luroth_model()), "nonsense"), ConfigError);
    VerifyConfig few = small_config(luroth_model());
    few.samples = 500;
    CHECK_THROWS_AS(test_domination(few), ConfigError);
    VerifyConfig none;
    CHECK_THROWS_AS(none.validate(), ConfigError);
}

TEST_CASE("domination: Lüroth and conditional Engel") {
    const TestEntry l = test_domination(small_config(luroth_model()));
    CHECK(l.pass);
    const json* at2 = find_by(l.statistics["grid"], "x", "2");
    REQUIRE(at2);
    const double eps = l.threshold["dkw_epsilon"].get<double>();
    CHECK(std::abs(at2->at("empirical_survival").get<double>() - 1.0 / 3.0) <= eps);

    const TestEntry e = test_domination(small_config(engel_from(3)));
    CHECK(e.pass);
    CHECK(std::abs(find_by(e.statistics["grid"], "x", "2")->at("empirical_survival").get<double>() - 3.0 / 7.0) <= eps);
    CHECK(find_by(e.statistics["grid"], "x", "50")->at("empirical_survival").get<double>() < 0.03);
}

TEST_CASE("lattice identity: non-strict form holds, strict residual recorded") {
    const TestEntry l = test_lattice_identity(small_config(luroth_model()));
    CHECK(l.pass);
    const json* at2 = find_by(l.statistics["points"], "x", 2);
    REQUIRE(at2);
    CHECK(at2->at("F_inv_x").get<double>() == 0.5);
    CHECK(at2->at("strict_residual").get<double>() == doctest::Approx(1.0 / 6.0).epsilon(0.1));

    for (long h : {1, 4, 9}) {
        const TestEntry e = test_lattice_identity(small_config(engel_from(h)));
        CHECK(e.pass);
        CHECK(find_by(e.statistics["points"], "x", 4)->at("F_inv_x").get<double>() == 0.25);
    }

    auto third = engel_model();
    third.q = QSpec::constant(Rational(1, 3));
    CHECK_THROWS_AS(test_lattice_identity(small_config(third)), CertificationMissing);
    auto bare = luroth_model();
    bare.lattice.reset();
    CHECK_THROWS_AS(test_joint_product(small_config(bare)), CertificationMissing);
}

TEST_CASE("joint product form") {
    const TestEntry e = test_joint_product(small_config(engel_model()));
    CHECK(e.pass);
    bool saw_pair = false, saw_triple = false;
    for (const auto& cs : e.statistics["cases"]) {
        if (cs["x"] == json::array({2, 3})) {
            CHECK(cs["product"].get<double>() == doctest::Approx(1.0 / 6.0));
            saw_pair = true;
        }
        if (cs["x"] == json::array({2, 2, 2})) {
            CHECK(cs["product"].get<double>() == doctest::Approx(1.0 / 8.0));
            saw_triple = true;
        }
    }
    CHECK(saw_pair);
    CHECK(saw_triple);
}

TEST_CASE("independence: honest models pass, perfect dependence is rejected") {
    for (const auto& model : {luroth_model(), engel_model()}) {
        const TestEntry t = test_independence(small_config(model));
        CHECK(t.pass);
        CHECK(t.statistics["control_rejected"].get<bool>());
        CHECK(t.statistics["backend"] == "exact");
    }
}

TEST_CASE("trajectory tests on both backends") {
    VerifyConfig lattice = small_config(luroth_model());
    VerifyConfig exact = lattice;
    exact.backend = Backend::exact;

    // The trimmed-sum parts agree across backends.
    const VerificationReport lr = run_suite(lattice, "conv");
    const VerificationReport er = run_suite(exact, "conv");
    for (const auto* r : {&lr, &er})
        for (const auto& t : r->tests.at(0).statistics["trimmed"]) CHECK(t["pass"].get<bool>());

    // With 30 paths the max-ratio median trend is noisy; 200 paths make it stable.
    VerifyConfig wide = lattice;
    wide.paths = 200;
    const TestEntry w = track_conv(wide);
    CHECK(w.pass);

    const TestEntry lt = track_th1(lattice);
    const TestEntry et = track_th1(exact);
    CHECK(lt.pass == et.pass);
    // Bracketing bound with ell = 1: medians across backends within 2 / log n.
    const double lm = lt.statistics["checkpoints"].back()["median_statistic"].get<double>();
    const double em = et.statistics["checkpoints"].back()["median_statistic"].get<double>();
    CHECK(std::abs(lm - em) <= 2.0 / std::log(1e5));
    CHECK(lt.statistics["checkpoints"].back()["c_n"].get<double>() == doctest::Approx(1.0 + std::log(std::log(1e5)) / std::log(1e5)));

    VerifyConfig engel = small_config(engel_model());
    engel.backend = Backend::exact;
    engel.checkpoints = {1'000, 10'000, 10'000'000};
    CHECK_THROWS_AS(track_th1(engel), CapExceeded);
}

TEST_CASE("Mori hypotheses") {
    const TestEntry lin = check_mori_hypotheses(small_config(luroth_model()));
    CHECK(lin.pass);
    const auto& member = lin.statistics["members"][0];
    CHECK(member["J2"]["estimate"].get<double>() == doctest::Approx(3.5266).epsilon(1e-4));
    CHECK(member["J1"]["finite"] == false);
    CHECK(member.contains("J_r_plus_1"));

    auto bump = luroth_model();
    bump.dist = DistributionFamily(Cdf::polynomial({Rational(0), Rational(2), Rational(-1)}));
    VerifyConfig c = small_config(bump);
    c.r = 1;
    const TestEntry b = check_mori_hypotheses(c);
    CHECK(b.pass);
    CHECK_FALSE(b.statistics["members"][0].contains("J_r_plus_1"));
}

TEST_CASE("reports are reproducible and independent of the thread count") {
    VerifyConfig c = small_config(engel_model());
    c.checkpoints = {1'000, 10'000};
    c.paths = 8;
    c.threads = 1;
    json one = run_suite(c, "all").to_json();
    c.threads = 4;
    json four = run_suite(c, "all").to_json();
    json again = run_suite(c, "all").to_json();
    for (json* j : {&one, &four, &again}) strip_runtime(*j);
    CHECK(one.dump() == four.dump());
    CHECK(four.dump() == again.dump());
    CHECK(one.contains("config_echo"));
    CHECK(one["tests"].size() == suite_names().size());
    CHECK(one["seed"] == 7);
    for (const auto& t : one["tests"]) {
        CHECK(t.contains("threshold"));
        CHECK(t.contains("provenance"));
        CHECK(t.contains("pass"));
    }
}

TEST_CASE("simulate_paths") {
    const auto sampler = std::make_shared<const Sampler>(std::make_shared<const OppenheimModel>(luroth_model()),
                                                         Backend::lattice);
    SimulationSpec spec;
    spec.checkpoints = {10, 100, 1000};
    spec.paths = 5;
    spec.threads = 3;
    const auto result = simulate_paths(sampler, spec);
    CHECK(result.complete());
    REQUIRE(result.records.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        REQUIRE(result.records[i].size() == 3);
        CHECK(result.records[i][2].n == 1000);
        CHECK(result.records[i][2].path_id == i);
        const auto alone = simulate_path(sampler, spec.seed, i, spec.checkpoints, spec.r, spec.p,
                                         {result.records[i][0].c_n, result.records[i][1].c_n, result.records[i][2].c_n});
        CHECK(to_csv_row(alone[2]) == to_csv_row(result.records[i][2]));
    }
    const auto sylvester = std::make_shared<const Sampler>(std::make_shared<const OppenheimModel>(sylvester_model()),
                                                           Backend::exact);
    spec.checkpoints = {10, 100000};
    CHECK_THROWS_AS(simulate_paths(sylvester, spec), CapExceeded);
}

TEST_CASE("parallel_for propagates worker exceptions") {
    std::vector<int> hit(100, 0);
    parallel_for(100, 4, [&](std::size_t i) { hit[i] = 1; });
    CHECK(std::count(hit.begin(), hit.end(), 1) == 100);
    CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                        if (i == 7) throw std::runtime_error("boom");
                    }),
                    std::runtime_error);
}
