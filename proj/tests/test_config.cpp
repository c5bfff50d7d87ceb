#include "oppenheim/config.hpp"
#include "oppenheim/errors.hpp"

#include <doctest.h>

using namespace oppenheim;

TEST_CASE("built-in models survive a text round trip") {
    for (const auto& model : {luroth_model(), engel_model(), sylvester_model()}) {
        const std::string text = serialize_model_config(model);
        const OppenheimModel back = parse_model_config(text);
        CHECK(serialize_model_config(back) == text);
        CHECK(back.phi.m() == model.phi.m());
        CHECK(back.lattice == model.lattice);
    }
}

TEST_CASE("every supported kind round-trips") {
    const std::string text = R"(# a model exercising the less common fields
[phi]
kind = "reciprocal_periodic"
periods = [2, 3]

[dist]
kind = "piecewise_linear"
knots = [["0", "0"], ["1/2", "3/4"], ["1", "1"]]

[q]
kind = "lattice_periodic"
value = [6, 12]   # drawn from the lattice

[lattice]
kind = "explicit"
values = [6, 12, 18]
tail_step = 6

[initial]
rule = "fixed"
value = 4
)";
    const OppenheimModel m = parse_model_config(text);
    CHECK(m.phi.kind() == PhiFamily::Kind::reciprocal_periodic);
    CHECK(m.phi.kappa() == 6);
    CHECK(m.dist.at(1).knots().size() == 3);
    CHECK(m.q(2) == 12);
    CHECK(m.q(3) == 6);
    CHECK(m.lattice->kind() == GoodSequence::Kind::explicit_list);
    CHECK((*m.lattice)[5] == 30);
    CHECK(m.initial.rule == InitialDigit::Rule::fixed);
    CHECK(m.initial.value == 4);
    CHECK(serialize_model_config(parse_model_config(serialize_model_config(m))) == serialize_model_config(m));
}

TEST_CASE("dotted keys, defaults and polynomial coefficients") {
    const std::string text = "phi.kind = \"constant\"\nphi.value = \"5/2\"\n"
                             "dist.kind = \"polynomial\"\ndist.coefficients = [\"0\", \"2\", \"-1\"]\n"
                             "q.kind = \"constant\"\nq.value = \"1/3\"\n";
    const OppenheimModel m = parse_model_config(text);
    CHECK(m.phi(1, BigInt(9)) == Rational(5, 2));
    CHECK(m.dist.at(1).alpha_limit() == doctest::Approx(2.0));
    CHECK(m.q(4) == Rational(1, 3));
    CHECK_FALSE(m.lattice.has_value());
    CHECK(m.initial.rule == InitialDigit::Rule::virtual_zeroth);
}

TEST_CASE("malformed documents raise ConfigError") {
    CHECK_THROWS_AS(parse_model_config("[phi]\nkind = \"power_sum\"\nm = 1\ncolour = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_model_config("[fee]\nkind = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_model_config("[dist]\nkind = \"linear\"\n"), ConfigError);  // phi.kind missing
    CHECK_THROWS_AS(parse_model_config("[phi]\nkind = \"constant\"\nvalue = \"1/0\"\n"), ConfigError);
    CHECK_THROWS_AS(parse_model_config("[phi]\nkind = \"power_sum\"\nm = x\n"), ConfigError);
    CHECK_THROWS_AS(parse_model_config("[phi]\nkind = \"reciprocal_periodic\"\nperiods = [2, 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_model_config("[phi]\nkind = \"power_sum\"\nkind = \"constant\"\n"), ConfigError);
    CHECK_THROWS_AS(parse_model_config("kind = \"power_sum\"\n"), ConfigError);
    CHECK_THROWS_AS(parse_model_config("[phi]\nkind \"power_sum\"\n"), ConfigError);
    CHECK_THROWS_AS(load_model_file("/nonexistent/model.toml"), ConfigError);
}
