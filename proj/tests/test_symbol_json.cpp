#include "doctest.h"
#include "hardylab/symbol_json.hpp"

using namespace hardylab;

TEST_CASE("shorthands") {
    SymbolSpec s = SymbolSpec::z();
    REQUIRE(symbol_from_shorthand("z2z", s));
    CHECK(s.is_z2z());
    REQUIRE(symbol_from_shorthand("unit_singular", s));
    CHECK(s.is_unit_singular());
    REQUIRE(symbol_from_shorthand("2+z^2", s));
    CHECK(*s.polynomial_coeffs() == std::vector<cplx>{2.0, 0.0, 1.0});
    CHECK_FALSE(symbol_from_shorthand("zz", s));
}

TEST_CASE("round trip through JSON") {
    const std::vector<SymbolSpec> specs{
        SymbolSpec::polynomial({cplx{0.5, -0.25}, 1.0}),
        SymbolSpec::moebius({0.3, 0.1}),
        SymbolSpec::unit_singular(),
        SymbolSpec::scale(0.5, SymbolSpec::unit_singular()),
        SymbolSpec::shift(cplx{1.0, 2.0}, SymbolSpec::z2z()),
        SymbolSpec::compose(SymbolSpec::z2z(), SymbolSpec::moebius(0.2)),
    };
    for (const auto& s : specs) {
        const json j = symbol_to_json(s);
        CHECK(symbol_from_json(j) == s);
        CHECK(symbol_from_json(json::parse(j.dump())) == s);
    }
    const auto raw = SymbolSpec::raw(PowerSeries({0.0, 0.5, 0.25}, std::nullopt));
    const auto back = symbol_from_json(symbol_to_json(raw));
    CHECK(to_series(back, 3).coeffs() == to_series(raw, 3).coeffs());
}

TEST_CASE("complex numbers") {
    CHECK(complex_from_json(json::parse("[1, 2]")) == cplx{1, 2});
    CHECK(complex_from_json(json::parse("3")) == cplx{3, 0});
    CHECK(complex_to_json({1, -2}) == json::parse("[1.0, -2.0]"));
    CHECK_THROWS_AS(complex_from_json(json::parse("[1,2,3]")), std::invalid_argument);
}

TEST_CASE("schema errors name the problem") {
    CHECK_THROWS_AS(symbol_from_json(json::parse(R"({"tag":"nope"})")), std::invalid_argument);
    CHECK_THROWS_AS(symbol_from_json(json::parse(R"({"tag":"moebius"})")), std::invalid_argument);
    CHECK_THROWS_AS(symbol_from_json(json::parse(R"({"tag":"moebius","a":[2,0]})")), std::invalid_argument);
    CHECK_THROWS_AS(symbol_from_json(json::parse(R"({"tag":"scale","lambda":0,"inner":"z"})")),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_symbol_argument("/nonexistent/file.json"), std::invalid_argument);
    CHECK(parse_symbol_argument(R"("z+1")") == SymbolSpec::polynomial({1.0, 1.0}));
    CHECK(parse_symbol_argument(R"({"tag":"polynomial","coeffs":[0,[2,0]]})") == SymbolSpec::polynomial({0.0, 2.0}));
}
