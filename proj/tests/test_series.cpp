#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hardylab/series.hpp"
#include "hardylab/symbol.hpp"

using namespace hardylab;

namespace {

PowerSeries poly(std::vector<cplx> c, std::size_t n) { return PowerSeries::polynomial(c, n); }

}  // namespace

TEST_CASE("power series invariants") {
    PowerSeries p({1.0, 2.0, 3.0, 4.0}, 1);
    CHECK(p[2] == cplx{});
    CHECK(p[3] == cplx{});
    CHECK(p.truncation() == 4);
    CHECK(p.exact_degree() == 1);
    CHECK(PowerSeries::identity(5).valuation() == 1);
    CHECK(PowerSeries::zero(5).valuation() == 5);
}

TEST_CASE("to_series examples") {
    auto s = to_series(SymbolSpec::z2z(), 4);
    CHECK(s.coeffs() == std::vector<cplx>{0.0, 1.0, 1.0, 0.0});
    CHECK(s.exact_degree() == 2);

    auto u = to_series(SymbolSpec::unit_singular(), 1);
    CHECK(std::abs(u[0] - std::exp(-1.0)) < 1e-16);

    auto sc = to_series(SymbolSpec::scale(2.0, SymbolSpec::z()), 3);
    CHECK(sc.coeffs() == std::vector<cplx>{0.0, 2.0, 0.0});
}

TEST_CASE("unit singular coefficients match high-precision references") {
    // e^{-1} L_n^{(-1)}(2), computed independently with 50-digit arithmetic
    const std::vector<std::pair<int, double>> ref{
        {5, 0.14715177646857692864},      {10, -0.11668331340436011837},
        {100, -0.015030802175165535273},  {255, -0.0040211424295521749557},
        {1000, -0.0024004313325886210927}, {1023, -0.0036726505913737846474},
        {2047, -0.0022016860402765416432}};
    const auto s = to_series(SymbolSpec::unit_singular(), 2048);
    CHECK(std::abs(s[1] + 2.0 * std::exp(-1.0)) < 1e-16);
    CHECK(std::abs(s[2]) < 1e-16);
    for (auto [n, v] : ref) {
        INFO("n = " << n);
        CHECK(std::abs(s[n] - v) < 1e-14);
    }
    const auto e = to_series_with_note(SymbolSpec::unit_singular(), 1024);
    CHECK(e.tail_energy == doctest::Approx(0.01405).epsilon(2e-3));
    CHECK(!e.note.empty());
}

TEST_CASE("unit singular recentred expansion agrees with closed form") {
    const auto spec = SymbolSpec::unit_singular();
    const cplx c{0.3, -0.2};
    const auto t = taylor_at(spec, c, 200);
    for (cplx dz : {cplx{0.05, 0.0}, cplx{0.0, 0.1}, cplx{-0.1, 0.05}}) {
        CHECK(std::abs(evaluate_polynomial(t, dz) - evaluate(spec, c + dz)) < 1e-12);
    }
}

TEST_CASE("evaluate") {
    CHECK(std::abs(evaluate(SymbolSpec::z2z(), 0.5) - 0.75) < 1e-15);
    CHECK(std::abs(evaluate(SymbolSpec::unit_singular(), 0.0) - std::exp(-1.0)) < 1e-16);
    CHECK_THROWS_AS(evaluate(SymbolSpec::z(), 1.0), MathError);
    CHECK_THROWS_AS(evaluate(poly({1.0}, 4), cplx{0.0, 1.0}), MathError);
    const auto s = to_series(SymbolSpec::moebius({0.3, 0.1}), 64);
    CHECK(evaluate(s, 0.0) == s[0]);
}

TEST_CASE("series evaluation converges geometrically at rho = 1/2") {
    for (const auto& spec : {SymbolSpec::unit_singular(), SymbolSpec::moebius({0.5, 0.2})}) {
        const cplx z = std::polar(0.5, 0.7);
        const cplx exact = evaluate(spec, z);
        double prev = 1.0;
        for (std::size_t n : {8u, 16u, 32u}) {
            const auto v = evaluate_with_tail(to_series(spec, n), z, sup_norm_upper_bound(spec));
            const double err = std::abs(v.value - exact);
            CHECK(err <= v.tail_bound + 1e-15);
            CHECK(err <= prev);
            prev = err;
        }
        CHECK(prev < 1e-9);
    }
}

TEST_CASE("multiply") {
    CHECK(multiply(poly({0.0, 1.0}, 4), poly({0.0, 1.0}, 4)).coeffs() ==
          std::vector<cplx>{0.0, 0.0, 1.0, 0.0});
    CHECK(multiply(poly({1.0, 1.0}, 4), poly({1.0, -1.0}, 4)).coeffs() ==
          std::vector<cplx>{1.0, 0.0, -1.0, 0.0});
    const auto u = to_series(SymbolSpec::unit_singular(), 64);
    CHECK(std::abs(multiply(u, u)[0] - std::exp(-2.0)) < 1e-16);
    CHECK(multiply(poly({1.0, 1.0}, 8), poly({1.0, 0.0, 1.0}, 8)).exact_degree() == 3);
    CHECK_THROWS_AS(multiply(poly({1.0}, 4), poly({1.0}, 5)), MathError);
}

TEST_CASE("multiply is commutative and associative") {
    std::mt19937 rng(7);
    std::normal_distribution<double> g;
    auto rnd = [&](std::size_t n) {
        std::vector<cplx> c(n);
        for (auto& x : c) x = {g(rng), g(rng)};
        return PowerSeries(c, std::nullopt);
    };
    for (int trial = 0; trial < 20; ++trial) {
        auto a = rnd(32), b = rnd(32), c = rnd(32);
        CHECK(max_coeff_diff(multiply(a, b), multiply(b, a)) < 1e-12);
        CHECK(max_coeff_diff(multiply(multiply(a, b), c), multiply(a, multiply(b, c))) < 1e-11);
    }
}

TEST_CASE("compose") {
    auto r = compose(poly({0.0, 0.0, 1.0}, 4), poly({0.0, 0.5}, 4));
    CHECK(r.coeffs() == std::vector<cplx>{0.0, 0.0, 0.25, 0.0});
    const auto u = to_series(SymbolSpec::unit_singular(), 32);
    CHECK(max_coeff_diff(compose(u, PowerSeries::identity(32)), u) == 0.0);

    // inner(0) != 0 without certificate is rejected for an infinite outer
    CHECK_THROWS_AS(compose(u, poly({0.2, 0.1}, 32)), MathError);
    // with the closed form for the outer function the shift is exact
    const auto via_spec = compose(SymbolSpec::unit_singular(), poly({0.2, 0.1}, 32));
    const cplx z{0.3, 0.2};
    CHECK(std::abs(evaluate(via_spec, z) - evaluate(SymbolSpec::unit_singular(), 0.2 + 0.1 * z)) <
          1e-12);
    double tail = -1;
    const auto via_series = compose(to_series(SymbolSpec::unit_singular(), 32), poly({0.2, 0.1}, 32),
                                    true, &tail);
    CHECK(tail >= 0.0);
}

TEST_CASE("reversion") {
    CHECK(max_coeff_diff(reversion(PowerSeries::identity(8)), PowerSeries::identity(8)) == 0.0);
    const auto r = reversion(poly({0.0, 1.0, 1.0}, 6));
    const std::vector<cplx> catalan{0.0, 1.0, -1.0, 2.0, -5.0, 14.0};
    CHECK(max_coeff_diff(r, PowerSeries(catalan, std::nullopt)) < 1e-14);
    CHECK(max_coeff_diff(reversion(poly({0.0, 2.0}, 5)), poly({0.0, 0.5}, 5)) == 0.0);
    CHECK_THROWS_AS(reversion(poly({0.0, 0.0, 1.0}, 6)), MathError);
}

TEST_CASE("compose(reversion(s), s) is the identity") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<cplx> c(24);
        c[1] = std::polar(1.0 + 0.5 * std::abs(u(rng)), 3.0 * u(rng));
        for (std::size_t k = 2; k < 5; ++k) c[k] = {0.25 * u(rng), 0.25 * u(rng)};
        const PowerSeries s(c, 4);
        const auto r = reversion(s);
        const double scale = std::max(1.0, r.max_abs_coeff());
        CHECK(max_coeff_diff(compose(r, s), PowerSeries::identity(24)) < 1e-12 * scale);
        CHECK(max_coeff_diff(compose(s, r), PowerSeries::identity(24)) < 1e-12 * scale);
    }
}

TEST_CASE("exp, log, sqrt") {
    const auto s = poly({0.5, 0.2, -0.1}, 16);
    CHECK(max_coeff_diff(series_log(series_exp(s)), s) < 1e-14);
    const auto q = series_sqrt(poly({0.25, 1.0}, 16));
    CHECK(max_coeff_diff(multiply(q, q), poly({0.25, 1.0}, 16)) < 1e-12);
    CHECK_THROWS_AS(series_log(poly({0.0, 1.0}, 4)), MathError);
}

TEST_CASE("sup norm estimate") {
    CHECK(std::abs(sup_norm_estimate(SymbolSpec::z(), 64).value - (1.0 - 1e-6)) < 1e-9);
    const auto c = sup_norm_estimate(SymbolSpec::z2z(), 4096);
    CHECK(c.value == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(std::abs(c.argmax - cplx{1.0, 0.0}) < 1e-5);
    CHECK(sup_norm_estimate(SymbolSpec::unit_singular(), 4096).value <= 1.0);
    CHECK(certified_self_map(sup_norm_estimate(SymbolSpec::unit_singular(), 4096)));
    CHECK_THROWS_AS(sup_norm_estimate(SymbolSpec::z(), 4), std::invalid_argument);
}

TEST_CASE("symbol structure") {
    CHECK(SymbolSpec::z2z().is_z2z());
    CHECK(is_known_single_cover(SymbolSpec::z2z()));
    CHECK(is_known_inner(SymbolSpec::polynomial({0, 0, 1})));
    CHECK_FALSE(is_known_inner(SymbolSpec::z2z()));
    CHECK(SymbolSpec::polynomial({1, 2}) == SymbolSpec::polynomial({1, 2, 0}));
    CHECK_FALSE(SymbolSpec::z() == SymbolSpec::z2z());
    CHECK_THROWS_AS(SymbolSpec::moebius(1.0), std::invalid_argument);
    const auto comp = SymbolSpec::compose(SymbolSpec::z2z(), SymbolSpec::polynomial({0.1, 0.5}));
    auto pc = comp.polynomial_coeffs();
    REQUIRE(pc);
    CHECK(std::abs((*pc)[0] - 0.11) < 1e-15);
    const Jet j = evaluate_jet(comp, 0.2);
    CHECK(std::abs(j.d1 - (2.0 * 0.2 + 1.0) * 0.5) < 1e-15);
    CHECK(std::abs(j.d2 - 0.5) < 1e-15);
    // compose of a closed-form outer with a recentred inner
    const auto cs = SymbolSpec::compose(SymbolSpec::unit_singular(), SymbolSpec::moebius(0.3));
    const auto t = to_series(cs, 128);
    const cplx z{0.2, -0.1};
    CHECK(std::abs(evaluate(t, z) - evaluate(cs, z)) < 1e-10);
}
