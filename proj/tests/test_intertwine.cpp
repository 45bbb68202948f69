#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "hardylab/intertwine.hpp"

using namespace hardylab;

namespace {

PowerSeries poly(std::initializer_list<cplx> c, std::size_t n) {
    const std::vector<cplx> v(c);
    return PowerSeries::polynomial(v, n);
}

}  // namespace

TEST_CASE("C_{z/2} intertwines 2z with z") {
    const std::size_t n = 128;
    const auto x = composition_matrix(poly({0, 0.5}, n), n);
    const auto r = intertwine_residual(x, poly({0, 2}, n), PowerSeries::identity(n));
    CHECK(r.block_rule == "lower-triangular");
    CHECK(r.valid_block == n);
    CHECK(r.exact_zero());
    CHECK(r.residual <= 1e-12 * r.scale);
    CHECK(r.exact_inputs);
    CHECK(r.relative_residual <= 1.0);

    // wrong pair: residual is order one
    const auto bad = intertwine_residual(x, PowerSeries::identity(n), PowerSeries::identity(n));
    CHECK_FALSE(bad.exact_zero());
    CHECK(bad.relative_residual > 0.05);
    CHECK(bad.relative_residual <= 1.0);
}

TEST_CASE("identity intertwines phi with itself") {
    const std::size_t n = 64;
    const auto i = identity_operator(n);
    const auto s = poly({0, 1, 1}, n);
    const auto r = intertwine_residual(i, s, s);
    CHECK(r.max_abs_entry == 0.0);
    CHECK(r.residual == 0.0);
    CHECK(r.norm_x == doctest::Approx(1.0));
}

TEST_CASE("non-triangular X uses the polynomial block") {
    const std::size_t n = 64;
    const auto d = deddens_inner_X(SymbolSpec::polynomial({0, 0, 1}), n, 8);
    const auto r = intertwine_residual(d.x, poly({0, 0, 1}, n), PowerSeries::identity(n));
    CHECK(r.block_rule == "polynomial-phi");
    CHECK(r.valid_block == n - 2);
}

TEST_CASE("transitivity of intertwining") {
    const std::size_t n = 96;
    const auto x = composition_matrix(poly({0, 0.5}, n), n);  // 2z -> z
    const auto y = composition_matrix(poly({0, 0.5}, n), n);  // z -> z/2
    OperatorMatrix yx{y.entries * x.entries, n, n, "YX"};
    const auto r = intertwine_residual(yx, poly({0, 2}, n), poly({0, 0.5}, n));
    CHECK(r.exact_zero());
}

TEST_CASE("weighted composition recovery") {
    const std::size_t n = 128;
    const auto omega = poly({0, 0.5}, n);
    const auto h = poly({1, 1}, n);
    const auto x = weighted_composition_matrix(omega, h, n);
    const auto pts = disc_samples(4, 16, 0.9);
    const auto rep = recover_weighted_comp(x, pts);
    CHECK(rep.consistent);
    for (const auto& s : rep.samples) {
        if (s.h_zero) continue;
        CHECK(std::abs(s.h - (1.0 + s.z)) < 1e-8);
        CHECK(std::abs(s.omega - 0.5 * s.z) < 1e-8);
    }
    CHECK(rep.max_power_defect < 1e-10);

    // h vanishes at -1 only, which is not on the grid
    CHECK(rep.zero_count == 0);
}

TEST_CASE("sum of two composition operators fails the power test") {
    const std::size_t n = 128;
    const auto w1 = series_sqrt(poly({0.05, 0.01}, n)).plus_constant(-0.5);
    const auto w2 = (w1 * cplx{-1.0}).plus_constant(-1.0);
    const auto c1 = composition_matrix(w1, n), c2 = composition_matrix(w2, n);
    OperatorMatrix x{c1.entries + c2.entries, n, 0, "C1+C2"};
    const auto rep = recover_weighted_comp(x, disc_samples(3, 8, 0.8));
    CHECK_FALSE(rep.consistent);
    for (const auto& s : rep.samples) {
        CHECK(std::abs(s.h - 2.0) < 1e-10);
        CHECK(std::abs(s.omega + 0.5) < 1e-10);
        // defect of omega^2 is 1/4 + psi(z), psi = z/100 - 1/5
        const double expect = std::abs(0.05 + s.z / 100.0);
        CHECK(s.power_defect >= 0.9 * expect);
    }
}

TEST_CASE("recovery rejects a zero operator") {
    OperatorMatrix z{Matrix::Zero(16, 16), 16, 0, "0"};
    CHECK_THROWS_AS(recover_weighted_comp(z, disc_samples(2, 4, 0.5)), MathError);
}

TEST_CASE("Deddens construction for z and z^2") {
    const std::size_t n = 128;
    const auto d = deddens_inner_X(SymbolSpec::z(), n, 16);
    // phi = z: f = e_0, f_n = e_n, X is a coordinate projection
    CHECK(d.basis.gram_defect < 1e-15);
    CHECK(d.basis.max_tail_energy < 1e-15);
    CHECK(d.restricted_residual < 1e-14);
    CHECK(d.norm_x.value == doctest::Approx(1.0));

    const auto q = deddens_inner_X(SymbolSpec::polynomial({0, 0, 1}), n, 16);
    CHECK(q.restricted_residual < 1e-14);
    CHECK(q.basis.gram_defect < 1e-15);
    const auto ef = eigen_field(q, SymbolSpec::polynomial({0, 0, 1}), disc_samples(3, 8, 0.8));
    for (const auto& s : ef.samples) {
        REQUIRE_FALSE(s.in_zero_set);
        CHECK(s.relative_residual <= 10 * s.tail_bound + 1e-13);
    }

    CHECK_THROWS_AS(deddens_inner_X(SymbolSpec::polynomial({0, 0.5}), n, 8), MathError);
    CHECK_THROWS_AS(deddens_inner_X(SymbolSpec::z(), n, 20), std::invalid_argument);
}

TEST_CASE("Deddens construction for the unit singular function") {
    const std::size_t n = 1024;
    const auto us = SymbolSpec::unit_singular();
    const auto d = deddens_inner_X(us, n, 16);
    const double mt = d.basis.max_tail_energy;
    CHECK(mt > 0.0);
    CHECK(d.basis.gram_defect <= 10 * mt);
    CHECK(d.restricted_residual <= 10 * std::sqrt(mt));
    CHECK(std::abs(d.norm_x.value - 1.0) <= d.basis.gram_defect);
    // tails grow with n: powers of the symbol spread energy past N
    CHECK(d.basis.tail_energy.back() >= d.basis.tail_energy.front());
    const std::vector<cplx> pts{0.5, cplx{0.0, 0.4}, cplx{-0.3, 0.2}};
    const auto ef = eigen_field(d, us, pts);
    for (const auto& s : ef.samples) {
        REQUIRE_FALSE(s.in_zero_set);
        CHECK(s.relative_residual <= 10 * s.tail_bound);
    }
}

TEST_CASE("generic eigen field for a composition operator") {
    const std::size_t n = 128;
    const auto x = composition_matrix(poly({0, 0.5}, n), n);
    const auto rep = eigen_field(x, SymbolSpec::polynomial({0, 2}), SymbolSpec::z(), disc_samples(3, 8, 0.7));
    CHECK(rep.zero_count == 0);
    for (const auto& s : rep.samples) CHECK(s.relative_residual <= s.tail_bound);
}

TEST_CASE("finite dimensional partner") {
    Matrix a = Matrix::Zero(3, 3), b = Matrix::Zero(3, 3);
    a.diagonal() << 1, 2, 3;
    b.diagonal() << 2, 5, 7;
    const auto p = finite_dim_partner(a, b, 2.0);
    CHECK(p.residual < 1e-12);
    CHECK(p.eigen_residual < 1e-12);
    CHECK(std::abs(p.y(1, 0)) == doctest::Approx(1.0));
    CHECK(p.y.norm() == doctest::Approx(1.0));
    CHECK_THROWS_AS(finite_dim_partner(a, b, 5.0), MathError);
}

TEST_CASE("finite dimensional partner on planted spectra") {
    std::mt19937 rng(17);
    std::normal_distribution<double> g;
    auto rand = [&](int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = cplx{g(rng), g(rng)};
        return m;
    };
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 6;
        const cplx lam{g(rng), g(rng)};
        Matrix da = Matrix::Zero(n, n), db = Matrix::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            da(i, i) = i == 0 ? lam : cplx{3.0 + i, g(rng)};
            db(i, i) = i == 2 ? lam : cplx{-3.0 - i, g(rng)};
        }
        const Matrix s = rand(n), t = rand(n);
        const Matrix a = s * da * s.inverse(), b = t * db * t.inverse();
        const auto p = finite_dim_partner(a, b, lam, 1e-7);
        CHECK(p.residual <= 1e-9 * p.scale * p.scale);

        // oracle: eigenvectors from the full eigensolver
        Eigen::ComplexEigenSolver<Matrix> ea(a), eb(b.transpose());
        Eigen::Index ia = 0, ib = 0;
        (ea.eigenvalues().array() - lam).abs().minCoeff(&ia);
        (eb.eigenvalues().array() - lam).abs().minCoeff(&ib);
        const Vector va = ea.eigenvectors().col(ia).normalized();
        const Vector vb = eb.eigenvectors().col(ib).normalized();
        const Matrix yo = va * vb.transpose();
        const cplx overlap = (yo.adjoint() * p.y).trace();
        CHECK(std::abs(overlap) == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("Vandermonde system for two branches") {
    const std::size_t n = 128;
    const auto w1 = series_sqrt(poly({0.05, 0.01}, n)).plus_constant(-0.5);
    const auto w2 = (w1 * cplx{-1.0}).plus_constant(-1.0);
    const auto one = PowerSeries::constant(1.0, n);
    const auto psi = SymbolSpec::polynomial({-0.2, 0.01});
    const auto rep = vandermonde_system_check({w1, w2}, {one, one}, SymbolSpec::z2z(), psi, disc_samples(4, 16, 0.95));
    CHECK(rep.max_system_residual < 1e-12);
    CHECK(rep.max_u < 1e-12);
    CHECK(rep.collisions.empty());
    for (double c : rep.certificates) CHECK(c < 1.0);

    // a wrong psi leaves u nonzero and V u != 0
    const auto off = vandermonde_system_check({w1, w2}, {one, one}, SymbolSpec::z2z(), SymbolSpec::z(),
                                              disc_samples(2, 8, 0.5));
    CHECK(off.max_system_residual > 1e-3);

    CHECK_THROWS_AS(vandermonde_system_check({w1, w2}, {one, PowerSeries::zero(n)}, SymbolSpec::z2z(), psi,
                                             disc_samples(1, 4, 0.5)),
                    MathError);
    CHECK_THROWS_AS(vandermonde_system_check({poly({0, 1.5}, n)}, {one}, SymbolSpec::z2z(), psi,
                                             disc_samples(1, 4, 0.5)),
                    MathError);
}

TEST_CASE("disc samples") {
    const auto p = disc_samples(3, 5, 0.9);
    CHECK(p.size() == 15);
    for (const auto& z : p) CHECK(std::abs(z) <= 0.9 + 1e-15);
}
