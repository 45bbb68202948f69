#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/SVD>

#include "doctest.h"
#include "hardylab/operators.hpp"
#include "hardylab/wold.hpp"

using namespace hardylab;

namespace {

PowerSeries poly(std::vector<cplx> c, std::size_t n) { return PowerSeries::polynomial(c, n); }

double exact_norm(const Matrix& m) {
    Eigen::BDCSVD<Matrix> svd(m);
    return svd.singularValues()[0];
}

}  // namespace

TEST_CASE("toeplitz matrix structure") {
    const auto t = toeplitz_matrix(SymbolSpec::z2z(), 4);
    Matrix expect = Matrix::Zero(4, 4);
    expect(1, 0) = expect(2, 1) = expect(3, 2) = 1.0;
    expect(2, 0) = expect(3, 1) = 1.0;
    CHECK(t.entries == expect);
    CHECK(t.valid_block == 2);
    CHECK(toeplitz_matrix(poly({1.0}, 7), 7).entries == Matrix::Identity(7, 7));
    const auto u = toeplitz_matrix(SymbolSpec::unit_singular(), 64);
    const auto s = to_series(SymbolSpec::unit_singular(), 64);
    CHECK(u.valid_block == 0);
    for (int j = 0; j < 64; ++j) CHECK(u.entries(j, 0) == s[j]);
}

TEST_CASE("toeplitz multiplicativity") {
    const std::size_t n = 32;
    const auto a = poly({1.0, 2.0, cplx{0, 1}}, n), b = poly({0.5, 0.0, -1.0, 3.0}, n);
    const Matrix lhs = toeplitz_matrix(multiply(a, b), n).entries;
    const Matrix rhs = toeplitz_matrix(a, n).entries * toeplitz_matrix(b, n).entries;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-13);
    const auto u = to_series(SymbolSpec::unit_singular(), n);
    const auto m = to_series(SymbolSpec::moebius(0.4), n);
    const Matrix l2 = toeplitz_matrix(multiply(u, m), n).entries;
    const Matrix r2 = toeplitz_matrix(u, n).entries * toeplitz_matrix(m, n).entries;
    CHECK((l2 - r2).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("weighted composition matrix") {
    CHECK(composition_matrix(PowerSeries::identity(6), 6).entries == Matrix::Identity(6, 6));
    const auto c = composition_matrix(poly({0.0, 0.5}, 4), 4);
    CHECK(c.entries == Eigen::Vector4cd(1.0, 0.5, 0.25, 0.125).asDiagonal().toDenseMatrix());
    CHECK(c.valid_block == 4);
    // Example: C_{z/2} T_{2z} = T_z C_{z/2}
    const std::size_t n = 16;
    const auto x = composition_matrix(poly({0.0, 0.5}, n), n);
    const Matrix r = x.entries * toeplitz_matrix(poly({0.0, 2.0}, n), n).entries -
                     toeplitz_matrix(poly({0.0, 1.0}, n), n).entries * x.entries;
    CHECK(r.cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(weighted_composition_matrix(poly({0.5, 0.6}, 8), poly({1.0}, 8), 8), MathError);
    CHECK_THROWS_AS(weighted_composition_matrix(poly({0.0, 0.5}, 8), PowerSeries::zero(8), 8), MathError);
    const auto w = weighted_composition_matrix(poly({0.0, 0.5, 0.25}, 16), poly({1.0, 1.0}, 16), 16);
    CHECK(w.valid_block == 8);  // 1 + 2k < 16
}

TEST_CASE("composition intertwining on the valid block") {
    const std::size_t n = 64;
    const auto phi = poly({0.3, 1.0, -0.5, 0.25}, n);
    const auto om = poly({0.0, 0.4, 0.3}, n);
    const auto h = poly({1.0, -0.5}, n);
    const auto x = weighted_composition_matrix(om, h, n);
    const Matrix lhs = x.entries * toeplitz_matrix(phi, n).entries;
    const Matrix rhs = toeplitz_matrix(compose(phi, om), n).entries * x.entries;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("kernel vectors") {
    const auto k0 = kernel_vector(0.0, 5);
    CHECK(k0.coords == (Vector(5) << 1, 0, 0, 0, 0).finished());
    const auto k = kernel_vector(0.5, 3);
    CHECK(k.coords == (Vector(3) << 1.0, 0.5, 0.25).finished());
    const auto kc = kernel_vector(cplx{0.3, 0.4}, 40);
    CHECK(std::abs(kc.coords.squaredNorm() - kc.squared_norm()) < 1e-14);
    CHECK(kc.coords[1] == cplx{0.3, -0.4});
    CHECK_THROWS_AS(kernel_vector(1.0, 4), MathError);
}

TEST_CASE("kernel eigen-relation within the geometric tail") {
    for (const auto& phi : {SymbolSpec::z2z(), SymbolSpec::unit_singular(), SymbolSpec::moebius({0.2, 0.3})})
        for (double r : {0.0, 0.3, 0.6, 0.9})
            for (double th : {0.0, 1.0, 2.5}) {
                const auto res = kernel_eigen_residual(phi, std::polar(r, th), 256);
                CHECK(res.residual <= res.tail_bound);
            }
    const auto r = kernel_eigen_residual(SymbolSpec::z2z(), 0.5, 256);
    CHECK(r.residual < 1e-12);
    CHECK(std::abs(r.eigenvalue - 0.75) < 1e-15);
    // a short truncation leaves a visible but bounded residual
    const auto s = kernel_eigen_residual(SymbolSpec::unit_singular(), 0.8, 16);
    CHECK(s.residual > 1e-4);
    CHECK(s.residual <= s.tail_bound);
}

TEST_CASE("operator norm by power iteration") {
    CHECK(operator_norm(identity_operator(10)).value == doctest::Approx(1.0));
    CHECK(operator_norm(toeplitz_matrix(SymbolSpec::z(), 64)).value == doctest::Approx(1.0));
    const auto t = toeplitz_matrix(SymbolSpec::z2z(), 512);
    const auto est = operator_norm(t);
    CHECK(est.value >= 1.95);
    CHECK(est.value <= 2.0);
    CHECK(est.value <= exact_norm(t.entries) + 1e-12);
    CHECK(est.value >= exact_norm(t.entries) - 1e-3);
    const double small = operator_norm(toeplitz_matrix(SymbolSpec::z2z(), 64)).value;
    CHECK(small < est.value);
    std::mt19937 rng(3);
    std::normal_distribution<double> g;
    Matrix m(20, 20);
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) m(i, j) = {g(rng), g(rng)};
    CHECK(operator_norm(m).value == doctest::Approx(exact_norm(m)).epsilon(1e-6));
}

TEST_CASE("adjoint orbit decays for self-maps") {
    const auto t = toeplitz_matrix(SymbolSpec::moebius(0.3), 128);
    const auto v = kernel_vector(0.5, 128).coords;
    const auto norms = adjoint_orbit_norms(t, v, 200);
    CHECK(norms.back() < 1e-6);
    // K_a is an eigenvector, so the decay rate is |phi(a)|
    const double rate = std::abs(evaluate(SymbolSpec::moebius(0.3), 0.5));
    CHECK(norms[10] / norms[0] == doctest::Approx(std::pow(rate, 10)).epsilon(1e-8));
}

TEST_CASE("matrix CSV round trip") {
    const auto t = toeplitz_matrix(SymbolSpec::moebius({0.1, -0.2}), 8);
    std::stringstream ss;
    write_matrix_csv(ss, t);
    const std::string header = ss.str().substr(0, ss.str().find('\n'));
    CHECK(header.rfind("# ", 0) == 0);
    const auto back = read_matrix_csv(ss);
    CHECK(back.truncation == 8);
    CHECK((back.entries - t.entries).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("wold data for shifts") {
    const auto z = wold_data(SymbolSpec::z(), 32);
    REQUIRE(z.Wbasis.cols() == 1);
    CHECK(std::abs(z.Wbasis(0, 0) - 1.0) < 1e-15);
    const auto z2 = wold_data(SymbolSpec::polynomial({0, 0, 1}), 32);
    REQUIRE(z2.Wbasis.cols() == 2);
    CHECK(std::abs(std::abs(z2.Wbasis(1, 1)) - 1.0) < 1e-15);
    CHECK(z2.orthonormality_defect < 1e-10);
    CHECK_THROWS_AS(wold_data(SymbolSpec::z2z(), 32), MathError);
    CHECK_THROWS_AS(wold_data(SymbolSpec::polynomial({0, 0.5}), 32), MathError);

    // psi = z: K(lambda, e0) is the classical kernel at conj(lambda)
    const auto o = shift_orbit(z, 0, 31);
    const auto k = wold_kernel_check(z, o, cplx{0.3, 0.1}, 31);
    const auto kk = kernel_vector(std::conj(cplx{0.3, 0.1}), 32);
    CHECK((k.value - kk.coords).norm() < 1e-15);
}

TEST_CASE("wold kernels for the unit singular function") {
    const auto d = wold_data(SymbolSpec::unit_singular(), 1024);
    CHECK(d.orthonormality_defect < 1e-10);
    // first basis vector is proportional to 1 - e^{-1} psi
    const auto s = to_series(SymbolSpec::unit_singular(), 1024);
    Vector f(1024);
    for (int j = 0; j < 1024; ++j) f[j] = (j == 0 ? 1.0 : 0.0) - std::exp(-1.0) * s[j];
    f.normalize();
    CHECK(std::abs(std::abs(f.dot(d.Wbasis.col(0))) - 1.0) < 1e-12);
    CHECK(d.w_defect[0] > 0.0);
    const auto o = shift_orbit(d, 0, 80);
    const auto k = wold_kernel_check(d, o, 0.3, 60);
    CHECK(k.residual <= k.bound);
    CHECK(k.bound < 0.1);
    for (unsigned p = 1; p <= 4; ++p) {
        const auto r = wold_derivative_check(d, o, p, cplx{0.0, 0.6}, 60);
        CHECK(r.residual <= r.bound);
    }
}

TEST_CASE("c_{N,n} recursion") {
    for (unsigned order = 1; order <= 20; ++order)
        for (unsigned n = 1; n <= 20; ++n)
            CHECK(wold_coefficient_exact(order, n) - wold_coefficient_exact(order, n - 1) ==
                  order * wold_coefficient_exact(order - 1, n));
    CHECK(wold_coefficient_exact(3, 0) == 6);
    CHECK(wold_coefficient(2, 3) == 20.0);
}
