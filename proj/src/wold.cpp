#include "hardylab/wold.hpp"

#include <cmath>
#include <limits>

namespace hardylab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// S u as a truncated convolution with the first column of S.
Vector shift_apply(const OperatorMatrix& s, const Vector& u) {
    const Eigen::Index n = u.size();
    Eigen::Index band = n;
    while (band > 0 && s.entries(band - 1, 0) == cplx{}) --band;
    Vector y = Vector::Zero(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const cplx uk = u[k];
        if (uk == cplx{}) continue;
        const Eigen::Index len = std::min(band, n - k);
        y.segment(k, len) += uk * s.entries.col(0).head(len);
    }
    return y;
}

}  // namespace

WoldData wold_data(const SymbolSpec& psi, std::size_t n, const WoldOptions& opt) {
    WoldData d;
    const auto series = to_series(psi, n);
    d.S = toeplitz_matrix(series, n);
    d.S.label = "S=T[" + psi.describe() + "]";
    d.sup_estimate = sup_norm_estimate(psi, opt.mesh).value;
    d.isometry_defect = 1.0 - series.energy();
    if (d.sup_estimate > 1.0 + 1e-12 || d.isometry_defect < -1e-12 || d.isometry_defect > opt.inner_tolerance)
        throw MathError("not-inner", "wold_data: symbol fails the inner certificate (sup estimate " +
                                         std::to_string(d.sup_estimate) + ", column defect " +
                                         std::to_string(d.isometry_defect) + ")");

    // Q e_j = e_j - S S^* e_j; S^* e_j has entries conj(psi_{j-i}), i <= j
    const std::size_t cand = std::min(n, std::max<std::size_t>(opt.max_basis, 1) * 4);
    std::vector<Vector> basis;
    std::vector<Vector> coeff;  // basis[i] = sum_j coeff[i][j] Q e_j
    Matrix qcols(n, cand);
    for (std::size_t j = 0; j < cand; ++j) {
        Vector e = Vector::Zero(n);
        e[j] = 1.0;
        const Vector sstar = d.S.entries.adjoint() * e;
        qcols.col(j) = e - shift_apply(d.S, sstar);
    }
    for (std::size_t j = 0; j < cand && basis.size() < opt.max_basis; ++j) {
        Vector v = qcols.col(j);
        Vector c = Vector::Zero(cand);
        c[j] = 1.0;
        const double n0 = v.norm();
        if (n0 < 1e-10) continue;
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t i = 0; i < basis.size(); ++i) {
                const cplx p = basis[i].dot(v);
                v -= p * basis[i];
                c -= p * coeff[i];
            }
        const double nv = v.norm();
        if (nv < 1e-8 * std::max(1.0, n0)) continue;
        basis.push_back(v / nv);
        coeff.push_back(c / nv);
    }
    d.Wbasis = Matrix(n, basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) d.Wbasis.col(i) = basis[i];
    d.orthonormality_defect =
        (d.Wbasis.adjoint() * d.Wbasis - Matrix::Identity(basis.size(), basis.size())).cwiseAbs().maxCoeff();

    // ||w||^2 = c^* G c with G_{ij} = <Q e_j, Q e_i> = Q_{ij}, read exactly
    // from the truncation
    const Matrix qlead = qcols.topRows(cand);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const double w2 = (coeff[i].adjoint() * qlead * coeff[i])(0, 0).real();
        d.w_defect.push_back(std::sqrt(std::max(0.0, w2 - basis[i].squaredNorm())));
    }
    return d;
}

unsigned __int128 wold_coefficient_exact(unsigned order, unsigned n) {
    unsigned __int128 c = 1;
    for (unsigned k = 1; k <= order; ++k) c *= static_cast<unsigned __int128>(n + k);
    return c;
}

double wold_coefficient(unsigned order, unsigned n) {
    double c = 1.0;
    for (unsigned k = 1; k <= order; ++k) c *= double(n + k);
    return c;
}

namespace {

double rounding_allowance(const WoldData& d, double weight_sum) {
    return 8.0 * double(d.S.truncation) * kEps * std::max(1.0, weight_sum);
}

}  // namespace

ShiftOrbit shift_orbit(const WoldData& d, std::size_t column, std::size_t last) {
    if (column >= static_cast<std::size_t>(d.Wbasis.cols()))
        throw std::invalid_argument("wold: W basis column out of range");
    ShiftOrbit o;
    o.column = column;
    o.powers.push_back(d.Wbasis.col(column));
    o.t.push_back(0.0);
    for (std::size_t m = 1; m <= last; ++m) {
        o.powers.push_back(shift_apply(d.S, o.powers.back()));
        const double before = o.powers[m - 1].squaredNorm();
        const double after = o.powers[m].squaredNorm();
        o.t.push_back(std::sqrt(std::max(0.0, before - after)));
    }
    return o;
}

KernelEval wold_kernel_check(const WoldData& d, const ShiftOrbit& o, cplx lambda, std::size_t cutoff) {
    if (o.powers.size() <= cutoff) throw std::invalid_argument("wold: orbit shorter than cutoff");
    const std::size_t column = o.column;
    const std::size_t n = d.S.truncation;
    KernelEval out{Vector::Zero(n), 0.0, 0.0};
    cplx lp = 1.0;
    double bound = d.w_defect[column];
    double weights = 0.0;
    for (std::size_t m = 0; m <= cutoff; ++m) {
        out.value += lp * o.powers[m];
        if (m >= 1) bound += std::abs(lp) * o.t[m];
        weights += std::abs(lp);
        lp *= lambda;
    }
    bound += std::abs(lp) * o.powers[cutoff].norm();
    const Vector r = d.S.entries.adjoint() * out.value - lambda * out.value;
    out.residual = r.norm();
    out.bound = bound + rounding_allowance(d, weights);
    return out;
}

KernelEval wold_derivative_check(const WoldData& d, const ShiftOrbit& o, unsigned p, cplx lambda,
                                 std::size_t cutoff) {
    if (p == 0) throw std::invalid_argument("wold_derivative_check: order must be >= 1");
    if (o.powers.size() <= p + cutoff) throw std::invalid_argument("wold: orbit shorter than order + cutoff");
    const std::size_t n = d.S.truncation;
    Vector kp = Vector::Zero(n), km = Vector::Zero(n);
    cplx lp = 1.0;
    double bound = 0.0, weights = 0.0;
    for (std::size_t m = 0; m <= cutoff; ++m) {
        const double cp = wold_coefficient(p, unsigned(m));
        const double cm = wold_coefficient(p - 1, unsigned(m));
        kp += (cp * lp) * o.powers[p + m];
        km += (cm * lp) * o.powers[p - 1 + m];
        bound += cp * std::abs(lp) * o.t[p + m];
        weights += cp * std::abs(lp);
        lp *= lambda;
    }
    bound += wold_coefficient(p, unsigned(cutoff)) * std::abs(lp) * o.powers[p + cutoff].norm();
    const Vector r = d.S.entries.adjoint() * kp - lambda * kp - double(p) * km;
    return KernelEval{kp, bound + rounding_allowance(d, weights), r.norm()};
}

}  // namespace hardylab
