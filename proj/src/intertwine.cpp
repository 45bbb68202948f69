#include "hardylab/intertwine.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/QR>
#include <Eigen/SVD>

namespace hardylab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

bool is_lower_triangular(const Matrix& m) {
    for (Eigen::Index j = 1; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < j && i < m.rows(); ++i)
            if (m(i, j) != cplx{}) return false;
    return true;
}

struct Block {
    std::size_t size;
    std::string rule;
};

Block exact_block(const Matrix& x, const PowerSeries& phi, std::size_t n) {
    if (is_lower_triangular(x)) return {n, "lower-triangular"};
    if (phi.is_polynomial() && static_cast<std::size_t>(*phi.exact_degree()) < n)
        return {n - static_cast<std::size_t>(*phi.exact_degree()), "polynomial-phi"};
    return {n / 2, "leading-half"};
}

double kernel_tail(const SymbolSpec& psi, cplx z, std::size_t n) {
    const double x = std::abs(z);
    return sup_norm_upper_bound(psi) * std::pow(x, double(n)) / std::sqrt(1.0 - x * x);
}

}  // namespace

IntertwineReport intertwine_residual(const OperatorMatrix& x, const PowerSeries& phi, const PowerSeries& psi,
                                     const PowerIterationOptions& opt) {
    const std::size_t n = x.truncation;
    if (phi.truncation() < n || psi.truncation() < n)
        throw MathError("truncation-mismatch", "intertwine_residual: symbols have fewer than N coefficients");
    const auto tphi = toeplitz_matrix(phi.resized(n), n);
    const auto tpsi = toeplitz_matrix(psi.resized(n), n);
    const Block blk = exact_block(x.entries, phi, n);
    if (blk.size == 0)
        throw MathError("empty-block", "intertwine_residual: valid block is empty; raise N above the symbol degree");
    const Eigen::Index b = static_cast<Eigen::Index>(blk.size);
    const Matrix lhs = x.entries * tphi.entries.leftCols(b);
    const Matrix rhs = tpsi.entries.triangularView<Eigen::Lower>() * x.entries.leftCols(b);
    const Matrix r = lhs - rhs;

    IntertwineReport rep{};
    rep.valid_block = blk.size;
    rep.block_rule = blk.rule;
    rep.residual_frobenius = r.norm();
    rep.max_abs_entry = r.cwiseAbs().maxCoeff();
    rep.scale = std::max({lhs.cwiseAbs().maxCoeff(), rhs.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min()});
    rep.residual = rep.residual_frobenius == 0.0 ? 0.0 : operator_norm(r, opt).value;
    const auto nx = operator_norm(x.entries, opt);
    const auto np = operator_norm(tphi.entries, opt);
    const auto ns = operator_norm(tpsi.entries, opt);
    rep.norm_x = nx.value;
    rep.norm_phi = np.value;
    rep.norm_psi = ns.value;
    rep.norms_converged = nx.converged && np.converged && ns.converged;
    const double den = rep.norm_x * (rep.norm_phi + rep.norm_psi);
    if (den == 0.0) throw MathError("zero-operator", "intertwine_residual: X or both symbols vanish");
    rep.relative_residual = rep.residual / den;
    rep.exact_inputs = phi.is_polynomial() && psi.is_polynomial() && blk.rule != "leading-half";
    return rep;
}

EigenFieldReport eigen_field(const OperatorMatrix& x, const SymbolSpec& phi, const SymbolSpec& psi,
                             const std::vector<cplx>& samples) {
    const std::size_t n = x.truncation;
    const auto sphi = to_series(phi, n);
    const auto spsi = to_series(psi, n);
    const Matrix tphi = toeplitz_matrix(sphi, n).entries;
    const Matrix tpsi = toeplitz_matrix(spsi, n).entries;
    Matrix leak = x.entries * tphi - tpsi * x.entries;
    const Block blk = exact_block(x.entries, sphi, n);
    leak.leftCols(static_cast<Eigen::Index>(blk.size)).setZero();
    const double norm_x = operator_norm(x.entries).value;
    if (norm_x == 0.0) throw MathError("zero-operator", "eigen_field: X is zero");
    const double l1 = sphi.l1_norm() + spsi.l1_norm();

    EigenFieldReport rep{{}, kZeroThreshold, 0};
    for (const cplx z : samples) {
        const auto k = kernel_vector(z, n);
        const Vector f = x.entries.adjoint() * k.coords;
        const double nf = f.norm();
        const double nk = std::sqrt(k.squared_norm());
        EigenFieldSample s{z, nf, std::numeric_limits<double>::quiet_NaN(), 0.0, false};
        if (nf < kZeroThreshold * norm_x * nk) {
            s.in_zero_set = true;
            ++rep.zero_count;
        } else {
            const cplx lam = std::conj(evaluate(psi, z));
            const Vector e = tphi.adjoint() * f - lam * f;
            s.relative_residual = e.norm() / nf;
            const double rounding = 8.0 * double(n) * kEps * norm_x * std::max(1.0, l1) * nk;
            s.tail_bound = ((leak.adjoint() * k.coords).norm() + norm_x * kernel_tail(psi, z, n) + rounding) / nf;
        }
        rep.samples.push_back(s);
    }
    if (!samples.empty() && rep.zero_count == samples.size())
        throw MathError("zero-field", "eigen_field: X numerically zero on kernel span");
    return rep;
}

RecoveryReport recover_weighted_comp(const OperatorMatrix& x, const std::vector<cplx>& samples, double tolerance) {
    const std::size_t n = x.truncation;
    if (n < 5) throw std::invalid_argument("recover_weighted_comp: need N >= 5");
    std::vector<PowerSeries> cols;
    for (std::size_t k = 0; k <= 4; ++k) cols.push_back(column_series(x, k));
    const double h_scale = x.entries.col(0).norm();
    RecoveryReport rep{{}, tolerance, 0, 0.0, 0.0, true};
    for (const cplx z : samples) {
        RecoverySample s{z, evaluate(cols[0], z), 0.0, false, 0.0, true};
        if (std::abs(s.h) <= kZeroThreshold * h_scale) {
            s.h_zero = true;
            s.consistent = true;
            ++rep.zero_count;
            rep.samples.push_back(s);
            continue;
        }
        s.omega = evaluate(cols[1], z) / s.h;
        cplx wp = s.omega;
        for (std::size_t p = 2; p <= 4; ++p) {
            wp *= s.omega;
            const double d = std::abs(evaluate(cols[p], z) / s.h - wp) / std::max(1.0, std::abs(wp));
            s.power_defect = std::max(s.power_defect, d);
        }
        s.consistent = std::abs(s.omega) <= 1.0 + tolerance && s.power_defect <= tolerance;
        rep.max_abs_omega = std::max(rep.max_abs_omega, std::abs(s.omega));
        rep.max_power_defect = std::max(rep.max_power_defect, s.power_defect);
        rep.consistent = rep.consistent && s.consistent;
        rep.samples.push_back(s);
    }
    if (!samples.empty() && rep.zero_count == samples.size())
        throw MathError("zero-weight", "recover_weighted_comp: h vanishes on the entire grid");
    return rep;
}

double restricted_residual(const Matrix& x, const Matrix& t_phi, const Matrix& t_psi, const Matrix& u) {
    const Matrix r = x * (t_phi * u) - t_psi * (x * u);
    if (r.norm() == 0.0) return 0.0;
    Eigen::BDCSVD<Matrix> svd(r);
    return svd.singularValues()[0];
}

DeddensResult deddens_inner_X(const SymbolSpec& phi, std::size_t n, std::size_t cutoff, double inner_tolerance) {
    if (cutoff == 0 || cutoff > n / 8)
        throw std::invalid_argument("deddens_inner_X: cutoff must lie in [1, N/8]");
    const auto s = to_series(phi, n);
    const double sup = sup_norm_estimate(phi, 4096).value;
    const double defect = 1.0 - s.energy();
    if (sup > 1.0 + 1e-12 || defect < -1e-12 || defect > inner_tolerance)
        throw MathError("not-inner", "deddens_inner_X: symbol fails the inner certificate");
    const cplx p0 = s[0];
    // (I - T T^*) e_0 = e_0 - conj(phi(0)) phi; its squared norm is 1 - |phi(0)|^2
    const double q00 = 1.0 - std::norm(p0);
    if (q00 < 1e-12)
        throw MathError("degenerate", "deddens_inner_X: (I - T T^*) e_0 is numerically zero");
    const PowerSeries fs = (PowerSeries::constant(1.0, n) - s * std::conj(p0)) * cplx{1.0 / std::sqrt(q00)};

    DeddensResult out;
    DeddensBasis& b = out.basis;
    b.f = Vector(n);
    for (std::size_t j = 0; j < n; ++j) b.f[j] = fs[j];
    b.f_norm = 1.0;
    b.fvecs = Matrix(n, cutoff + 1);
    PowerSeries fn = fs;
    b.max_tail_energy = 0.0;
    for (std::size_t k = 0; k <= cutoff; ++k) {
        for (std::size_t j = 0; j < n; ++j) b.fvecs(j, k) = fn[j];
        const double t = std::max(0.0, 1.0 - fn.energy());
        b.tail_energy.push_back(t);
        b.max_tail_energy = std::max(b.max_tail_energy, t);
        if (k < cutoff) fn = multiply(fn, s);
    }
    const Matrix gram = b.fvecs.adjoint() * b.fvecs;
    b.gram_defect = (gram - Matrix::Identity(cutoff + 1, cutoff + 1)).cwiseAbs().maxCoeff();

    out.x.truncation = n;
    out.x.entries = Matrix::Zero(n, n);
    for (std::size_t k = 0; k <= cutoff; ++k) out.x.entries.row(k) = b.fvecs.col(k).adjoint();
    out.x.valid_block = 0;
    out.x.label = "Deddens[" + phi.describe() + ",cutoff=" + std::to_string(cutoff) + "]";

    Eigen::HouseholderQR<Matrix> qr(b.fvecs.leftCols(cutoff));
    out.span_basis = qr.householderQ() * Matrix::Identity(n, cutoff);
    const Matrix tphi = toeplitz_matrix(s, n).entries;
    const Matrix tz = toeplitz_matrix(PowerSeries::identity(n), n).entries;
    out.restricted_residual = restricted_residual(out.x.entries, tphi, tz, out.span_basis);
    out.norm_x = operator_norm(out.x.entries);
    return out;
}

double deddens_field_tail(const DeddensBasis& b, cplx z, double norm_f) {
    const double x = std::abs(z);
    const std::size_t c = b.tail_energy.size() - 1;
    double t = std::pow(x, double(c + 1)) * b.fvecs.col(static_cast<Eigen::Index>(c)).norm();
    double p = 1.0;
    for (std::size_t k = 0; k <= c; ++k) {
        t += p * std::sqrt(b.tail_energy[k]);
        p *= x;
    }
    return t / norm_f;
}

EigenFieldReport eigen_field(const DeddensResult& d, const SymbolSpec& phi, const std::vector<cplx>& samples) {
    const std::size_t n = d.x.truncation;
    const auto s = to_series(phi, n);
    const Matrix tphi = toeplitz_matrix(s, n).entries;
    EigenFieldReport rep{{}, kZeroThreshold, 0};
    for (const cplx z : samples) {
        const auto k = kernel_vector(z, n);
        const Vector f = d.x.entries.adjoint() * k.coords;
        const double nf = f.norm();
        EigenFieldSample e{z, nf, std::numeric_limits<double>::quiet_NaN(), 0.0, false};
        if (nf < kZeroThreshold * d.norm_x.value * std::sqrt(k.squared_norm())) {
            e.in_zero_set = true;
            ++rep.zero_count;
        } else {
            const Vector r = tphi.adjoint() * f - std::conj(z) * f;
            e.relative_residual = r.norm() / nf;
            e.tail_bound = deddens_field_tail(d.basis, z, nf) + 8.0 * double(n) * kEps * s.l1_norm();
        }
        rep.samples.push_back(e);
    }
    if (!samples.empty() && rep.zero_count == samples.size())
        throw MathError("zero-field", "eigen_field: X numerically zero on kernel span");
    return rep;
}

FiniteDimPartner finite_dim_partner(const Matrix& a, const Matrix& b, cplx lambda, double tol) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n || b.rows() != n || b.cols() != n || n == 0)
        throw std::invalid_argument("finite_dim_partner: A and B must be square of equal size");
    const Matrix id = Matrix::Identity(n, n);
    Eigen::JacobiSVD<Matrix> sa(a - lambda * id, Eigen::ComputeFullV);
    Eigen::JacobiSVD<Matrix> sb(b.transpose() - lambda * id, Eigen::ComputeFullV);
    Eigen::JacobiSVD<Matrix> na(a), nb(b);
    FiniteDimPartner out;
    out.scale = std::max({1.0, na.singularValues()[0], nb.singularValues()[0], std::abs(lambda)});
    out.sigma_a = sa.singularValues()[n - 1];
    out.sigma_b = sb.singularValues()[n - 1];
    if (out.sigma_a > tol * out.scale || out.sigma_b > tol * out.scale)
        throw MathError("not-common-eigenvalue", "finite_dim_partner: lambda is not an eigenvalue of both A and B "
                                                 "(smallest singular values " + std::to_string(out.sigma_a) + ", " +
                                                 std::to_string(out.sigma_b) + ")");
    out.a = sa.matrixV().col(n - 1);
    out.b = sb.matrixV().col(n - 1);
    out.y = out.a * out.b.transpose();
    out.residual = (out.y * b - a * out.y).norm();
    out.eigen_residual = std::max((a * out.y - lambda * out.y).norm(), (out.y * b - lambda * out.y).norm());
    return out;
}

VandermondeReport vandermonde_system_check(const std::vector<PowerSeries>& omegas,
                                           const std::vector<PowerSeries>& hs, const SymbolSpec& phi,
                                           const SymbolSpec& psi, const std::vector<cplx>& samples,
                                           double collision_tolerance) {
    if (omegas.empty() || omegas.size() != hs.size())
        throw std::invalid_argument("vandermonde_system_check: need matching nonempty omega and h lists");
    VandermondeReport rep{{}, 0.0, 0.0, {}, collision_tolerance, {}};
    for (std::size_t j = 0; j < omegas.size(); ++j) {
        if (hs[j].valuation() == hs[j].truncation())
            throw MathError("zero-weight", "vandermonde_system_check: h_" + std::to_string(j + 1) + " is zero");
        const auto cert = sup_norm_estimate(omegas[j], 4096);
        if (!certified_self_map(cert))
            throw MathError("not-self-map",
                            "vandermonde_system_check: omega_" + std::to_string(j + 1) + " fails the self-map certificate");
        rep.certificates.push_back(cert.value);
    }
    const std::size_t k = omegas.size();
    for (const cplx z : samples) {
        VandermondeSample s{z, {}, {}, 0.0, std::numeric_limits<double>::infinity()};
        const cplx pz = evaluate(psi, z);
        for (std::size_t j = 0; j < k; ++j) {
            const cplx w = evaluate(omegas[j], z);
            s.omega.push_back(w);
            s.u.push_back(evaluate(hs[j], z) * (evaluate(phi, w) - pz));
            rep.max_u = std::max(rep.max_u, std::abs(s.u.back()));
        }
        double sq = 0.0;
        for (std::size_t m = 0; m < k; ++m) {
            cplx acc{};
            for (std::size_t j = 0; j < k; ++j) acc += std::pow(s.omega[j], double(m)) * s.u[j];
            sq += std::norm(acc);
        }
        s.system_residual = std::sqrt(sq);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i + 1; j < k; ++j) s.min_gap = std::min(s.min_gap, std::abs(s.omega[i] - s.omega[j]));
        if (s.min_gap < collision_tolerance) rep.collisions.push_back(z);
        rep.max_system_residual = std::max(rep.max_system_residual, s.system_residual);
        rep.samples.push_back(std::move(s));
    }
    return rep;
}

std::vector<cplx> disc_samples(std::size_t rings, std::size_t per_ring, double r_max) {
    std::vector<cplx> out;
    for (std::size_t i = 0; i < rings; ++i) {
        const double r = r_max * double(i + 1) / double(rings);
        const double twist = (i % 2) ? std::numbers::pi / double(per_ring) : 0.0;
        for (std::size_t j = 0; j < per_ring; ++j)
            out.push_back(std::polar(r, 2.0 * std::numbers::pi * double(j) / double(per_ring) + twist));
    }
    return out;
}

}  // namespace hardylab
