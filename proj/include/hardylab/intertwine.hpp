#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hardylab/operators.hpp"

namespace hardylab {

struct IntertwineReport {
    /// Operator norm of (X T_phi - T_psi X) on the leading `valid_block`
    /// columns.
    double residual;
    double residual_frobenius;
    double max_abs_entry;
    /// Largest entry of X T_phi and T_psi X on the block; "exact" means
    /// max_abs_entry <= 1e-12 * scale.
    double scale;
    /// residual / (||X|| (||T_phi|| + ||T_psi||)).
    double relative_residual;
    std::size_t valid_block;
    /// Why the block is exact: "lower-triangular", "polynomial-phi", or
    /// "leading-half" (no exactness guarantee).
    std::string block_rule;
    double norm_x;
    double norm_phi;
    double norm_psi;
    bool norms_converged;
    bool exact_inputs;  // phi, psi polynomial and block guaranteed exact

    bool exact_zero(double tol = 1e-12) const noexcept { return max_abs_entry <= tol * scale; }
};

/// Residual of X T_phi = T_psi X on the columns where the compressed identity
/// provably equals the compression of the true one: all N when X is lower
/// triangular, the first N - deg(phi) when phi is a polynomial, otherwise the
/// leading N/2 (reported as "leading-half").
IntertwineReport intertwine_residual(const OperatorMatrix& x, const PowerSeries& phi, const PowerSeries& psi,
                                     const PowerIterationOptions& opt = {});

struct EigenFieldSample {
    cplx z;
    double norm_f;
    /// ||T_phi^* F - conj(psi(z)) F|| / ||F||, NaN inside Z(F).
    double relative_residual;
    /// Truncation explanation of the residual, relative to ||F||.
    double tail_bound;
    bool in_zero_set;
};

struct EigenFieldReport {
    std::vector<EigenFieldSample> samples;
    /// Z(F) threshold factor: ||F(z)|| < factor * ||X|| * ||K_z||.
    double zero_threshold;
    std::size_t zero_count;
};

inline constexpr double kZeroThreshold = 1e-8;

/// F(z) = X^* K_z. Generic tail: ||X|| * kernel tail of psi at z plus the
/// leak ||R_leak^* K_z|| from residual columns outside the exact block.
EigenFieldReport eigen_field(const OperatorMatrix& x, const SymbolSpec& phi, const SymbolSpec& psi,
                             const std::vector<cplx>& samples);

struct RecoverySample {
    cplx z;
    cplx h;
    cplx omega;
    bool h_zero;
    /// max_n |(X z^n)(z) / h(z) - omega(z)^n| for n = 2..4, relative to
    /// max(1, |omega|^n).
    double power_defect;
    bool consistent;
};

struct RecoveryReport {
    std::vector<RecoverySample> samples;
    double tolerance;
    std::size_t zero_count;
    double max_abs_omega;
    double max_power_defect;
    /// |omega| <= 1 + tol and power test passed on every nonzero sample.
    bool consistent;
};

/// h = X 1 and omega = (X z) / (X 1), pointwise; throws when h vanishes on
/// the whole grid.
RecoveryReport recover_weighted_comp(const OperatorMatrix& x, const std::vector<cplx>& samples,
                                     double tolerance = 1e-6);

struct DeddensBasis {
    Vector f;
    /// Columns P(phi^n f), n = 0..cutoff.
    Matrix fvecs;
    double f_norm;       // H^2 norm of the untruncated f (1 by construction)
    double gram_defect;  // max |<f_m, f_n> - delta_mn| on the truncation
    std::vector<double> tail_energy;
    double max_tail_energy;
};

struct DeddensResult {
    OperatorMatrix x;
    DeddensBasis basis;
    /// ||(X T_phi - T_z X) U|| with U an orthonormal basis of
    /// span{f_0, ..., f_{cutoff-1}}.
    double restricted_residual;
    Matrix span_basis;
    NormEstimate norm_x;
};

/// X = sum_{n <= cutoff} e_n f_n^*, f = (I - T_phi T_phi^*) e_0 normalized.
DeddensResult deddens_inner_X(const SymbolSpec& phi, std::size_t n, std::size_t cutoff,
                              double inner_tolerance = 0.05);

/// ||(X T_phi - T_psi X) U|| for the given orthonormal columns U.
double restricted_residual(const Matrix& x, const Matrix& t_phi, const Matrix& t_psi, const Matrix& u);

/// Truncation bound for the Deddens eigen-field, relative to ||F||:
/// (|z|^{cutoff+1} ||f_cutoff|| + sum_n |z|^n sqrt(tail_n)) / ||F(z)||.
double deddens_field_tail(const DeddensBasis& b, cplx z, double norm_f);
EigenFieldReport eigen_field(const DeddensResult& d, const SymbolSpec& phi, const std::vector<cplx>& samples);

struct FiniteDimPartner {
    Matrix y;
    Vector a;
    Vector b;
    double sigma_a;  // smallest singular value of A - lambda I
    double sigma_b;
    double residual;  // ||Y B - A Y||
    double eigen_residual;  // max(||A Y - lambda Y||, ||Y B - lambda Y||)
    double scale;
};

/// Y = a b^T with A a = lambda a and B^T b = lambda b.
FiniteDimPartner finite_dim_partner(const Matrix& a, const Matrix& b, cplx lambda, double tol = 1e-8);

struct VandermondeSample {
    cplx z;
    std::vector<cplx> omega;
    std::vector<cplx> u;
    double system_residual;  // ||V(z) u(z)||
    double min_gap;          // min_{i<j} |omega_i(z) - omega_j(z)|
};

struct VandermondeReport {
    std::vector<VandermondeSample> samples;
    double max_system_residual;
    double max_u;
    /// Samples whose omega values (nearly) coincide.
    std::vector<cplx> collisions;
    double collision_tolerance;
    std::vector<double> certificates;  // sup estimate of each omega_j
};

VandermondeReport vandermonde_system_check(const std::vector<PowerSeries>& omegas,
                                           const std::vector<PowerSeries>& hs, const SymbolSpec& phi,
                                           const SymbolSpec& psi, const std::vector<cplx>& samples,
                                           double collision_tolerance = 1e-6);

/// Deterministic sample grid inside the disc: rings of radius
/// r_max (i+1)/rings, `per_ring` angles each, with a per-ring twist.
std::vector<cplx> disc_samples(std::size_t rings, std::size_t per_ring, double r_max);

}  // namespace hardylab
