#pragma once

#include "hardylab/operators.hpp"

namespace hardylab {

/// Shift-type data for S = T_psi with psi inner.
///
/// Q = I - S S^* on the truncation equals the compression of the true
/// projection onto ker S^* exactly (S is lower triangular), so the W basis
/// columns are truncations u = P w of genuine elements w of ker S^*.
struct WoldData {
    OperatorMatrix S;
    /// Orthonormal columns: Gram-Schmidt of Q e_0, Q e_1, ... (at most
    /// `max_basis` vectors; columns with negligible residual are skipped).
    Matrix Wbasis;
    /// For each basis column u = P w: sqrt(||w||^2 - ||u||^2), the norm of the
    /// part of w lost to truncation.
    std::vector<double> w_defect;
    double orthonormality_defect;
    /// 1 - ||T_psi e_0||^2 on the truncation.
    double isometry_defect;
    double sup_estimate;
};

struct WoldOptions {
    std::size_t max_basis = 8;
    /// Accepted column-isometry defect for the inner certificate.
    double inner_tolerance = 0.05;
    std::size_t mesh = 4096;
};

WoldData wold_data(const SymbolSpec& psi, std::size_t n, const WoldOptions& opt = {});

/// (n+1)(n+2)...(n+order), exact for order, n <= 20.
unsigned __int128 wold_coefficient_exact(unsigned order, unsigned n);
double wold_coefficient(unsigned order, unsigned n);

struct KernelEval {
    Vector value;
    /// Eq-level truncation bound for the tested identity.
    double bound;
    double residual;
};

/// S^m u for m = 0..last together with t_m = sqrt(||S^{m-1}u||^2 - ||S^m u||^2),
/// the mass the m-th application of S pushes past the truncation.
struct ShiftOrbit {
    std::size_t column = 0;
    std::vector<Vector> powers;
    std::vector<double> t;
};

ShiftOrbit shift_orbit(const WoldData& d, std::size_t column, std::size_t last);

/// K(lambda, u) = sum_{n<=cutoff} (S^n u) lambda^n and the residual of
/// S^* K = lambda K, with bound tau_w + sum_{n>=1} |lambda|^n t_n +
/// |lambda|^{cutoff+1} ||S^cutoff u|| where t_n is the mass pushed out of the
/// truncation by the n-th application of S.
KernelEval wold_kernel_check(const WoldData& d, const ShiftOrbit& o, cplx lambda, std::size_t cutoff);

/// K_p(lambda, u) = sum_{n<=cutoff} c_{p,n} (S^{p+n} u) lambda^n and the
/// residual of (S^* - lambda) K_p = p K_{p-1}, p >= 1.
KernelEval wold_derivative_check(const WoldData& d, const ShiftOrbit& o, unsigned p, cplx lambda,
                                 std::size_t cutoff);

}  // namespace hardylab
