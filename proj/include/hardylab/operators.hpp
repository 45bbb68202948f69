#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include <Eigen/Dense>

#include "hardylab/series.hpp"
#include "hardylab/symbol.hpp"

namespace hardylab {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// N x N matrix in the monomial basis; column k is the image of z^k.
/// Columns 0..valid_block-1 are images that fit entirely inside the
/// truncation (no coefficient is lost).
struct OperatorMatrix {
    Matrix entries;
    std::size_t truncation = 0;
    std::size_t valid_block = 0;
    std::string label;

    std::size_t size() const noexcept { return truncation; }
};

/// Lower-triangular Toeplitz matrix of multiplication by phi.
OperatorMatrix toeplitz_matrix(const PowerSeries& phi, std::size_t n);
OperatorMatrix toeplitz_matrix(const SymbolSpec& phi, std::size_t n);

/// Column k = h * omega^k. omega must have omega(0) == 0 or pass the
/// self-map certificate on `mesh` boundary samples.
OperatorMatrix weighted_composition_matrix(const PowerSeries& omega, const PowerSeries& h, std::size_t n,
                                           std::size_t mesh = 4096);
/// Unweighted composition operator (h = 1).
OperatorMatrix composition_matrix(const PowerSeries& omega, std::size_t n, std::size_t mesh = 4096);

OperatorMatrix identity_operator(std::size_t n);

/// Coordinates conj(a)^k of the reproducing kernel at a.
struct KernelVector {
    cplx a;
    Vector coords;

    std::size_t truncation() const noexcept { return static_cast<std::size_t>(coords.size()); }
    /// (1 - |a|^{2N}) / (1 - |a|^2)
    double squared_norm() const;
};

KernelVector kernel_vector(cplx a, std::size_t n);

struct KernelResidual {
    double residual;  // ||T_phi^* K_a - conj(phi(a)) K_a||
    double tail_bound;
    cplx eigenvalue;  // conj(phi(a))
};

/// Residual of the adjoint eigen-relation for the compressed operator, with
/// the bound sup|phi| * |a|^N / sqrt(1 - |a|^2) plus a rounding allowance.
KernelResidual kernel_eigen_residual(const SymbolSpec& phi, cplx a, std::size_t n);

struct NormEstimate {
    double value;
    std::size_t iterations;
    bool converged;
};

struct PowerIterationOptions {
    double tolerance = 1e-8;
    std::size_t max_iterations = 10000;
    std::uint32_t seed = 12345;
};

/// Largest singular value by power iteration on M^* M.
NormEstimate operator_norm(const Matrix& m, const PowerIterationOptions& opt = {});
inline NormEstimate operator_norm(const OperatorMatrix& m, const PowerIterationOptions& opt = {}) {
    return operator_norm(m.entries, opt);
}

/// ||(T^*)^k v|| for k = 0..steps.
std::vector<double> adjoint_orbit_norms(const OperatorMatrix& t, const Vector& v, std::size_t steps);

/// CSV: header "# label N valid_block", then one row per matrix row with
/// re,im pairs interleaved.
void write_matrix_csv(std::ostream& out, const OperatorMatrix& m);
OperatorMatrix read_matrix_csv(std::istream& in);

/// Column k of the matrix as a power series (exact degree unknown).
PowerSeries column_series(const OperatorMatrix& m, std::size_t k);

}  // namespace hardylab
