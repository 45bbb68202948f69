#include "hardylab/operators.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace hardylab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::string series_label(const char* prefix, const PowerSeries& s) {
    std::ostringstream os;
    os << prefix << "[N=" << s.truncation();
    if (s.exact_degree()) os << ",deg=" << *s.exact_degree();
    os << "]";
    return os.str();
}

}  // namespace

OperatorMatrix toeplitz_matrix(const PowerSeries& phi, std::size_t n) {
    if (phi.truncation() < n)
        throw MathError("truncation-mismatch", "toeplitz_matrix: symbol has fewer than N coefficients");
    OperatorMatrix m;
    m.truncation = n;
    m.entries = Matrix::Zero(n, n);
    const std::size_t end = std::min(n, phi.support_end());
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t d = 0; d < end && k + d < n; ++d) m.entries(k + d, k) = phi[d];
    if (phi.is_polynomial() && static_cast<std::size_t>(*phi.exact_degree()) < n)
        m.valid_block = n - static_cast<std::size_t>(*phi.exact_degree());
    m.label = series_label("T", phi);
    return m;
}

OperatorMatrix toeplitz_matrix(const SymbolSpec& phi, std::size_t n) {
    auto m = toeplitz_matrix(to_series(phi, n), n);
    m.label = "T[" + phi.describe() + "]";
    return m;
}

OperatorMatrix weighted_composition_matrix(const PowerSeries& omega, const PowerSeries& h, std::size_t n,
                                           std::size_t mesh) {
    if (omega.truncation() != n || h.truncation() != n)
        throw MathError("truncation-mismatch", "weighted_composition_matrix: series must have truncation N");
    if (h.valuation() == h.truncation())
        throw MathError("zero-weight", "weighted_composition_matrix: h is identically zero");
    if (omega[0] != cplx{}) {
        const auto cert = sup_norm_estimate(omega, mesh);
        if (!certified_self_map(cert))
            throw MathError("not-self-map", "weighted_composition_matrix: omega fails the self-map certificate "
                                            "(boundary estimate " + std::to_string(cert.value) + ")");
    }
    OperatorMatrix m;
    m.truncation = n;
    m.entries = Matrix::Zero(n, n);
    PowerSeries col = h;
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < col.support_end(); ++j) m.entries(j, k) = col[j];
        if (k + 1 < n) col = multiply(col, omega);
    }
    // columns whose image h * omega^k is a polynomial of degree < N
    if (omega.is_polynomial() && h.is_polynomial()) {
        const std::size_t dw = static_cast<std::size_t>(*omega.exact_degree());
        const std::size_t dh = static_cast<std::size_t>(*h.exact_degree());
        std::size_t b = 0;
        while (b < n && dh + b * dw < n) ++b;
        m.valid_block = b;
    }
    m.label = "C[" + series_label("omega", omega) + "," + series_label("h", h) + "]";
    return m;
}

OperatorMatrix composition_matrix(const PowerSeries& omega, std::size_t n, std::size_t mesh) {
    auto m = weighted_composition_matrix(omega, PowerSeries::constant(1.0, n), n, mesh);
    m.label = "C[" + series_label("omega", omega) + "]";
    return m;
}

OperatorMatrix identity_operator(std::size_t n) {
    return OperatorMatrix{Matrix::Identity(n, n), n, n, "I"};
}

double KernelVector::squared_norm() const {
    const double r2 = std::norm(a);
    const double n = static_cast<double>(coords.size());
    if (r2 == 0.0) return 1.0;
    return (1.0 - std::pow(r2, n)) / (1.0 - r2);
}

KernelVector kernel_vector(cplx a, std::size_t n) {
    if (!(std::abs(a) < 1.0)) throw MathError("outside-disc", "kernel_vector: |a| must be < 1");
    KernelVector k{a, Vector(n)};
    const cplx ab = std::conj(a);
    cplx p = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        k.coords[j] = p;
        p *= ab;
    }
    return k;
}

KernelResidual kernel_eigen_residual(const SymbolSpec& phi, cplx a, std::size_t n) {
    const auto s = to_series(phi, n);
    const auto t = toeplitz_matrix(s, n);
    const auto k = kernel_vector(a, n);
    const cplx lam = std::conj(evaluate(phi, a));
    const Vector r = t.entries.adjoint() * k.coords - lam * k.coords;
    const double x = std::abs(a);
    const double knorm = std::sqrt(k.squared_norm());
    // exact compressed residual is P T^* (I - P) K_a
    double tail = sup_norm_upper_bound(phi) * std::pow(x, double(n)) / std::sqrt(1.0 - x * x);
    const double rounding = 4.0 * double(n) * kEps * std::max(1.0, s.l1_norm()) * knorm;
    return KernelResidual{r.norm(), tail + rounding, lam};
}

NormEstimate operator_norm(const Matrix& m, const PowerIterationOptions& opt) {
    const Eigen::Index n = m.cols();
    if (n == 0 || m.rows() == 0) return {0.0, 0, true};
    std::mt19937 rng(opt.seed);
    std::normal_distribution<double> g;
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = cplx{g(rng), g(rng)};
    v.normalize();
    const bool lower = m.rows() == m.cols() && m.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().isZero(0.0);
    double est = 0.0;
    Vector mv, w;
    for (std::size_t it = 1; it <= opt.max_iterations; ++it) {
        if (lower) {
            mv.noalias() = m.triangularView<Eigen::Lower>() * v;
            w.noalias() = m.triangularView<Eigen::Lower>().adjoint() * mv;
        } else {
            mv.noalias() = m * v;
            w.noalias() = m.adjoint() * mv;
        }
        const double mu = mv.norm();  // ||M v|| with ||v|| = 1
        const double wn = w.norm();
        if (wn == 0.0) return {0.0, it, true};
        v = w / wn;
        if (it > 1 && std::abs(mu - est) <= opt.tolerance * mu) return {mu, it, true};
        est = mu;
    }
    return {est, opt.max_iterations, false};
}

std::vector<double> adjoint_orbit_norms(const OperatorMatrix& t, const Vector& v, std::size_t steps) {
    std::vector<double> out;
    out.reserve(steps + 1);
    Vector x = v;
    out.push_back(x.norm());
    for (std::size_t k = 0; k < steps; ++k) {
        x = t.entries.adjoint() * x;
        out.push_back(x.norm());
    }
    return out;
}

void write_matrix_csv(std::ostream& out, const OperatorMatrix& m) {
    std::string label = m.label;
    for (auto& c : label)
        if (c == ' ' || c == '\n') c = '_';
    out << "# " << label << " " << m.truncation << " " << m.valid_block << "\n";
    out.precision(17);
    for (Eigen::Index i = 0; i < m.entries.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.entries.cols(); ++j) {
            if (j) out << ",";
            out << m.entries(i, j).real() << "," << m.entries(i, j).imag();
        }
        out << "\n";
    }
}

OperatorMatrix read_matrix_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
        throw std::invalid_argument("matrix CSV: missing '# label N valid_block' header");
    std::istringstream hs(line.substr(2));
    OperatorMatrix m;
    if (!(hs >> m.label >> m.truncation >> m.valid_block))
        throw std::invalid_argument("matrix CSV: malformed header");
    const std::size_t n = m.truncation;
    m.entries = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::getline(in, line)) throw std::invalid_argument("matrix CSV: too few rows");
        std::istringstream rs(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(rs, cell, ',')) vals.push_back(std::stod(cell));
        if (vals.size() != 2 * n) throw std::invalid_argument("matrix CSV: row has wrong length");
        for (std::size_t j = 0; j < n; ++j) m.entries(i, j) = {vals[2 * j], vals[2 * j + 1]};
    }
    return m;
}

PowerSeries column_series(const OperatorMatrix& m, std::size_t k) {
    std::vector<cplx> c(m.truncation);
    for (std::size_t j = 0; j < m.truncation; ++j) c[j] = m.entries(j, k);
    return PowerSeries(std::move(c), std::nullopt);
}

}  // namespace hardylab
