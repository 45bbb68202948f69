#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hardylab/geometry.hpp"
#include "hardylab/operators.hpp"
#include "hardylab/roots.hpp"

namespace hardylab {

/// Lift omega with phi o omega = psi, or a typed failure.
struct SubordinationResult {
    std::optional<PowerSeries> omega;
    /// "identity", "reversion", "explicit-branch", "log-lift".
    std::string method;
    /// Empty on success; otherwise "no-root", "critical-point",
    /// "branch-cut-hit" or "not-self-map".
    std::string failure;
    std::string detail;
    double certificate = std::numeric_limits<double>::quiet_NaN();
    /// max |[z^k](phi o omega - psi)| over the N retained coefficients.
    double composition_residual = std::numeric_limits<double>::quiet_NaN();
    /// max |phi(omega(z)) - psi(z)| on sample circles of radius <= 0.75.
    double pointwise_residual = std::numeric_limits<double>::quiet_NaN();
    /// Root z0 of phi(z0) = psi(0) used by the reversion method.
    std::optional<cplx> anchor;

    bool ok() const noexcept { return failure.empty() && omega.has_value(); }
};

inline constexpr double kCompositionTolerance = 1e-8;
inline constexpr double kPointwiseTolerance = 1e-6;

/// Witness that psi = phi o omega is impossible: psi(a) = v with psi'(a) != 0,
/// where every preimage of v under phi in the disc is a critical point.
struct CriticalObstruction {
    cplx critical_point;
    cplx critical_value;
    cplx a;
};

/// Solver bound to one outer symbol; caches its critical data.
class Subordinator {
public:
    Subordinator(const SymbolSpec& phi, std::size_t n, std::size_t certificate_mesh = 4096);

    SubordinationResult solve(const SymbolSpec& psi) const;
    std::optional<CriticalObstruction> obstruction(const SymbolSpec& psi) const;
    /// Local inverse of phi at a root of phi(z0) = psi(0), composed with psi.
    SubordinationResult reversion_lift(const SymbolSpec& psi) const;
    /// z^2 + z only: omega = -1/2 +- sqrt(psi + 1/4), the analytic root.
    SubordinationResult explicit_branch(const SymbolSpec& psi) const;

    const SymbolSpec& phi() const noexcept { return phi_; }
    std::size_t truncation() const noexcept { return n_; }
    /// Critical points c in the disc whose whole fibre phi^{-1}(phi(c)) is
    /// critical.
    const std::vector<cplx>& critical_fibres() const noexcept { return critical_; }

private:
    SymbolSpec phi_;
    std::size_t n_;
    std::size_t mesh_;
    std::vector<cplx> critical_;

    void finish(SubordinationResult& r, const SymbolSpec& psi) const;
};

SubordinationResult subordination_solve(const SymbolSpec& phi, const SymbolSpec& psi, std::size_t n);

enum class EEStatus { in, out, undetermined };
std::string to_string(EEStatus s);

struct EEVerdict {
    cplx lambda;
    bool necessary_pass;  // phi(U)/lambda inside clos phi(U), mesh-resolved
    std::size_t necessary_outside;
    std::size_t necessary_unresolved;
    bool constructive_pass;
    std::string method;   // lift method when constructive
    std::string failure;  // subordination failure otherwise
    EEStatus status;
    std::string reason;
};

struct EEOptions {
    std::size_t truncation = 128;
    std::size_t certificate_mesh = 4096;
    SamplingPlan plan = default_plan();

    static SamplingPlan default_plan() {
        SamplingPlan p;
        p.radial = 16;
        p.angular = 64;
        p.stop_at_first_violation = true;
        return p;
    }
};

/// Extended-eigenvalue verdicts for a fixed symbol. "in" needs a verified
/// lift; "out" needs a resolved D1 violation, or a critical obstruction for
/// symbols where the obstruction is decisive (z^2 + z, univalent symbols).
class EEAnalyzer {
public:
    explicit EEAnalyzer(const SymbolSpec& phi, const EEOptions& opt = {});

    EEVerdict verdict(cplx lambda) const;
    std::vector<EEVerdict> scan(const std::vector<cplx>& grid) const;

    const RegionClassifier& classifier() const noexcept { return cls_; }
    const Subordinator& subordinator() const noexcept { return sub_; }

private:
    SymbolSpec phi_;
    EEOptions opt_;
    RegionClassifier cls_;
    Subordinator sub_;
    bool obstruction_decisive_;
};

EEVerdict ee_membership(const SymbolSpec& phi, cplx lambda, const EEOptions& opt = {});

struct EEReport {
    SymbolSpec symbol;
    std::vector<cplx> grid;
    std::vector<EEVerdict> verdicts;
};

EEReport ee_scan(const SymbolSpec& phi, const std::vector<cplx>& grid, const EEOptions& opt = {});

/// side x side points spanning [-half, half]^2 inclusive (row-major, y down).
std::vector<cplx> square_grid(std::size_t side, double half);

struct Z2ZPredicate {
    bool member;    // lambda = 1 or -lambda/4 outside phi(U), phi = z^2 + z
    bool resolved;  // the valence verdict for -lambda/4 was resolved
    RegionVerdict verdict;
    bool cardioid_agrees;
};

/// Closed-form extended-eigenvalue region of T_{z^2+z}.
Z2ZPredicate ee_predicate_z2z(cplx lambda, const RegionClassifier* cls = nullptr);

struct EigenvectorHit {
    cplx a;
    KernelVector kernel;
    KernelResidual residual;
    bool verified;  // residual <= tail bound
};

/// Point a in the disc with phi(a) = alpha and the kernel K_a, whose adjoint
/// eigen-relation is checked at truncation n. No hit proves nothing.
std::optional<EigenvectorHit> eigenvector_for_value(const SymbolSpec& phi, cplx alpha, std::size_t n = 256);

struct PowerCheck {
    cplx lambda;
    unsigned power;
    cplx lambda_power;
    SubordinationResult lift;
    bool certified;
    /// max coefficient of phi^n o omega - (phi / lambda)^n.
    double residual;
};

/// If lambda has a lift omega for phi, the same omega lifts phi^n over
/// phi^n / lambda^n.
PowerCheck ee_power_check(const SymbolSpec& phi, cplx lambda, unsigned power, std::size_t n = 128);

}  // namespace hardylab
