#include "hardylab/spectra.hpp"

#include <cmath>
#include <numbers>

#include "hardylab/parallel.hpp"

namespace hardylab {

namespace {

// Distance under which a Newton root is attributed to a known critical
// point; Newton converges only linearly at multiple roots.
constexpr double kCriticalCluster = 1e-5;

std::pair<cplx, cplx> shifted(const SymbolSpec& s, cplx z, cplx v) {
    const Jet j = evaluate_jet(s, z);
    return {j.value - v, j.d1};
}

bool is_scaled_unit_singular(const SymbolSpec& s, cplx& factor) {
    if (s.is_unit_singular()) {
        factor = 1.0;
        return true;
    }
    if (const auto* sc = std::get_if<symbol::Scale>(&s.node()); sc && sc->inner->is_unit_singular()) {
        factor = sc->factor;
        return true;
    }
    return false;
}

PowerSeries linear(cplx a0, cplx a1, std::size_t n) {
    const std::vector<cplx> c{a0, a1};
    return PowerSeries::polynomial(c, n);
}

}  // namespace

Subordinator::Subordinator(const SymbolSpec& phi, std::size_t n, std::size_t certificate_mesh)
    : phi_(phi), n_(n), mesh_(certificate_mesh) {
    if (n < 8) throw std::invalid_argument("Subordinator: truncation must be >= 8");
    cplx a, b;
    if (affine_unit_singular(phi, a, b)) return;  // phi' never vanishes
    if (auto p = phi.polynomial_coeffs(); p && p->size() <= 2) return;

    RootOptions ro;
    const auto crit = disc_roots(
        [&](cplx z) {
            const Jet j = evaluate_jet(phi, z);
            return std::pair{j.d1, j.d2};
        },
        ro);
    for (const cplx c : crit) {
        const cplx v = evaluate_jet(phi, c).value;
        RootOptions fo;
        fo.scale = std::max(1.0, std::abs(v));
        const auto fibre = disc_roots([&](cplx z) { return shifted(phi, z, v); }, fo);
        bool all_critical = true;
        for (const cplx r : fibre) {
            bool near = false;
            for (const cplx c2 : crit) near = near || std::abs(r - c2) < kCriticalCluster;
            all_critical = all_critical && near;
        }
        if (all_critical) critical_.push_back(c);
    }
}

std::optional<CriticalObstruction> Subordinator::obstruction(const SymbolSpec& psi) const {
    for (const cplx c : critical_) {
        const cplx v = evaluate_jet(phi_, c).value;
        RootOptions ro;
        ro.scale = std::max(1.0, std::abs(v));
        ro.first_only = true;
        const auto hits = disc_roots([&](cplx z) { return shifted(psi, z, v); },
                                     [&](cplx z) { return std::abs(evaluate_jet(psi, z).d1) > 1e-6; }, ro);
        if (!hits.empty()) return CriticalObstruction{c, v, hits.front()};
    }
    return std::nullopt;
}

void Subordinator::finish(SubordinationResult& r, const SymbolSpec& psi) const {
    const PowerSeries& w = *r.omega;
    const auto cert = sup_norm_estimate(w, mesh_);
    r.certificate = cert.value;
    const auto target = to_series(psi, n_);
    try {
        r.composition_residual = max_coeff_diff(compose(phi_, w), target);
    } catch (const MathError&) {
        r.composition_residual = std::numeric_limits<double>::infinity();
    }
    double pw = 0.0;
    for (double rad : {0.25, 0.5, 0.75})
        for (int j = 0; j < 32; ++j) {
            const cplx z = std::polar(rad, 2.0 * std::numbers::pi * j / 32.0);
            const cplx wz = evaluate_polynomial(w, z);
            if (!(std::abs(wz) < 1.0)) {
                pw = std::numeric_limits<double>::infinity();
                continue;
            }
            pw = std::max(pw, std::abs(evaluate(phi_, wz) - evaluate(psi, z)) / std::max(1.0, std::abs(evaluate(psi, z))));
        }
    r.pointwise_residual = pw;
    const double tol = kCompositionTolerance * std::max(1.0, target.max_abs_coeff());
    if (!certified_self_map(cert)) {
        r.failure = "not-self-map";
        r.detail = "sup |omega| estimate " + std::to_string(cert.value) + " is not below 1";
    } else if (!(r.composition_residual <= tol) || !(pw <= kPointwiseTolerance)) {
        r.failure = r.method == "explicit-branch" ? "branch-cut-hit" : "not-self-map";
        r.detail = "lift does not reproduce psi on the disc";
    }
}

SubordinationResult Subordinator::solve(const SymbolSpec& psi) const {
    SubordinationResult r;
    if (psi == phi_) {
        r.method = "identity";
        r.omega = PowerSeries::identity(n_);
        finish(r, psi);
        return r;
    }

    cplx factor;
    if (phi_.is_unit_singular() && is_scaled_unit_singular(psi, factor)) {
        // sigma(omega) = sigma(z) - Log lambda with sigma(z) = (z+1)/(z-1)
        // is the Moebius map omega = ((2 - l) z + l) / (2 + l - l z).
        r.method = "log-lift";
        const cplx l = std::log(1.0 / factor);
        if (l.real() < 0.0) {
            r.failure = "not-self-map";
            r.detail = "log-lift needs |lambda| >= 1";
            return r;
        }
        r.omega = divide(linear(l, 2.0 - l, n_), linear(2.0 + l, -l, n_));
        finish(r, psi);
        return r;
    }

    if (const auto ob = obstruction(psi)) {
        r.method = "reversion";
        r.failure = "critical-point";
        r.anchor = ob->a;
        r.detail = "psi takes the critical value " + std::to_string(ob->critical_value.real()) + "+" +
                   std::to_string(ob->critical_value.imag()) + "i univalently at a point of the disc";
        return r;
    }

    if (!phi_.is_z2z()) return reversion_lift(psi);
    auto br = explicit_branch(psi);
    if (br.ok() || br.failure == "critical-point") return br;
    auto rev = reversion_lift(psi);
    return rev.ok() ? rev : br;
}

SubordinationResult Subordinator::reversion_lift(const SymbolSpec& psi) const {
    SubordinationResult r;
    r.method = "reversion";
    const cplx target = evaluate(psi, 0.0);
    RootOptions ro;
    ro.scale = std::max(1.0, std::abs(target));
    const auto z0s = disc_roots([&](cplx z) { return shifted(phi_, z, target); }, ro);
    if (z0s.empty()) {
        r.failure = "no-root";
        r.detail = "no z0 in the disc with phi(z0) = psi(0)";
        return r;
    }
    const auto dpsi = to_series(psi, n_).plus_constant(-target);
    SubordinationResult best;
    bool any_regular = false;
    for (const cplx z0 : z0s) {
        const PowerSeries local = taylor_at(phi_, z0, n_).plus_constant(-target);
        if (std::abs(local[1]) < 1e-8) continue;
        any_regular = true;
        SubordinationResult t;
        t.method = r.method;
        t.anchor = z0;
        auto lc = local.coeffs();
        lc[0] = 0.0;  // phi(z0) = psi(0) up to the Newton tolerance
        t.omega = compose_formal(reversion(PowerSeries(std::move(lc), local.exact_degree())), dpsi).plus_constant(z0);
        finish(t, psi);
        if (t.ok()) return t;
        if (!best.omega) best = t;
    }
    if (!any_regular) {
        r.failure = "critical-point";
        r.detail = "every root of phi(z0) = psi(0) is critical";
        return r;
    }
    return best;
}

SubordinationResult Subordinator::explicit_branch(const SymbolSpec& psi) const {
    SubordinationResult r;
    r.method = "explicit-branch";
    const auto s = to_series(psi, n_).plus_constant(0.25);
    if (s[0] == cplx{}) {
        r.failure = "critical-point";
        r.detail = "psi(0) is the critical value -1/4";
        return r;
    }
    const auto root = series_sqrt(s);
    SubordinationResult best;
    for (const cplx sign : {cplx{1.0}, cplx{-1.0}}) {
        SubordinationResult t;
        t.method = r.method;
        t.omega = (root * sign).plus_constant(-0.5);
        finish(t, psi);
        if (t.ok()) return t;
        if (!best.omega) best = t;
    }
    return best;
}

SubordinationResult subordination_solve(const SymbolSpec& phi, const SymbolSpec& psi, std::size_t n) {
    return Subordinator(phi, n).solve(psi);
}

std::string to_string(EEStatus s) {
    switch (s) {
        case EEStatus::in: return "in";
        case EEStatus::out: return "out";
        case EEStatus::undetermined: return "undetermined";
    }
    return "?";
}

EEAnalyzer::EEAnalyzer(const SymbolSpec& phi, const EEOptions& opt)
    : phi_(phi),
      opt_(opt),
      cls_(phi, opt.plan.mesh, opt.plan.valence_radius),
      sub_(phi, opt.truncation, opt.certificate_mesh),
      obstruction_decisive_(phi.is_z2z() || is_known_univalent(phi)) {}

EEVerdict EEAnalyzer::verdict(cplx lambda) const {
    if (lambda == cplx{}) throw std::invalid_argument("ee_membership: lambda must be nonzero");
    const SymbolSpec psi = lambda == cplx{1.0} ? phi_ : SymbolSpec::scale(1.0 / lambda, phi_);
    EEVerdict v{lambda, false, 0, 0, false, "", "", EEStatus::undetermined, ""};
    const auto nec = image_contained(psi, cls_, opt_.plan);
    v.necessary_pass = nec.closure_contained();
    v.necessary_outside = nec.outside;
    v.necessary_unresolved = nec.unresolved;
    const auto lift = sub_.solve(psi);
    v.constructive_pass = lift.ok();
    v.method = lift.method;
    v.failure = lift.failure;
    if (v.constructive_pass && v.necessary_pass) {
        v.status = EEStatus::in;
        v.reason = "lift verified (" + lift.method + ")";
    } else if (v.constructive_pass) {
        v.reason = "lift verified but a D1 sample fell outside";
    } else if (!v.necessary_pass) {
        v.status = EEStatus::out;
        v.reason = "D1 violation: phi(U)/lambda leaves clos phi(U)";
    } else if (lift.failure == "critical-point" && obstruction_decisive_) {
        v.status = EEStatus::out;
        v.reason = "critical obstruction: " + lift.detail;
    } else {
        v.reason = "no lift: " + lift.failure;
    }
    return v;
}

std::vector<EEVerdict> EEAnalyzer::scan(const std::vector<cplx>& grid) const {
    std::vector<EEVerdict> out(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { out[i] = verdict(grid[i]); });
    return out;
}

EEVerdict ee_membership(const SymbolSpec& phi, cplx lambda, const EEOptions& opt) {
    return EEAnalyzer(phi, opt).verdict(lambda);
}

EEReport ee_scan(const SymbolSpec& phi, const std::vector<cplx>& grid, const EEOptions& opt) {
    std::vector<cplx> g;
    for (const cplx l : grid)
        if (l != cplx{}) g.push_back(l);
    const EEAnalyzer an(phi, opt);
    return EEReport{phi, g, an.scan(g)};
}

std::vector<cplx> square_grid(std::size_t side, double half) {
    if (side < 2) throw std::invalid_argument("square_grid: side must be >= 2");
    std::vector<cplx> g;
    g.reserve(side * side);
    for (std::size_t i = 0; i < side; ++i)
        for (std::size_t j = 0; j < side; ++j)
            g.emplace_back(-half + 2.0 * half * double(j) / double(side - 1),
                           half - 2.0 * half * double(i) / double(side - 1));
    return g;
}

Z2ZPredicate ee_predicate_z2z(cplx lambda, const RegionClassifier* cls) {
    if (lambda == cplx{}) throw std::invalid_argument("ee_predicate_z2z: lambda must be nonzero");
    std::optional<RegionClassifier> own;
    if (!cls) cls = &own.emplace(SymbolSpec::z2z());
    const cplx w = -lambda / 4.0;
    Z2ZPredicate p{};
    p.verdict = cls->classify(w);
    const bool inside = p.verdict.status == RegionStatus::inside && p.verdict.valence >= 1;
    p.resolved = p.verdict.status != RegionStatus::unresolved;
    p.cardioid_agrees = !p.resolved || cardioid_membership(w) == inside;
    if (lambda == cplx{1.0}) {
        p.member = true;
        p.resolved = true;
    } else {
        p.member = !inside;
    }
    return p;
}

std::optional<EigenvectorHit> eigenvector_for_value(const SymbolSpec& phi, cplx alpha, std::size_t n) {
    RootOptions ro;
    ro.scale = std::max(1.0, std::abs(alpha));
    const auto roots = disc_roots([&](cplx z) { return shifted(phi, z, alpha); }, ro);
    if (roots.empty()) return std::nullopt;
    const cplx a = roots.front();
    EigenvectorHit h{a, kernel_vector(a, n), kernel_eigen_residual(phi, a, n), false};
    h.verified = h.residual.residual <= h.residual.tail_bound;
    return h;
}

PowerCheck ee_power_check(const SymbolSpec& phi, cplx lambda, unsigned power, std::size_t n) {
    if (power < 2 || power > 3) throw std::invalid_argument("ee_power_check: power must be 2 or 3");
    if (lambda == cplx{}) throw std::invalid_argument("ee_power_check: lambda must be nonzero");
    const SymbolSpec psi = lambda == cplx{1.0} ? phi : SymbolSpec::scale(1.0 / lambda, phi);
    PowerCheck pc{lambda, power, std::pow(lambda, double(power)), subordination_solve(phi, psi, n), false,
                  std::numeric_limits<double>::quiet_NaN()};
    if (!pc.lift.ok()) return pc;
    const PowerSeries& w = *pc.lift.omega;
    const cplx c = w[0];
    const auto outer = hardylab::power(taylor_at(phi, c, n), power);
    const auto lhs = compose_formal(outer, w.plus_constant(-c));
    const auto rhs = hardylab::power(to_series(phi, n), power) * (1.0 / pc.lambda_power);
    pc.residual = max_coeff_diff(lhs, rhs);
    pc.certified = pc.residual <= kCompositionTolerance * std::max(1.0, rhs.max_abs_coeff());
    return pc;
}

}  // namespace hardylab
