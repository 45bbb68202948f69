#include "hardylab/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace hardylab {

using namespace symbol;

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string fmt_c(cplx c) {
    std::ostringstream os;
    os.precision(6);
    if (c.imag() == 0.0)
        os << c.real();
    else
        os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
    return os.str();
}

std::vector<cplx> trim(std::vector<cplx> c) {
    while (c.size() > 1 && c.back() == cplx{}) c.pop_back();
    if (c.empty()) c.push_back(0.0);
    return c;
}

}  // namespace

SymbolSpec SymbolSpec::polynomial(std::vector<cplx> coeffs) {
    return SymbolSpec(Polynomial{trim(std::move(coeffs))});
}

SymbolSpec SymbolSpec::moebius(cplx a) {
    if (!(std::abs(a) < 1.0)) throw std::invalid_argument("moebius: |a| must be < 1");
    return SymbolSpec(Moebius{a});
}

SymbolSpec SymbolSpec::unit_singular() { return SymbolSpec(UnitSingular{}); }

SymbolSpec SymbolSpec::scale(cplx factor, SymbolSpec inner) {
    if (factor == cplx{}) throw std::invalid_argument("scale: factor must be nonzero");
    return SymbolSpec(Scale{factor, std::make_shared<const SymbolSpec>(std::move(inner))});
}

SymbolSpec SymbolSpec::shift(cplx offset, SymbolSpec inner) {
    return SymbolSpec(Shift{offset, std::make_shared<const SymbolSpec>(std::move(inner))});
}

SymbolSpec SymbolSpec::compose(SymbolSpec outer, SymbolSpec inner) {
    return SymbolSpec(Compose{std::make_shared<const SymbolSpec>(std::move(outer)),
                              std::make_shared<const SymbolSpec>(std::move(inner))});
}

SymbolSpec SymbolSpec::raw(PowerSeries series) { return SymbolSpec(Raw{std::move(series)}); }

std::string SymbolSpec::tag() const {
    return std::visit(overloaded{[](const Polynomial&) { return std::string("polynomial"); },
                                 [](const Moebius&) { return std::string("moebius"); },
                                 [](const UnitSingular&) { return std::string("unit_singular"); },
                                 [](const Scale&) { return std::string("scale"); },
                                 [](const Shift&) { return std::string("shift"); },
                                 [](const Compose&) { return std::string("compose"); },
                                 [](const Raw&) { return std::string("raw"); }},
                      *node_);
}

std::string SymbolSpec::describe() const {
    return std::visit(
        overloaded{[](const Polynomial& p) {
                       std::string s;
                       for (std::size_t k = 0; k < p.coeffs.size(); ++k) {
                           if (p.coeffs[k] == cplx{}) continue;
                           if (!s.empty()) s += " + ";
                           s += fmt_c(p.coeffs[k]);
                           if (k == 1) s += "z";
                           if (k > 1) s += "z^" + std::to_string(k);
                       }
                       return s.empty() ? std::string("0") : s;
                   },
                   [](const Moebius& m) { return "moebius(" + fmt_c(m.a) + ")"; },
                   [](const UnitSingular&) { return std::string("exp((z+1)/(z-1))"); },
                   [](const Scale& s) { return fmt_c(s.factor) + "*[" + s.inner->describe() + "]"; },
                   [](const Shift& s) { return fmt_c(s.offset) + "+[" + s.inner->describe() + "]"; },
                   [](const Compose& c) {
                       return "[" + c.outer->describe() + "]o[" + c.inner->describe() + "]";
                   },
                   [](const Raw& r) {
                       return "raw(N=" + std::to_string(r.series.truncation()) + ")";
                   }},
        *node_);
}

bool SymbolSpec::is_unit_singular() const noexcept {
    return std::holds_alternative<UnitSingular>(*node_);
}

std::optional<std::vector<cplx>> SymbolSpec::polynomial_coeffs() const {
    return std::visit(
        overloaded{
            [](const Polynomial& p) -> std::optional<std::vector<cplx>> { return p.coeffs; },
            [](const Moebius& m) -> std::optional<std::vector<cplx>> {
                if (m.a == cplx{}) return std::vector<cplx>{0.0, -1.0};
                return std::nullopt;
            },
            [](const UnitSingular&) -> std::optional<std::vector<cplx>> { return std::nullopt; },
            [](const Scale& s) -> std::optional<std::vector<cplx>> {
                auto c = s.inner->polynomial_coeffs();
                if (c)
                    for (auto& x : *c) x *= s.factor;
                return c;
            },
            [](const Shift& s) -> std::optional<std::vector<cplx>> {
                auto c = s.inner->polynomial_coeffs();
                if (c) (*c)[0] += s.offset;
                return c;
            },
            [](const Compose& c) -> std::optional<std::vector<cplx>> {
                auto o = c.outer->polynomial_coeffs();
                auto i = c.inner->polynomial_coeffs();
                if (!o || !i) return std::nullopt;
                const std::size_t deg = (o->size() - 1) * (i->size() - 1) + 1;
                const auto outer = PowerSeries::polynomial(*o, deg);
                const auto inner = PowerSeries::polynomial(*i, deg);
                return trim(hardylab::compose(outer, inner).coeffs());
            },
            [](const Raw& r) -> std::optional<std::vector<cplx>> {
                const auto d = r.series.exact_degree();
                if (!d || static_cast<std::size_t>(*d) >= r.series.truncation()) return std::nullopt;
                return trim(std::vector<cplx>(r.series.coeffs().begin(),
                                              r.series.coeffs().begin() + *d + 1));
            }},
        *node_);
}

bool SymbolSpec::is_z2z() const {
    const auto c = polynomial_coeffs();
    return c && c->size() == 3 && (*c)[0] == cplx{} && (*c)[1] == cplx{1.0} && (*c)[2] == cplx{1.0};
}

bool operator==(const SymbolSpec& a, const SymbolSpec& b) {
    if (a.node_ == b.node_) return true;
    if (a.node_->index() != b.node_->index()) return false;
    return std::visit(
        overloaded{
            [&](const Polynomial& p) { return p.coeffs == std::get<Polynomial>(*b.node_).coeffs; },
            [&](const Moebius& m) { return m.a == std::get<Moebius>(*b.node_).a; },
            [&](const UnitSingular&) { return true; },
            [&](const Scale& s) {
                const auto& o = std::get<Scale>(*b.node_);
                return s.factor == o.factor && *s.inner == *o.inner;
            },
            [&](const Shift& s) {
                const auto& o = std::get<Shift>(*b.node_);
                return s.offset == o.offset && *s.inner == *o.inner;
            },
            [&](const Compose& c) {
                const auto& o = std::get<Compose>(*b.node_);
                return *c.outer == *o.outer && *c.inner == *o.inner;
            },
            [&](const Raw& r) {
                const auto& o = std::get<Raw>(*b.node_);
                return r.series.coeffs() == o.series.coeffs() &&
                       r.series.exact_degree() == o.series.exact_degree();
            }},
        *a.node_);
}

Jet evaluate_jet(const SymbolSpec& spec, cplx z) {
    return std::visit(
        overloaded{
            [&](const Polynomial& p) {
                Jet j{0.0, 0.0, 0.0};
                for (std::size_t k = p.coeffs.size(); k-- > 0;) {
                    j.d2 = j.d2 * z + 2.0 * j.d1;
                    j.d1 = j.d1 * z + j.value;
                    j.value = j.value * z + p.coeffs[k];
                }
                return j;
            },
            [&](const Moebius& m) {
                const cplx den = 1.0 - std::conj(m.a) * z;
                const cplx k = std::norm(m.a) - 1.0;
                return Jet{(m.a - z) / den, k / (den * den),
                           2.0 * std::conj(m.a) * k / (den * den * den)};
            },
            [&](const UnitSingular&) {
                const cplx d = z - 1.0;
                const cplx s = (z + 1.0) / d;
                const cplx s1 = -2.0 / (d * d);
                const cplx s2 = 4.0 / (d * d * d);
                const cplx f = std::exp(s);
                return Jet{f, s1 * f, (s2 + s1 * s1) * f};
            },
            [&](const Scale& s) {
                const Jet j = evaluate_jet(*s.inner, z);
                return Jet{s.factor * j.value, s.factor * j.d1, s.factor * j.d2};
            },
            [&](const Shift& s) {
                Jet j = evaluate_jet(*s.inner, z);
                j.value += s.offset;
                return j;
            },
            [&](const Compose& c) {
                const Jet g = evaluate_jet(*c.inner, z);
                const Jet f = evaluate_jet(*c.outer, g.value);
                return Jet{f.value, f.d1 * g.d1, f.d2 * g.d1 * g.d1 + f.d1 * g.d2};
            },
            [&](const Raw& r) {
                Jet j{0.0, 0.0, 0.0};
                const auto& a = r.series.coeffs();
                for (std::size_t k = r.series.support_end(); k-- > 0;) {
                    j.d2 = j.d2 * z + 2.0 * j.d1;
                    j.d1 = j.d1 * z + j.value;
                    j.value = j.value * z + a[k];
                }
                return j;
            }},
        spec.node());
}

cplx evaluate(const SymbolSpec& spec, cplx z) {
    if (!(std::abs(z) < 1.0)) throw MathError("outside-disc", "evaluate: |z| must be < 1");
    return evaluate_jet(spec, z).value;
}

namespace {

// exp(sigma(c + t)) with sigma(z) = (z+1)/(z-1). The composite f satisfies
// (z - 1)^2 f' = -2 f, which in t = z - c with d = c - 1 reads
// d^2 (n+1) e_{n+1} + 2 d n e_n + (n-1) e_{n-1} = -2 e_n.
PowerSeries unit_singular_taylor(cplx c, std::size_t n) {
    const cplx d = c - 1.0;
    std::vector<cplx> e(n);
    e[0] = std::exp((c + 1.0) / d);
    const cplx d2 = d * d;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double kk = static_cast<double>(k);
        const cplx prev = k > 0 ? e[k - 1] : cplx{};
        e[k + 1] = (-2.0 * e[k] - 2.0 * d * kk * e[k] - (kk - 1.0) * prev) / (d2 * (kk + 1.0));
    }
    return PowerSeries(std::move(e), std::nullopt);
}

}  // namespace

PowerSeries taylor_at(const SymbolSpec& spec, cplx c, std::size_t n) {
    if (n == 0) throw std::invalid_argument("taylor_at: truncation must be >= 1");
    if (!(std::abs(c) < 1.0)) throw MathError("outside-disc", "taylor_at: centre must lie in the disc");
    return std::visit(
        overloaded{
            [&](const Polynomial& p) {
                const auto s = PowerSeries::polynomial(p.coeffs, std::max(n, p.coeffs.size()));
                if (c == cplx{}) return s.resized(n);
                return recentre(s, c, s.l1_norm(), nullptr).resized(n);
            },
            [&](const Moebius& m) {
                const std::vector<cplx> num{m.a - c, -1.0};
                const std::vector<cplx> den{1.0 - std::conj(m.a) * c, -std::conj(m.a)};
                auto q = divide(PowerSeries::polynomial(num, n), PowerSeries::polynomial(den, n));
                if (m.a == cplx{}) return PowerSeries(q.coeffs(), 1);
                return q;
            },
            [&](const UnitSingular&) { return unit_singular_taylor(c, n); },
            [&](const Scale& s) { return taylor_at(*s.inner, c, n) * s.factor; },
            [&](const Shift& s) { return taylor_at(*s.inner, c, n).plus_constant(s.offset); },
            [&](const Compose& comp) {
                const PowerSeries in = taylor_at(*comp.inner, c, n);
                const cplx c2 = in[0];
                if (!(std::abs(c2) < 1.0))
                    throw MathError("not-self-map", "compose: inner value leaves the disc");
                const PowerSeries out = taylor_at(*comp.outer, c2, n);
                return compose_formal(out, in.plus_constant(-c2));
            },
            [&](const Raw& r) {
                PowerSeries s = r.series;
                if (s.truncation() != n) {
                    if (n > s.truncation() && !s.is_polynomial())
                        throw MathError("truncation-mismatch",
                                        "raw series has fewer coefficients than requested");
                    s = s.resized(n);
                }
                if (c == cplx{}) return s;
                return recentre(s, c, s.l1_norm(), nullptr);
            }},
        spec.node());
}

PowerSeries to_series(const SymbolSpec& spec, std::size_t n) { return taylor_at(spec, 0.0, n); }

SeriesExpansion to_series_with_note(const SymbolSpec& spec, std::size_t n) {
    SeriesExpansion out{to_series(spec, n), {}, std::numeric_limits<double>::quiet_NaN()};
    if (out.series.is_polynomial()) {
        out.note = "exact: polynomial coefficients";
    } else if (spec.is_unit_singular() || is_known_inner(spec)) {
        out.tail_energy = std::max(0.0, 1.0 - out.series.energy());
        std::ostringstream os;
        os << "inner symbol; H2 energy beyond N=" << n << " is " << out.tail_energy;
        if (spec.is_unit_singular())
            os << "; coefficients from the exp-of-Moebius composite recurrence "
                  "(z-1)^2 f' = -2 f, absolute error ~1e-16 per coefficient";
        out.note = os.str();
    } else {
        out.note = "truncated Taylor coefficients; no tail estimate";
    }
    return out;
}

double sup_norm_upper_bound(const SymbolSpec& spec) {
    return std::visit(
        overloaded{[](const Polynomial& p) {
                       double s = 0.0;
                       for (const auto& c : p.coeffs) s += std::abs(c);
                       return s;
                   },
                   [](const Moebius&) { return 1.0; }, [](const UnitSingular&) { return 1.0; },
                   [](const Scale& s) { return std::abs(s.factor) * sup_norm_upper_bound(*s.inner); },
                   [](const Shift& s) { return std::abs(s.offset) + sup_norm_upper_bound(*s.inner); },
                   [](const Compose& c) { return sup_norm_upper_bound(*c.outer); },
                   [](const Raw& r) {
                       if (r.series.is_polynomial() &&
                           static_cast<std::size_t>(*r.series.exact_degree()) < r.series.truncation())
                           return r.series.l1_norm();
                       return std::numeric_limits<double>::infinity();
                   }},
        spec.node());
}

bool is_known_inner(const SymbolSpec& spec) {
    return std::visit(
        overloaded{[](const Polynomial& p) {
                       // c z^k with |c| = 1
                       int nz = 0;
                       cplx lead{};
                       for (const auto& c : p.coeffs)
                           if (c != cplx{}) {
                               ++nz;
                               lead = c;
                           }
                       return nz == 1 && p.coeffs.size() > 1 && std::abs(std::abs(lead) - 1.0) < 1e-15;
                   },
                   [](const Moebius&) { return true; }, [](const UnitSingular&) { return true; },
                   [](const Scale& s) {
                       return std::abs(std::abs(s.factor) - 1.0) < 1e-15 && is_known_inner(*s.inner);
                   },
                   [](const Shift&) { return false; },
                   [](const Compose& c) { return is_known_inner(*c.outer) && is_known_inner(*c.inner); },
                   [](const Raw&) { return false; }},
        spec.node());
}

bool is_known_univalent(const SymbolSpec& spec) {
    return std::visit(
        overloaded{[](const Polynomial& p) { return p.coeffs.size() == 2 && p.coeffs[1] != cplx{}; },
                   [](const Moebius&) { return true; }, [](const UnitSingular&) { return false; },
                   [](const Scale& s) { return is_known_univalent(*s.inner); },
                   [](const Shift& s) { return is_known_univalent(*s.inner); },
                   [](const Compose& c) {
                       return is_known_univalent(*c.outer) && is_known_univalent(*c.inner);
                   },
                   [](const Raw&) { return false; }},
        spec.node());
}

bool is_known_single_cover(const SymbolSpec& spec) {
    if (is_known_univalent(spec) || spec.is_z2z()) return true;
    if (const auto* s = std::get_if<Scale>(&spec.node())) return is_known_single_cover(*s->inner);
    if (const auto* s = std::get_if<Shift>(&spec.node())) return is_known_single_cover(*s->inner);
    return false;
}

namespace {

template <class F>
SupNormEstimate sup_scan(F&& f, std::size_t mesh, double eps) {
    if (mesh < 8) throw std::invalid_argument("sup_norm_estimate: need at least 8 boundary samples");
    const double r = 1.0 - eps;
    SupNormEstimate out{0.0, mesh, r, cplx{r, 0.0}};
    for (std::size_t j = 0; j < mesh; ++j) {
        const cplx z = std::polar(r, 2.0 * std::numbers::pi * double(j) / double(mesh));
        const double v = std::abs(f(z));
        if (v > out.value || !std::isfinite(v)) {
            out.value = v;
            out.argmax = z;
        }
    }
    return out;
}

}  // namespace

SupNormEstimate sup_norm_estimate(const SymbolSpec& spec, std::size_t mesh, double eps) {
    return sup_scan([&](cplx z) { return evaluate_jet(spec, z).value; }, mesh, eps);
}

SupNormEstimate sup_norm_estimate(const PowerSeries& s, std::size_t mesh, double eps) {
    return sup_scan([&](cplx z) { return evaluate_polynomial(s, z); }, mesh, eps);
}

bool certified_self_map(const SupNormEstimate& e, double margin) { return e.value < 1.0 - margin; }

PowerSeries compose(const SymbolSpec& outer, const PowerSeries& inner) {
    const std::size_t n = inner.truncation();
    const cplx c = inner[0];
    if (c == cplx{}) return compose_formal(to_series(outer, n), inner);
    if (!(std::abs(c) < 1.0)) throw MathError("not-self-map", "compose: inner(0) lies outside the disc");
    if (auto p = outer.polynomial_coeffs()) return hardylab::compose(PowerSeries::polynomial(*p, n), inner);
    return compose_formal(taylor_at(outer, c, n), inner.plus_constant(-c));
}

}  // namespace hardylab
