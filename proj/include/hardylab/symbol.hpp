#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hardylab/series.hpp"

namespace hardylab {

class SymbolSpec;

namespace symbol {

struct Polynomial {
    std::vector<cplx> coeffs;
};
/// z -> (a - z) / (1 - conj(a) z), |a| < 1
struct Moebius {
    cplx a;
};
/// exp((z + 1) / (z - 1))
struct UnitSingular {};
struct Scale {
    cplx factor;
    std::shared_ptr<const SymbolSpec> inner;
};
struct Shift {
    cplx offset;
    std::shared_ptr<const SymbolSpec> inner;
};
struct Compose {
    std::shared_ptr<const SymbolSpec> outer;
    std::shared_ptr<const SymbolSpec> inner;
};
struct Raw {
    PowerSeries series;
};

using Node = std::variant<Polynomial, Moebius, UnitSingular, Scale, Shift, Compose, Raw>;

}  // namespace symbol

/// Structured description of an analytic symbol on the unit disc. Immutable;
/// children are shared, so copies are cheap.
class SymbolSpec {
public:
    static SymbolSpec polynomial(std::vector<cplx> coeffs);
    static SymbolSpec moebius(cplx a);
    static SymbolSpec unit_singular();
    static SymbolSpec scale(cplx factor, SymbolSpec inner);
    static SymbolSpec shift(cplx offset, SymbolSpec inner);
    static SymbolSpec compose(SymbolSpec outer, SymbolSpec inner);
    static SymbolSpec raw(PowerSeries series);

    static SymbolSpec z() { return polynomial({0.0, 1.0}); }
    static SymbolSpec z2z() { return polynomial({0.0, 1.0, 1.0}); }

    const symbol::Node& node() const noexcept { return *node_; }
    std::string tag() const;
    std::string describe() const;

    bool is_unit_singular() const noexcept;
    /// Coefficients when the symbol reduces to a polynomial (polynomial,
    /// scale/shift of one, or a raw series with finite exact degree).
    std::optional<std::vector<cplx>> polynomial_coeffs() const;
    /// True for z^2 + z (the double-cover example with one critical point).
    bool is_z2z() const;

    friend bool operator==(const SymbolSpec& a, const SymbolSpec& b);

private:
    explicit SymbolSpec(symbol::Node node) : node_(std::make_shared<symbol::Node>(std::move(node))) {}
    std::shared_ptr<const symbol::Node> node_;
};

/// Value with first and second derivative.
struct Jet {
    cplx value;
    cplx d1;
    cplx d2;
};

/// Closed-form evaluation; rejects |z| >= 1.
cplx evaluate(const SymbolSpec& spec, cplx z);
/// Closed-form jet with no disc check (root finders step outside the disc).
Jet evaluate_jet(const SymbolSpec& spec, cplx z);

/// Taylor coefficients of spec(c + t) in t, truncated to n.
PowerSeries taylor_at(const SymbolSpec& spec, cplx c, std::size_t n);

struct SeriesExpansion {
    PowerSeries series;
    std::string note;
    /// For symbols known to be inner: 1 - sum |a_k|^2 over the stored
    /// coefficients, i.e. the H^2 energy beyond the truncation. NaN otherwise.
    double tail_energy;
};

PowerSeries to_series(const SymbolSpec& spec, std::size_t n);
SeriesExpansion to_series_with_note(const SymbolSpec& spec, std::size_t n);

/// Upper bound for sup |f| on the disc from the symbol structure
/// (l1 norm for polynomials, 1 for inner pieces). Infinite when unknown.
double sup_norm_upper_bound(const SymbolSpec& spec);

/// Inner functions the library recognises structurally: unimodular scalings
/// of z^k, Moebius maps, the unit singular function, and compositions of
/// these.
bool is_known_inner(const SymbolSpec& spec);

/// Univalent on the disc, decided structurally (degree-1 polynomials,
/// Moebius maps, their scalings and shifts).
bool is_known_univalent(const SymbolSpec& spec);

/// Symbols known to singly cover a nonvoid open subset of their image
/// (univalent symbols and z^2 + z).
bool is_known_single_cover(const SymbolSpec& spec);

struct SupNormEstimate {
    double value;
    std::size_t mesh;
    double radius;
    cplx argmax;
};

inline constexpr double kDefaultBoundaryEps = 1e-6;

/// max |f| over M equispaced points on the circle of radius 1 - eps. A lower
/// bound for the sup norm; also serves as the self-map certificate.
SupNormEstimate sup_norm_estimate(const SymbolSpec& spec, std::size_t mesh,
                                  double eps = kDefaultBoundaryEps);
SupNormEstimate sup_norm_estimate(const PowerSeries& s, std::size_t mesh,
                                  double eps = kDefaultBoundaryEps);

/// Self-map certificate: estimate < 1 - margin.
inline constexpr double kSelfMapMargin = 1e-12;
bool certified_self_map(const SupNormEstimate& e, double margin = kSelfMapMargin);

/// outer(inner) using the closed form of `outer` for recentring at inner(0).
/// inner must be certified as a self-map unless inner(0) == 0.
PowerSeries compose(const SymbolSpec& outer, const PowerSeries& inner);

}  // namespace hardylab
