#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hardylab/symbol.hpp"

namespace hardylab {

/// Closed polyline phi(r e^{i theta_j}), j = 0..M-1 (indices mod M).
struct BoundaryCurve {
    std::vector<cplx> samples;
    SymbolSpec spec;
    std::size_t mesh;
    double radius;
};

BoundaryCurve boundary_curve(const SymbolSpec& spec, std::size_t mesh, double radius);

/// Transversal self-crossings of the polyline (pairs of non-adjacent edges).
std::vector<cplx> self_intersections(const BoundaryCurve& c);

/// Uniform cell index over a closed polyline: crossing-number winding and
/// nearest-edge distance in roughly constant time per query.
class CurveIndex {
public:
    explicit CurveIndex(std::vector<cplx> pts);

    int winding(cplx w) const;
    double distance(cplx w) const;
    /// Cheap lower bound on distance(w) from the empty-cell rings.
    double distance_lower_bound(cplx w) const;
    /// 2 x max |s_{j+1} - 2 s_j + s_{j-1}|, a bound on the sagitta between
    /// consecutive samples.
    double mesh_threshold() const noexcept { return threshold_; }
    const std::vector<cplx>& points() const noexcept { return pts_; }

private:
    std::vector<cplx> pts_;
    double xmin_, xmax_, ymin_, ymax_, cell_;
    std::size_t gx_, gy_;
    std::vector<std::vector<std::uint32_t>> cells_;
    std::vector<std::vector<std::uint32_t>> rows_;
    // Chebyshev distance (in cells) to the nearest non-empty cell
    std::vector<std::uint32_t> empty_rings_;
    double threshold_;

    double edge_distance(std::uint32_t e, cplx w) const;
};

enum class RegionStatus { inside, outside, unresolved };
std::string to_string(RegionStatus s);

struct RegionVerdict {
    cplx point;
    /// Preimage count in r U; -1 when infinite (closed-form classes).
    int valence;
    double margin;
    RegionStatus status;
    double threshold;
};

inline constexpr double kDefaultValenceRadius = 1.0 - 1e-4;
inline constexpr std::size_t kDefaultMesh = 4096;

/// Membership in phi(U) for a fixed symbol. Winding numbers at radius r and
/// (1 + r) / 2 must agree and the point must clear the mesh threshold on
/// both curves, otherwise the verdict is unresolved. Symbols of the form
/// a + b * exp((z+1)/(z-1)) use the closed-form image a + b (U \ {0}).
class RegionClassifier {
public:
    RegionClassifier(const SymbolSpec& spec, std::size_t mesh = kDefaultMesh,
                     double radius = kDefaultValenceRadius);

    RegionVerdict classify(cplx w) const;
    /// Same status as classify(); the margin is only a lower bound when it
    /// already clears the threshold.
    RegionVerdict classify_status(cplx w) const;
    const SymbolSpec& spec() const noexcept { return spec_; }
    std::size_t mesh() const noexcept { return mesh_; }
    double radius() const noexcept { return radius_; }
    bool closed_form() const noexcept { return affine_.has_value(); }
    /// Curve at the inner radius (empty for closed-form classes).
    const std::vector<cplx>& curve() const;

private:
    SymbolSpec spec_;
    std::size_t mesh_;
    double radius_;
    std::optional<std::pair<cplx, cplx>> affine_;  // (a, b)
    std::optional<CurveIndex> inner_, outer_;

    RegionVerdict classify_impl(cplx w, bool exact_margin) const;
};

/// True when spec = a + b * unit_singular; fills a and b.
bool affine_unit_singular(const SymbolSpec& spec, cplx& a, cplx& b);

RegionVerdict valence(const SymbolSpec& spec, cplx w, std::size_t mesh = kDefaultMesh,
                      double radius = kDefaultValenceRadius);

struct SamplingPlan {
    std::size_t radial = 64;
    std::size_t angular = 256;
    double r_max = 1.0 - 1e-3;
    bool stop_at_first_violation = false;
    /// Mesh and radius of the classifier for the containing symbol.
    std::size_t mesh = kDefaultMesh;
    double valence_radius = kDefaultValenceRadius;
};

/// Sample points: 0 and r_max (i+1)/radial e^{2 pi i j / angular}.
std::vector<cplx> plan_points(const SamplingPlan& plan);

struct ContainmentSample {
    cplx z;
    cplx w;
    RegionVerdict verdict;
};

struct ContainmentReport {
    std::size_t total = 0;
    std::size_t inside = 0;
    std::size_t outside = 0;
    std::size_t unresolved = 0;
    double fraction_inside = 0.0;
    /// First entries of each list (capped at `max_listed`).
    std::vector<ContainmentSample> violations;
    std::vector<ContainmentSample> unresolved_samples;
    bool stopped_early = false;

    bool contained() const noexcept { return outside == 0 && unresolved == 0; }
    /// inside-or-unresolved everywhere: the closure test.
    bool closure_contained() const noexcept { return outside == 0; }
};

inline constexpr std::size_t kMaxListed = 64;

ContainmentReport image_contained(const SymbolSpec& psi, const SymbolSpec& phi, const SamplingPlan& plan = {});
ContainmentReport image_contained(const SymbolSpec& psi, const RegionClassifier& phi, const SamplingPlan& plan = {});

/// |w| < 2 cos(arg(w) / 3): the open cardioid bounded by the outer loop of
/// the image of the unit circle under z^2 + z.
bool cardioid_membership(cplx w);

}  // namespace hardylab
