#include "hardylab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hardylab/parallel.hpp"

namespace hardylab {

BoundaryCurve boundary_curve(const SymbolSpec& spec, std::size_t mesh, double radius) {
    if (mesh < 64) throw std::invalid_argument("boundary_curve: mesh must be >= 64");
    if (!(radius > 0.0 && radius < 1.0)) throw std::invalid_argument("boundary_curve: radius must lie in (0, 1)");
    BoundaryCurve c{std::vector<cplx>(mesh), spec, mesh, radius};
    for (std::size_t j = 0; j < mesh; ++j)
        c.samples[j] = evaluate(spec, std::polar(radius, 2.0 * std::numbers::pi * double(j) / double(mesh)));
    return c;
}

namespace {

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

bool segments_cross(cplx p1, cplx p2, cplx q1, cplx q2, cplx& at) {
    const cplx r = p2 - p1, s = q2 - q1;
    const double den = cross(r, s);
    if (den == 0.0) return false;
    const double t = cross(q1 - p1, s) / den;
    const double u = cross(q1 - p1, r) / den;
    if (t < 0.0 || t >= 1.0 || u < 0.0 || u >= 1.0) return false;
    at = p1 + t * r;
    return true;
}

}  // namespace

std::vector<cplx> self_intersections(const BoundaryCurve& c) {
    const auto& p = c.samples;
    const std::size_t m = p.size();
    std::vector<cplx> out;
    for (std::size_t i = 0; i < m; ++i) {
        const cplx a = p[i], b = p[(i + 1) % m];
        const double ax0 = std::min(a.real(), b.real()), ax1 = std::max(a.real(), b.real());
        const double ay0 = std::min(a.imag(), b.imag()), ay1 = std::max(a.imag(), b.imag());
        for (std::size_t j = i + 2; j < m; ++j) {
            if (i == 0 && j == m - 1) continue;
            const cplx q1 = p[j], q2 = p[(j + 1) % m];
            if (std::max(q1.real(), q2.real()) < ax0 || std::min(q1.real(), q2.real()) > ax1 ||
                std::max(q1.imag(), q2.imag()) < ay0 || std::min(q1.imag(), q2.imag()) > ay1)
                continue;
            cplx at;
            if (segments_cross(a, b, q1, q2, at)) out.push_back(at);
        }
    }
    return out;
}

CurveIndex::CurveIndex(std::vector<cplx> pts) : pts_(std::move(pts)) {
    const std::size_t m = pts_.size();
    if (m < 3) throw std::invalid_argument("CurveIndex: need at least 3 points");
    xmin_ = ymin_ = std::numeric_limits<double>::infinity();
    xmax_ = ymax_ = -xmin_;
    threshold_ = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const cplx p = pts_[j];
        if (!std::isfinite(p.real()) || !std::isfinite(p.imag()))
            throw MathError("non-finite", "CurveIndex: curve sample is not finite");
        xmin_ = std::min(xmin_, p.real());
        xmax_ = std::max(xmax_, p.real());
        ymin_ = std::min(ymin_, p.imag());
        ymax_ = std::max(ymax_, p.imag());
        const cplx d2 = pts_[(j + 1) % m] - 2.0 * p + pts_[(j + m - 1) % m];
        threshold_ = std::max(threshold_, 2.0 * std::abs(d2));
    }
    const double span = std::max({xmax_ - xmin_, ymax_ - ymin_, 1e-12});
    threshold_ = std::max(threshold_, 1e-12 * span);
    const std::size_t g = std::clamp<std::size_t>(static_cast<std::size_t>(4.0 * std::sqrt(double(m))), 16, 1024);
    cell_ = span / double(g) * (1.0 + 1e-9);
    gx_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((xmax_ - xmin_) / cell_)) + 1);
    gy_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((ymax_ - ymin_) / cell_)) + 1);
    cells_.assign(gx_ * gy_, {});
    rows_.assign(gy_, {});
    auto cx = [&](double x) {
        return std::min(gx_ - 1, static_cast<std::size_t>(std::max(0.0, (x - xmin_) / cell_)));
    };
    auto cy = [&](double y) {
        return std::min(gy_ - 1, static_cast<std::size_t>(std::max(0.0, (y - ymin_) / cell_)));
    };
    for (std::size_t e = 0; e < m; ++e) {
        const cplx a = pts_[e], b = pts_[(e + 1) % m];
        const std::size_t x0 = cx(std::min(a.real(), b.real())), x1 = cx(std::max(a.real(), b.real()));
        const std::size_t y0 = cy(std::min(a.imag(), b.imag())), y1 = cy(std::max(a.imag(), b.imag()));
        for (std::size_t y = y0; y <= y1; ++y) {
            rows_[y].push_back(static_cast<std::uint32_t>(e));
            for (std::size_t x = x0; x <= x1; ++x) cells_[y * gx_ + x].push_back(static_cast<std::uint32_t>(e));
        }
    }
    // multi-source BFS over 8-neighbours lets distance() skip empty rings
    constexpr auto unset = std::numeric_limits<std::uint32_t>::max();
    empty_rings_.assign(gx_ * gy_, unset);
    std::vector<std::size_t> frontier;
    for (std::size_t c = 0; c < cells_.size(); ++c)
        if (!cells_[c].empty()) {
            empty_rings_[c] = 0;
            frontier.push_back(c);
        }
    for (std::uint32_t level = 1; !frontier.empty(); ++level) {
        std::vector<std::size_t> next;
        for (const std::size_t c : frontier) {
            const long x = long(c % gx_), y = long(c / gx_);
            for (long dy = -1; dy <= 1; ++dy)
                for (long dx = -1; dx <= 1; ++dx) {
                    const long nx = x + dx, ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= long(gx_) || ny >= long(gy_)) continue;
                    const std::size_t nc = std::size_t(ny) * gx_ + std::size_t(nx);
                    if (empty_rings_[nc] != unset) continue;
                    empty_rings_[nc] = level;
                    next.push_back(nc);
                }
        }
        frontier = std::move(next);
    }
}

int CurveIndex::winding(cplx w) const {
    const double y = w.imag();
    if (y < ymin_ || y > ymax_ || w.real() > xmax_) return 0;
    const std::size_t row = std::min(gy_ - 1, static_cast<std::size_t>((y - ymin_) / cell_));
    const std::size_t m = pts_.size();
    int wn = 0;
    for (const std::uint32_t e : rows_[row]) {
        const cplx a = pts_[e], b = pts_[(e + 1) % m];
        if (a.imag() <= y) {
            if (b.imag() > y && cross(b - a, w - a) > 0.0) ++wn;
        } else if (b.imag() <= y && cross(b - a, w - a) < 0.0) {
            --wn;
        }
    }
    return wn;
}

double CurveIndex::edge_distance(std::uint32_t e, cplx w) const {
    const cplx a = pts_[e], b = pts_[(e + 1) % pts_.size()];
    const cplx ab = b - a;
    const double len2 = std::norm(ab);
    double t = len2 > 0.0 ? (std::real(std::conj(ab) * (w - a)) / len2) : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(w - (a + t * ab));
}

double CurveIndex::distance_lower_bound(cplx w) const {
    const double px = std::clamp(w.real(), xmin_, xmin_ + cell_ * double(gx_));
    const double py = std::clamp(w.imag(), ymin_, ymin_ + cell_ * double(gy_));
    const double off = std::hypot(w.real() - px, w.imag() - py);
    const std::size_t cx0 = std::min(gx_ - 1, std::size_t((px - xmin_) / cell_));
    const std::size_t cy0 = std::min(gy_ - 1, std::size_t((py - ymin_) / cell_));
    const double rings = double(empty_rings_[cy0 * gx_ + cx0]);
    return std::max(off, (rings - 1.0) * cell_);
}

double CurveIndex::distance(cplx w) const {
    // project onto the grid box; for x in the box |w - x| >= |p - x|
    const double px = std::clamp(w.real(), xmin_, xmin_ + cell_ * double(gx_));
    const double py = std::clamp(w.imag(), ymin_, ymin_ + cell_ * double(gy_));
    const double off = std::hypot(w.real() - px, w.imag() - py);
    const long cx0 = std::min<long>(long(gx_) - 1, long((px - xmin_) / cell_));
    const long cy0 = std::min<long>(long(gy_) - 1, long((py - ymin_) / cell_));
    double best = std::numeric_limits<double>::infinity();
    const long maxring = long(std::max(gx_, gy_));
    for (long k = long(empty_rings_[std::size_t(cy0) * gx_ + std::size_t(cx0)]); k <= maxring; ++k) {
        for (long y = cy0 - k; y <= cy0 + k; ++y) {
            if (y < 0 || y >= long(gy_)) continue;
            const bool edge_row = (y == cy0 - k || y == cy0 + k);
            for (long x = cx0 - k; x <= cx0 + k; x += (edge_row ? 1 : std::max(1L, 2 * k))) {
                if (x < 0 || x >= long(gx_)) continue;
                for (const std::uint32_t e : cells_[std::size_t(y) * gx_ + std::size_t(x)])
                    best = std::min(best, edge_distance(e, w));
            }
        }
        if (best <= std::hypot(off, double(k) * cell_)) break;
    }
    return best;
}

std::string to_string(RegionStatus s) {
    switch (s) {
        case RegionStatus::inside: return "inside";
        case RegionStatus::outside: return "outside";
        case RegionStatus::unresolved: return "boundary-unresolved";
    }
    return "?";
}

bool affine_unit_singular(const SymbolSpec& spec, cplx& a, cplx& b) {
    if (spec.is_unit_singular()) {
        a = 0.0;
        b = 1.0;
        return true;
    }
    if (const auto* s = std::get_if<symbol::Scale>(&spec.node())) {
        if (!affine_unit_singular(*s->inner, a, b)) return false;
        a *= s->factor;
        b *= s->factor;
        return true;
    }
    if (const auto* s = std::get_if<symbol::Shift>(&spec.node())) {
        if (!affine_unit_singular(*s->inner, a, b)) return false;
        a += s->offset;
        return true;
    }
    return false;
}

RegionClassifier::RegionClassifier(const SymbolSpec& spec, std::size_t mesh, double radius)
    : spec_(spec), mesh_(mesh), radius_(radius) {
    cplx a, b;
    if (affine_unit_singular(spec, a, b)) {
        affine_ = std::make_pair(a, b);
        return;
    }
    inner_.emplace(boundary_curve(spec, mesh, radius).samples);
    outer_.emplace(boundary_curve(spec, mesh, 0.5 * (1.0 + radius)).samples);
}

const std::vector<cplx>& RegionClassifier::curve() const {
    static const std::vector<cplx> empty;
    return inner_ ? inner_->points() : empty;
}

RegionVerdict RegionClassifier::classify(cplx w) const { return classify_impl(w, true); }
RegionVerdict RegionClassifier::classify_status(cplx w) const { return classify_impl(w, false); }

RegionVerdict RegionClassifier::classify_impl(cplx w, bool exact_margin) const {
    if (affine_) {
        // image a + b (U \ {0}); 0 is an isolated boundary point
        const cplx u = (w - affine_->first) / affine_->second;
        const double r = std::abs(u);
        const double thr = 1e-12;
        const double margin = std::abs(affine_->second) * std::min(r, std::abs(1.0 - r));
        RegionVerdict v{w, 0, margin, RegionStatus::outside, thr * std::abs(affine_->second)};
        if (margin < v.threshold) {
            v.status = RegionStatus::unresolved;
        } else if (r < 1.0) {
            v.status = RegionStatus::inside;
            v.valence = -1;
        }
        return v;
    }
    const int w1 = inner_->winding(w);
    const int w2 = outer_->winding(w);
    const double thr = std::max(inner_->mesh_threshold(), outer_->mesh_threshold());
    double m1 = exact_margin ? 0.0 : inner_->distance_lower_bound(w);
    double m2 = exact_margin ? 0.0 : outer_->distance_lower_bound(w);
    if (m1 < thr) m1 = inner_->distance(w);
    if (m2 < thr) m2 = outer_->distance(w);
    RegionVerdict v{w, w1, std::min(m1, m2), RegionStatus::outside, thr};
    if (w1 != w2 || v.margin < thr || w1 < 0)
        v.status = RegionStatus::unresolved;
    else if (w1 > 0)
        v.status = RegionStatus::inside;
    return v;
}

RegionVerdict valence(const SymbolSpec& spec, cplx w, std::size_t mesh, double radius) {
    return RegionClassifier(spec, mesh, radius).classify(w);
}

std::vector<cplx> plan_points(const SamplingPlan& plan) {
    if (plan.radial == 0 || plan.angular == 0) throw std::invalid_argument("sampling plan must be nonempty");
    if (!(plan.r_max > 0.0 && plan.r_max < 1.0)) throw std::invalid_argument("sampling plan r_max must lie in (0, 1)");
    std::vector<cplx> pts;
    pts.reserve(plan.radial * plan.angular + 1);
    pts.push_back(0.0);
    // outermost ring first: violations show up there
    for (std::size_t i = plan.radial; i-- > 0;) {
        const double r = plan.r_max * double(i + 1) / double(plan.radial);
        for (std::size_t j = 0; j < plan.angular; ++j)
            pts.push_back(std::polar(r, 2.0 * std::numbers::pi * double(j) / double(plan.angular)));
    }
    return pts;
}

ContainmentReport image_contained(const SymbolSpec& psi, const RegionClassifier& phi, const SamplingPlan& plan) {
    const auto pts = plan_points(plan);
    ContainmentReport rep;
    auto record = [&](const cplx z, const cplx w, const RegionVerdict& v) {
        ++rep.total;
        switch (v.status) {
            case RegionStatus::inside: ++rep.inside; break;
            case RegionStatus::outside:
                ++rep.outside;
                if (rep.violations.size() < kMaxListed) rep.violations.push_back({z, w, phi.classify(w)});
                break;
            case RegionStatus::unresolved:
                ++rep.unresolved;
                if (rep.unresolved_samples.size() < kMaxListed) rep.unresolved_samples.push_back({z, w, phi.classify(w)});
                break;
        }
    };
    if (plan.stop_at_first_violation) {
        for (const cplx z : pts) {
            const cplx w = evaluate(psi, z);
            const auto v = phi.classify_status(w);
            record(z, w, v);
            if (v.status == RegionStatus::outside) {
                rep.stopped_early = true;
                break;
            }
        }
    } else {
        std::vector<RegionVerdict> verdicts(pts.size());
        std::vector<cplx> ws(pts.size());
        parallel_for(pts.size(), [&](std::size_t i) {
            ws[i] = evaluate(psi, pts[i]);
            verdicts[i] = phi.classify_status(ws[i]);
        });
        for (std::size_t i = 0; i < pts.size(); ++i) record(pts[i], ws[i], verdicts[i]);
    }
    rep.fraction_inside = rep.total ? double(rep.inside) / double(rep.total) : 0.0;
    return rep;
}

ContainmentReport image_contained(const SymbolSpec& psi, const SymbolSpec& phi, const SamplingPlan& plan) {
    return image_contained(psi, RegionClassifier(phi, plan.mesh, plan.valence_radius), plan);
}

bool cardioid_membership(cplx w) {
    const double r = std::abs(w);
    if (r == 0.0) return true;
    return r < 2.0 * std::cos(std::arg(w) / 3.0);
}

}  // namespace hardylab
