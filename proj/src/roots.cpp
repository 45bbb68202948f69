#include "hardylab/roots.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hardylab {

std::vector<cplx> disc_roots(const NewtonFn& f, const RootOptions& opt) {
    return disc_roots(f, [](cplx) { return true; }, opt);
}

std::vector<cplx> disc_roots(const NewtonFn& f, const std::function<bool(cplx)>& keep, const RootOptions& opt) {
    std::vector<cplx> roots;
    const double accept = opt.tol * opt.scale;
    auto known = [&](cplx z) {
        return std::any_of(roots.begin(), roots.end(), [&](cplx r) { return std::abs(r - z) < 1e-8; });
    };
    for (std::size_t i = 0; i < opt.grid; ++i) {
        const double r = opt.r_max * (double(i) + 0.5) / double(opt.grid);
        for (std::size_t j = 0; j < opt.grid; ++j) {
            cplx z = std::polar(r, 2.0 * std::numbers::pi * (double(j) + 0.25 * double(i % 4)) / double(opt.grid));
            bool ok = false;
            for (int it = 0; it < opt.iterations; ++it) {
                const auto [v, d] = f(z);
                if (!std::isfinite(std::abs(v))) break;
                if (std::abs(v) <= accept) {
                    ok = true;
                    break;
                }
                if (d == cplx{}) break;
                z -= v / d;
                if (std::abs(z) > 2.0) break;
            }
            if (!ok) {
                const auto [v, d] = f(z);
                ok = std::abs(v) <= accept;
            }
            if (!ok || !(std::abs(z) < 1.0 - opt.interior_margin) || known(z) || !keep(z)) continue;
            roots.push_back(z);
            if (opt.first_only) return roots;
        }
    }
    std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
        const double ma = std::abs(a), mb = std::abs(b);
        if (std::abs(ma - mb) > 1e-12) return ma < mb;
        return std::arg(a) < std::arg(b);
    });
    return roots;
}

}  // namespace hardylab
