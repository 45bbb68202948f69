#pragma once

#include <functional>
#include <vector>

#include "hardylab/series.hpp"

namespace hardylab {

struct RootOptions {
    std::size_t grid = 32;  // grid x grid polar starts
    int iterations = 50;
    double tol = 1e-12;  // accept when |f| <= tol * scale
    double scale = 1.0;
    double r_max = 0.99;
    /// Roots must satisfy |z| < 1 - interior_margin (boundary roots are not
    /// points of the disc).
    double interior_margin = 1e-8;
    bool first_only = false;
};

/// Value and derivative of the function whose zeros are sought.
using NewtonFn = std::function<std::pair<cplx, cplx>(cplx)>;

/// Zeros of f in the open unit disc by Newton iteration from a fixed polar
/// grid of starts. Deduplicated and sorted by modulus, then argument, so the
/// result is deterministic. An empty result does not prove absence.
std::vector<cplx> disc_roots(const NewtonFn& f, const RootOptions& opt = {});

/// As above, accepting only roots where `keep` holds; with first_only the
/// search stops at the first accepted root.
std::vector<cplx> disc_roots(const NewtonFn& f, const std::function<bool(cplx)>& keep, const RootOptions& opt);

}  // namespace hardylab
