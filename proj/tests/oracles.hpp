// Test-side oracles, independent of the library's quadrature and solver paths.
#pragma once

#include <cmath>
#include <functional>

#include "bubbletree/grid.hpp"
#include "bubbletree/rng.hpp"
#include "bubbletree/util.hpp"

namespace oracles {

// Recursive adaptive Simpson; deliberately a different scheme from the
// library's Gauss-Kronrod quadrature.
inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-11) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol * std::max(std::abs(whole), 1.0), 22);
}

// improper integral over (0, inf) via the 1/y substitution on [1, inf)
inline double simpson_half_line(const std::function<double(double)>& f, double tol = 1e-11) {
    auto outer = [&f](double u) { return u > 0.0 ? f(1.0 / u) / (u * u) : 0.0; };
    return adaptive_simpson(f, 0.0, 1.0, tol) + adaptive_simpson(outer, 1e-12, 1.0, tol);
}

// smooth random field: a few log-Gaussians, optionally hard-cut to a compact support
inline bubbletree::RadialField random_field(const bubbletree::GridPtr& grid, bubbletree::Rng& rng,
                                            int bumps = 3, double s_lo = -2.0, double s_hi = 1.0,
                                            double support_radius = 0.0) {
    bubbletree::RadialField f(grid, bubbletree::FieldKind::UType);
    for (int b = 0; b < bumps; ++b) {
        const double s0 = rng.uniform(s_lo, s_hi);
        const double sig = rng.uniform(0.3, 0.6);
        const double amp = rng.uniform(-1.0, 1.0);
        for (std::size_t i = 0; i < grid->size(); ++i) {
            const double z = (grid->s[i] - s0) / sig;
            f.v[i] += amp * std::exp(-0.5 * z * z);
        }
    }
    if (support_radius > 0.0)
        for (std::size_t i = 0; i < grid->size(); ++i)
            f.v[i] *= bubbletree::cutoff_value(grid->r[i] / support_radius);
    return f;
}

// single Gaussian whose hard support cut sits where it has already decayed to
// ~1e-9, so the window adds no visible curvature of its own
inline bubbletree::RadialField random_resolved_source(const bubbletree::GridPtr& grid,
                                                      bubbletree::Rng& rng,
                                                      double support_radius = 1.8) {
    const double s0 = rng.uniform(-1.5, -0.5);
    const double sig = rng.uniform(0.28, 0.35);
    const double amp = rng.uniform(0.5, 1.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    bubbletree::RadialField f(grid, bubbletree::FieldKind::UType);
    for (std::size_t i = 0; i < grid->size(); ++i) {
        const double z = (grid->s[i] - s0) / sig;
        f.v[i] = amp * std::exp(-0.5 * z * z) *
                 bubbletree::cutoff_value(grid->r[i] / support_radius);
    }
    return f;
}

} // namespace oracles
