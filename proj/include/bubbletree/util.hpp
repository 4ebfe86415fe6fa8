#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace bubbletree {

// Cubic Lagrange interpolation on a uniform grid. x is the fractional index
// (x = 0 at v[0], spacing 1). Clamps the stencil at the ends.
double interp_uniform_cubic(const std::vector<double>& v, double x);

// Cumulative integral of samples F on a uniform grid with step h.
// Returns I[i] = int_{x0}^{x_i} F dx, 4th order (per-interval cubic).
std::vector<double> cumulative_integral(const std::vector<double>& F, double h);

// Same rule accumulated in extended precision, for paths whose roundoff would
// otherwise dominate small linear combinations downstream.
std::vector<long double> cumulative_integral_ld(const std::vector<double>& F, double h);

// One-sided decay tail int_{x_end}^{inf} of a sampled function, estimated by
// fitting F ~ F_end * exp(-q (x - x_end)) to the last two samples. Returns 0
// when the samples do not exhibit a clean same-sign decay.
double decay_tail(double F_last, double F_prev, double h);

struct PowerFit {
    double exponent = 0.0;  // lambda ~ prefactor * t^{-exponent}
    double prefactor = 0.0;
    std::size_t points = 0;
};

// Least-squares fit of log(values) = log(prefactor) - exponent * log(times),
// restricted to times in [t_lo, t_hi]. values must be positive there.
PowerFit fit_power_law(const std::vector<double>& times, const std::vector<double>& values,
                       double t_lo, double t_hi);

// Smooth cutoff: 1 for x <= 1, 0 for x >= 1.9, C^infinity blend in between.
double cutoff_value(double x);

inline double japanese_bracket(double x) { return std::sqrt(1.0 + x * x); }

// Area of the unit (N-1)-sphere.
double unit_sphere_area(double N);

} // namespace bubbletree
