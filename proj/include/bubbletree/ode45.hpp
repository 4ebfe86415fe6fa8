#pragma once

#include <functional>
#include <vector>

namespace bubbletree {

using OdeRhs = std::function<void(double t, const std::vector<double>& y, std::vector<double>& dy)>;

struct Ode45Options {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double h_init = 0.0;      // 0 -> auto
    double h_min_factor = 1e-14;  // abort if h < h_min_factor * |span|
    std::size_t max_steps = 50'000'000;
    // Called after each accepted step; return false to stop integration early.
    std::function<bool(double t, const std::vector<double>& y)> on_step;
};

// Adaptive Cash-Karp RK45 from t0 to t1 (t1 > t0). y is advanced in place.
// Returns the reached time (== t1 unless on_step stopped early).
double ode45(const OdeRhs& rhs, double t0, double t1, std::vector<double>& y,
             const Ode45Options& opt = {});

} // namespace bubbletree
