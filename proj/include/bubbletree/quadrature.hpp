#pragma once

#include <functional>

namespace bubbletree {

// Adaptive Gauss-Kronrod 7-15 on [a,b].
double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    double rel_tol = 1e-12, double abs_tol = 1e-300, int max_depth = 48);

// Improper integral over (0,inf) of a smooth integrand with power-law decay,
// via the split int_0^1 f + int_0^1 f(1/u)/u^2 du.
double integrate_half_line(const std::function<double(double)>& f, double rel_tol = 1e-12);

} // namespace bubbletree
