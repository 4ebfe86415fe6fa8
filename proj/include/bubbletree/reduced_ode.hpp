#pragma once

#include <vector>

#include "bubbletree/equations.hpp"
#include "bubbletree/util.hpp"

namespace bubbletree {

// Leading-order modulation system: dlambda_j/dt = kappa iota_bar_j mu_j^D / lambda_j,
// mu_1 = 0 so lambda_1 is frozen.
std::vector<double> ode_rhs(const std::vector<double>& lambdas, const EquationKind& kind,
                            const std::vector<int>& iotas);

struct ScaleTrajectory {
    EquationKind kind;
    std::vector<int> iotas;
    std::vector<double> times;
    std::vector<std::vector<double>> scales;  // scales[i][j] = lambda_{j+1}(t_i)
    bool collision = false;
    double t_collision = 0.0;
    std::vector<PowerFit> fitted;  // per bubble, on the final decade

    std::vector<double> scale_series(std::size_t j) const;  // 1-based bubble index
};

ScaleTrajectory integrate_scales(const std::vector<double>& initial, const EquationKind& kind,
                                 const std::vector<int>& iotas, double t0, double t1,
                                 double rel_tol = 1e-9);

// Sign patterns compatible with shrinking scale ratios (iota_bar_j kappa < 0),
// both global signs included. NLH: alternating; HMHF: constant.
std::vector<std::vector<int>> classify_signs(const EquationKind& kind, std::size_t J);

} // namespace bubbletree
