#pragma once

#include <vector>

#include "bubbletree/equations.hpp"
#include "bubbletree/grid.hpp"

namespace bubbletree {

// Topological data of the evolved field. HMHF pins v(r_min) = ell*pi and
// v(r_max) = m*pi; NLH uses the decaying class (reflection at r_min, zero at
// r_max), where ell and m are ignored.
struct BoundaryClass {
    int ell = 0;
    int m = 0;
};

struct EvolutionState {
    double t = 0.0;
    RadialField field;  // v-type for HMHF, u-type for NLH
    BoundaryClass bc;
};

struct SolverConfig {
    EquationKind kind;
    double dt0 = 1e-6;        // initial step
    double dt_growth = 1.05;  // per-step ramp limit
    double dt_rel = 2e-3;     // dt <= dt_rel * t
    double dt_max = 1e9;      // absolute cap
    double stab_c = 0.0;      // dt <= stab_c / max(f'/r^2); 0 selects a per-kind default
    double snapshot_ratio = 1.0471285480508996;  // 10^(1/50) cadence in t
};

struct EvolutionSeries {
    EquationKind kind;
    std::vector<double> t_hist, dt_hist, energy_hist, dissipation_hist;  // per accepted step
    std::vector<double> snapshot_times;
    std::vector<RadialField> snapshots;
    double dissipated = 0.0;  // int ||d_t u||^2 dt, trapezoidal in t
};

// One linearly-implicit step of length dt: the radial operator and the
// diagonal linearization of the nonlinearity go into a tridiagonal solve, the
// remaining nonlinear increment stays explicit.
EvolutionState step(const EvolutionState& state, const SolverConfig& cfg, double dt);

EvolutionSeries evolve(const EvolutionState& initial, const SolverConfig& cfg, double t_end);

struct EnergyAudit {
    double energy_drop = 0.0;      // E(t0) - E(t1)
    double dissipation = 0.0;      // int ||d_t u||^2
    double discrepancy_rel = 0.0;  // |drop - dissipation| / |drop|
    bool monotone = true;          // E nonincreasing within per-step tolerance
};

EnergyAudit energy_audit(const EvolutionSeries& series);

struct SpacetimeMonitor {
    std::vector<double> times;
    std::vector<double> running_integral;  // of (D quantity + ||g||_{H2dot}^2)
    double leveling_ratio = 0.0;  // tail share past the geometric midpoint
    bool leveling = false;
};

SpacetimeMonitor spacetime_monitor(const std::vector<double>& times,
                                   const std::vector<double>& interaction_values,
                                   const std::vector<double>& g_h2_values);

} // namespace bubbletree
