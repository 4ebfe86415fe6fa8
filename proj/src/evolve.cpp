// Stiff radial time stepping on the log grid. The diffusion CFL of an explicit
// scheme at r_min would be (r_min h)^2 / 2, so the radial operator is solved
// implicitly (tridiagonal in the log variable). The nonlinearity enters
// through its diagonal linearization f'(state)/r^2 inside the same solve; the
// leftover increment is explicit. The step size follows the slow modulation
// timescale (dt ~ dt_rel * t) under a stiffness cap stab_c / max(f'/r^2).

#include "bubbletree/evolve.hpp"

#include <algorithm>
#include <cmath>

#include "bubbletree/errors.hpp"
#include "bubbletree/linalg.hpp"
#include "bubbletree/util.hpp"

namespace bubbletree {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Workspace {
    EquationKind kind;
    GridPtr grid;
    std::vector<double> e2;      // exp(-2s)
    std::vector<double> rm2;     // r^{-2}
    std::vector<double> w_meas;  // quadrature weight incl. measure and angular constant
    double bc_lo = 0.0, bc_hi = 0.0;

    Workspace(const EquationKind& k, const GridPtr& g, const BoundaryClass& bc)
        : kind(k), grid(g) {
        const std::size_t n = g->size();
        e2.resize(n);
        rm2.resize(n);
        w_meas.resize(n);
        const bool hm = k.is_hmhf();
        const double cmeas = hm ? 2.0 * kPi : k.pairing_constant();
        const double mdim = hm ? 2.0 : k.N;
        for (std::size_t i = 0; i < n; ++i) {
            e2[i] = std::exp(-2.0 * g->s[i]);
            rm2[i] = e2[i];
            w_meas[i] = cmeas * g->wlog[i] * std::pow(g->r[i], mdim);
        }
        if (hm) {
            bc_lo = bc.ell * kPi;
            bc_hi = bc.m * kPi;
        }
    }

    // advance values by one linearly-implicit step; returns ||d_t field||^2
    double advance(std::vector<double>& v, double dt) const {
        const std::size_t n = v.size();
        const double h = grid->h;
        const bool hm = kind.is_hmhf();
        const double drift = hm ? 0.0 : kind.N - 2.0;
        const double D2 = kind.D * kind.D;

        // HMHF evolves v with nonlinearity r^{-2} f(v); NLH evolves u with f(u)
        std::vector<double> lo(n, 0.0), di(n, 0.0), up(n, 0.0), rhs(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double nlw = hm ? rm2[i] : 1.0;
            const double a = f_prime(v[i], kind) * nlw;
            const double fex = nonlinearity_f(v[i], kind) * nlw - a * v[i];
            const double lap_d = e2[i] / (h * h);
            const double lap_o = e2[i] * drift / (2.0 * h);
            lo[i] = -dt * (lap_d - lap_o);
            up[i] = -dt * (lap_d + lap_o);
            di[i] = 1.0 + 2.0 * dt * lap_d - dt * a + (hm ? dt * D2 * e2[i] : 0.0);
            rhs[i] = v[i] + dt * fex;
        }
        if (hm) {
            di[0] = 1.0;
            rhs[0] = bc_lo;
            di[n - 1] = 1.0;
            rhs[n - 1] = bc_hi;
        } else {
            // reflection at r_min (d_s u = 0 via ghost node), Dirichlet outside
            const double a0 = f_prime(v[0], kind);
            const double fex0 = nonlinearity_f(v[0], kind) - a0 * v[0];
            const double lap_d = e2[0] / (h * h);
            di[0] = 1.0 + 2.0 * dt * lap_d - dt * a0;
            up[0] = -2.0 * dt * lap_d;
            rhs[0] = v[0] + dt * fex0;
            di[n - 1] = 1.0;
            rhs[n - 1] = 0.0;
        }
        std::vector<double> vn = solve_tridiagonal(lo, di, up, rhs);
        double diss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double du = (vn[i] - v[i]) / dt;
            diss += w_meas[i] * du * du;
            if (!std::isfinite(vn[i])) throw NumericalError("evolve: scheme blow-up (NaN)");
        }
        v.swap(vn);
        return diss;
    }

    double stiffness(const std::vector<double>& v) const {
        const bool hm = kind.is_hmhf();
        double m = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i)
            m = std::max(m, f_prime(v[i], kind) * (hm ? rm2[i] : 1.0));
        return m;
    }
};

} // namespace

EvolutionState step(const EvolutionState& state, const SolverConfig& cfg, double dt) {
    if (!(dt > 0.0)) throw ParameterError("step: dt must be positive");
    const FieldKind want = cfg.kind.is_hmhf() ? FieldKind::VType : FieldKind::UType;
    if (state.field.kind != want) throw ParameterError("step: field kind does not match equation");
    Workspace ws(cfg.kind, state.field.grid, state.bc);
    EvolutionState out = state;
    ws.advance(out.field.v, dt);
    out.t = state.t + dt;
    return out;
}

EvolutionSeries evolve(const EvolutionState& initial, const SolverConfig& cfg, double t_end) {
    if (!(t_end > initial.t)) throw ParameterError("evolve: t_end must exceed the initial time");
    const FieldKind want = cfg.kind.is_hmhf() ? FieldKind::VType : FieldKind::UType;
    if (initial.field.kind != want)
        throw ParameterError("evolve: field kind does not match equation");
    Workspace ws(cfg.kind, initial.field.grid, initial.bc);
    const double stab_c = cfg.stab_c > 0.0 ? cfg.stab_c : (cfg.kind.is_hmhf() ? 50.0 : 1.0);

    EvolutionSeries series;
    series.kind = cfg.kind;
    std::vector<double> v = initial.field.v;
    double t = initial.t;
    double dt_prev = cfg.dt0;

    auto snapshot = [&](double at) {
        series.snapshot_times.push_back(at);
        series.snapshots.emplace_back(initial.field.grid, initial.field.kind, v);
    };
    snapshot(t);
    double next_snap = t * cfg.snapshot_ratio;
    series.t_hist.push_back(t);
    series.dt_hist.push_back(0.0);
    series.dissipation_hist.push_back(0.0);
    series.energy_hist.push_back(energy(initial.field, cfg.kind));

    while (t < t_end) {
        double dt = std::min({dt_prev * cfg.dt_growth, cfg.dt_rel * std::max(t, 1e-12),
                              cfg.dt_max, t_end - t});
        const double stiff = ws.stiffness(v);
        if (stiff > 0.0) dt = std::min(dt, stab_c / stiff);
        dt = std::max(dt, std::min(cfg.dt0, t_end - t));
        const double diss = ws.advance(v, dt);
        t += dt;
        dt_prev = dt;
        series.t_hist.push_back(t);
        series.dt_hist.push_back(dt);
        series.dissipation_hist.push_back(diss);
        RadialField cur(initial.field.grid, initial.field.kind, v);
        series.energy_hist.push_back(energy(cur, cfg.kind));
        series.dissipated += dt * diss;  // end-of-step rate, first order like the scheme
        if (t >= next_snap || t >= t_end) {
            snapshot(t);
            while (next_snap <= t) next_snap *= cfg.snapshot_ratio;
        }
    }
    return series;
}

EnergyAudit energy_audit(const EvolutionSeries& series) {
    if (series.energy_hist.size() < 2) throw ParameterError("energy_audit: need at least 2 steps");
    EnergyAudit a;
    a.energy_drop = series.energy_hist.front() - series.energy_hist.back();
    a.dissipation = series.dissipated;
    a.discrepancy_rel = std::abs(a.energy_drop - a.dissipation) /
                        std::max(std::abs(a.energy_drop), 1e-300);
    for (std::size_t i = 1; i < series.energy_hist.size(); ++i) {
        const double e0 = series.energy_hist[i - 1];
        if (series.energy_hist[i] > e0 + 1e-4 * std::abs(e0)) {
            a.monotone = false;
            break;
        }
    }
    return a;
}

SpacetimeMonitor spacetime_monitor(const std::vector<double>& times,
                                   const std::vector<double>& interaction_values,
                                   const std::vector<double>& g_h2_values) {
    const std::size_t n = times.size();
    if (n < 3 || interaction_values.size() != n || g_h2_values.size() != n)
        throw ParameterError("spacetime_monitor: inconsistent series");
    SpacetimeMonitor m;
    m.times = times;
    m.running_integral.assign(n, 0.0);
    auto integrand = [&](std::size_t i) {
        return interaction_values[i] + g_h2_values[i] * g_h2_values[i];
    };
    for (std::size_t i = 1; i < n; ++i)
        m.running_integral[i] = m.running_integral[i - 1] +
                                0.5 * (times[i] - times[i - 1]) * (integrand(i) + integrand(i - 1));
    const double t_mid = std::sqrt(std::max(times.front(), 1e-300) * times.back());
    double i_mid = m.running_integral.back();
    for (std::size_t i = 0; i < n; ++i)
        if (times[i] >= t_mid) {
            i_mid = m.running_integral[i];
            break;
        }
    const double total = m.running_integral.back();
    m.leveling_ratio = total > 0.0 ? (total - i_mid) / total : 0.0;
    m.leveling = m.leveling_ratio < 0.5;
    return m;
}

} // namespace bubbletree
