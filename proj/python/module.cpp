// Python bindings for the main operations: constants, kernel checks, profile
// construction, the reduced scale ODE, evolution, and scale fitting.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "bubbletree/constants.hpp"
#include "bubbletree/equations.hpp"
#include "bubbletree/errors.hpp"
#include "bubbletree/evolve.hpp"
#include "bubbletree/fit.hpp"
#include "bubbletree/grid.hpp"
#include "bubbletree/linearized.hpp"
#include "bubbletree/profiles.hpp"
#include "bubbletree/reduced_ode.hpp"

namespace py = pybind11;
using namespace bubbletree;

namespace {

EquationKind make_kind(const std::string& kind, int index) {
    if (kind == "hmhf") return EquationKind::hmhf(index);
    if (kind == "nlh") return EquationKind::nlh(index);
    throw ParameterError("kind must be 'hmhf' or 'nlh'");
}

py::dict constants_table(const std::string& kind, int index, std::size_t J, double L) {
    EquationKind k = make_kind(kind, index);
    RateTable rt = rates(k, J, L);
    py::dict out;
    out["kind"] = kind;
    out["kappa"] = rt.kappa;
    out["alphas"] = rt.alphas;
    out["betas"] = rt.betas;
    out["L"] = L;
    return out;
}

double kernel_wronskian_max_dev(const std::string& kind, int index) {
    EquationKind k = make_kind(kind, index);
    KernelPair kp = KernelPair::build(k);
    double worst = 0.0;
    for (double y = 1e-2; y <= 1e2; y *= 1.02)
        worst = std::max(worst, std::abs(kp.wronskian(y) - 1.0));
    return worst;
}

py::dict ode_rates(const std::string& kind, int index, const std::vector<int>& iotas,
                   const std::vector<double>& initial, double t0, double t1) {
    EquationKind k = make_kind(kind, index);
    ScaleTrajectory tr = integrate_scales(initial, k, iotas, t0, t1);
    py::dict out;
    out["times"] = tr.times;
    py::list scales;
    for (std::size_t j = 1; j <= initial.size(); ++j) scales.append(tr.scale_series(j));
    out["scales"] = scales;
    out["collision"] = tr.collision;
    py::list exps, prefs;
    for (const auto& f : tr.fitted) {
        exps.append(f.exponent);
        prefs.append(f.prefactor);
    }
    out["exponents"] = exps;
    out["prefactors"] = prefs;
    return out;
}

py::dict profile_residual(const std::string& kind, int index, const std::vector<int>& iotas,
                          const std::vector<double>& lambdas, double tol, std::size_t nodes) {
    EquationKind k = make_kind(kind, index);
    auto grid = make_log_grid(1e-4, 1e4, nodes);
    KernelPair kp = KernelPair::build(k);
    ProfileParams pp;
    pp.tol = tol;
    BubbleConfig cfg{k, iotas, lambdas};
    ModifiedProfile mp = assemble_profile(cfg, kp, grid, pp);
    ProfileDiagnostics d = profile_diagnostics(mp, std::min<std::size_t>(2, cfg.J()), kp);
    py::dict out;
    out["psi_l2"] = d.psi_l2;
    out["sqrt_interaction"] = d.sqrt_interaction;
    out["psi_over_sqrtD"] = d.psi_l2_over_sqrtD;
    out["main_term_l2"] = d.main_term_l2;
    if (cfg.J() >= 2) out["frkr2"] = mp.correctors[0].frkr;
    return out;
}

py::dict evolve_and_fit(const std::string& kind, int index, const std::vector<int>& iotas,
                        const std::vector<double>& lambdas, double perturb, double decades,
                        std::size_t nodes) {
    EquationKind k = make_kind(kind, index);
    auto grid = make_log_grid(1e-5, 1e3, nodes);
    KernelPair kp = KernelPair::build(k);
    ProfileParams pp;
    BubbleConfig cfg{k, iotas, lambdas};
    ModifiedProfile mp = assemble_profile(cfg, kp, grid, pp);
    RateTable rt = rates(k, std::max<std::size_t>(cfg.J(), 2), lambdas[0]);
    double t0 = 1.0;
    if (cfg.J() >= 2) {
        const std::size_t j = cfg.J();
        const double aj = rt.alphas[j - 1];
        t0 = std::pow(std::pow(rt.L, 1.0 + 2.0 * aj) * rt.betas[j - 1] / lambdas[j - 1], 1.0 / aj);
    }
    RadialField field = k.is_hmhf() ? mp.v : mp.u;
    if (perturb != 0.0) {
        for (std::size_t i = 0; i < grid->size(); ++i) {
            const double z = (grid->s[i] - std::log(0.5)) / 0.5;
            field.v[i] += perturb * std::exp(-0.5 * z * z) *
                          (k.is_hmhf() ? std::pow(grid->r[i], k.D) : 1.0);
        }
    }
    int m = 0;
    for (int s : iotas) m += s;
    EvolutionState st{t0, field, {0, m}};
    SolverConfig cfgs{k};
    cfgs.dt0 = 1e-7;
    EvolutionSeries series = evolve(st, cfgs, t0 * std::pow(10.0, decades));
    EnergyAudit audit = energy_audit(series);
    ZProfile Z = make_Z(k, grid);
    FitParams fpar;
    std::vector<double> guess = lambdas, ft;
    std::vector<std::vector<double>> ls(cfg.J());
    for (std::size_t i = 0; i < series.snapshots.size(); ++i) {
        RadialField u = series.snapshots[i];
        if (k.is_hmhf()) {
            u.kind = FieldKind::UType;
            for (std::size_t j = 0; j < grid->size(); ++j) u.v[j] *= std::pow(grid->r[j], -k.D);
        }
        try {
            FitResult fr = fit_scales(u, k, iotas, guess, Z, kp, fpar);
            ft.push_back(series.snapshot_times[i]);
            for (std::size_t j = 0; j < cfg.J(); ++j) ls[j].push_back(fr.lambdas[j]);
            guess = fr.lambdas;
        } catch (const std::exception&) {
            break;
        }
    }
    py::dict out;
    out["times"] = ft;
    py::list scales;
    for (auto& v : ls) scales.append(v);
    out["scales"] = scales;
    out["energy_discrepancy_rel"] = audit.discrepancy_rel;
    out["energy_monotone"] = audit.monotone;
    if (cfg.J() >= 2 && ft.size() >= 4) {
        PowerFit f = fit_power_law(ft, ls[1], ft.back() / 10.0, ft.back());
        out["lambda2_exponent"] = f.exponent;
        out["lambda2_prefactor"] = f.prefactor;
    }
    return out;
}

} // namespace

PYBIND11_MODULE(bubbletree, m) {
    m.doc() = "bubble-tree dynamics laboratory for energy-critical heat flows";
    m.def("kappa", [](const std::string& kind, int index) { return kappa(make_kind(kind, index)); },
          py::arg("kind"), py::arg("index"),
          "universal interaction constant (positive for nlh, negative for hmhf)");
    m.def("constants_table", &constants_table, py::arg("kind"), py::arg("index"), py::arg("J") = 4,
          py::arg("L") = 1.0, "kappa with the universal exponents and prefactors");
    m.def("kernel_wronskian_max_dev", &kernel_wronskian_max_dev, py::arg("kind"), py::arg("index"),
          "max |y^(N-1) Wronskian - 1| of the kernel pair over y in [1e-2, 1e2]");
    m.def("ode_rates", &ode_rates, py::arg("kind"), py::arg("index"), py::arg("iotas"),
          py::arg("initial"), py::arg("t0"), py::arg("t1"),
          "integrate the reduced scale ODE and fit the final-decade power laws");
    m.def("classify_signs",
          [](const std::string& kind, int index, std::size_t J) {
              return classify_signs(make_kind(kind, index), J);
          },
          py::arg("kind"), py::arg("index"), py::arg("J"),
          "admissible sign patterns (alternating for nlh, constant for hmhf)");
    m.def("profile_residual", &profile_residual, py::arg("kind"), py::arg("index"),
          py::arg("iotas"), py::arg("lambdas"), py::arg("tol") = 1e-10, py::arg("nodes") = 2048,
          "modified-profile residual diagnostics");
    m.def("evolve_and_fit", &evolve_and_fit, py::arg("kind"), py::arg("index"), py::arg("iotas"),
          py::arg("lambdas"), py::arg("perturb") = 0.0, py::arg("decades") = 1.0,
          py::arg("nodes") = 2048, "full PDE run with snapshot scale fits");
}
