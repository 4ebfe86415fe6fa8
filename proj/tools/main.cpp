// Command-line laboratory for bubble-tree dynamics: universal constants,
// linearized kernel tables, modified multi-bubble profiles, the reduced scale
// ODE, full PDE evolution, scale fitting, and run aggregation.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "bubbletree/constants.hpp"
#include "bubbletree/equations.hpp"
#include "bubbletree/errors.hpp"
#include "bubbletree/evolve.hpp"
#include "bubbletree/fit.hpp"
#include "bubbletree/grid.hpp"
#include "bubbletree/io.hpp"
#include "bubbletree/linearized.hpp"
#include "bubbletree/profiles.hpp"
#include "bubbletree/reduced_ode.hpp"
#include "bubbletree/util.hpp"

using namespace bubbletree;
namespace fs = std::filesystem;

namespace {

struct KindSpec {
    std::string kind = "hmhf";
    int D = 3;
    int N = 8;
    EquationKind resolve() const {
        if (kind == "hmhf") return EquationKind::hmhf(D);
        if (kind == "nlh") return EquationKind::nlh(N);
        throw ParameterError("unknown kind '" + kind + "' (use hmhf or nlh)");
    }
};

void add_kind_options(CLI::App* cmd, KindSpec& ks) {
    cmd->add_option("--kind", ks.kind, "equation family: hmhf or nlh")
        ->check(CLI::IsMember({"hmhf", "nlh"}));
    cmd->add_option("--D", ks.D, "equivariance index (hmhf)");
    cmd->add_option("--N", ks.N, "space dimension (nlh)");
}

struct GridSpec {
    double r_min = 1e-4;
    double r_max = 1e4;
    std::size_t nodes = 4096;
};

void add_grid_options(CLI::App* cmd, GridSpec& gs) {
    cmd->add_option("--r-min", gs.r_min, "inner grid radius");
    cmd->add_option("--r-max", gs.r_max, "outer grid radius");
    cmd->add_option("--nodes", gs.nodes, "grid node count");
}

std::vector<int> parse_signs(const std::string& s) {
    std::vector<int> out;
    for (char c : s) {
        if (c == '+')
            out.push_back(1);
        else if (c == '-')
            out.push_back(-1);
        else
            throw ParameterError("malformed sign string '" + s + "' (use e.g. +- )");
    }
    if (out.empty()) throw ParameterError("empty sign string");
    return out;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t next = s.find(',', pos);
        if (next == std::string::npos) next = s.size();
        out.push_back(std::stod(s.substr(pos, next - pos)));
        pos = next + 1;
    }
    if (out.empty()) throw ParameterError("empty list");
    return out;
}

std::pair<double, double> parse_span(const std::string& s) {
    const std::size_t c = s.find(':');
    if (c == std::string::npos) throw ParameterError("time span must look like t0:t1");
    return {std::stod(s.substr(0, c)), std::stod(s.substr(c + 1))};
}

std::string default_out_dir() {
    const char* env = std::getenv("BUBBLETREE_OUT");
    return env ? env : ".";
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::map<std::string, std::string> read_metadata(const std::string& path) {
    std::ifstream meta(path);
    if (!meta) throw ParameterError("cannot open " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(meta, line)) {
        const std::size_t eq = line.find(" = ");
        if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 3);
    }
    return kv;
}

int run_constants(const KindSpec& ks, std::size_t J, double L, bool strict) {
    EquationKind kind = ks.resolve();
    RateTable rt = rates(kind, J, L);
    std::printf("{\"kind\": \"%s\", \"index\": %g, \"kappa\": %.10g,\n  \"alphas\": [",
                kind.name().c_str(), kind.is_hmhf() ? kind.D : kind.N, rt.kappa);
    for (std::size_t j = 0; j < J; ++j) std::printf("%s%.10g", j ? ", " : "", rt.alphas[j]);
    std::printf("],\n  \"betas\": [");
    for (std::size_t j = 0; j < J; ++j) std::printf("%s%.10g", j ? ", " : "", rt.betas[j]);
    std::printf("],\n  \"L\": %.10g}\n", L);
    if (strict) {
        auto grid = make_log_grid(1e-4, 1e4, 4096);
        const double ku = kappa_unified(kind, grid);
        const double rel = std::abs(ku / rt.kappa - 1.0);
        std::printf("cross-check: kappa_unified = %.10g (rel dev %.2e)\n", ku, rel);
        if (rel > 1e-6) {
            std::fprintf(stderr, "strict: kappa cross-formula deviation exceeds 1e-6\n");
            return 1;
        }
    }
    return 0;
}

int run_kernel(const KindSpec& ks, const std::string& out_dir, bool strict) {
    EquationKind kind = ks.resolve();
    KernelPair kp = KernelPair::build(kind);
    std::vector<double> y, g1, g2, dg1, dg2, wr;
    double worst = 0.0;
    for (double yy = 1e-2; yy <= 1e2 * (1 + 1e-12); yy *= std::pow(10.0, 1.0 / 64.0)) {
        y.push_back(yy);
        g1.push_back(kp.gamma1(yy));
        g2.push_back(kp.gamma2(yy));
        dg1.push_back(kp.dgamma1(yy));
        dg2.push_back(kp.dgamma2(yy));
        wr.push_back(kp.wronskian(yy));
        worst = std::max(worst, std::abs(wr.back() - 1.0));
    }
    fs::create_directories(out_dir);
    const std::string path = out_dir + "/kernel_" + kind.name() + ".csv";
    write_csv(path,
              {"y [-]", "gamma1 [-]", "gamma2 [-]", "dgamma1 [-]", "dgamma2 [-]", "wronskian [-]"},
              {y, g1, g2, dg1, dg2, wr});
    std::printf("kernel table -> %s ; max |wronskian-1| on [1e-2,1e2] = %.3e\n", path.c_str(),
                worst);
    if (strict && worst > 1e-6) {
        std::fprintf(stderr, "strict: Wronskian deviates beyond 1e-6\n");
        return 1;
    }
    return 0;
}

int run_profile(const KindSpec& ks, const GridSpec& gs, const std::string& signs,
                const std::string& scales, const std::string& mu_sweep, double tol, unsigned jobs,
                const std::string& out_dir, bool strict) {
    EquationKind kind = ks.resolve();
    auto grid = make_log_grid(gs.r_min, gs.r_max, gs.nodes);
    KernelPair kp = KernelPair::build(kind);
    ProfileParams pp;
    pp.tol = tol;
    std::vector<int> iotas = parse_signs(signs);
    fs::create_directories(out_dir);

    if (!mu_sweep.empty()) {
        if (iotas.size() != 2) throw ParameterError("--mu-sweep needs a two-bubble sign pattern");
        std::vector<double> mus = parse_list(mu_sweep);
        std::vector<ProfileDiagnostics> diags(mus.size());
        std::vector<double> frkrs(mus.size());
        std::vector<std::string> errors(mus.size());
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= mus.size()) return;
                try {
                    BubbleConfig cfg{kind, iotas, {1.0, mus[i]}};
                    ModifiedProfile mp = assemble_profile(cfg, kp, grid, pp);
                    diags[i] = profile_diagnostics(mp, 2, kp);
                    frkrs[i] = mp.correctors[0].frkr;
                } catch (const std::exception& e) {
                    errors[i] = e.what();
                }
            }
        };
        std::vector<std::thread> pool;
        for (unsigned t = 1; t < std::max(1u, jobs); ++t) pool.emplace_back(worker);
        worker();
        for (auto& th : pool) th.join();
        std::vector<double> col_psi, col_sqrtD, col_frkr, col_main;
        for (std::size_t i = 0; i < mus.size(); ++i) {
            if (!errors[i].empty()) throw NumericalError("mu = " + fmt(mus[i]) + ": " + errors[i]);
            col_psi.push_back(diags[i].psi_l2);
            col_sqrtD.push_back(diags[i].sqrt_interaction);
            col_frkr.push_back(frkrs[i]);
            col_main.push_back(diags[i].main_term_l2);
        }
        const std::string path = out_dir + "/profile_sweep_" + kind.name() + ".csv";
        write_csv(path,
                  {"mu [-]", "psi_l2 [-]", "sqrt_interaction [-]", "frkr2 [-]", "main_term_l2 [-]"},
                  {mus, col_psi, col_sqrtD, col_frkr, col_main});
        std::printf("profile sweep -> %s\n", path.c_str());
        bool decreasing = true;
        for (std::size_t i = 1; i < mus.size(); ++i)
            if (col_psi[i] / col_sqrtD[i] >= col_psi[i - 1] / col_sqrtD[i - 1]) decreasing = false;
        std::printf("residual ratio decreasing across sweep: %s\n", decreasing ? "yes" : "no");
        return (strict && !decreasing) ? 1 : 0;
    }

    BubbleConfig cfg{kind, iotas, parse_list(scales)};
    ModifiedProfile mp = assemble_profile(cfg, kp, grid, pp);
    ProfileDiagnostics d = profile_diagnostics(mp, std::min<std::size_t>(2, cfg.J()), kp);
    const std::string path = out_dir + "/profile_" + kind.name() + ".csv";
    std::vector<double> r(grid->r.begin(), grid->r.end());
    write_csv(path,
              {"r [-]", "U [-]", "P [-]", "correction [-]", "residual [-]", "kernel_term [-]"},
              {r, mp.u.v, mp.v.v, mp.correction.v, mp.residual.v, mp.kernel_term.v});
    write_metadata(out_dir + "/profile_" + kind.name() + ".meta",
                   {{"kind", kind.name()},
                    {"index", fmt(kind.is_hmhf() ? kind.D : kind.N)},
                    {"signs", signs},
                    {"scales", scales},
                    {"kappa", fmt(mp.kappa_used)},
                    {"psi_l2", fmt(d.psi_l2)},
                    {"sqrt_interaction", fmt(d.sqrt_interaction)},
                    {"psi_over_sqrtD", fmt(d.psi_l2_over_sqrtD)},
                    {"main_term_l2", fmt(d.main_term_l2)},
                    {"envelope_A0", fmt(d.envelope_A0)}});
    std::printf("profile -> %s\n", path.c_str());
    std::printf("|Psi|_L2 = %.6e, sqrt(D) = %.6e, ratio = %.6e, A0 = %g\n", d.psi_l2,
                d.sqrt_interaction, d.psi_l2_over_sqrtD, d.envelope_A0);
    for (const auto& c : mp.correctors)
        std::printf("level %zu: frkr = %.8e, iterations = %d, delta = %.2e\n", c.level, c.frkr,
                    c.iterations, c.converged_delta);
    return 0;
}

int run_ode(const KindSpec& ks, std::size_t J, const std::string& signs,
            const std::string& scales0, const std::string& span, const std::string& out_dir,
            bool strict) {
    EquationKind kind = ks.resolve();
    std::vector<int> iotas = parse_signs(signs);
    if (iotas.size() != J) throw ParameterError("sign pattern length must equal J");
    auto [t0, t1] = parse_span(span);
    RateTable rt = rates(kind, J, 1.0);
    std::vector<double> init;
    if (scales0.empty()) {
        for (std::size_t j = 1; j <= J; ++j) init.push_back(lambda_ex(rt, j, t0));
    } else {
        init = parse_list(scales0);
        if (init.size() != J) throw ParameterError("initial scale list must have J entries");
    }
    ScaleTrajectory tr = integrate_scales(init, kind, iotas, t0, t1);
    fs::create_directories(out_dir);
    std::vector<std::vector<double>> cols;
    std::vector<std::string> header{"t [-]"};
    cols.push_back(tr.times);
    for (std::size_t j = 1; j <= J; ++j) {
        header.push_back("lambda" + std::to_string(j) + " [-]");
        cols.push_back(tr.scale_series(j));
    }
    const std::string path = out_dir + "/ode_" + kind.name() + ".csv";
    write_csv(path, header, cols);
    std::printf("trajectory -> %s\n", path.c_str());
    if (tr.collision) std::printf("collision flag raised at t = %.6g\n", tr.t_collision);
    bool ok = true;
    const auto admissible = classify_signs(kind, J);
    const bool is_admissible = std::any_of(admissible.begin(), admissible.end(),
                                           [&](const std::vector<int>& p) { return p == iotas; });
    if (is_admissible) {
        for (std::size_t j = 2; j <= J; ++j) {
            const PowerFit& f = tr.fitted[j - 1];
            std::printf("j=%zu: exponent %.5f (target %.5f), prefactor %.6g (target %.6g)\n", j,
                        f.exponent, rt.alphas[j - 1], f.prefactor, rt.betas[j - 1]);
            if (std::abs(f.exponent - rt.alphas[j - 1]) > 0.02 * std::max(1.0, rt.alphas[j - 1]))
                ok = false;
            if (std::abs(f.prefactor / rt.betas[j - 1] - 1.0) > 0.05) ok = false;
        }
        if (tr.collision) ok = false;
    } else {
        std::printf("sign pattern is inadmissible; collision expected\n");
        ok = tr.collision;
    }
    if (strict && !ok) {
        std::fprintf(stderr, "strict: rate gates not met\n");
        return 1;
    }
    return 0;
}

int run_evolve(const KindSpec& ks, GridSpec gs, bool grid_set, const std::string& signs,
               const std::string& scales, double perturb, std::string span,
               const std::string& out_dir, bool strict) {
    EquationKind kind = ks.resolve();
    if (!grid_set) {  // evolution default favors the origin
        gs.r_min = 1e-5;
        gs.r_max = 1e3;
    }
    auto grid = make_log_grid(gs.r_min, gs.r_max, gs.nodes);
    KernelPair kp = KernelPair::build(kind);
    ProfileParams pp;
    std::vector<int> iotas = parse_signs(signs);
    std::vector<double> lambdas = parse_list(scales);
    BubbleConfig cfg{kind, iotas, lambdas};
    ModifiedProfile mp = assemble_profile(cfg, kp, grid, pp);

    double t0 = 0.0, t1 = 0.0;
    if (span.empty() || span == "auto") {
        // start on the universal curve: t0 with lambda_ex_J(t0) = lambda_J
        RateTable rt = rates(kind, std::max<std::size_t>(cfg.J(), 2), lambdas[0]);
        if (cfg.J() >= 2) {
            const std::size_t j = cfg.J();
            const double aj = rt.alphas[j - 1];
            t0 = std::pow(std::pow(rt.L, 1.0 + 2.0 * aj) * rt.betas[j - 1] / lambdas[j - 1],
                          1.0 / aj);
        } else {
            t0 = 0.1 * lambdas[0] * lambdas[0];
        }
        t1 = 13.0 * t0;
    } else {
        std::tie(t0, t1) = parse_span(span);
    }

    RadialField field = kind.is_hmhf() ? mp.v : mp.u;
    if (perturb != 0.0) {
        RadialField bump(grid, FieldKind::UType);
        const double rc = std::sqrt(lambdas[0] * (cfg.J() >= 2 ? lambdas[1] : lambdas[0] / 4.0));
        for (std::size_t i = 0; i < grid->size(); ++i) {
            const double z = (grid->s[i] - std::log(2.0 * rc)) / 0.5;
            bump.v[i] = std::exp(-0.5 * z * z) * cutoff_value(grid->r[i] / (4.0 * rc));
        }
        const double amp = perturb * norms(mp.u, kind).h1dot / norms(bump, kind).h1dot;
        for (std::size_t i = 0; i < grid->size(); ++i)
            field.v[i] += amp * bump.v[i] * (kind.is_hmhf() ? std::pow(grid->r[i], kind.D) : 1.0);
    }
    int m_class = 0;
    for (int s : iotas) m_class += s;
    EvolutionState st{t0, field, {0, m_class}};
    SolverConfig scfg{kind};
    scfg.dt0 = 1e-7;
    EvolutionSeries series = evolve(st, scfg, t1);
    EnergyAudit audit = energy_audit(series);

    fs::create_directories(out_dir);
    write_csv(out_dir + "/series.csv", {"t [-]", "dt [-]", "energy [-]", "dissipation_rate [-]"},
              {series.t_hist, series.dt_hist, series.energy_hist, series.dissipation_hist});
    std::vector<double> r(grid->r.begin(), grid->r.end());
    std::vector<double> snap_t, snap_idx;
    for (std::size_t i = 0; i < series.snapshots.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof name, "/snap_%04zu.csv", i);
        write_csv(out_dir + name, {"r [-]", "field [-]"}, {r, series.snapshots[i].v});
        snap_t.push_back(series.snapshot_times[i]);
        snap_idx.push_back(static_cast<double>(i));
    }
    write_csv(out_dir + "/snapshots.csv", {"index [-]", "t [-]"}, {snap_idx, snap_t});
    std::string sgn;
    for (int s : iotas) sgn += s > 0 ? '+' : '-';
    write_metadata(out_dir + "/metadata.txt",
                   {{"kind", kind.name()},
                    {"index", fmt(kind.is_hmhf() ? kind.D : kind.N)},
                    {"signs", sgn},
                    {"scales", scales},
                    {"field_form", kind.is_hmhf() ? "v" : "u"},
                    {"perturb", fmt(perturb)},
                    {"r_min", fmt(gs.r_min)},
                    {"r_max", fmt(gs.r_max)},
                    {"nodes", fmt(static_cast<double>(gs.nodes))},
                    {"t0", fmt(t0)},
                    {"t1", fmt(series.t_hist.back())},
                    {"steps", fmt(static_cast<double>(series.t_hist.size() - 1))},
                    {"energy_drop", fmt(audit.energy_drop)},
                    {"dissipated", fmt(audit.dissipation)},
                    {"energy_discrepancy_rel", fmt(audit.discrepancy_rel)},
                    {"energy_monotone", audit.monotone ? "1" : "0"}});
    std::printf("run -> %s : %zu steps, %zu snapshots, t in [%g, %g]\n", out_dir.c_str(),
                series.t_hist.size() - 1, series.snapshots.size(), t0, series.t_hist.back());
    std::printf("energy identity: drop %.6e vs dissipated %.6e (rel %.3e), monotone = %s\n",
                audit.energy_drop, audit.dissipation, audit.discrepancy_rel,
                audit.monotone ? "yes" : "no");
    if (strict && (!audit.monotone || audit.discrepancy_rel > 0.01)) {
        std::fprintf(stderr, "strict: energy identity gates not met\n");
        return 1;
    }
    return 0;
}

int run_fit(const std::string& run_dir, const std::string& guess_str, const std::string& out_dir,
            bool strict) {
    CsvTable snaps = read_csv(run_dir + "/snapshots.csv");
    auto kv = read_metadata(run_dir + "/metadata.txt");
    KindSpec ks;
    ks.kind = kv.at("kind");
    (ks.kind == "hmhf" ? ks.D : ks.N) = static_cast<int>(std::stod(kv.at("index")));
    EquationKind kind = ks.resolve();
    std::vector<int> iotas = parse_signs(kv.at("signs"));
    auto grid = make_log_grid(std::stod(kv.at("r_min")), std::stod(kv.at("r_max")),
                              static_cast<std::size_t>(std::stod(kv.at("nodes"))));
    KernelPair kp = KernelPair::build(kind);
    ZProfile Z = make_Z(kind, grid);
    FitParams fpar;
    std::vector<double> guess =
        guess_str.empty() ? parse_list(kv.at("scales")) : parse_list(guess_str);

    const std::size_t n = snaps.rows();
    std::vector<double> ft;
    std::vector<FitResult> fits;
    for (std::size_t i = 0; i < n; ++i) {
        char name[64];
        std::snprintf(name, sizeof name, "/snap_%04zu.csv", i);
        CsvTable tab = read_csv(run_dir + name);
        RadialField u(grid, FieldKind::UType, tab.columns[tab.column("field")]);
        if (kv.at("field_form") == "v")
            for (std::size_t j = 0; j < grid->size(); ++j) u.v[j] *= std::pow(grid->r[j], -kind.D);
        try {
            FitResult fr = fit_scales(u, kind, iotas, guess, Z, kp, fpar);
            ft.push_back(snaps.columns[snaps.column("t")][i]);
            guess = fr.lambdas;
            fits.push_back(std::move(fr));
        } catch (const std::exception& e) {
            std::printf("fit stopped at snapshot %zu: %s\n", i, e.what());
            break;
        }
    }
    if (fits.empty()) throw NumericalError("fit: no snapshot could be fitted");
    fs::create_directories(out_dir);
    std::vector<std::string> header{"t [-]"};
    std::vector<std::vector<double>> cols{ft};
    const std::size_t J = iotas.size();
    for (std::size_t j = 1; j <= J; ++j) {
        header.push_back("lambda" + std::to_string(j) + " [-]");
        std::vector<double> c;
        for (auto& f : fits) c.push_back(f.lambdas[j - 1]);
        cols.push_back(std::move(c));
    }
    {
        std::vector<double> a, b, c;
        for (auto& f : fits) {
            a.push_back(f.g_h1);
            b.push_back(f.g_h2);
            c.push_back(f.interaction);
        }
        header.insert(header.end(), {"g_h1 [-]", "g_h2 [-]", "interaction [-]"});
        cols.push_back(a);
        cols.push_back(b);
        cols.push_back(c);
    }
    write_csv(out_dir + "/fits.csv", header, cols);
    {
        std::vector<std::pair<std::string, std::string>> meta(kv.begin(), kv.end());
        meta.emplace_back("run_dir", run_dir);
        meta.emplace_back("fitted_snapshots", fmt(static_cast<double>(fits.size())));
        write_metadata(out_dir + "/metadata.txt", meta);
    }
    std::printf("fits -> %s/fits.csv (%zu of %zu snapshots)\n", out_dir.c_str(), fits.size(), n);

    int rc = 0;
    if (J >= 2 && fits.size() >= 3) {
        ModulationReport rep = modulation_check(ft, fits, kind, iotas, 2);
        std::vector<double> mt, lhs, pred, bud;
        for (auto& rec : rep.records) {
            mt.push_back(rec.t);
            lhs.push_back(rec.lhs);
            pred.push_back(rec.predicted);
            bud.push_back(rec.budget);
        }
        write_csv(out_dir + "/modulation.csv",
                  {"t [-]", "dlog_lambda2_dt [-]", "predicted [-]", "budget [-]"},
                  {mt, lhs, pred, bud});
        std::printf("modulation: %.1f%% of snapshots within the error budget\n",
                    100.0 * rep.fraction_within);
        if (strict && rep.fraction_within < 0.9) rc = 1;
    }
    if (strict && fits.size() < n) rc = 1;
    return rc;
}

int run_report(const std::vector<std::string>& run_dirs, const std::string& out_dir, bool strict) {
    std::vector<double> col_index, col_exp, col_exp_target, col_pref, col_pref_target, col_drift;
    bool all_ok = true;
    fs::create_directories(out_dir);
    for (const auto& dir : run_dirs) {
        auto kv = read_metadata(dir + "/metadata.txt");
        KindSpec ks;
        ks.kind = kv.at("kind");
        (ks.kind == "hmhf" ? ks.D : ks.N) = static_cast<int>(std::stod(kv.at("index")));
        EquationKind kind = ks.resolve();
        CsvTable fits = read_csv(dir + "/fits.csv");
        const std::vector<double>& t = fits.columns[fits.column("t")];
        const std::size_t J = parse_signs(kv.at("signs")).size();
        RateTable rt = rates(kind, std::max<std::size_t>(J, 2), 1.0);
        const std::vector<double>& l1 = fits.columns[fits.column("lambda1")];
        double drift = 0.0;
        for (double v : l1) drift = std::max(drift, std::abs(v / l1.front() - 1.0));
        std::printf("%s (%s):\n  lambda1 drift %.3f%%\n", dir.c_str(), kind.name().c_str(),
                    100.0 * drift);
        bool ok = drift < 0.05;
        if (J >= 2) {
            const std::vector<double>& l2 = fits.columns[fits.column("lambda2")];
            PowerFit f = fit_power_law(t, l2, t.back() / 10.0, t.back());
            const double L = l1.back();
            const double pref_target = std::pow(L, 1.0 + 2.0 * rt.alphas[1]) * rt.betas[1];
            std::printf("  lambda2 exponent %.4f (target %.4f), prefactor %.5g (target %.5g)\n",
                        f.exponent, rt.alphas[1], f.prefactor, pref_target);
            ok = ok && std::abs(f.exponent - rt.alphas[1]) <= 0.10 * std::max(1.0, rt.alphas[1]);
            col_index.push_back(kind.is_hmhf() ? kind.D : kind.N);
            col_exp.push_back(f.exponent);
            col_exp_target.push_back(rt.alphas[1]);
            col_pref.push_back(f.prefactor);
            col_pref_target.push_back(pref_target);
            col_drift.push_back(drift);
        }
        std::printf("  gates: %s\n", ok ? "met" : "NOT met");
        all_ok = all_ok && ok;
    }
    if (!col_index.empty())
        write_csv(out_dir + "/report.csv",
                  {"index [-]", "exponent [-]", "exponent_target [-]", "prefactor [-]",
                   "prefactor_target [-]", "lambda1_drift [-]"},
                  {col_index, col_exp, col_exp_target, col_pref, col_pref_target, col_drift});
    return (strict && !all_ok) ? 1 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bubble-tree dynamics laboratory for energy-critical heat flows"};
    app.require_subcommand(1);
    bool strict = false;
    std::string out_dir = default_out_dir();
    app.add_flag("--strict", strict, "turn diagnostics into pass/fail gates (exit 1 on failure)");
    app.add_option("--out-dir", out_dir, "output directory (default $BUBBLETREE_OUT or .)");

    KindSpec ks;
    GridSpec gs;
    std::size_t J = 4;
    double L = 1.0;
    auto* c_const = app.add_subcommand("constants", "universal constants kappa, alpha_j, beta_j");
    add_kind_options(c_const, ks);
    c_const->add_option("--J", J, "number of bubbles");
    c_const->add_option("--L", L, "scaling parameter L");

    auto* c_kernel = app.add_subcommand("kernel", "kernel pair of the linearized operator");
    add_kind_options(c_kernel, ks);

    std::string signs = "+-", scales = "1,0.1", mu_sweep, span, guess, run_dir, scales0;
    double tol = 1e-10, perturb = 0.0;
    unsigned jobs = 1;
    auto* c_profile = app.add_subcommand("profile", "modified multi-bubble profile and residual");
    add_kind_options(c_profile, ks);
    add_grid_options(c_profile, gs);
    c_profile->add_option("--signs", signs, "sign pattern, e.g. +- or ++");
    c_profile->add_option("--scales", scales, "comma-separated scales, decreasing");
    c_profile->add_option("--mu-sweep", mu_sweep, "two-bubble sweep over mu values");
    c_profile->add_option("--tol", tol, "fixed-point tolerance");
    c_profile->add_option("--jobs", jobs, "worker pool size for sweeps");

    auto* c_ode = app.add_subcommand("ode", "reduced modulation ODE for the scales");
    add_kind_options(c_ode, ks);
    c_ode->add_option("--J", J, "number of bubbles");
    c_ode->add_option("--signs", signs, "sign pattern");
    c_ode->add_option("--scales0", scales0, "initial scales (default: on the universal curve)");
    c_ode->add_option("--t-span", span, "integration span t0:t1")->required();

    auto* c_evolve = app.add_subcommand("evolve", "full PDE evolution from a bubble profile");
    add_kind_options(c_evolve, ks);
    auto* opt_rmin = c_evolve->add_option("--r-min", gs.r_min, "inner grid radius");
    c_evolve->add_option("--r-max", gs.r_max, "outer grid radius");
    c_evolve->add_option("--nodes", gs.nodes, "grid node count");
    c_evolve->add_option("--signs", signs, "sign pattern");
    c_evolve->add_option("--scales", scales, "initial scales");
    c_evolve->add_option("--perturb", perturb, "relative H1dot size of the added bump");
    c_evolve->add_option("--t-span", span, "t0:t1 (default: one decade on the universal curve)");

    auto* c_fit = app.add_subcommand("fit", "scale decomposition of stored snapshots");
    c_fit->add_option("--run-dir", run_dir, "directory produced by evolve")->required();
    c_fit->add_option("--guess", guess, "initial scale guess (default: run metadata)");

    std::vector<std::string> report_dirs;
    auto* c_report = app.add_subcommand("report", "aggregate fitted rates against the targets");
    c_report->add_option("dirs", report_dirs, "fit output directories")->required();

    for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp") return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(c_const)) return run_constants(ks, J, L, strict);
        if (app.got_subcommand(c_kernel)) return run_kernel(ks, out_dir, strict);
        if (app.got_subcommand(c_profile))
            return run_profile(ks, gs, signs, scales, mu_sweep, tol, jobs, out_dir, strict);
        if (app.got_subcommand(c_ode)) return run_ode(ks, J, signs, scales0, span, out_dir, strict);
        if (app.got_subcommand(c_evolve))
            return run_evolve(ks, gs, opt_rmin->count() > 0, signs, scales, perturb, span, out_dir,
                              strict);
        if (app.got_subcommand(c_fit)) return run_fit(run_dir, guess, out_dir, strict);
        if (app.got_subcommand(c_report)) return run_report(report_dirs, out_dir, strict);
    } catch (const ParameterError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 1;
    }
    return 2;
}
