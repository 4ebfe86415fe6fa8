#include "bubbletree/fit.hpp"

#include <algorithm>
#include <cmath>

#include "bubbletree/constants.hpp"
#include "bubbletree/errors.hpp"
#include "bubbletree/util.hpp"

namespace bubbletree {

double z_profile_value(const ZProfile& z, double y) {
    return z.c * (1.0 - cutoff_value(y * z.R0)) * cutoff_value(2.0 * y / z.R0) *
           lambda_w_value(z.kind, y);
}

ZProfile make_Z(const EquationKind& kind, const GridPtr& grid, double R0) {
    if (!(R0 > 10.0)) throw ParameterError("make_Z: R0 must exceed 10");
    ZProfile z;
    z.kind = kind;
    z.R0 = R0;
    z.c = 1.0;
    RadialField pre(grid, FieldKind::UType);
    for (std::size_t i = 0; i < grid->size(); ++i) pre.v[i] = z_profile_value(z, grid->r[i]);
    GroundState gs = make_ground_state(kind, grid);
    const double pair = integrate(pre, gs.LambdaW, kind);
    if (std::abs(pair) < 1e-12) throw NumericalError("make_Z: degenerate normalization");
    z.c = 1.0 / pair;
    z.Z = RadialField(grid, FieldKind::UType);
    for (std::size_t i = 0; i < grid->size(); ++i) z.Z.v[i] = pre.v[i] / pair;
    return z;
}

namespace {

// F_k = <u - U, iota_k Z_{underline lambda_k}>; compact support, plain sum.
std::vector<double> orth_functionals(const RadialField& diff, const EquationKind& kind,
                                     const std::vector<int>& iotas,
                                     const std::vector<double>& lambdas, const ZProfile& Z) {
    const RadialGrid& gr = *diff.grid;
    const double cN = kind.pairing_constant();
    std::vector<double> F(lambdas.size(), 0.0);
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
        const double l = lambdas[k];
        double acc = 0.0;
        for (std::size_t i = 0; i < gr.size(); ++i) {
            const double zv = z_profile_value(Z, gr.r[i] / l);
            if (zv == 0.0) continue;
            acc += gr.wlog[i] * diff.v[i] * std::pow(l, -(kind.D + 2.0)) * zv *
                   std::pow(gr.r[i], kind.N);
        }
        F[k] = cN * iotas[k] * acc;
    }
    return F;
}

} // namespace

FitResult fit_scales(const RadialField& u, const EquationKind& kind, const std::vector<int>& iotas,
                     const std::vector<double>& guess, const ZProfile& Z, const KernelPair& kp,
                     const FitParams& params) {
    if (u.kind != FieldKind::UType) throw ParameterError("fit_scales: expects a u-type field");
    const std::size_t J = guess.size();
    if (J < 1 || iotas.size() != J) throw ParameterError("fit_scales: bad configuration");

    FitResult res;
    res.lambdas = guess;
    const GridPtr grid = u.grid;
    const double u_h1 = norms(u, kind).h1dot;

    RadialField g(grid, FieldKind::UType);
    std::vector<double> F(J, 0.0);
    double f_scale = 0.0;
    for (int it = 0; it < params.max_iter; ++it) {
        BubbleConfig cfg{kind, iotas, res.lambdas};
        cfg.validate(params.profile.alpha0);
        ModifiedProfile mp = assemble_profile(cfg, kp, grid, params.profile);
        g = u - mp.u;
        F = orth_functionals(g, kind, iotas, res.lambdas, Z);
        res.newton_iters = it + 1;
        const double g_h1 = norms(g, kind).h1dot;
        f_scale = 0.0;
        for (std::size_t k = 0; k < J; ++k)
            f_scale = std::max(f_scale, std::abs(F[k]) * res.lambdas[k] * res.lambdas[k]);
        const double tol = params.tol_rel * g_h1 + 1e-13 * u_h1;
        if (f_scale < tol) {
            res.converged = true;
            break;
        }
        const double damp = (it < 2) ? params.damping : 1.0;
        for (std::size_t k = 0; k < J; ++k) {
            // lambda_j dF_k/dlambda_j ~ +delta_{jk} (F_k ~ log(lambda_k/lambda_k*)),
            // so the Newton step in log lambda is -F_k
            double step = -damp * F[k];
            step = std::clamp(step, -0.5, 0.5);
            res.lambdas[k] *= std::exp(step);
        }
        for (std::size_t k = 1; k < J; ++k)
            if (res.lambdas[k] >= res.lambdas[k - 1])
                throw CollisionError("fit_scales: scale collision during iteration");
        if (it + 1 == params.max_iter)
            throw ConvergenceError("fit_scales: Newton did not converge");
    }
    res.g = g;
    res.orth_residuals.resize(J);
    for (std::size_t k = 0; k < J; ++k)
        res.orth_residuals[k] = std::abs(F[k]) * res.lambdas[k] * res.lambdas[k];
    BubbleConfig cfg{kind, iotas, res.lambdas};
    res.interaction = cfg.interaction();
    FieldNorms gn = norms(g, kind);
    res.g_h1 = gn.h1dot;
    res.g_h2 = gn.h2dot;
    RadialField gl(grid, FieldKind::UType);
    for (std::size_t i = 0; i < grid->size(); ++i)
        gl.v[i] = g.v[i] / japanese_bracket(grid->r[i] / res.lambdas[0]);
    res.g_h1_local = norms(gl, kind).h1dot;
    return res;
}

std::vector<std::vector<double>> fit_jacobian(const RadialField& u, const EquationKind& kind,
                                              const std::vector<int>& iotas,
                                              const std::vector<double>& lambdas, const ZProfile& Z,
                                              const KernelPair& kp, const FitParams& params,
                                              double eps) {
    const std::size_t J = lambdas.size();
    std::vector<std::vector<double>> jac(J, std::vector<double>(J, 0.0));
    auto eval = [&](const std::vector<double>& ls) {
        BubbleConfig cfg{kind, iotas, ls};
        ModifiedProfile mp = assemble_profile(cfg, kp, u.grid, params.profile);
        RadialField g = u - mp.u;
        return orth_functionals(g, kind, iotas, ls, Z);
    };
    for (std::size_t j = 0; j < J; ++j) {
        std::vector<double> up = lambdas, dn = lambdas;
        up[j] *= std::exp(eps);
        dn[j] *= std::exp(-eps);
        std::vector<double> Fu = eval(up), Fd = eval(dn);
        for (std::size_t k = 0; k < J; ++k) jac[j][k] = (Fu[k] - Fd[k]) / (2.0 * eps);
    }
    return jac;
}

ModulationReport modulation_check(const std::vector<double>& times,
                                  const std::vector<FitResult>& fits, const EquationKind& kind,
                                  const std::vector<int>& iotas, std::size_t k) {
    const std::size_t n = times.size();
    if (n < 3 || fits.size() != n) throw ParameterError("modulation_check: need >= 3 fits");
    for (std::size_t i = 1; i < n; ++i)
        if (!(times[i] > times[i - 1])) throw ParameterError("modulation_check: non-monotone times");
    const std::size_t J = fits.front().lambdas.size();
    if (k < 1 || k > J || iotas.size() != J)
        throw ParameterError("modulation_check: bad bubble index or signs");
    const double kap = kappa(kind);

    ModulationReport rep;
    rep.k = k;
    std::size_t within = 0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const auto& fit = fits[i];
        ModulationRecord rec;
        rec.t = times[i];
        rec.lhs = (std::log(fits[i + 1].lambdas[k - 1]) - std::log(fits[i - 1].lambdas[k - 1])) /
                  (times[i + 1] - times[i - 1]);
        const double lk = fit.lambdas[k - 1];
        const double mu_k = (k >= 2) ? lk / fit.lambdas[k - 2] : 0.0;
        const int ib = (k >= 2) ? iotas[k - 1] * iotas[k - 2] : 1;
        rec.predicted = (k >= 2) ? kap * ib * std::pow(mu_k, kind.D) / (lk * lk) : 0.0;
        const double mu_next = (k < J) ? fit.lambdas[k] / lk : 0.0;
        rec.budget = (std::pow(mu_next, kind.D) + std::pow(mu_k, kind.D)) / (lk * lk) +
                     fit.interaction + fit.g_h2 * fit.g_h2;
        rec.discrepancy = std::abs(rec.lhs - rec.predicted);
        rec.within = rec.discrepancy <= rec.budget;
        if (rec.within) ++within;
        rep.records.push_back(rec);
    }
    rep.fraction_within =
        rep.records.empty() ? 0.0 : static_cast<double>(within) / rep.records.size();
    return rep;
}

} // namespace bubbletree
