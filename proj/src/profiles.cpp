// Recursive construction of the modified multi-bubble profile: each level's
// corrector solves a fixed-point problem built on the formal right inverse of
// the linearized operator at that level's scale, with the kernel direction
// removed through a Lagrange coefficient. The profile residual is assembled
// semi-analytically: the static bubbles contribute their exact Laplacian
// -r^{-(D+2)} f(Q_{;j}), and each corrector's Laplacian is recovered from the
// identity H phi = rhs it satisfies by construction, so the residual is not
// polluted by finite-difference error at small scale ratios.

#include "bubbletree/profiles.hpp"

#include <algorithm>
#include <cmath>

#include "bubbletree/constants.hpp"
#include "bubbletree/errors.hpp"
#include "bubbletree/util.hpp"

namespace bubbletree {

double BubbleConfig::mu(std::size_t j) const {
    if (j < 1 || j > J()) throw ParameterError("mu: index out of range");
    if (j == 1) return 0.0;
    return lambdas[j - 1] / lambdas[j - 2];
}

double BubbleConfig::lambda_bar(std::size_t j) const {
    if (j < 2 || j > J()) throw ParameterError("lambda_bar: index out of range");
    return std::sqrt(lambdas[j - 1] * lambdas[j - 2]);
}

int BubbleConfig::iota_bar(std::size_t j) const {
    if (j < 2 || j > J()) throw ParameterError("iota_bar: index out of range");
    return iotas[j - 1] * iotas[j - 2];
}

double BubbleConfig::max_mu() const {
    double m = 0.0;
    for (std::size_t j = 2; j <= J(); ++j) m = std::max(m, mu(j));
    return m;
}

double BubbleConfig::interaction() const {
    double acc = 0.0;
    for (std::size_t j = 2; j <= J(); ++j)
        acc += std::pow(mu(j), 2.0 * kind.D) / (lambdas[j - 1] * lambdas[j - 1]);
    return acc;
}

void BubbleConfig::validate(double alpha0) const {
    if (J() < 1) throw ParameterError("bubble config: need at least one bubble");
    if (iotas.size() != lambdas.size()) throw ParameterError("bubble config: signs/scales mismatch");
    for (int s : iotas)
        if (s != 1 && s != -1) throw ParameterError("bubble config: signs must be +-1");
    for (std::size_t j = 0; j < J(); ++j) {
        if (!(lambdas[j] > 0.0)) throw ParameterError("bubble config: scales must be positive");
        if (j > 0 && !(lambdas[j] < lambdas[j - 1]))
            throw ParameterError("bubble config: scales must decrease");
    }
    if (max_mu() >= alpha0) throw CollisionError("bubble config: scales not decoupled");
}

RadialField cutoff_chi(const GridPtr& grid, double R) {
    if (!(R > 0.0)) throw ParameterError("cutoff_chi: R must be positive");
    RadialField chi(grid, FieldKind::UType);
    for (std::size_t i = 0; i < grid->size(); ++i) chi.v[i] = cutoff_value(grid->r[i] / R);
    return chi;
}

RadialField weight_omega(std::size_t ell, const BubbleConfig& config, const GridPtr& grid,
                         double delta0) {
    if (ell < 2 || ell > config.J()) throw ParameterError("weight_omega: level out of range");
    const double l = config.lambdas[ell - 1];
    const double lp = config.lambdas[ell - 2];
    const double lbar = std::sqrt(l * lp);
    const double redge = 2.0 * delta0 * lp;
    const double D = config.kind.D;
    RadialField w(grid, FieldKind::UType);
    for (std::size_t i = 0; i < grid->size(); ++i) {
        const double r = grid->r[i];
        if (r > redge) continue;
        if (r <= l)
            w.v[i] = r * r / (l * l);
        else if (r <= lbar)
            w.v[i] = l * l / (r * r);
        else
            w.v[i] = std::pow(lp, D - 2.0) * std::pow(l, D) / std::pow(r, 2.0 * D - 2.0);
    }
    return w;
}

namespace {

// v-form of the partially assembled profile: sum of bubbles 1..j_max plus the
// cut-off correctors up to the provided levels.
std::vector<double> assemble_v(const BubbleConfig& config,
                               const std::vector<CorrectorProfile>& correctors,
                               std::size_t j_max, const GridPtr& grid, double delta0) {
    const std::size_t n = grid->size();
    std::vector<double> P(n, 0.0);
    for (std::size_t j = 1; j <= j_max; ++j) {
        const double l = config.lambdas[j - 1];
        const double io = config.iotas[j - 1];
        for (std::size_t i = 0; i < n; ++i) P[i] += io * q_value(config.kind, grid->r[i] / l);
    }
    for (const auto& c : correctors) {
        if (c.level > j_max) continue;
        const double R = delta0 * config.lambdas[c.level - 2];
        for (std::size_t i = 0; i < n; ++i) {
            const double chi = cutoff_value(grid->r[i] / R);
            if (chi != 0.0)
                P[i] += chi * std::pow(grid->r[i], config.kind.D) * c.phi.v[i];
        }
    }
    return P;
}

} // namespace

CorrectorProfile build_corrector(std::size_t ell, const BubbleConfig& config,
                                 const std::vector<CorrectorProfile>& priors, const KernelPair& kp,
                                 const GridPtr& grid, const ProfileParams& params) {
    config.validate(params.alpha0);
    if (ell < 2 || ell > config.J()) throw ParameterError("build_corrector: level out of range");
    if (priors.size() != ell - 2) throw ParameterError("build_corrector: wrong prior count");
    const EquationKind& kind = config.kind;
    const double D = kind.D;
    const double l = config.lambdas[ell - 1];
    const double lp = config.lambdas[ell - 2];
    const int io = config.iotas[ell - 1];
    const double redge = 2.0 * params.delta0 * lp;
    const std::size_t n = grid->size();

    std::vector<double> P_prev = assemble_v(config, priors, ell - 1, grid, params.delta0);
    RadialField chi = cutoff_chi(grid, params.delta0 * lp);
    RadialField omega = weight_omega(ell, config, grid, params.delta0);

    std::vector<double> Q_ell(n), rD(n), rmDp2(n);
    RadialField lamW(grid, FieldKind::UType);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = grid->r[i];
        Q_ell[i] = io * q_value(kind, r / l);
        rD[i] = std::pow(r, D);
        rmDp2[i] = std::pow(r, -(D + 2.0));
        lamW.v[i] = io * std::pow(l, -D) * lambda_w_value(kind, r / l);
    }
    const double lamW_pair = integrate(lamW, lamW, kind);  // = lambda^2 ||LambdaW||^2

    RadialField R0(grid, FieldKind::UType);
    for (std::size_t i = 0; i < n; ++i)
        R0.v[i] = rmDp2[i] * (nonlinearity_f(Q_ell[i] + P_prev[i], kind) -
                              nonlinearity_f(Q_ell[i], kind) - nonlinearity_f(P_prev[i], kind));

    CorrectorProfile out;
    out.level = ell;
    out.phi = RadialField(grid, FieldKind::UType);

    RadialField R1(grid, FieldKind::UType);
    RadialField rhs(grid, FieldKind::UType);
    const double unit = std::pow(lp, -D);  // norm scale of the corrector
    double prev_delta = -1.0;
    int stalls = 0;
    for (int it = 1; it <= params.max_iter; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            const double cphi = chi.v[i] * rD[i] * out.phi.v[i];
            R1.v[i] = (cphi == 0.0)
                          ? 0.0
                          : rmDp2[i] * (nonlinearity_f(Q_ell[i] + P_prev[i] + cphi, kind) -
                                        nonlinearity_f(Q_ell[i] + P_prev[i], kind) -
                                        f_prime(Q_ell[i], kind) * cphi);
            rhs.v[i] = chi.v[i] * R0.v[i] + R1.v[i];
        }
        const double num = integrate(rhs, lamW, kind);
        const double frkr = num * l * l / lamW_pair;  // <chi R0 + R1, LamW_{;l}> / ||LamW||^2
        for (std::size_t i = 0; i < n; ++i) rhs.v[i] -= frkr / (l * l) * lamW.v[i];

        RadialField phi_new = right_inverse(rhs, kind, kp, l, InverseMode::orthogonal);
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (grid->r[i] >= redge) {
                phi_new.v[i] = 0.0;
                continue;
            }
            if (omega.v[i] > 0.0)
                delta = std::max(delta, std::abs(phi_new.v[i] - out.phi.v[i]) / (omega.v[i] * unit));
        }
        out.phi = phi_new;
        out.rhs = rhs;
        out.frkr = frkr;
        out.iterations = it;
        out.converged_delta = delta;
        out.delta_history.push_back(delta);
        if (delta < params.tol) break;
        if (prev_delta > 0.0 && delta > 0.9 * prev_delta && delta > 10.0 * params.tol) {
            if (++stalls >= 3)
                throw ConvergenceError("build_corrector: fixed point is not contracting");
        } else {
            stalls = 0;
        }
        prev_delta = delta;
        if (it == params.max_iter)
            throw ConvergenceError("build_corrector: no convergence within iteration budget");
    }
    double bound = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (omega.v[i] > 0.0) bound = std::max(bound, std::abs(out.phi.v[i]) / (omega.v[i] * unit));
    out.weighted_bound = bound;
    return out;
}

ModifiedProfile assemble_profile(const BubbleConfig& config, const KernelPair& kp,
                                 const GridPtr& grid, const ProfileParams& params) {
    std::vector<CorrectorProfile> correctors;
    for (std::size_t ell = 2; ell <= config.J(); ++ell)
        correctors.push_back(build_corrector(ell, config, correctors, kp, grid, params));
    return assemble_profile(config, correctors, kp, grid, params);
}

ModifiedProfile assemble_profile(const BubbleConfig& config,
                                 const std::vector<CorrectorProfile>& correctors,
                                 const KernelPair& kp, const GridPtr& grid,
                                 const ProfileParams& params) {
    config.validate(params.alpha0);
    if (correctors.size() != config.J() - 1)
        throw ParameterError("assemble_profile: corrector levels incomplete");
    const EquationKind& kind = config.kind;
    const double D = kind.D;
    const std::size_t n = grid->size();

    ModifiedProfile mp;
    mp.config = config;
    mp.params = params;
    mp.kappa_used = kappa(kind);
    mp.correctors = correctors;
    mp.u = RadialField(grid, FieldKind::UType);
    mp.v = RadialField(grid, FieldKind::VType);
    mp.correction = RadialField(grid, FieldKind::UType);
    mp.kernel_term = RadialField(grid, FieldKind::UType);
    mp.lap_u = RadialField(grid, FieldKind::UType);
    mp.residual = RadialField(grid, FieldKind::UType);

    for (std::size_t j = 1; j <= config.J(); ++j) {
        const double l = config.lambdas[j - 1];
        const double io = config.iotas[j - 1];
        for (std::size_t i = 0; i < n; ++i) {
            const double r = grid->r[i];
            const double q = io * q_value(kind, r / l);
            mp.v.v[i] += q;
            mp.u.v[i] += io * std::pow(l, -D) * w_value(kind, r / l);
            // static bubbles: Lap W_{;j} = -r^{-(D+2)} f(Q_{;j}) exactly
            mp.lap_u.v[i] -= std::pow(r, -(D + 2.0)) * nonlinearity_f(q, kind);
        }
        if (j >= 2) {
            const double coef =
                -config.iota_bar(j) * mp.kappa_used * std::pow(config.mu(j), D) / (l * l);
            for (std::size_t i = 0; i < n; ++i)
                mp.kernel_term.v[i] +=
                    coef * io * std::pow(l, -D) * lambda_w_value(kind, grid->r[i] / l);
        }
    }

    for (const auto& c : correctors) {
        const double l = config.lambdas[c.level - 1];
        const double lp = config.lambdas[c.level - 2];
        RadialField chi = cutoff_chi(grid, params.delta0 * lp);
        RadialField chi_phi = pointwise_multiply(chi, c.phi);
        for (std::size_t i = 0; i < n; ++i) {
            mp.correction.v[i] += chi_phi.v[i];
            mp.u.v[i] += chi_phi.v[i];
            mp.v.v[i] += std::pow(grid->r[i], D) * chi_phi.v[i];
        }
        // chi * Lap phi from H_l phi = rhs, plus the stencil commutator
        RadialField lap_chi_phi = laplacian(chi_phi, kind);
        RadialField lap_phi = laplacian(c.phi, kind);
        for (std::size_t i = 0; i < n; ++i) {
            const double V = potential_value(kind, grid->r[i] / l) / (l * l);
            const double lap_exact = -V * c.phi.v[i] - c.rhs.v[i];
            const double comm = lap_chi_phi.v[i] - chi.v[i] * lap_phi.v[i];
            mp.lap_u.v[i] += chi.v[i] * lap_exact + comm;
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        const double r = grid->r[i];
        mp.residual.v[i] = mp.lap_u.v[i] +
                           std::pow(r, -(D + 2.0)) * nonlinearity_f(mp.v.v[i], kind) -
                           mp.kernel_term.v[i];
    }
    if (!mp.residual.all_finite()) throw NumericalError("assemble_profile: non-finite residual");
    return mp;
}

namespace {

RadialField bracket_weight(const GridPtr& grid, const EquationKind& kind, double lambda) {
    // |[<y>^{-2D}]_{underline;k}| = lambda^{-(D+2)} <r/lambda>^{-2D}
    RadialField w(grid, FieldKind::UType);
    for (std::size_t i = 0; i < grid->size(); ++i)
        w.v[i] = std::pow(lambda, -(kind.D + 2.0)) *
                 std::pow(japanese_bracket(grid->r[i] / lambda), -2.0 * kind.D);
    return w;
}

RadialField abs_field(const RadialField& f) {
    RadialField out = f;
    for (double& x : out.v) x = std::abs(x);
    return out;
}

} // namespace

ProfileDiagnostics profile_diagnostics(const ModifiedProfile& profile, std::size_t k,
                                       const KernelPair& kp) {
    const BubbleConfig& cfg = profile.config;
    const EquationKind& kind = cfg.kind;
    const GridPtr grid = profile.u.grid;
    const double D = kind.D;
    if (k < 1 || k > cfg.J()) throw ParameterError("profile_diagnostics: bad bubble index");

    ProfileDiagnostics d;
    d.sqrt_interaction = std::sqrt(cfg.interaction());
    d.psi_l2 = norms(profile.residual, kind).l2;
    d.main_term_l2 = norms(profile.kernel_term, kind).l2;
    if (cfg.J() >= 2) {
        d.psi_l2_over_sqrtD = d.psi_l2 / d.sqrt_interaction;
        d.main_term_ratio = d.main_term_l2 * d.main_term_l2 / cfg.interaction();
    }
    d.correction_h1 = norms(profile.correction, kind).h1dot;

    const double lk = cfg.lambdas[k - 1];
    RadialField wk = bracket_weight(grid, kind, lk);
    d.psi_weighted_l1 = integrate(abs_field(profile.residual), wk, kind);
    const double mu_next = (k < cfg.J()) ? cfg.mu(k + 1) : 0.0;
    const double mu_k = cfg.mu(k);
    d.psi_weighted_bound =
        (std::pow(mu_next, D) + std::pow(mu_k, D)) / (lk * lk) + cfg.interaction();

    // lambda_j d/dlambda_j of the corrector sum, by central differences in log lambda_j
    const double eps = 1e-3;
    for (std::size_t j = 1; j <= cfg.J(); ++j) {
        BubbleConfig up = cfg, dn = cfg;
        up.lambdas[j - 1] *= std::exp(eps);
        dn.lambdas[j - 1] *= std::exp(-eps);
        ModifiedProfile pu = assemble_profile(up, kp, grid, profile.params);
        ModifiedProfile pd = assemble_profile(dn, kp, grid, profile.params);
        RadialField diff(grid, FieldKind::UType);
        for (std::size_t i = 0; i < grid->size(); ++i)
            diff.v[i] = std::abs(pu.correction.v[i] - pd.correction.v[i]) / (2.0 * eps);
        d.dlambda_weighted_l1.push_back(integrate(diff, wk, kind));
        double bound;
        if (j == k) {
            bound = std::pow(mu_next, D) +
                    (mu_k > 0.0 ? std::pow(mu_k, D) * std::abs(std::log(mu_k)) : 0.0);
        } else if (j > k) {
            bound = std::pow(cfg.lambdas[j - 1] / lk, D);
        } else {
            bound = std::pow(lk / cfg.lambdas[j - 1], D - 2.0);
        }
        d.dlambda_weighted_bound.push_back(bound);
    }

    // smallest dyadic A0 with the annulus comparability (upper bound only for HMHF)
    for (double A0 = 2.0; A0 <= 1024.0; A0 *= 2.0) {
        bool ok = true;
        for (std::size_t j = 1; j <= cfg.J() && ok; ++j) {
            const double lj = cfg.lambdas[j - 1];
            const double lo = (j < cfg.J()) ? A0 * cfg.lambda_bar(j + 1) : grid->r_min * 1.001;
            const double hi = (j >= 2) ? cfg.lambda_bar(j) / A0 : grid->r_max * 0.999;
            for (std::size_t i = 0; i < grid->size(); ++i) {
                const double r = grid->r[i];
                if (r < lo || r > hi) continue;
                const double wj = std::pow(lj, -D) * std::pow(japanese_bracket(r / lj), -2.0 * D);
                double ratio;
                if (kind.is_hmhf())
                    ratio = std::pow(r, -D) * std::abs(std::sin(profile.v.v[i])) / wj;
                else
                    ratio = std::abs(profile.u.v[i]) / (std::pow(lj, -D) *
                                                        std::abs(w_value(kind, r / lj)));
                if (ratio > 3.0 || (!kind.is_hmhf() && ratio < 1.0 / 3.0)) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) {
            d.envelope_A0 = A0;
            break;
        }
    }
    return d;
}

} // namespace bubbletree
