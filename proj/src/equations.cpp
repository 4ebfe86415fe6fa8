#include "bubbletree/equations.hpp"

#include <algorithm>
#include <cmath>

#include "bubbletree/errors.hpp"
#include "bubbletree/rng.hpp"
#include "bubbletree/util.hpp"

namespace bubbletree {

EquationKind EquationKind::hmhf(int equivariance_index) {
    if (equivariance_index < 3) throw ParameterError("hmhf: equivariance index must be >= 3");
    EquationKind k;
    k.model = Model::HMHF;
    k.D = static_cast<double>(equivariance_index);
    k.N = 2.0 * k.D + 2.0;
    k.p = (k.N + 2.0) / (k.N - 2.0);
    return k;
}

EquationKind EquationKind::nlh(int dimension) {
    if (dimension < 7) throw ParameterError("nlh: dimension must be >= 7");
    EquationKind k;
    k.model = Model::NLH;
    k.N = static_cast<double>(dimension);
    k.D = 0.5 * (k.N - 2.0);
    k.p = (k.N + 2.0) / (k.N - 2.0);
    return k;
}

double EquationKind::pairing_constant() const { return unit_sphere_area(N); }

double nonlinearity_f(double v, const EquationKind& kind) {
    if (kind.is_hmhf()) {
        const double D2 = kind.D * kind.D;
        return 0.5 * D2 * (2.0 * v - std::sin(2.0 * v));
    }
    return std::pow(std::abs(v), kind.p - 1.0) * v;
}

double f_prime(double v, const EquationKind& kind) {
    if (kind.is_hmhf()) {
        const double D2 = kind.D * kind.D;
        return D2 * (1.0 - std::cos(2.0 * v));
    }
    return kind.p * std::pow(std::abs(v), kind.p - 1.0);
}

double w_value(const EquationKind& kind, double y) {
    if (kind.is_hmhf()) {
        // W = y^{-D} Q with removable singularity, W(0) = 2
        if (y == 0.0) return 2.0;
        const double yD = std::pow(y, kind.D);
        if (yD < 1e-8) return 2.0 * (1.0 - yD * yD / 3.0);  // arctan series
        return 2.0 * std::atan(yD) / yD;
    }
    const double z = y * y / (kind.N * (kind.N - 2.0));
    return std::pow(1.0 + z, -0.5 * (kind.N - 2.0));
}

double q_value(const EquationKind& kind, double y) {
    if (kind.is_hmhf()) return 2.0 * std::atan(std::pow(y, kind.D));
    return std::pow(y, kind.D) * w_value(kind, y);
}

double lambda_q_value(const EquationKind& kind, double y) {
    if (kind.is_hmhf()) {
        const double yD = std::pow(y, kind.D);
        return 2.0 * kind.D * yD / (1.0 + yD * yD);
    }
    return std::pow(y, kind.D) * (lambda_w_value(kind, y));
}

double lambda_w_value(const EquationKind& kind, double y) {
    if (kind.is_hmhf()) {
        const double yD = std::pow(y, kind.D);
        return 2.0 * kind.D / (1.0 + yD * yD);
    }
    const double N = kind.N;
    const double z = y * y / (N * (N - 2.0));
    return (0.5 * (N - 2.0) - y * y / (2.0 * N)) * std::pow(1.0 + z, -0.5 * N);
}

double potential_value(const EquationKind& kind, double y) {
    if (kind.is_hmhf()) {
        // 2 D^2 sin^2(Q)/y^2 with sin Q = 2 y^D/(1+y^{2D})
        const double D = kind.D;
        const double yD = std::pow(y, D);
        const double denom = 1.0 + yD * yD;
        return 8.0 * D * D * std::pow(y, 2.0 * D - 2.0) / (denom * denom);
    }
    // p W^{p-1}; uses D (p-1) = 2
    return kind.p * std::pow(w_value(kind, y), kind.p - 1.0);
}

GroundState make_ground_state(const EquationKind& kind, const GridPtr& grid) {
    GroundState gs{RadialField(grid, FieldKind::UType), RadialField(grid, FieldKind::VType),
                   RadialField(grid, FieldKind::UType)};
    for (std::size_t i = 0; i < grid->size(); ++i) {
        const double y = grid->r[i];
        gs.W.v[i] = w_value(kind, y);
        gs.Q.v[i] = q_value(kind, y);
        gs.LambdaW.v[i] = lambda_w_value(kind, y);
    }
    return gs;
}

RadialField rescale(const RadialField& phi, double lambda, const EquationKind& kind) {
    if (!(lambda > 0.0)) throw ParameterError("rescale: lambda must be positive");
    const RadialGrid& gr = *phi.grid;
    const double guard = std::sqrt(gr.r_max / gr.r_min);
    if (lambda > guard || lambda < 1.0 / guard)
        throw ScaleResolutionError("rescale: lambda outside the grid's guard band");
    const double shift = std::log(lambda);
    const std::size_t n = gr.size();
    RadialField out(phi.grid, phi.kind);
    const double s0 = gr.s.front();
    const double s1 = gr.s.back();
    // local decay exponents for continuation past the sampled range
    auto edge_exp = [&](double va, double vb) {
        if (va == 0.0 || vb == 0.0 || (va > 0) != (vb > 0)) return 0.0;
        double q = std::log(vb / va) / gr.h;
        if (!std::isfinite(q)) return 0.0;
        return std::clamp(q, -60.0, 60.0);
    };
    const double q_in = edge_exp(phi.v[0], phi.v[1]);
    const double q_out = edge_exp(phi.v[n - 2], phi.v[n - 1]);
    const double amp = phi.kind == FieldKind::UType ? std::pow(lambda, -kind.D) : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sp = gr.s[i] - shift;
        double val;
        if (sp < s0) {
            val = (phi.v[0] == 0.0) ? 0.0 : phi.v[0] * std::exp(q_in * (sp - s0));
        } else if (sp > s1) {
            val = (phi.v[n - 1] == 0.0) ? 0.0 : phi.v[n - 1] * std::exp(q_out * (sp - s1));
        } else {
            val = interp_uniform_cubic(phi.v, (sp - s0) / gr.h);
        }
        out.v[i] = amp * val;
    }
    return out;
}

double energy(const RadialField& state, const EquationKind& kind) {
    const RadialGrid& gr = *state.grid;
    const std::size_t n = gr.size();
    if (kind.is_hmhf()) {
        RadialField v = state;
        if (state.kind == FieldKind::UType) {
            v.kind = FieldKind::VType;
            for (std::size_t i = 0; i < n; ++i) v.v[i] = state.v[i] * std::pow(gr.r[i], kind.D);
        }
        RadialField dv = derivative_r(v);
        // 2 pi int (dv^2 + D^2 sin^2 v / r^2) / 2 * r dr, in s: * r^2 ds
        std::vector<double> F(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double sv = std::sin(v.v[i]);
            F[i] = 0.5 * (dv.v[i] * dv.v[i] + kind.D * kind.D * sv * sv / (gr.r[i] * gr.r[i])) *
                   gr.r[i] * gr.r[i];
        }
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += gr.wlog[i] * F[i];
        acc += decay_tail(F[0], F[1], gr.h);
        acc += decay_tail(F[n - 1], F[n - 2], gr.h);
        if (!std::isfinite(acc)) throw NumericalError("energy: non-finite integrand");
        return 2.0 * 3.14159265358979323846 * acc;
    }
    RadialField u = state;
    if (state.kind == FieldKind::VType) {
        u.kind = FieldKind::UType;
        for (std::size_t i = 0; i < n; ++i) u.v[i] = state.v[i] * std::pow(gr.r[i], -kind.D);
    }
    RadialField du = derivative_r(u);
    const double crit = 2.0 * kind.N / (kind.N - 2.0);
    std::vector<double> F(n);
    for (std::size_t i = 0; i < n; ++i) {
        F[i] = (0.5 * du.v[i] * du.v[i] -
                (kind.N - 2.0) / (2.0 * kind.N) * std::pow(std::abs(u.v[i]), crit)) *
               std::pow(gr.r[i], kind.N);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += gr.wlog[i] * F[i];
    acc += decay_tail(F[0], F[1], gr.h);
    acc += decay_tail(F[n - 1], F[n - 2], gr.h);
    if (!std::isfinite(acc)) throw NumericalError("energy: non-finite integrand");
    return unit_sphere_area(kind.N) * acc;
}

namespace {

double safe_ratio(double lhs, double env) {
    if (env == 0.0) return lhs == 0.0 ? 0.0 : 1e300;
    return lhs / env;
}

void track(IneqSample& rec, double lhs, double env, double a, double b) {
    const double r = safe_ratio(lhs, env);
    if (r > rec.max_ratio) {
        rec.max_ratio = r;
        rec.worst_a = a;
        rec.worst_b = b;
    }
    ++rec.samples;
}

} // namespace

std::vector<IneqSample> check_f_inequalities(const EquationKind& kind, std::size_t samples,
                                             std::uint64_t seed) {
    if (samples < 1) throw ParameterError("check_f_inequalities: need at least one sample");
    Rng rng(seed);
    auto f = [&](double v) { return nonlinearity_f(v, kind); };
    auto fp = [&](double v) { return f_prime(v, kind); };
    std::vector<IneqSample> recs;
    if (!kind.is_hmhf()) {
        const double p = kind.p;
        recs = {{"|f(a+b)-f(a)-f'(a)b| <= C |a|^{p-2} b^2", 0, 0, 0, 0},
                {"|f'(a+b)-f'(a)| <= C |a|^{p-2} |b|", 0, 0, 0, 0},
                {"|f'(a+b)-f'(a)| <= C |b|^{p-1}", 0, 0, 0, 0},
                {"|f(a+b)-f(a)-f'(a)b| <= C |b|^p", 0, 0, 0, 0},
                {"|f(a+b)-f(a)-f(b)| <= C |b|^{p-1} |a|", 0, 0, 0, 0},
                {"|f'(sum a_j) - sum f'(a_j)| <= C sum_{j!=l} |a_j a_l|^{(p-1)/2}", 0, 0, 0, 0}};
        for (std::size_t k = 0; k < samples; ++k) {
            const double a = rng.uniform(-3.0, 3.0);
            const double b = rng.uniform(-3.0, 3.0);
            const double taylor = std::abs(f(a + b) - f(a) - fp(a) * b);
            const double dfp = std::abs(fp(a + b) - fp(a));
            if (a != 0.0) {
                track(recs[0], taylor, std::pow(std::abs(a), p - 2.0) * b * b, a, b);
                track(recs[1], dfp, std::pow(std::abs(a), p - 2.0) * std::abs(b), a, b);
            }
            track(recs[2], dfp, std::pow(std::abs(b), p - 1.0), a, b);
            track(recs[3], taylor, std::pow(std::abs(b), p), a, b);
            track(recs[4], std::abs(f(a + b) - f(a) - f(b)),
                  std::pow(std::abs(b), p - 1.0) * std::abs(a), a, b);
            double aj[3] = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
            double sum = aj[0] + aj[1] + aj[2];
            double lhs = std::abs(fp(sum) - fp(aj[0]) - fp(aj[1]) - fp(aj[2]));
            double env = 0.0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    if (i != j) env += std::pow(std::abs(aj[i] * aj[j]), 0.5 * (p - 1.0));
            track(recs[5], lhs, env, aj[0], aj[1]);
        }
    } else {
        recs = {{"|f(a+b)-f(a)-f'(a)b| <= C b^2 (|b|<=1)", 0, 0, 0, 0},
                {"|f'(a+b)-f'(a)| <= C |sin b|", 0, 0, 0, 0},
                {"|f(a+b)-f(a)-f(b)| <= C |sin a sin b|", 0, 0, 0, 0},
                {"|f'(sum a_j) - sum f'(a_j)| <= C sum_{j!=l} |sin a_j sin a_l|", 0, 0, 0, 0}};
        for (std::size_t k = 0; k < samples; ++k) {
            const double a = rng.uniform(-8.0, 8.0);
            const double b = rng.uniform(-1.0, 1.0);
            track(recs[0], std::abs(f(a + b) - f(a) - fp(a) * b), b * b, a, b);
            const double b2 = rng.uniform(-8.0, 8.0);
            track(recs[1], std::abs(fp(a + b2) - fp(a)), std::abs(std::sin(b2)), a, b2);
            track(recs[2], std::abs(f(a + b2) - f(a) - f(b2)),
                  std::abs(std::sin(a) * std::sin(b2)), a, b2);
            double aj[3] = {rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0)};
            double lhs = std::abs(fp(aj[0] + aj[1] + aj[2]) - fp(aj[0]) - fp(aj[1]) - fp(aj[2]));
            double env = 0.0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    if (i != j) env += std::abs(std::sin(aj[i]) * std::sin(aj[j]));
            track(recs[3], lhs, env, aj[0], aj[1]);
        }
    }
    return recs;
}

} // namespace bubbletree
