#include "bubbletree/constants.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "bubbletree/errors.hpp"
#include "bubbletree/quadrature.hpp"

namespace bubbletree {

double kappa_explicit(const EquationKind& kind) {
    if (kind.is_hmhf()) {
        auto num = [&](double y) {
            const double lq = lambda_q_value(kind, y);
            return lq * lq * lq * std::pow(y, kind.D - 1.0);
        };
        auto den = [&](double y) {
            const double lq = lambda_q_value(kind, y);
            return lq * lq * y;
        };
        return -4.0 * integrate_half_line(num) / integrate_half_line(den);
    }
    auto num = [&](double y) {
        return std::pow(w_value(kind, y), kind.p) * std::pow(y, kind.N - 1.0);
    };
    auto den = [&](double y) {
        const double lw = lambda_w_value(kind, y);
        return lw * lw * std::pow(y, kind.N - 1.0);
    };
    // W(0) = 1 for NLH
    return 0.5 * (kind.N - 2.0) * integrate_half_line(num) / integrate_half_line(den);
}

double kappa_unified(const EquationKind& kind, const GridPtr& grid) {
    GroundState gs = make_ground_state(kind, grid);
    RadialField drive(grid, FieldKind::UType);
    const double w0 = w_value(kind, 0.0);
    for (std::size_t i = 0; i < grid->size(); ++i)
        drive.v[i] = potential_value(kind, grid->r[i]) * w0;
    const double numer = integrate(drive, gs.LambdaW, kind);
    const double denom = integrate(gs.LambdaW, gs.LambdaW, kind);
    return -numer / denom;
}

double kappa(const EquationKind& kind) {
    static std::map<std::pair<int, int>, double> cache;
    static std::mutex mu;
    const std::pair<int, int> key{kind.is_hmhf() ? 0 : 1, static_cast<int>(kind.N)};
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const double v = kappa_explicit(kind);
    cache[key] = v;
    return v;
}

RateTable rates(const EquationKind& kind, std::size_t J, double L) {
    if (J < 1) throw ParameterError("rates: J must be >= 1");
    if (!(L > 0.0)) throw ParameterError("rates: L must be positive");
    RateTable t;
    t.kind = kind;
    t.kappa = kappa(kind);
    t.L = L;
    t.alphas.resize(J);
    t.betas.resize(J);
    const double D = kind.D;
    const double ratio = D / (D - 2.0);
    t.alphas[0] = 0.0;
    t.betas[0] = 1.0;
    for (std::size_t j = 1; j < J; ++j) {
        t.alphas[j] = 0.5 * std::pow(ratio, static_cast<double>(j)) - 0.5;
        t.betas[j] = std::pow(t.alphas[j] / std::abs(t.kappa), 1.0 / (D - 2.0)) *
                     std::pow(t.betas[j - 1], ratio);
    }
    return t;
}

double lambda_ex(const RateTable& table, std::size_t j, double t) {
    if (j < 1 || j > table.alphas.size()) throw ParameterError("lambda_ex: bad bubble index");
    if (!(t > 0.0)) throw ParameterError("lambda_ex: time must be positive");
    const double a = table.alphas[j - 1];
    return std::pow(table.L, 1.0 + 2.0 * a) * table.betas[j - 1] * std::pow(t, -a);
}

} // namespace bubbletree
