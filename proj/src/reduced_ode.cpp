#include "bubbletree/reduced_ode.hpp"

#include <cmath>

#include "bubbletree/constants.hpp"
#include "bubbletree/errors.hpp"
#include "bubbletree/ode45.hpp"

namespace bubbletree {

std::vector<double> ode_rhs(const std::vector<double>& lambdas, const EquationKind& kind,
                            const std::vector<int>& iotas) {
    if (lambdas.empty() || lambdas.size() != iotas.size())
        throw ParameterError("ode_rhs: scales/signs mismatch");
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
        if (!(lambdas[j] > 0.0)) throw ParameterError("ode_rhs: scales must be positive");
        if (j > 0 && !(lambdas[j] < lambdas[j - 1]))
            throw ParameterError("ode_rhs: scales must be ordered");
    }
    const double kap = kappa(kind);
    std::vector<double> d(lambdas.size(), 0.0);
    for (std::size_t j = 1; j < lambdas.size(); ++j) {
        const double mu = lambdas[j] / lambdas[j - 1];
        const int ib = iotas[j] * iotas[j - 1];
        d[j] = kap * ib * std::pow(mu, kind.D) / lambdas[j];
    }
    return d;
}

std::vector<double> ScaleTrajectory::scale_series(std::size_t j) const {
    if (j < 1 || scales.empty() || j > scales.front().size())
        throw ParameterError("scale_series: bad bubble index");
    std::vector<double> out(scales.size());
    for (std::size_t i = 0; i < scales.size(); ++i) out[i] = scales[i][j - 1];
    return out;
}

ScaleTrajectory integrate_scales(const std::vector<double>& initial, const EquationKind& kind,
                                 const std::vector<int>& iotas, double t0, double t1,
                                 double rel_tol) {
    if (!(t0 > 0.0) || !(t1 > t0)) throw ParameterError("integrate_scales: bad time span");
    const std::size_t J = initial.size();
    if (J < 1 || iotas.size() != J) throw ParameterError("integrate_scales: bad configuration");
    const double kap = kappa(kind);

    ScaleTrajectory traj;
    traj.kind = kind;
    traj.iotas = iotas;

    // integrate x_j = log lambda_j; scales stay positive by construction
    std::vector<double> x(J);
    for (std::size_t j = 0; j < J; ++j) x[j] = std::log(initial[j]);
    auto rhs = [&](double, const std::vector<double>& y, std::vector<double>& dy) {
        dy[0] = 0.0;
        for (std::size_t j = 1; j < J; ++j) {
            const double mu = std::exp(y[j] - y[j - 1]);
            const int ib = iotas[j] * iotas[j - 1];
            dy[j] = kap * ib * std::pow(mu, kind.D) * std::exp(-2.0 * y[j]);
        }
    };

    const double record_ratio = std::pow(10.0, 1.0 / 64.0);
    double next_record = t0;
    auto record = [&](double t, const std::vector<double>& y) {
        traj.times.push_back(t);
        std::vector<double> row(J);
        for (std::size_t j = 0; j < J; ++j) row[j] = std::exp(y[j]);
        traj.scales.push_back(std::move(row));
    };
    record(t0, x);
    next_record = t0 * record_ratio;

    Ode45Options opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = 1e-14;
    opt.on_step = [&](double t, const std::vector<double>& y) {
        for (std::size_t j = 1; j < J; ++j) {
            if (y[j] - y[j - 1] > std::log(0.5)) {
                traj.collision = true;
                traj.t_collision = t;
                record(t, y);
                return false;
            }
        }
        if (t >= next_record) {
            record(t, y);
            while (next_record <= t) next_record *= record_ratio;
        }
        return true;
    };
    const double reached = ode45(rhs, t0, t1, x, opt);
    if (!traj.collision && (traj.times.empty() || traj.times.back() < reached)) record(reached, x);

    // power-law fit on the final decade actually covered
    const double t_end = traj.times.back();
    for (std::size_t j = 1; j <= J; ++j)
        traj.fitted.push_back(fit_power_law(traj.times, traj.scale_series(j), t_end / 10.0, t_end));
    return traj;
}

std::vector<std::vector<int>> classify_signs(const EquationKind& kind, std::size_t J) {
    if (J < 1) throw ParameterError("classify_signs: J must be >= 1");
    // admissibility: iota_bar_j * kappa < 0 for every j >= 2
    const bool alternating = kappa(kind) > 0.0;
    std::vector<std::vector<int>> out;
    for (int lead : {+1, -1}) {
        std::vector<int> pat(J);
        pat[0] = lead;
        for (std::size_t j = 1; j < J; ++j) pat[j] = alternating ? -pat[j - 1] : pat[j - 1];
        out.push_back(std::move(pat));
    }
    return out;
}

} // namespace bubbletree
