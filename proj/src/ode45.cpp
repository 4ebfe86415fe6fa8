#include "bubbletree/ode45.hpp"

#include <algorithm>
#include <cmath>

#include "bubbletree/errors.hpp"

namespace bubbletree {

namespace {
// Cash-Karp tableau
const double b21 = 1.0 / 5.0;
const double b31 = 3.0 / 40.0, b32 = 9.0 / 40.0;
const double b41 = 3.0 / 10.0, b42 = -9.0 / 10.0, b43 = 6.0 / 5.0;
const double b51 = -11.0 / 54.0, b52 = 5.0 / 2.0, b53 = -70.0 / 27.0, b54 = 35.0 / 27.0;
const double b61 = 1631.0 / 55296.0, b62 = 175.0 / 512.0, b63 = 575.0 / 13824.0,
             b64 = 44275.0 / 110592.0, b65 = 253.0 / 4096.0;
const double c1 = 37.0 / 378.0, c3 = 250.0 / 621.0, c4 = 125.0 / 594.0, c6 = 512.0 / 1771.0;
const double d1 = c1 - 2825.0 / 27648.0, d3 = c3 - 18575.0 / 48384.0, d4 = c4 - 13525.0 / 55296.0,
             d5 = -277.0 / 14336.0, d6 = c6 - 1.0 / 4.0;
} // namespace

double ode45(const OdeRhs& rhs, double t0, double t1, std::vector<double>& y,
             const Ode45Options& opt) {
    const std::size_t n = y.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), yt(n), ynew(n), yerr(n);
    double t = t0;
    const double span = t1 - t0;
    double h = opt.h_init > 0.0 ? opt.h_init : 1e-4 * span;

    for (std::size_t step = 0; step < opt.max_steps && t < t1; ++step) {
        if (t + h > t1) h = t1 - t;
        rhs(t, y, k1);
        for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * b21 * k1[i];
        rhs(t + 0.2 * h, yt, k2);
        for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * (b31 * k1[i] + b32 * k2[i]);
        rhs(t + 0.3 * h, yt, k3);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + h * (b41 * k1[i] + b42 * k2[i] + b43 * k3[i]);
        rhs(t + 0.6 * h, yt, k4);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + h * (b51 * k1[i] + b52 * k2[i] + b53 * k3[i] + b54 * k4[i]);
        rhs(t + h, yt, k5);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + h * (b61 * k1[i] + b62 * k2[i] + b63 * k3[i] + b64 * k4[i] + b65 * k5[i]);
        rhs(t + 0.875 * h, yt, k6);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            ynew[i] = y[i] + h * (c1 * k1[i] + c3 * k3[i] + c4 * k4[i] + c6 * k6[i]);
            yerr[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i]);
            const double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err = std::max(err, std::abs(yerr[i]) / sc);
        }
        if (err <= 1.0) {
            t += h;
            y = ynew;
            if (opt.on_step && !opt.on_step(t, y)) return t;
            h *= std::min(5.0, 0.9 * std::pow(std::max(err, 1e-16), -0.2));
        } else {
            h *= std::max(0.1, 0.9 * std::pow(err, -0.25));
        }
        if (h < opt.h_min_factor * std::abs(span))
            throw NumericalError("ode45: step size underflow");
    }
    if (t < t1) throw NumericalError("ode45: max step count exceeded");
    return t;
}

} // namespace bubbletree
