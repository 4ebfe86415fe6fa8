#include "bubbletree/util.hpp"

#include <algorithm>
#include <cmath>

#include "bubbletree/errors.hpp"

namespace bubbletree {

double interp_uniform_cubic(const std::vector<double>& v, double x) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(v.size());
    if (n == 0) throw ParameterError("interp: empty samples");
    if (n == 1) return v[0];
    std::ptrdiff_t j = static_cast<std::ptrdiff_t>(std::floor(x));
    // 4-point stencil j-1..j+2, clamped into range
    std::ptrdiff_t j0 = std::clamp<std::ptrdiff_t>(j - 1, 0, n - 4 >= 0 ? n - 4 : 0);
    if (n < 4) {
        // linear fallback for tiny tables
        j = std::clamp<std::ptrdiff_t>(j, 0, n - 2);
        double t = x - static_cast<double>(j);
        return v[j] * (1.0 - t) + v[j + 1] * t;
    }
    double t = x - static_cast<double>(j0);
    const double f0 = v[j0], f1 = v[j0 + 1], f2 = v[j0 + 2], f3 = v[j0 + 3];
    // Lagrange basis on nodes 0,1,2,3
    double c0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
    double c1 = t * (t - 2.0) * (t - 3.0) / 2.0;
    double c2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
    double c3 = t * (t - 1.0) * (t - 2.0) / 6.0;
    return c0 * f0 + c1 * f1 + c2 * f2 + c3 * f3;
}

std::vector<double> cumulative_integral(const std::vector<double>& F, double h) {
    const std::size_t n = F.size();
    std::vector<double> I(n, 0.0);
    if (n < 2) return I;
    if (n < 4) {
        for (std::size_t i = 1; i < n; ++i) I[i] = I[i - 1] + 0.5 * h * (F[i - 1] + F[i]);
        return I;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double seg;
        if (i == 0) {
            seg = h * (9.0 * F[0] + 19.0 * F[1] - 5.0 * F[2] + F[3]) / 24.0;
        } else if (i + 2 >= n) {
            seg = h * (9.0 * F[n - 1] + 19.0 * F[n - 2] - 5.0 * F[n - 3] + F[n - 4]) / 24.0;
        } else {
            seg = h * (-F[i - 1] + 13.0 * F[i] + 13.0 * F[i + 1] - F[i + 2]) / 24.0;
        }
        I[i + 1] = I[i] + seg;
    }
    return I;
}

std::vector<long double> cumulative_integral_ld(const std::vector<double>& F, double h) {
    const std::size_t n = F.size();
    std::vector<long double> I(n, 0.0L);
    if (n < 2) return I;
    const long double hl = h;
    if (n < 4) {
        for (std::size_t i = 1; i < n; ++i)
            I[i] = I[i - 1] + 0.5L * hl * (static_cast<long double>(F[i - 1]) + F[i]);
        return I;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        long double seg;
        if (i == 0) {
            seg = hl * (9.0L * F[0] + 19.0L * F[1] - 5.0L * F[2] + F[3]) / 24.0L;
        } else if (i + 2 >= n) {
            seg = hl * (9.0L * F[n - 1] + 19.0L * F[n - 2] - 5.0L * F[n - 3] + F[n - 4]) / 24.0L;
        } else {
            seg = hl * (-static_cast<long double>(F[i - 1]) + 13.0L * F[i] + 13.0L * F[i + 1] -
                        F[i + 2]) / 24.0L;
        }
        I[i + 1] = I[i] + seg;
    }
    return I;
}

double decay_tail(double F_last, double F_prev, double h) {
    if (F_last == 0.0 || F_prev == 0.0) return 0.0;
    if ((F_last > 0.0) != (F_prev > 0.0)) return 0.0;
    const double ratio = F_last / F_prev;
    if (!(ratio > 0.0) || ratio >= 1.0) return 0.0;  // not decaying
    const double q = -std::log(ratio) / h;
    if (q < 0.05 || q > 400.0) return 0.0;
    return F_last / q;
}

PowerFit fit_power_law(const std::vector<double>& times, const std::vector<double>& values,
                       double t_lo, double t_hi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < times.size() && i < values.size(); ++i) {
        if (times[i] < t_lo || times[i] > t_hi) continue;
        if (!(values[i] > 0.0)) continue;
        const double x = std::log(times[i]);
        const double y = std::log(values[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++m;
    }
    PowerFit fit;
    fit.points = m;
    if (m < 2) return fit;
    const double denom = m * sxx - sx * sx;
    if (denom == 0.0) return fit;
    const double slope = (m * sxy - sx * sy) / denom;
    const double inter = (sy - slope * sx) / m;
    fit.exponent = -slope;
    fit.prefactor = std::exp(inter);
    return fit;
}

double cutoff_value(double x) {
    // chi = 1 on (-inf,1], 0 on [1.9,inf); exp-based C^inf transition.
    if (x <= 1.0) return 1.0;
    if (x >= 1.9) return 0.0;
    const double tau = (x - 1.0) / 0.9;
    const double a = std::exp(-1.0 / tau);
    const double b = std::exp(-1.0 / (1.0 - tau));
    return b / (a + b);
}

double unit_sphere_area(double N) {
    return 2.0 * std::pow(3.14159265358979323846, 0.5 * N) / std::tgamma(0.5 * N);
}

} // namespace bubbletree
