#include "bubbletree/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "bubbletree/errors.hpp"

namespace bubbletree {

std::vector<double> solve_tridiagonal(const std::vector<double>& lower,
                                      const std::vector<double>& diag,
                                      const std::vector<double>& upper,
                                      const std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    std::vector<double> c(n), d(n), x(n);
    double piv = diag[0];
    if (std::abs(piv) < 1e-300) throw NumericalError("tridiagonal solve: zero pivot");
    c[0] = upper[0] / piv;
    d[0] = rhs[0] / piv;
    for (std::size_t i = 1; i < n; ++i) {
        piv = diag[i] - lower[i] * c[i - 1];
        if (std::abs(piv) < 1e-300) throw NumericalError("tridiagonal solve: zero pivot");
        c[i] = (i + 1 < n) ? upper[i] / piv : 0.0;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / piv;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

std::vector<double> jacobi_eigenvalues(SymMatrix a, int max_sweeps) {
    const std::size_t n = a.size();
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off < 1e-24 * static_cast<double>(n * n)) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = 0.5 * (a(q, q) - a(p, p)) / apq;
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

bool cholesky(SymMatrix& a) {
    const std::size_t n = a.size();
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
        if (!(d > 0.0)) return false;
        const double ljj = std::sqrt(d);
        a(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = a(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= a(i, k) * a(j, k);
            a(i, j) = v / ljj;
        }
    }
    return true;
}

std::vector<double> cholesky_solve_lower(const SymMatrix& l, const std::vector<double>& b) {
    const std::size_t n = l.size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = b[i];
        for (std::size_t k = 0; k < i; ++k) v -= l(i, k) * y[k];
        y[i] = v / l(i, i);
    }
    return y;
}

std::vector<double> cholesky_solve_upper(const SymMatrix& l, const std::vector<double>& b) {
    const std::size_t n = l.size();
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double v = b[i];
        for (std::size_t k = i + 1; k < n; ++k) v -= l(k, i) * x[k];
        x[i] = v / l(i, i);
    }
    return x;
}

} // namespace bubbletree
