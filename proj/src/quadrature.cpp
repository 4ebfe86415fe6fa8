#include "bubbletree/quadrature.hpp"

#include <cmath>

#include "bubbletree/errors.hpp"

namespace bubbletree {
namespace {

// 15-point Kronrod nodes/weights with embedded 7-point Gauss rule, on [-1,1].
const double kron_x[15] = {
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.0,
    0.207784955007898467600689403773245,  0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,  0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,  0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};
const double kron_w[15] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};
const double gauss_w[7] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
    0.381830050505118944950369775488975, 0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};

struct GkResult {
    double value;
    double error;
};

GkResult gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);
    double fk = 0.0, fg = 0.0;
    for (int i = 0; i < 15; ++i) {
        const double v = f(c + hw * kron_x[i]);
        fk += kron_w[i] * v;
        if (i % 2 == 1) fg += gauss_w[i / 2] * v;
    }
    GkResult r;
    r.value = fk * hw;
    r.error = std::abs((fk - fg) * hw);
    return r;
}

double adapt(const std::function<double(double)>& f, double a, double b, double tol, int depth,
             int max_depth) {
    GkResult r = gk15(f, a, b);
    if (r.error <= tol || depth >= max_depth) return r.value;
    const double c = 0.5 * (a + b);
    return adapt(f, a, c, 0.5 * tol, depth + 1, max_depth) +
           adapt(f, c, b, 0.5 * tol, depth + 1, max_depth);
}

} // namespace

double integrate_gk(const std::function<double(double)>& f, double a, double b, double rel_tol,
                    double abs_tol, int max_depth) {
    GkResult coarse = gk15(f, a, b);
    double tol = std::max(abs_tol, rel_tol * std::abs(coarse.value));
    if (tol <= 0.0) tol = 1e-300;
    double v = adapt(f, a, b, tol, 0, max_depth);
    // one refinement pass with the improved magnitude estimate
    double tol2 = std::max(abs_tol, rel_tol * std::abs(v));
    if (tol2 < tol) v = adapt(f, a, b, tol2, 0, max_depth);
    if (!std::isfinite(v)) throw NumericalError("quadrature did not converge");
    return v;
}

double integrate_half_line(const std::function<double(double)>& f, double rel_tol) {
    auto inner = [&f](double y) { return f(y); };
    auto outer = [&f](double u) {
        if (u <= 0.0) return 0.0;
        const double y = 1.0 / u;
        return f(y) * y * y;
    };
    return integrate_gk(inner, 0.0, 1.0, rel_tol) + integrate_gk(outer, 0.0, 1.0, rel_tol);
}

} // namespace bubbletree
