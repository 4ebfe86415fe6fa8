#include "bubbletree/grid.hpp"

#include <cmath>

#include "bubbletree/equations.hpp"
#include "bubbletree/errors.hpp"
#include "bubbletree/util.hpp"

namespace bubbletree {

namespace {

// Gregory end-corrected trapezoid weights (6th order); needs >= 10 nodes.
const double gregory6[5] = {95.0 / 288.0, 317.0 / 240.0, 23.0 / 30.0, 793.0 / 720.0,
                            157.0 / 160.0};

std::vector<double> composite_weights(std::size_t n, double h) {
    std::vector<double> w(n, h);
    if (n >= 10) {
        for (std::size_t k = 0; k < 5; ++k) {
            w[k] = gregory6[k] * h;
            w[n - 1 - k] = gregory6[k] * h;
        }
    } else {
        w[0] = 0.5 * h;
        w[n - 1] = 0.5 * h;
    }
    return w;
}

} // namespace

GridPtr make_log_grid(double r_min, double r_max, std::size_t M) {
    if (!(r_min > 0.0) || !(r_max > r_min)) throw ParameterError("make_log_grid: need 0 < r_min < r_max");
    if (M < 4) throw ParameterError("make_log_grid: need at least 4 nodes");
    if (r_max / r_min < 1e4 * (1.0 - 1e-12))
        throw ParameterError("make_log_grid: domain must span at least four decades");
    auto g = std::make_shared<RadialGrid>();
    g->r_min = r_min;
    g->r_max = r_max;
    const double s0 = std::log(r_min);
    const double s1 = std::log(r_max);
    g->h = (s1 - s0) / static_cast<double>(M - 1);
    g->s.resize(M);
    g->r.resize(M);
    for (std::size_t i = 0; i < M; ++i) {
        g->s[i] = s0 + g->h * static_cast<double>(i);
        g->r[i] = std::exp(g->s[i]);
    }
    g->s.front() = s0;
    g->s.back() = s1;
    g->r.front() = r_min;
    g->r.back() = r_max;
    g->wlog = composite_weights(M, g->h);
    return g;
}

double RadialGrid::integrate_window(const std::vector<double>& f, double weight_dim,
                                    std::size_t i1, std::size_t i2) const {
    if (i2 <= i1 || i2 >= size()) throw ParameterError("integrate_window: bad node range");
    const std::size_t n = i2 - i1 + 1;
    std::vector<double> w = composite_weights(n, h);
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        acc += w[k] * f[i1 + k] * std::pow(r[i1 + k], weight_dim);
    return acc;
}

bool RadialField::all_finite() const {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

void check_same_grid(const RadialField& a, const RadialField& b) {
    if (a.grid.get() != b.grid.get()) throw ParameterError("fields live on different grids");
}

void check_same_kind(const RadialField& a, const RadialField& b) {
    if (a.kind != b.kind) throw ParameterError("mixed u-type/v-type arithmetic rejected");
}

RadialField operator+(const RadialField& a, const RadialField& b) {
    check_same_grid(a, b);
    check_same_kind(a, b);
    RadialField out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.v[i] += b.v[i];
    return out;
}

RadialField operator-(const RadialField& a, const RadialField& b) {
    check_same_grid(a, b);
    check_same_kind(a, b);
    RadialField out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.v[i] -= b.v[i];
    return out;
}

RadialField operator*(double c, const RadialField& a) {
    RadialField out = a;
    for (double& x : out.v) x *= c;
    return out;
}

RadialField pointwise_multiply(const RadialField& a, const RadialField& b) {
    check_same_grid(a, b);
    RadialField out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out.v[i] *= b.v[i];
    return out;
}

namespace {

RadialField as_u_type(const RadialField& f, const EquationKind& kind) {
    if (f.kind == FieldKind::UType) return f;
    RadialField u = f;
    u.kind = FieldKind::UType;
    for (std::size_t i = 0; i < u.size(); ++i)
        u.v[i] = f.v[i] * std::pow(f.grid->r[i], -kind.D);
    return u;
}

} // namespace

double integrate(const RadialField& f, const RadialField& g, const EquationKind& kind) {
    check_same_grid(f, g);
    check_same_kind(f, g);
    const RadialField fu = as_u_type(f, kind);
    const RadialField gu = as_u_type(g, kind);
    const RadialGrid& gr = *fu.grid;
    const std::size_t n = gr.size();
    std::vector<double> F(n);
    for (std::size_t i = 0; i < n; ++i)
        F[i] = fu.v[i] * gu.v[i] * std::pow(gr.r[i], kind.N);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += gr.wlog[i] * F[i];
    // analytic power-law tails outside [r_min, r_max]
    acc += decay_tail(F[0], F[1], gr.h);
    acc += decay_tail(F[n - 1], F[n - 2], gr.h);
    return unit_sphere_area(kind.N) * acc;
}

RadialField laplacian(const RadialField& f, const EquationKind& kind) {
    if (!f.grid) throw ParameterError("laplacian: field has no grid");
    const RadialGrid& gr = *f.grid;
    const std::size_t n = gr.size();
    if (n < 4) throw ParameterError("laplacian: need at least 4 nodes");
    const double h = gr.h;
    const double drift = (f.kind == FieldKind::UType) ? kind.N - 2.0 : 0.0;
    RadialField out(f.grid, f.kind);
    auto emit = [&](std::size_t i, double fss, double fs) {
        out.v[i] = std::exp(-2.0 * gr.s[i]) * (fss + drift * fs);
    };
    {
        const double fs = (-3.0 * f.v[0] + 4.0 * f.v[1] - f.v[2]) / (2.0 * h);
        const double fss = (2.0 * f.v[0] - 5.0 * f.v[1] + 4.0 * f.v[2] - f.v[3]) / (h * h);
        emit(0, fss, fs);
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double fs = (f.v[i + 1] - f.v[i - 1]) / (2.0 * h);
        const double fss = (f.v[i + 1] - 2.0 * f.v[i] + f.v[i - 1]) / (h * h);
        emit(i, fss, fs);
    }
    {
        const double fs = (3.0 * f.v[n - 1] - 4.0 * f.v[n - 2] + f.v[n - 3]) / (2.0 * h);
        const double fss =
            (2.0 * f.v[n - 1] - 5.0 * f.v[n - 2] + 4.0 * f.v[n - 3] - f.v[n - 4]) / (h * h);
        emit(n - 1, fss, fs);
    }
    return out;
}

RadialField derivative_r(const RadialField& f) {
    if (!f.grid) throw ParameterError("derivative_r: field has no grid");
    const RadialGrid& gr = *f.grid;
    const std::size_t n = gr.size();
    if (n < 3) throw ParameterError("derivative_r: need at least 3 nodes");
    const double h = gr.h;
    RadialField out(f.grid, f.kind);
    out.v[0] = std::exp(-gr.s[0]) * (-3.0 * f.v[0] + 4.0 * f.v[1] - f.v[2]) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < n; ++i)
        out.v[i] = std::exp(-gr.s[i]) * (f.v[i + 1] - f.v[i - 1]) / (2.0 * h);
    out.v[n - 1] =
        std::exp(-gr.s[n - 1]) * (3.0 * f.v[n - 1] - 4.0 * f.v[n - 2] + f.v[n - 3]) / (2.0 * h);
    return out;
}

FieldNorms norms(const RadialField& f, const EquationKind& kind) {
    if (f.kind != FieldKind::UType) throw ParameterError("norms: expects a u-type field");
    FieldNorms out;
    out.l2 = std::sqrt(std::max(0.0, integrate(f, f, kind)));
    RadialField df = derivative_r(f);
    out.h1dot = std::sqrt(std::max(0.0, integrate(df, df, kind)));
    RadialField lf = laplacian(f, kind);
    out.h2dot = std::sqrt(std::max(0.0, integrate(lf, lf, kind)));
    return out;
}

} // namespace bubbletree
