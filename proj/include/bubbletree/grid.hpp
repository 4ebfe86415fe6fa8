#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace bubbletree {

struct EquationKind;

// Log-uniform radial mesh. Nodes r_i = exp(s_i), s uniform with step h.
// Quadrature weights are composite coefficients in the log variable; the
// measure factor r^N for int f r^{N-1} dr = int f r^N ds is applied at
// integration time (N comes from the equation kind), and analytic power-law
// tail corrections beyond [r_min, r_max] are added per integrand.
struct RadialGrid {
    std::vector<double> r;
    std::vector<double> s;
    std::vector<double> wlog;  // includes the factor h
    double h = 0.0;
    double r_min = 0.0;
    double r_max = 0.0;

    std::size_t size() const { return r.size(); }

    // int_{r[i1]}^{r[i2]} f r^{weight_dim-1} dr over a node-aligned window,
    // without the angular constant and without tails.
    double integrate_window(const std::vector<double>& f, double weight_dim, std::size_t i1,
                            std::size_t i2) const;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

GridPtr make_log_grid(double r_min, double r_max, std::size_t M);

enum class FieldKind { UType, VType };

// Sampled radial profile. u-type fields scale as lambda^{-D} phi(r/lambda)
// and live on R^N; v-type fields scale as phi(r/lambda) and live on R^2.
struct RadialField {
    GridPtr grid;
    FieldKind kind = FieldKind::UType;
    std::vector<double> v;

    RadialField() = default;
    RadialField(GridPtr g, FieldKind k) : grid(std::move(g)), kind(k), v(grid->size(), 0.0) {}
    RadialField(GridPtr g, FieldKind k, std::vector<double> values)
        : grid(std::move(g)), kind(k), v(std::move(values)) {}

    std::size_t size() const { return v.size(); }
    bool all_finite() const;
};

void check_same_grid(const RadialField& a, const RadialField& b);
void check_same_kind(const RadialField& a, const RadialField& b);

RadialField operator+(const RadialField& a, const RadialField& b);
RadialField operator-(const RadialField& a, const RadialField& b);
RadialField operator*(double c, const RadialField& a);
RadialField pointwise_multiply(const RadialField& a, const RadialField& b);

// <f,g> = c_N int f g r^{N-1} dr with tail corrections; v-type inputs are
// converted through u = r^{-D} v first.
double integrate(const RadialField& f, const RadialField& g, const EquationKind& kind);

// Radial Laplacian. u-type: f_rr + (N-1)/r f_r; v-type: f_rr + (1/r) f_r
// (any angular potential is the caller's business). Second order in s = log r,
// one-sided at the ends.
RadialField laplacian(const RadialField& f, const EquationKind& kind);

RadialField derivative_r(const RadialField& f);

struct FieldNorms {
    double l2 = 0.0;
    double h1dot = 0.0;
    double h2dot = 0.0;
};

FieldNorms norms(const RadialField& f, const EquationKind& kind);

} // namespace bubbletree
