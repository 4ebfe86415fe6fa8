// Kernel pair, right inverse, and coercivity probe for the linearized operator
// H = -Lap - y^{-2} f'(Q). Gamma2 comes from the Wronskian reduction
//   (Gamma2 / Gamma1)' = 1 / (y^{N-1} Gamma1^2),
// which is integrated with per-gap Gauss-Legendre quadrature wherever
// Gamma1 = Lambda W is bounded away from zero. For NLH, Lambda W changes sign
// at y* = sqrt(N(N-2)); the printed integrand has a double pole there, so the
// table switches to direct RK45 integration of H Gamma2 = 0 on
// [0.8 y*, 1.2 y*] and re-enters the integral representation afterwards by
// matching against the solution based at 2 y*.

#include "bubbletree/linearized.hpp"

#include <algorithm>
#include <cmath>

#include "bubbletree/errors.hpp"
#include "bubbletree/fit.hpp"
#include "bubbletree/linalg.hpp"
#include "bubbletree/ode45.hpp"
#include "bubbletree/util.hpp"

namespace bubbletree {

namespace {

const double gl5_x[5] = {-0.906179845938663992797626878299, -0.538469310105683091036314420700, 0.0,
                         0.538469310105683091036314420700, 0.906179845938663992797626878299};
const double gl5_w[5] = {0.236926885056189087514264040720, 0.478628670499366468041291514836,
                         0.568888888888888888888888888889, 0.478628670499366468041291514836,
                         0.236926885056189087514264040720};

// int_a^b of the Wronskian integrand 1/(y^{N-1} Gamma1^2), in the s = log y
// variable where it reads y^{-(N-2)} Gamma1^{-2}.
double wronskian_gap(const EquationKind& kind, double sa, double sb) {
    const double c = 0.5 * (sa + sb), hw = 0.5 * (sb - sa);
    double acc = 0.0;
    for (int i = 0; i < 5; ++i) {
        const double s = c + hw * gl5_x[i];
        const double y = std::exp(s);
        const double g1 = lambda_w_value(kind, y);
        acc += gl5_w[i] * std::pow(y, -(kind.N - 2.0)) / (g1 * g1);
    }
    return acc * hw;
}

} // namespace

KernelPair KernelPair::build(const EquationKind& kind, std::size_t table_size, double y_min,
                             double y_max) {
    KernelPair kp;
    kp.kind_ = kind;
    const std::size_t n = table_size;
    kp.s_.resize(n);
    kp.y_.resize(n);
    kp.g2_.assign(n, 0.0);
    kp.dg2_.assign(n, 0.0);
    kp.integral_.assign(n, 0.0);
    const double s0 = std::log(y_min), s1 = std::log(y_max);
    kp.h_ = (s1 - s0) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        kp.s_[i] = s0 + kp.h_ * static_cast<double>(i);
        kp.y_[i] = std::exp(kp.s_[i]);
    }

    const bool nlh = !kind.is_hmhf();
    kp.ystar_ = nlh ? std::sqrt(kind.N * (kind.N - 2.0)) : 0.0;
    const double band_lo = nlh ? 0.8 * kp.ystar_ : 2.0 * kp.y_.back();
    const double band_hi = nlh ? 1.2 * kp.ystar_ : 4.0 * kp.y_.back();

    // Region A: integral representation based at y = 1, valid while Gamma1
    // keeps its sign (all y for HMHF, y below the band for NLH).
    std::vector<double>& I = kp.integral_;
    const std::size_t i_base =
        static_cast<std::size_t>(std::clamp((0.0 - s0) / kp.h_, 0.0, static_cast<double>(n - 1)));
    I[i_base] = wronskian_gap(kind, 0.0, kp.s_[i_base]);
    std::size_t i_band_lo = n - 1;  // last node of region A
    for (std::size_t i = i_base + 1; i < n; ++i) {
        if (kp.y_[i] > band_lo) { i_band_lo = i - 1; break; }
        I[i] = I[i - 1] + wronskian_gap(kind, kp.s_[i - 1], kp.s_[i]);
    }
    for (std::size_t i = i_base; i-- > 0;)
        I[i] = I[i + 1] - wronskian_gap(kind, kp.s_[i], kp.s_[i + 1]);

    auto integrand = [&](double y) {
        const double g1 = lambda_w_value(kind, y);
        return std::pow(y, -(kind.N - 1.0)) / (g1 * g1);
    };
    for (std::size_t i = 0; i <= i_band_lo; ++i) {
        const double y = kp.y_[i];
        const double g1 = lambda_w_value(kind, y);
        kp.g2_[i] = g1 * I[i];
        kp.dg2_[i] = kp.dgamma1(y) * I[i] + g1 * integrand(y);
    }
    kp.i_band_lo_ = i_band_lo;
    kp.i_band_hi_ = i_band_lo;

    if (nlh && i_band_lo + 1 < n) {
        // Band: integrate H Gamma2 = 0 across the zero of Gamma1, in extended
        // precision with a fixed fine step so the node data and the Chebyshev
        // samples below are exact at double precision.
        auto rk4_to = [&](long double& y, long double& g, long double& dg, long double y_to) {
            auto f = [&](long double yy, long double a, long double b, long double& da,
                         long double& db) {
                da = b;
                db = -(static_cast<long double>(kind.N) - 1.0L) / yy * b -
                     static_cast<long double>(potential_value(kind, static_cast<double>(yy))) * a;
            };
            const int steps = std::max(8, static_cast<int>((y_to - y) / 2e-4L) + 1);
            const long double hh = (y_to - y) / steps;
            for (int m = 0; m < steps; ++m) {
                long double k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
                f(y, g, dg, k1a, k1b);
                f(y + 0.5L * hh, g + 0.5L * hh * k1a, dg + 0.5L * hh * k1b, k2a, k2b);
                f(y + 0.5L * hh, g + 0.5L * hh * k2a, dg + 0.5L * hh * k2b, k3a, k3b);
                f(y + hh, g + hh * k3a, dg + hh * k3b, k4a, k4b);
                g += hh / 6.0L * (k1a + 2.0L * k2a + 2.0L * k3a + k4a);
                dg += hh / 6.0L * (k1b + 2.0L * k2b + 2.0L * k3b + k4b);
                y += hh;
            }
            y = y_to;
        };
        long double yl = kp.y_[i_band_lo];
        long double gl = kp.g2_[i_band_lo];
        long double dgl = kp.dg2_[i_band_lo];
        std::size_t i = i_band_lo + 1;
        for (; i < n && kp.y_[i] <= band_hi; ++i) {
            rk4_to(yl, gl, dgl, kp.y_[i]);
            kp.g2_[i] = static_cast<double>(gl);
            kp.dg2_[i] = static_cast<double>(dgl);
        }
        const std::size_t i_join = i - 1;
        kp.i_band_hi_ = i_join;

        // Chebyshev fit of the band solution through Chebyshev-Lobatto points
        {
            const int K = 64;
            kp.cheb_mid_ = 0.5 * (kp.s_[i_band_lo] + kp.s_[i_join]);
            kp.cheb_half_ = 0.5 * (kp.s_[i_join] - kp.s_[i_band_lo]);
            std::vector<double> sk(K), fk(K);
            for (int k = 0; k < K; ++k)
                sk[k] = kp.cheb_mid_ -
                        kp.cheb_half_ * std::cos(3.14159265358979323846 * k / (K - 1.0));
            yl = kp.y_[i_band_lo];
            gl = kp.g2_[i_band_lo];
            dgl = kp.dg2_[i_band_lo];
            for (int k = 0; k < K; ++k) {
                const long double y_next = std::exp(static_cast<long double>(sk[k]));
                if (y_next > yl) rk4_to(yl, gl, dgl, y_next);
                fk[k] = static_cast<double>(gl);
            }
            kp.cheb_.assign(K, 0.0);
            for (int j = 0; j < K; ++j) {
                double acc = 0.0;
                for (int k = 0; k < K; ++k) {
                    // x_k = -cos(pi k/(K-1)) matches the ascending sweep order
                    const double tj = std::cos(
                        j * (3.14159265358979323846 - 3.14159265358979323846 * k / (K - 1.0)));
                    const double w = (k == 0 || k == K - 1) ? 0.5 : 1.0;
                    acc += w * fk[k] * tj;
                }
                kp.cheb_[j] = 2.0 / (K - 1.0) * acc;
            }
            kp.cheb_[0] *= 0.5;
            kp.cheb_[K - 1] *= 0.5;
            // pin the polynomial to the exact edge values and slopes; residual
            // O(eps) offsets at the representation switches would otherwise be
            // amplified by grid stencils like steps
            double p_lo = 0.0, p_hi = 0.0, dp_lo = 0.0, dp_hi = 0.0;
            for (int j = 0; j < K; ++j) {
                const double sgn = (j % 2 == 0) ? 1.0 : -1.0;
                p_hi += kp.cheb_[j];
                p_lo += sgn * kp.cheb_[j];
                dp_hi += static_cast<double>(j) * j * kp.cheb_[j];
                dp_lo += -sgn * static_cast<double>(j) * j * kp.cheb_[j];
            }
            const double e_lo = p_lo - kp.g2_[i_band_lo];
            const double e_hi = p_hi - kp.g2_[i_join];
            // target slope in x-units is half * y * dGamma2/dy at the edges
            const double d_lo =
                dp_lo - kp.cheb_half_ * kp.y_[i_band_lo] * kp.dg2_[i_band_lo];
            const double d_hi = dp_hi - kp.cheb_half_ * kp.y_[i_join] * kp.dg2_[i_join];
            const double a2 = (d_hi - d_lo) / 8.0;
            const double a3 = (0.5 * (d_hi + d_lo) - 0.5 * (e_hi - e_lo)) / 8.0;
            const double a1 = 0.5 * (e_hi - e_lo) - a3;
            const double a0 = 0.5 * (e_hi + e_lo) - a2;
            kp.cheb_[0] -= a0;
            kp.cheb_[1] -= a1;
            kp.cheb_[2] -= a2;
            kp.cheb_[3] -= a3;
        }

        // Region C: second integral-formula solution based at 2 y*. The
        // Wronskian normalization forces the coefficient of that solution to
        // be exactly 1; mismatch in the matched derivative is the drift.
        const double s_base = std::log(2.0 * kp.ystar_);
        std::vector<double>& I3 = kp.integral_;
        I3[i_join] = -wronskian_gap(kind, kp.s_[i_join], s_base);
        for (std::size_t j = i_join + 1; j < n; ++j)
            I3[j] = I3[j - 1] + wronskian_gap(kind, kp.s_[j - 1], kp.s_[j]);
        const double yj = kp.y_[i_join];
        const double g1j = lambda_w_value(kind, yj);
        kp.match_a_ = kp.g2_[i_join] / g1j - I3[i_join];
        const double drift =
            std::abs(std::pow(yj, kind.N - 1.0) *
                         (g1j * kp.dg2_[i_join] - kp.g2_[i_join] * kp.dgamma1(yj)) -
                     1.0);
        if (drift > 1e-4)
            throw NumericalError("kernel continuation failed: Wronskian drift " +
                                 std::to_string(drift));
        for (std::size_t j = i_join + 1; j < n; ++j) {
            const double y = kp.y_[j];
            const double g1 = lambda_w_value(kind, y);
            kp.g2_[j] = g1 * (kp.match_a_ + I3[j]);
            kp.dg2_[j] = kp.dgamma1(y) * (kp.match_a_ + I3[j]) + g1 * integrand(y);
        }
    }

    // Far-field model Gamma2 ~ c + b y^{-(N-2)} for continuation past the table.
    {
        const double ye = kp.y_[n - 1];
        kp.b_out_ = -kp.dg2_[n - 1] * std::pow(ye, kind.N - 1.0) / (kind.N - 2.0);
        kp.c_out_ = kp.g2_[n - 1] - kp.b_out_ * std::pow(ye, -(kind.N - 2.0));
    }
    return kp;
}

// Chebyshev evaluation (Clenshaw) of the band solution.
double KernelPair::eval_band(double s, int deriv) const {
    const double x = std::clamp((s - cheb_mid_) / cheb_half_, -1.0, 1.0);
    const std::vector<double>* coef = &cheb_;
    std::vector<double> dc;
    if (deriv == 1) {
        // derivative series: c'_{j-1} = c'_{j+1} + 2 j c_j
        const std::size_t K = cheb_.size();
        dc.assign(K, 0.0);
        double next = 0.0, next2 = 0.0;
        for (std::size_t j = K - 1; j >= 1; --j) {
            dc[j - 1] = next2 + 2.0 * static_cast<double>(j) * cheb_[j];
            next2 = next;
            next = dc[j - 1];
        }
        dc[0] *= 0.5;
        coef = &dc;
    }
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t j = coef->size(); j-- > 1;) {
        const double b0 = 2.0 * x * b1 - b2 + (*coef)[j];
        b2 = b1;
        b1 = b0;
    }
    const double val = x * b1 - b2 + (*coef)[0];
    if (deriv == 0) return val;
    return val / (cheb_half_ * std::exp(s));  // chain rule to d/dy
}

double KernelPair::gamma1(double y) const { return lambda_w_value(kind_, y); }

double KernelPair::dgamma1(double y) const {
    if (kind_.is_hmhf()) {
        const double D = kind_.D;
        const double yD = std::pow(y, D);
        const double den = 1.0 + yD * yD;
        return -4.0 * D * D * yD * yD / (y * den * den);
    }
    const double N = kind_.N;
    const double C = 1.0 / (N * (N - 2.0));
    const double z = C * y * y;
    const double A = 0.5 * (N - 2.0), B = 0.5 / N;
    // d/dy [(A - B y^2)(1+z)^{-N/2}]
    return std::pow(1.0 + z, -0.5 * N - 1.0) * y *
           (-2.0 * B * (1.0 + z) - N * C * (A - B * y * y));
}

double KernelPair::gamma2(double y) const {
    if (y <= y_.front())
        return g2_.front() * std::pow(y / y_.front(), -(kind_.N - 2.0));
    if (y >= y_.back()) return c_out_ + b_out_ * std::pow(y, -(kind_.N - 2.0));
    const double s = std::log(y);
    if (y > y_[i_band_lo_] && y < y_[i_band_hi_]) return eval_band(s, 0);
    // regions A and C: exact integral representation with an on-demand gap
    const std::size_t j = static_cast<std::size_t>((s - s_.front()) / h_);
    const std::size_t anchor = (y <= y_[i_band_lo_]) ? std::min(j, i_band_lo_)
                                                     : std::max(j, i_band_hi_);
    const double I = integral_[anchor] + wronskian_gap(kind_, s_[anchor], s) +
                     ((y >= y_[i_band_hi_] && i_band_hi_ > i_band_lo_) ? match_a_ : 0.0);
    return lambda_w_value(kind_, y) * I;
}

double KernelPair::dgamma2(double y) const {
    if (y <= y_.front())
        return -(kind_.N - 2.0) / y * g2_.front() * std::pow(y / y_.front(), -(kind_.N - 2.0));
    if (y >= y_.back()) return -(kind_.N - 2.0) * b_out_ * std::pow(y, -(kind_.N - 1.0));
    const double s = std::log(y);
    if (y > y_[i_band_lo_] && y < y_[i_band_hi_]) return eval_band(s, 1);
    const std::size_t j = static_cast<std::size_t>((s - s_.front()) / h_);
    const std::size_t anchor = (y <= y_[i_band_lo_]) ? std::min(j, i_band_lo_)
                                                     : std::max(j, i_band_hi_);
    const double I = integral_[anchor] + wronskian_gap(kind_, s_[anchor], s) +
                     ((y >= y_[i_band_hi_] && i_band_hi_ > i_band_lo_) ? match_a_ : 0.0);
    const double g1 = lambda_w_value(kind_, y);
    return dgamma1(y) * I + g1 * std::pow(y, -(kind_.N - 1.0)) / (g1 * g1);
}

double KernelPair::d2gamma1(double y) const {
    return -(kind_.N - 1.0) / y * dgamma1(y) - potential_value(kind_, y) * gamma1(y);
}

double KernelPair::d2gamma2(double y) const {
    return -(kind_.N - 1.0) / y * dgamma2(y) - potential_value(kind_, y) * gamma2(y);
}

double KernelPair::wronskian(double y) const {
    return std::pow(y, kind_.N - 1.0) * (gamma1(y) * dgamma2(y) - gamma2(y) * dgamma1(y));
}

std::vector<double> KernelPair::sample_gamma2(const std::vector<double>& y_ascending) const {
    // every region evaluates through a smooth representation (exact integral
    // formula outside the band, one Chebyshev polynomial inside), so bulk
    // sampling is a plain map
    std::vector<double> out(y_ascending.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = gamma2(y_ascending[i]);
    return out;
}

RadialField apply_H(const RadialField& g, const EquationKind& kind, double lambda) {
    if (g.kind != FieldKind::UType) throw ParameterError("apply_H: expects a u-type field");
    RadialField lap = laplacian(g, kind);
    RadialField out(g.grid, FieldKind::UType);
    const double inv_l2 = 1.0 / (lambda * lambda);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double V = potential_value(kind, g.grid->r[i] / lambda) * inv_l2;
        out.v[i] = -lap.v[i] - V * g.v[i];
    }
    return out;
}

RadialField right_inverse(const RadialField& F, const EquationKind& kind, const KernelPair& kp,
                          double lambda, InverseMode mode) {
    if (F.kind != FieldKind::UType) throw ParameterError("right_inverse: expects a u-type field");
    const RadialGrid& gr = *F.grid;
    const std::size_t n = gr.size();

    // The cumulants and the final combination run in extended precision: near
    // the zero of Lambda W both kernel functions are small while the cumulative
    // paths are large, so double-precision path roundoff would dominate the
    // output there and grid stencils would amplify it by 1/h^2.
    std::vector<double> ys(n), G1(n), I1(n), I2(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = gr.r[i] / lambda;
    std::vector<double> G2 = kp.sample_gamma2(ys);
    for (std::size_t i = 0; i < n; ++i) {
        G1[i] = kp.gamma1(ys[i]);
        const double meas = F.v[i] * std::pow(gr.r[i], kind.N);
        I1[i] = G1[i] * meas;
        I2[i] = G2[i] * meas;
    }
    std::vector<long double> C1 = cumulative_integral_ld(I1, gr.h);
    std::vector<long double> C2 = cumulative_integral_ld(I2, gr.h);
    // r -> 0 contributions (integrands vanish like powers of r)
    const double in1 = decay_tail(I1[0], I1[1], gr.h);
    const double in2 = decay_tail(I2[0], I2[1], gr.h);
    for (std::size_t i = 0; i < n; ++i) {
        C1[i] += in1;
        C2[i] += in2;
    }

    RadialField out(F.grid, FieldKind::UType);
    const double scale = std::pow(lambda, -(kind.N - 2.0));
    if (mode == InverseMode::orthogonal) {
        RadialField lw(F.grid, FieldKind::UType);
        for (std::size_t i = 0; i < n; ++i)
            lw.v[i] = std::pow(lambda, -kind.D) * lambda_w_value(kind, gr.r[i] / lambda);
        const double ip = integrate(F, lw, kind);
        const double scale_ip = norms(F, kind).l2 * norms(lw, kind).l2;
        if (std::abs(ip) > 1e-8 * std::max(scale_ip, 1e-300))
            throw ParameterError("right_inverse: orthogonal mode needs <F, LambdaW_lambda> = 0");
        // Remove the residual kernel mass as seen by the cumulative rule
        // itself; otherwise it is amplified by Gamma2 ~ y^{-(N-2)} near the
        // origin. This shifts the source by a multiple ~1e-9 of LambdaW.
        std::vector<double> L1(n), L2(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double meas = lw.v[i] * std::pow(gr.r[i], kind.N);
            L1[i] = G1[i] * meas;
            L2[i] = G2[i] * meas;
        }
        std::vector<long double> D1 = cumulative_integral_ld(L1, gr.h);
        std::vector<long double> D2 = cumulative_integral_ld(L2, gr.h);
        const double d1_in = decay_tail(L1[0], L1[1], gr.h);
        const double d2_in = decay_tail(L2[0], L2[1], gr.h);
        const long double C1_total = C1[n - 1] + decay_tail(I1[n - 1], I1[n - 2], gr.h);
        const long double D1_total = D1[n - 1] + d1_in + decay_tail(L1[n - 1], L1[n - 2], gr.h);
        const long double c = C1_total / D1_total;
        for (std::size_t i = 0; i < n; ++i) {
            C1[i] -= c * (D1[i] + d1_in);
            C2[i] -= c * (D2[i] + d2_in);
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        out.v[i] = static_cast<double>(scale * (G1[i] * C2[i] - G2[i] * C1[i]));
    if (!out.all_finite()) throw NumericalError("right_inverse: non-finite output");
    return out;
}

double coercivity_diagnostic(const EquationKind& kind, const ZProfile& Z,
                             const std::vector<double>& lambdas, const GridPtr& grid,
                             const CoercivityOptions& opts) {
    const RadialGrid& gr = *grid;
    std::vector<std::size_t> idx;
    for (std::size_t i = opts.trim; i + opts.trim < gr.size(); i += opts.stride) idx.push_back(i);
    const std::size_t n = idx.size();
    if (n < 24) throw ParameterError("coercivity_diagnostic: reduced grid too small");
    const double H = gr.h * static_cast<double>(opts.stride);

    // finite-difference H and Laplacian on the reduced (still log-uniform) grid
    std::vector<double> lo(n, 0.0), di(n, 0.0), up(n, 0.0), vsum(n, 0.0), w(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double r = gr.r[idx[k]];
        const double e = std::exp(-2.0 * gr.s[idx[k]]);
        di[k] = -2.0 * e / (H * H);
        lo[k] = e / (H * H) - e * (kind.N - 2.0) / (2.0 * H);
        up[k] = e / (H * H) + e * (kind.N - 2.0) / (2.0 * H);
        for (double l : lambdas) vsum[k] += potential_value(kind, r / l) / (l * l);
        w[k] = kind.pairing_constant() * H * std::pow(r, kind.N);
    }

    // operator row k of -Lap (- V) touches columns k-1, k, k+1
    auto opval = [&](std::size_t k, std::size_t m, bool with_potential) -> double {
        if (m + 1 == k) return -lo[k];
        if (m == k) return -di[k] - (with_potential ? vsum[k] : 0.0);
        if (m == k + 1) return -up[k];
        return 0.0;
    };
    auto assemble = [&](bool with_potential) {
        SymMatrix mat(n);  // Op^T W Op, pentadiagonal
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < std::min(i + 3, n); ++j) {
                double acc = 0.0;
                const std::size_t k0 = (j > 0 ? j - 1 : 0);
                const std::size_t k1 = std::min(i + 1, n - 1);
                for (std::size_t k = k0; k <= k1; ++k)
                    acc += opval(k, i, with_potential) * w[k] * opval(k, j, with_potential);
                mat(i, j) = acc;
                mat(j, i) = acc;
            }
        return mat;
    };
    SymMatrix A = assemble(true);    // ||H g||^2
    SymMatrix B = assemble(false);   // ||Lap g||^2

    // constraints <g, Z_{lambda_k}> = 0
    std::vector<std::vector<double>> cons;
    for (double l : lambdas) {
        std::vector<double> c(n);
        for (std::size_t k = 0; k < n; ++k)
            c[k] = w[k] * std::pow(l, -kind.D) * z_profile_value(Z, gr.r[idx[k]] / l);
        cons.push_back(std::move(c));
    }
    if (opts.deflate_kernel) {
        for (double l : lambdas) {
            std::vector<double> c(n);
            for (std::size_t k = 0; k < n; ++k)
                c[k] = w[k] * std::pow(l, -kind.D) * lambda_w_value(kind, gr.r[idx[k]] / l);
            cons.push_back(std::move(c));
        }
    }
    // orthonormalize the constraints, then build a basis of their complement
    std::vector<std::vector<double>> basis;
    auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
        return acc;
    };
    for (auto& c : cons) {
        for (auto& q : basis) {
            const double d = dot(c, q);
            for (std::size_t i = 0; i < n; ++i) c[i] -= d * q[i];
        }
        const double nn = std::sqrt(dot(c, c));
        if (nn > 1e-14) {
            for (double& x : c) x /= nn;
            basis.push_back(c);
        }
    }
    const std::size_t n_cons = basis.size();
    std::vector<std::vector<double>> comp;
    for (std::size_t e = 0; e < n && comp.size() < n - n_cons; ++e) {
        std::vector<double> v(n, 0.0);
        v[e] = 1.0;
        for (auto& q : basis) {
            const double d = dot(v, q);
            for (std::size_t i = 0; i < n; ++i) v[i] -= d * q[i];
        }
        for (auto& q : comp) {
            const double d = dot(v, q);
            for (std::size_t i = 0; i < n; ++i) v[i] -= d * q[i];
        }
        const double nn = std::sqrt(dot(v, v));
        if (nn > 1e-8) {
            for (double& x : v) x /= nn;
            comp.push_back(v);
        }
    }
    const std::size_t m = comp.size();

    auto reduce = [&](const SymMatrix& M) {
        SymMatrix R(m);
        std::vector<double> t(n);
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < n; ++j) acc += M(i, j) * comp[a][j];
                t[i] = acc;
            }
            for (std::size_t b = a; b < m; ++b) {
                double acc = 0.0;
                for (std::size_t i = 0; i < n; ++i) acc += comp[b][i] * t[i];
                R(a, b) = acc;
                R(b, a) = acc;
            }
        }
        return R;
    };
    SymMatrix Ar = reduce(A);
    SymMatrix Br = reduce(B);
    if (!cholesky(Br))
        throw NumericalError("coercivity_diagnostic: degenerate H^2-dot Gram matrix");
    // S = L^{-1} Ar L^{-T}
    SymMatrix S(m);
    {
        std::vector<double> col(m), y(m);
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t i = 0; i < m; ++i) col[i] = Ar(i, j);
            y = cholesky_solve_lower(Br, col);
            for (std::size_t i = 0; i < m; ++i) S(i, j) = y[i];
        }
        // right-multiply by L^{-T}: solve row-wise
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) col[j] = S(i, j);
            y = cholesky_solve_lower(Br, col);
            for (std::size_t j = 0; j < m; ++j) S(i, j) = y[j];
        }
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j) {
                const double sym = 0.5 * (S(i, j) + S(j, i));
                S(i, j) = sym;
                S(j, i) = sym;
            }
    }
    std::vector<double> ev = jacobi_eigenvalues(std::move(S));
    return std::sqrt(std::max(ev.front(), 0.0));
}

} // namespace bubbletree
