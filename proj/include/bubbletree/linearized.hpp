#pragma once

#include <vector>

#include "bubbletree/equations.hpp"
#include "bubbletree/grid.hpp"

namespace bubbletree {

struct ZProfile;

// Fundamental pair of H = -Lap - y^{-2} f'(Q) at unit scale.
// Gamma1 = Lambda W is closed-form; Gamma2 is tabulated on a dense log mesh
// from the Wronskian integral formula, with y^{N-1} (G1 G2' - G2 G1') = 1.
// For NLH the formula breaks down where Lambda W vanishes (y* = sqrt(N(N-2)));
// there the table is produced by integrating H Gamma2 = 0 across a band around
// y* and rejoining the integral-formula solution beyond it.
class KernelPair {
  public:
    static KernelPair build(const EquationKind& kind, std::size_t table_size = 8192,
                            double y_min = 1e-7, double y_max = 1e7);

    const EquationKind& kind() const { return kind_; }
    double ystar() const { return ystar_; }

    double gamma1(double y) const;   // Lambda W(y), closed form
    double dgamma1(double y) const;
    double gamma2(double y) const;   // tabulated + power-law continuation
    double dgamma2(double y) const;
    double d2gamma1(double y) const; // via the ODE
    double d2gamma2(double y) const;

    // y^{N-1} (Gamma1 Gamma2' - Gamma2 Gamma1'); identically 1 in exact arithmetic.
    double wronskian(double y) const;

    // Gamma2 at many ascending points. Band points are produced by one smooth
    // ODE sweep instead of the piecewise table reconstruction, which keeps the
    // sampled values stencil-compatible (no interpolation knots).
    std::vector<double> sample_gamma2(const std::vector<double>& y_ascending) const;

    const std::vector<double>& table_y() const { return y_; }

  private:
    EquationKind kind_;
    std::vector<double> y_, s_, g2_, dg2_;
    std::vector<double> integral_;  // Wronskian integral at nodes (regions A and C)
    std::size_t i_band_lo_ = 0, i_band_hi_ = 0;  // band node range (NLH)
    double match_a_ = 0.0;  // Gamma2 = a Gamma1 + Gamma3 past the band
    double h_ = 0.0;
    double ystar_ = 0.0;
    double c_out_ = 0.0, b_out_ = 0.0;  // Gamma2 ~ c + b y^{-(N-2)} at infinity
    // single Chebyshev representation of Gamma2 across the band, in s; a
    // polynomial evaluation has no interpolation knots, so grid stencils of
    // sampled values see a genuinely smooth function
    std::vector<double> cheb_;
    double cheb_mid_ = 0.0, cheb_half_ = 1.0;

    double eval_band(double s, int deriv) const;
};

// H_lambda g = -Lap g - r^{-2} f'(Q(r/lambda)) g, u-type.
RadialField apply_H(const RadialField& g, const EquationKind& kind, double lambda = 1.0);

enum class InverseMode { general, orthogonal };

// Formal right inverse of H_lambda by variation of parameters:
//   u(r) = lambda^{-(N-2)} [G1(r/l) int_0^r G2 F r'^{N-1} dr'
//                           - G2(r/l) int_0^r G1 F r'^{N-1} dr'].
// In orthogonal mode (<F, LambdaW_lambda> = 0 required) the second cumulative
// integral is taken from r to infinity instead, which keeps the output decaying.
RadialField right_inverse(const RadialField& F, const EquationKind& kind, const KernelPair& kp,
                          double lambda, InverseMode mode);

struct CoercivityOptions {
    std::size_t stride = 12;  // subsampling of the working grid
    std::size_t trim = 8;     // Dirichlet-trimmed nodes at each end
    // Also project out the sampled kernel directions LambdaW_{lambda_k}.
    // Without this the measured minimum saturates at the coarse grid's
    // kernel-discretization floor instead of the coercivity constant.
    bool deflate_kernel = false;
};

// Measured multi-bubble coercivity constant: the minimum of
// ||H_{vec lambda} g||_{L^2} / ||g||_{H^2-dot} over the discretized subspace
// orthogonal to every Z_{lambda_k}. Advisory diagnostic.
double coercivity_diagnostic(const EquationKind& kind, const ZProfile& Z,
                             const std::vector<double>& lambdas, const GridPtr& grid,
                             const CoercivityOptions& opts = {});

} // namespace bubbletree
