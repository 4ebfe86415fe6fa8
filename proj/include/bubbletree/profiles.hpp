#pragma once

#include <vector>

#include "bubbletree/equations.hpp"
#include "bubbletree/grid.hpp"
#include "bubbletree/linearized.hpp"

namespace bubbletree {

// Signs and scales of a bubble tree, lambda_1 > ... > lambda_J > 0.
struct BubbleConfig {
    EquationKind kind;
    std::vector<int> iotas;       // +1 / -1
    std::vector<double> lambdas;  // strictly decreasing

    std::size_t J() const { return lambdas.size(); }
    double mu(std::size_t j) const;          // lambda_j / lambda_{j-1}, mu_1 = 0 (1-based)
    double lambda_bar(std::size_t j) const;  // sqrt(lambda_j lambda_{j-1})
    int iota_bar(std::size_t j) const;       // iota_j iota_{j-1}
    double max_mu() const;
    // D quantity: sum_{j>=2} mu_j^{2D} / lambda_j^2
    double interaction() const;

    void validate(double alpha0) const;
};

// chi_R sampled on the grid: 1 for r <= R, 0 for r >= 1.9 R.
RadialField cutoff_chi(const GridPtr& grid, double R);

// Three-piece comparison weight for the level-ell corrector, supported on
// (0, 2 delta0 lambda_{ell-1}].
RadialField weight_omega(std::size_t ell, const BubbleConfig& config, const GridPtr& grid,
                         double delta0);

struct ProfileParams {
    // The corrector cutoff delta0 lambda_{ell-1} has to sit well above the
    // next bubble, so delta0 must dominate the admissible scale ratio alpha0.
    double delta0 = 0.45;
    double alpha0 = 0.15;
    double tol = 1e-10;   // fixed-point stop, in units of lambda_{ell-1}^{-D}
    int max_iter = 80;
};

struct CorrectorProfile {
    std::size_t level = 0;
    RadialField phi;        // u-type, supported in r < 2 delta0 lambda_{ell-1}
    RadialField rhs;        // what H_{lambda_ell} phi equals (by construction)
    double frkr = 0.0;      // Lagrange coefficient of Lambda W_{;ell}
    int iterations = 0;
    double converged_delta = 0.0;
    std::vector<double> delta_history;
    double weighted_bound = 0.0;  // sup |phi| lambda_{ell-1}^D / omega_ell
};

// Fixed-point solve for the level-ell corrector given the levels below it.
CorrectorProfile build_corrector(std::size_t ell, const BubbleConfig& config,
                                 const std::vector<CorrectorProfile>& priors,
                                 const KernelPair& kp, const GridPtr& grid,
                                 const ProfileParams& params);

struct ModifiedProfile {
    BubbleConfig config;
    ProfileParams params;
    double kappa_used = 0.0;
    std::vector<CorrectorProfile> correctors;  // levels 2..J
    RadialField u;            // U = sum W_{;j} + correction
    RadialField v;            // P = r^D U
    RadialField correction;   // U - sum W_{;j}
    RadialField kernel_term;  // -sum_{j>=2} iota_bar_j kappa mu_j^D / lambda_j^2 LambdaW_{;j}
    RadialField lap_u;        // Laplacian of U, assembled semi-analytically
    RadialField residual;     // lap_u + r^{-(D+2)} f(P) - kernel_term
};

ModifiedProfile assemble_profile(const BubbleConfig& config, const KernelPair& kp,
                                 const GridPtr& grid, const ProfileParams& params = {});

// Variant reusing prebuilt correctors (levels 2..J in order).
ModifiedProfile assemble_profile(const BubbleConfig& config,
                                 const std::vector<CorrectorProfile>& correctors,
                                 const KernelPair& kp, const GridPtr& grid,
                                 const ProfileParams& params = {});

struct ProfileDiagnostics {
    double sqrt_interaction = 0.0;   // sqrt(D quantity)
    double psi_l2 = 0.0;
    double psi_l2_over_sqrtD = 0.0;
    double main_term_l2 = 0.0;
    double main_term_ratio = 0.0;    // ||main||^2 / D quantity
    double correction_h1 = 0.0;
    // weighted-L1 pairs for the chosen k: measured value and bound envelope
    double psi_weighted_l1 = 0.0;
    double psi_weighted_bound = 0.0;
    std::vector<double> dlambda_weighted_l1;    // per j = 1..J
    std::vector<double> dlambda_weighted_bound; // envelope per j
    double envelope_A0 = 0.0;  // smallest dyadic A0 with |U| comparable to |W_j| in annuli
};

ProfileDiagnostics profile_diagnostics(const ModifiedProfile& profile, std::size_t k,
                                       const KernelPair& kp);

} // namespace bubbletree
