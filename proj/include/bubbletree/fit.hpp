#pragma once

#include <vector>

#include "bubbletree/equations.hpp"
#include "bubbletree/grid.hpp"
#include "bubbletree/linearized.hpp"
#include "bubbletree/profiles.hpp"

namespace bubbletree {

// Orthogonality profile: c (1 - chi_{1/R0}) chi_{R0/2} LambdaW, supported in
// [1/R0, R0] and normalized so <Z, LambdaW> = 1 on the given grid.
struct ZProfile {
    EquationKind kind;
    double R0 = 16.0;
    double c = 0.0;
    RadialField Z;  // u-type samples at unit scale
};

ZProfile make_Z(const EquationKind& kind, const GridPtr& grid, double R0 = 16.0);

// Analytic re-evaluation at arbitrary radius (unit scale).
double z_profile_value(const ZProfile& z, double y);

struct FitParams {
    double tol_rel = 1e-8;    // orthogonality residual vs ||g||_{H1dot}
    int max_iter = 40;
    double damping = 0.5;     // applied on the first two iterates
    ProfileParams profile;    // corrector construction parameters
};

struct FitResult {
    std::vector<double> lambdas;
    RadialField g;
    std::vector<double> orth_residuals;  // |<g, Z_{lambda_k}>| per k
    int newton_iters = 0;
    bool converged = false;
    double interaction = 0.0;  // D quantity at the fitted scales
    double g_h1 = 0.0;
    double g_h2 = 0.0;
    double g_h1_local = 0.0;   // H1dot of <r/lambda_1>^{-1} g
};

// Newton solve of <u - U(iotas, lambdas), Z_{underline lambda_k}> = 0 using the
// near-identity Jacobian in log(lambda).
FitResult fit_scales(const RadialField& u, const EquationKind& kind, const std::vector<int>& iotas,
                     const std::vector<double>& guess, const ZProfile& Z, const KernelPair& kp,
                     const FitParams& params = {});

// Measured Jacobian lambda_j d F_k / d lambda_j at given scales (for tests).
std::vector<std::vector<double>> fit_jacobian(const RadialField& u, const EquationKind& kind,
                                              const std::vector<int>& iotas,
                                              const std::vector<double>& lambdas, const ZProfile& Z,
                                              const KernelPair& kp, const FitParams& params = {},
                                              double eps = 1e-5);

struct ModulationRecord {
    double t = 0.0;
    double lhs = 0.0;        // d log(lambda_k) / dt from the fit sequence
    double predicted = 0.0;  // iota_bar_k kappa mu_k^D / lambda_k^2
    double discrepancy = 0.0;
    double budget = 0.0;
    bool within = false;
};

struct ModulationReport {
    std::size_t k = 0;
    std::vector<ModulationRecord> records;
    double fraction_within = 0.0;
};

// Compares the finite-difference scale velocity with the leading modulation
// law against the error budget (mu_{k+1}^D + mu_k^D)/lambda_k^2 + D + ||g||_{H2dot}^2.
ModulationReport modulation_check(const std::vector<double>& times,
                                  const std::vector<FitResult>& fits, const EquationKind& kind,
                                  const std::vector<int>& iotas, std::size_t k);

} // namespace bubbletree
