#pragma once

#include <vector>

#include "bubbletree/equations.hpp"

namespace bubbletree {

// kappa from the printed one-dimensional integrals, by adaptive quadrature.
// Positive for NLH, negative for HMHF.
double kappa_explicit(const EquationKind& kind);

// kappa from the unified inner-product formula
//   kappa = -<y^{-2} f'(Q) W(0), Lambda W> / ||Lambda W||^2
// evaluated with the grid quadrature.
double kappa_unified(const EquationKind& kind, const GridPtr& grid);

// Cached kappa_explicit.
double kappa(const EquationKind& kind);

// Universal exponents and prefactors of the scale asymptotics
// lambda_j(t) ~ beta_j L^{1+2 alpha_j} t^{-alpha_j}.
struct RateTable {
    EquationKind kind;
    double kappa = 0.0;
    double L = 1.0;
    std::vector<double> alphas;  // alpha_1..alpha_J
    std::vector<double> betas;   // beta_1..beta_J
};

RateTable rates(const EquationKind& kind, std::size_t J, double L);

double lambda_ex(const RateTable& table, std::size_t j, double t);  // j is 1-based

} // namespace bubbletree
