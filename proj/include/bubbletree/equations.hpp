#pragma once

#include <string>
#include <vector>

#include "bubbletree/grid.hpp"

namespace bubbletree {

class Rng;

// Equation selector in the unified radial form
//   u_t = u_rr + (N-1)/r u_r + r^{-(D+2)} f(v),  v = r^D u,
// with D = (N-2)/2, N = 2D+2, p = (N+2)/(N-2).
struct EquationKind {
    enum class Model { HMHF, NLH };
    Model model = Model::NLH;
    double D = 0.0;
    double N = 0.0;
    double p = 0.0;

    static EquationKind hmhf(int equivariance_index);
    static EquationKind nlh(int dimension);

    bool is_hmhf() const { return model == Model::HMHF; }
    std::string name() const { return is_hmhf() ? "hmhf" : "nlh"; }
    // c_N, the area of the unit (N-1)-sphere, used by the <.,.> pairing.
    double pairing_constant() const;
};

double nonlinearity_f(double v, const EquationKind& kind);
double f_prime(double v, const EquationKind& kind);

// Closed forms of the ground state and related profiles at unit scale.
double w_value(const EquationKind& kind, double y);         // W(y), W(0) = 2 for HMHF
double q_value(const EquationKind& kind, double y);         // Q = y^D W
double lambda_w_value(const EquationKind& kind, double y);  // (y d/dy + D) W
double lambda_q_value(const EquationKind& kind, double y);  // y d/dy Q
double potential_value(const EquationKind& kind, double y); // y^{-2} f'(Q(y))

struct GroundState {
    RadialField W;        // u-type
    RadialField Q;        // v-type, Q = r^D W
    RadialField LambdaW;  // u-type
};

GroundState make_ground_state(const EquationKind& kind, const GridPtr& grid);

// phi_lambda. u-type: lambda^{-D} phi(r/lambda); v-type: phi(r/lambda).
// Resampled on the same grid by cubic interpolation in log r with power-law
// continuation past the ends.
RadialField rescale(const RadialField& phi, double lambda, const EquationKind& kind);

// Energy functional. HMHF takes the v-form (2*pi * int ((v_r)^2 + D^2 sin^2 v / r^2)/2 r dr),
// NLH the u-form; fields of the other kind are converted first.
double energy(const RadialField& state, const EquationKind& kind);

struct IneqSample {
    std::string label;
    double max_ratio = 0.0;     // worst LHS / envelope over the sample set
    double worst_a = 0.0;
    double worst_b = 0.0;
    std::size_t samples = 0;
};

// Randomized verification of the pointwise nonlinearity estimates; reports the
// largest observed constant per inequality.
std::vector<IneqSample> check_f_inequalities(const EquationKind& kind, std::size_t samples,
                                             std::uint64_t seed);

} // namespace bubbletree
