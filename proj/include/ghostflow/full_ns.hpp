/// @file full_ns.hpp
/// @brief Direct solver for the full steady compressible system at fixed eps,
/// used to cross-validate the constructed expansion, plus the expansion
/// assembly itself.
///
///   div(rho u) = 0
///   rho (u.grad)u + grad(rho theta) = eps [mu Lap u + zeta grad div u]
///   rho (u.grad)theta + rho theta div u = eps kappa Lap theta + eps Psi(grad u)
///
/// with theta = T_w, tangential slip u = eps h(T_w) dT_w/dx on the walls and
/// prescribed total mass. Newton with an analytic Jacobian; continuity is
/// discretized with conservative upwind fluxes and the mass constraint enters
/// through a single multiplier column on the continuity rows.
#pragma once

#include "ghostflow/remainder.hpp"

namespace ghostflow {

struct FullState {
    ScalarField rho, theta, P;
    VectorField u;
    double epsilon = 0.0;

    static FullState rest(const Grid& g, const Params& params) {
        FullState s{ScalarField(g, params.M), ScalarField(g, 1.0), ScalarField(g, params.M),
                    VectorField(g), params.epsilon};
        return s;
    }
};

struct FullResidual {
    double continuity;
    double momentum;
    double energy;
    double mass_defect;
};

struct NewtonReport {
    FullState state;
    int iterations = 0;
    std::vector<double> residual_history;  // max-norm after each step
};

// rho = rho0 + eps rho1 + eps^2 rho2 + eps^3 rho3 + eps^2 rho_R (and so on for
// u, theta); P = rho theta.
FullState assemble_expansion(const LimitingSolution& lim, const FirstOrderSolution& fo,
                             const RemainderState& rem, const Params& params);
// truncation without the remainder tier
FullState assemble_expansion(const LimitingSolution& lim, const FirstOrderSolution& fo,
                             const Params& params);

FullResidual residual_full(const FullState& state, const WallData& walls, const Params& params);

NewtonReport solve_full_newton(const WallData& walls, const Params& params,
                               const FullState& initial);

}  // namespace ghostflow
