/// @file first_order.hpp
/// @brief The O(eps) correction tier (rho1, u2, theta1, P3, P1) for a frozen
/// remainder velocity, plus the gauge densities rho2, rho3.
///
/// The system is linear in its data and solved by the same frozen-coefficient
/// sweep as the limiting tier, in the variable v2 = rho0 u2. rho2 and rho3 are
/// defined through the Boussinesq relations with gauge constants chosen so
/// each integrates to zero.
#pragma once

#include "ghostflow/limiting.hpp"

namespace ghostflow {

struct FirstOrderSolution {
    ScalarField rho1, theta1, P3;
    VectorField u2, v2;  // v2 = rho0 u2
    double P1 = 0.0;
    ScalarField rho2, rho3;
    double C1 = 0.0, C2 = 0.0;
    int iterations = 0;
    double final_change = 0.0;
};

// P1 = integral(rho0 theta1 / theta0) / integral(1/theta0).
double compute_P1(const ScalarField& rho0, const ScalarField& theta0, const ScalarField& theta1t);

// Gauge densities and constants:
//   C1 = integral((P2 - rho1 theta1)/theta0) / integral(1/theta0),
//   rho2 = (P2 - rho1 theta1 - C1)/theta0, then the same with (P3 - rho2 theta1)
//   for rho3, so integral(rho2) = integral(rho3) = 0.
struct GaugeDensities {
    ScalarField rho2, rho3;
    double C1, C2;
};
GaugeDensities compute_rho23(const ScalarField& P2, const ScalarField& P3, const ScalarField& rho1,
                             const ScalarField& theta1, const ScalarField& theta0);

FirstOrderSolution solve_first_order(const LimitingSolution& lim, const VectorField& u_R_tilde,
                                     const Params& params);

// Variant reusing caller-owned factorizations (the outer remainder iteration
// re-solves this system once per sweep).
FirstOrderSolution solve_first_order(const LimitingSolution& lim, const VectorField& u_R_tilde,
                                     const Params& params, const PoissonDirichlet& poisson,
                                     const StokesSolver& stokes);

struct FirstOrderResidual {
    double boussinesq;   // max | rho1 theta0 + rho0 theta1 - P1 |
    double continuity;   // || div(rho0 u2) + div(rho1 u1) ||_L2
    double momentum;     // momentum equation defect
    double energy;       // energy equation defect
    double gauge_rho1;   // | integral(rho1) |
    double gauge_P3;     // | integral(P3) |
};
FirstOrderResidual residual_first_order(const FirstOrderSolution& fo, const LimitingSolution& lim,
                                        const VectorField& u_R_tilde, const Params& params);

}  // namespace ghostflow
