/// @file limiting.hpp
/// @brief The leading-order tier: thermally driven flow where an O(eps)
/// velocity still forces O(1) density and temperature.
///
/// Unknowns (rho0, u1, theta0, P2, P0) solve
///     grad(rho0 theta0) = 0,   div(rho0 u1) = 0,
///     rho0 (u1.grad)u1 + grad P2 = mu Lap u1 + zeta grad div u1,
///     kappa Lap theta0 = 2 rho0 theta0 div u1,
/// with theta0 = T_w and tangential slip u1 = h(T_w) dT_w/dx on the walls,
/// integral(rho0) = M. Solved as a fixed point in the mass-velocity variable
/// v1 = rho0 u1: each sweep freezes the coefficients, solves one Stokes
/// problem for (v1, P2) and one Dirichlet Poisson problem for theta0.
#pragma once


#include "ghostflow/elliptic.hpp"

namespace ghostflow {

struct Params {
    double epsilon = 0.1;  // Mach number, in (0,1)
    double mu = 1.0;       // shear viscosity, > 0
    double lambda = 0.0;   // second viscosity, 2 mu + 3 lambda >= 0
    double kappa = 1.0;    // heat conductivity, > 0
    double c_v = 1.0;      // gas constant; the expansion is derived for c_v = 1
    double M = 1.0;        // prescribed total mass

    double fp_tol = 1e-10;
    int fp_max_iter = 200;
    double newton_tol = 1e-9;
    int newton_max_iter = 40;

    LinearSolverConfig linear;

    double zeta() const { return mu + lambda; }

    void validate() const {
        if (!(epsilon > 0.0 && epsilon < 1.0))
            throw std::invalid_argument("Params: epsilon must be in (0,1)");
        if (mu <= 0.0) throw std::invalid_argument("Params: mu must be positive");
        if (2.0 * mu + 3.0 * lambda < 0.0)
            throw std::invalid_argument("Params: need 2 mu + 3 lambda >= 0");
        if (kappa <= 0.0) throw std::invalid_argument("Params: kappa must be positive");
        if (M <= 0.0) throw std::invalid_argument("Params: M must be positive");
        if (c_v != 1.0) throw std::invalid_argument("Params: the expansion requires c_v = 1");
        if (fp_tol <= 0.0) throw std::invalid_argument("Params: fp_tol must be positive");
    }
};

struct LimitingSolution {
    ScalarField rho0, theta0, P2;
    VectorField u1, v1;  // v1 = rho0 u1
    double P0 = 0.0;
    int iterations = 0;
    double final_change = 0.0;
    double div_v1_residual = 0.0;  // continuity defect as imposed by the Stokes solve
};

struct LimitingResidual {
    double boussinesq_grad;  // || grad(rho0 theta0) ||_L2
    double continuity;       // || div(rho0 u1) ||_L2
    double momentum;         // momentum equation defect
    double energy;           // || kappa Lap theta0 - 2 rho0 theta0 div u1 ||_L2
    double mass_defect;      // | integral(rho0) - M |
};

// P0 = M / integral(1/theta0).
double compute_P0(const ScalarField& theta0, double M);

// Frozen-coefficient right-hand sides of one fixed-point sweep:
//   Z1 = mu (theta0t - 1) Lap v1t + (mu - kappa/2) v1t Lap theta0t
//        - theta0t (v1t.grad) v1t + zeta grad(v1t.grad theta0t)
//        + 2 mu grad theta0t . (grad v1t)^t
//   Z2 = 2 v1t . grad theta0t
VectorField compute_Z1(const VectorField& v1t, const ScalarField& theta0t, double P0t,
                       const Params& params);
ScalarField compute_Z2(const VectorField& v1t, const ScalarField& theta0t);

LimitingSolution solve_limiting(const Grid& grid, const WallData& walls, const Params& params);

LimitingResidual residual_limiting(const LimitingSolution& sol, const WallData& walls,
                                   const Params& params);

}  // namespace ghostflow
