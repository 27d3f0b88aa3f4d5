/// @file remainder.hpp
/// @brief The O(eps^2) remainder tier that makes the truncated expansion an
/// exact solution: source assembly, the linearized decomposition scheme
/// (Dirichlet Poisson + Neumann Poisson + Stokes + steady transport), and the
/// outer fixed point coupling it back to the first-order tier.
#pragma once

#include "ghostflow/first_order.hpp"

namespace ghostflow {

// Expansion source terms. r1..r3 collect the products of already-solved tiers;
// R1..R3 are the right-hand sides of the linearized remainder system, which
// additionally carry the frozen remainder velocity and the viscous dissipation
// of the known flow.
struct SourceTerms {
    ScalarField r1, r3;
    VectorField r2;
    ScalarField R1, R3;
    VectorField R2;
};

struct RemainderState {
    ScalarField rhoR, thetaR;
    VectorField uR;
    // Helmholtz diagnostics: wR = rho0 uR = vR + grad qR with div vR = 0
    VectorField wR, vR;
    ScalarField qR, PR, PtildeR;
    double norm_rho_H2 = 0.0, norm_u_K = 0.0, norm_theta_H3 = 0.0;
    int iterations = 0;
    double final_change = 0.0;
    double max_mass_defect = 0.0;   // max |integral(rhoR)| over the iterates
    double div_vR_residual = 0.0;   // continuity defect of the last Stokes solve
    std::vector<double> change_history;
};

struct NonlinearRemainderResult {
    FirstOrderSolution fo;
    RemainderState rem;
    int outer_iterations = 0;
    std::vector<double> outer_history;  // successive H1 x H1 changes
    double ball_radius = 0.0;
};

struct RemainderResidual {
    double continuity;
    double momentum;
    double energy;
    double skew_symmetry;  // the integrated-by-parts singular-term identity
    double mass_gauge;     // | integral(rhoR) |
};

// Shared factorizations for one (grid, mu) pair.
struct EllipticWorkspace {
    PoissonDirichlet dirichlet;
    PoissonNeumann neumann;
    StokesSolver stokes;
    EllipticWorkspace(const Grid& g, double mu, LinearSolverConfig cfg = {})
        : dirichlet(g, cfg), neumann(g, cfg), stokes(g, mu, cfg) {}
};

// r1, r2, r3 exactly as the expansion collects them (polynomials in eps).
SourceTerms assemble_sources(const LimitingSolution& lim, const FirstOrderSolution& fo,
                             const Params& params);

// Fills R1..R3 for a frozen remainder velocity:
//   R1 = -div[(rho1 + eps rho2 + eps^2 rho3) uRt] + r1,   R2 = r2,
//   R3 = r3/theta0 - Psi(grad(u1 + eps(u2 + uRt)))/theta0.
void assemble_R_terms(SourceTerms& src, const LimitingSolution& lim, const FirstOrderSolution& fo,
                      const VectorField& u_R_tilde, const Params& params);

// Full nonlinear coupling terms of the remainder momentum/energy equations.
VectorField eval_F_eps(const LimitingSolution& lim, const FirstOrderSolution& fo,
                       const ScalarField& rhoR, const VectorField& uR, const ScalarField& thetaR,
                       const Params& params);
ScalarField eval_G_eps(const LimitingSolution& lim, const FirstOrderSolution& fo,
                       const ScalarField& rhoR, const VectorField& uR, const ScalarField& thetaR,
                       const Params& params);

// Linearized forms: quadratic remainder products are frozen at (uRt, thetaRt).
VectorField eval_F_tilde(const LimitingSolution& lim, const FirstOrderSolution& fo,
                         const ScalarField& rhoR, const VectorField& uR, const ScalarField& thetaR,
                         const VectorField& u_R_tilde, const ScalarField& theta_R_tilde,
                         const Params& params);
ScalarField eval_G_tilde(const LimitingSolution& lim, const FirstOrderSolution& fo,
                         const ScalarField& rhoR, const VectorField& uR, const ScalarField& thetaR,
                         const VectorField& u_R_tilde, const ScalarField& theta_R_tilde,
                         const Params& params);

// Inner scheme: from zero start, per sweep solve a Dirichlet problem for
// theta_R, a Neumann problem for q_R, a Stokes problem for (v_R, P_R) with the
// mean-pressure constraint that keeps rho_R mean-free, and a steady transport
// problem for rho_R.
RemainderState solve_linearized_remainder(const LimitingSolution& lim,
                                          const FirstOrderSolution& fo,
                                          const VectorField& u_R_tilde,
                                          const ScalarField& theta_R_tilde, const Params& params);
RemainderState solve_linearized_remainder(const LimitingSolution& lim,
                                          const FirstOrderSolution& fo, const SourceTerms& src,
                                          const VectorField& u_R_tilde,
                                          const ScalarField& theta_R_tilde, const Params& params,
                                          const EllipticWorkspace& ws);

// Outer fixed point: re-solves the first-order tier (whose energy equation
// carries the frozen remainder velocity), reassembles sources and iterates the
// linearized solve until the H1 x H1 change of (u_R, theta_R) settles.
// ball_radius <= 0 requests the adaptive default (10 x first-iterate norm).
NonlinearRemainderResult solve_remainder_nonlinear(const LimitingSolution& lim,
                                                   const Params& params,
                                                   double ball_radius = 0.0);

RemainderResidual residual_linearized(const RemainderState& state, const LimitingSolution& lim,
                                      const FirstOrderSolution& fo, const VectorField& u_R_tilde,
                                      const ScalarField& theta_R_tilde, const Params& params);
RemainderResidual residual_nonlinear(const RemainderState& state, const LimitingSolution& lim,
                                     const FirstOrderSolution& fo, const Params& params);

// |integral[ rho0 uR . grad(rho0 thetaR + rhoR theta0)
//            + div(rho0 uR) (rho0 thetaR + theta0 rhoR) ]|
// Zero for wall-vanishing fields up to the discrete integration-by-parts
// defect; independent of any solve.
double skew_symmetry_defect(const ScalarField& rho0, const ScalarField& theta0,
                            const VectorField& uR, const ScalarField& thetaR,
                            const ScalarField& rhoR);

}  // namespace ghostflow
