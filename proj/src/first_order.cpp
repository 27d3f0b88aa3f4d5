#include "ghostflow/first_order.hpp"

namespace ghostflow {

double compute_P1(const ScalarField& rho0, const ScalarField& theta0, const ScalarField& theta1t) {
    if (theta0.min() <= 0.0)
        throw NonPositiveTemperature("compute_P1: theta0 must be positive", theta0.min());
    return integrate(rho0 * theta1t / theta0) / integrate(1.0 / theta0);
}

GaugeDensities compute_rho23(const ScalarField& P2, const ScalarField& P3, const ScalarField& rho1,
                             const ScalarField& theta1, const ScalarField& theta0) {
    if (theta0.min() <= 0.0)
        throw NonPositiveTemperature("compute_rho23: theta0 must be positive", theta0.min());
    const ScalarField inv_theta = 1.0 / theta0;
    const double denom = integrate(inv_theta);

    const ScalarField a2 = P2 - rho1 * theta1;
    const double C1 = integrate(inv_theta * a2) / denom;
    ScalarField rho2 = (a2 - C1) * inv_theta;

    const ScalarField a3 = P3 - rho2 * theta1;
    const double C2 = integrate(inv_theta * a3) / denom;
    ScalarField rho3 = (a3 - C2) * inv_theta;

    return {std::move(rho2), std::move(rho3), C1, C2};
}

FirstOrderSolution solve_first_order(const LimitingSolution& lim, const VectorField& u_R_tilde,
                                     const Params& params) {
    PoissonDirichlet poisson(lim.theta0.grid(), params.linear);
    StokesSolver stokes(lim.theta0.grid(), params.mu, params.linear);
    return solve_first_order(lim, u_R_tilde, params, poisson, stokes);
}

FirstOrderSolution solve_first_order(const LimitingSolution& lim, const VectorField& u_R_tilde,
                                     const Params& params, const PoissonDirichlet& poisson,
                                     const StokesSolver& stokes) {
    params.validate();
    const Grid& g = lim.theta0.grid();
    const double mu = params.mu, zeta = params.zeta(), kappa = params.kappa;
    const ScalarField& theta0 = lim.theta0;
    const ScalarField& rho0 = lim.rho0;
    const VectorField& u1 = lim.u1;
    const double P0 = lim.P0;

    // iterate-independent pieces
    const ScalarField inv_theta0 = 1.0 / theta0;
    const VectorField grad_theta0 = grad(theta0);
    const ScalarField lap_theta0 = laplacian(theta0);
    const ScalarField div_u1_over_theta0 = div(inv_theta0 * u1);
    const ScalarField div_u1 = div(u1);
    const VectorField u1_adv_u1 = advect(u1, u1);
    const ScalarField u1_grad_theta0 = advect(u1, theta0);
    const ScalarField drive = 2.0 * theta0 * advect(u_R_tilde, rho0);
    const WallVelocity bc0 = WallVelocity::zero(g);

    VectorField v2t(g);
    ScalarField theta1t(g);
    std::vector<double> history;

    FirstOrderSolution out{ScalarField(g), ScalarField(g), ScalarField(g),
                           VectorField(g), VectorField(g), 0.0,
                           ScalarField(g), ScalarField(g)};
    for (int it = 1; it <= params.fp_max_iter; ++it) {
        const double P1t = compute_P1(rho0, theta0, theta1t);

        const ScalarField rt = rho0 * theta1t * inv_theta0;  // rho0 theta1 / theta0
        const ScalarField Z3 = div(rt * u1) - P1t * div_u1_over_theta0;

        const VectorField Z4 =
            mu * ((theta0 - 1.0) * laplacian(v2t)) - (rho0 * u1_grad_theta0) * v2t -
            P0 * advect(u1, v2t) - P0 * advect(v2t, u1) + mu * (lap_theta0 * v2t) +
            2.0 * mu * grad_dot_gradT(theta0, v2t) -
            (rho0 * (P1t - rho0 * theta1t)) * u1_adv_u1 + zeta * grad(theta0 * Z3) +
            zeta * grad(dot(v2t, grad_theta0));

        StokesSolution st = stokes.solve(Z4, Z3, bc0, bc0, 0.0);

        const ScalarField Z5 = -(theta0 / rho0) * advect(v2t, rho0) +
                               ((P1t - rho0 * theta1t) * inv_theta0) * u1_grad_theta0 +
                               rho0 * advect(u1, theta1t) + dot(v2t, grad_theta0) +
                               rho0 * theta1t * div_u1 + theta0 * advect(u1, rt) -
                               P1t * theta0 * advect(u1, inv_theta0) - drive;
        ScalarField theta1 = poisson.solve((1.0 / kappa) * Z5, 0.0, 0.0);

        const double change =
            sobolev_norm(st.velocity - v2t, 2) + sobolev_norm(theta1 - theta1t, 2);
        history.push_back(change);
        v2t = st.velocity;
        theta1t = theta1;

        if (change < params.fp_tol) {
            out.P1 = compute_P1(rho0, theta0, theta1t);
            out.theta1 = theta1t;
            out.rho1 = (out.P1 - rho0 * theta1t) * inv_theta0;
            out.v2 = v2t;
            out.u2 = v2t / rho0;
            out.P3 = (1.0 / P0) * st.pressure;
            GaugeDensities gd = compute_rho23(lim.P2, out.P3, out.rho1, out.theta1, theta0);
            out.rho2 = std::move(gd.rho2);
            out.rho3 = std::move(gd.rho3);
            out.C1 = gd.C1;
            out.C2 = gd.C2;
            out.iterations = it;
            out.final_change = change;
            return out;
        }
    }
    throw FixedPointDivergence("solve_first_order: no convergence within fp_max_iter", history);
}

FirstOrderResidual residual_first_order(const FirstOrderSolution& fo, const LimitingSolution& lim,
                                        const VectorField& u_R_tilde, const Params& params) {
    FirstOrderResidual r{};
    r.boussinesq = (fo.rho1 * lim.theta0 + lim.rho0 * fo.theta1 - fo.P1).max_abs();
    r.continuity = l2_norm(div(lim.rho0 * fo.u2) + div(fo.rho1 * lim.u1));
    const VectorField mom = lim.rho0 * advect(lim.u1, fo.u2) + lim.rho0 * advect(fo.u2, lim.u1) +
                            grad(fo.P3) + fo.rho1 * advect(lim.u1, lim.u1) -
                            params.mu * laplacian(fo.u2) - params.zeta() * grad(div(fo.u2));
    r.momentum = l2_norm(mom);
    const ScalarField en = params.kappa * laplacian(fo.theta1) +
                           lim.theta0 * advect(fo.u2, lim.rho0) -
                           fo.rho1 * advect(lim.u1, lim.theta0) -
                           lim.rho0 * advect(lim.u1, fo.theta1) -
                           (lim.rho0 * fo.theta1 + fo.rho1 * lim.theta0) * div(lim.u1) -
                           (lim.rho0 * lim.theta0) * div(fo.u2) +
                           2.0 * lim.theta0 * advect(u_R_tilde, lim.rho0);
    r.energy = l2_norm(en);
    r.gauge_rho1 = std::abs(integrate(fo.rho1));
    r.gauge_P3 = std::abs(integrate(fo.P3));
    return r;
}

}  // namespace ghostflow
