#include "ghostflow/limiting.hpp"

#include <iostream>

namespace ghostflow {

double compute_P0(const ScalarField& theta0, double M) {
    if (theta0.min() <= 0.0)
        throw NonPositiveTemperature("compute_P0: theta0 must be positive", theta0.min());
    return M / integrate(1.0 / theta0);
}

VectorField compute_Z1(const VectorField& v1t, const ScalarField& theta0t, double /*P0t*/,
                       const Params& params) {
    const ScalarField lap_theta = laplacian(theta0t);
    const VectorField lap_v = laplacian(v1t);
    const ScalarField vdt = dot(v1t, grad(theta0t));
    VectorField z = params.mu * ((theta0t - 1.0) * lap_v) +
                    (params.mu - 0.5 * params.kappa) * (lap_theta * v1t) -
                    theta0t * advect(v1t, v1t) + params.zeta() * grad(vdt) +
                    2.0 * params.mu * grad_dot_gradT(theta0t, v1t);
    return z;
}

ScalarField compute_Z2(const VectorField& v1t, const ScalarField& theta0t) {
    return 2.0 * dot(v1t, grad(theta0t));
}

LimitingSolution solve_limiting(const Grid& grid, const WallData& walls, const Params& params) {
    params.validate();
    walls.validate();
    if (walls.oscillation() > 0.2)
        std::cerr << "solve_limiting: wall oscillation " << walls.oscillation()
                  << " exceeds the small-data regime (delta <= 0.2); convergence not guaranteed\n";

    PoissonDirichlet poisson(grid, params.linear);
    StokesSolver stokes(grid, params.mu, params.linear);

    // tangential slip data h(T_w)/T_w * dT_w/dx on each wall
    const Eigen::ArrayXd dT_b = tangential_wall_derivative(walls, WallSide::bottom);
    const Eigen::ArrayXd dT_t = tangential_wall_derivative(walls, WallSide::top);
    Eigen::ArrayXd slip_b(grid.nx), slip_t(grid.nx);
    for (int i = 0; i < grid.nx; ++i) {
        slip_b[i] = walls.h(walls.t_bottom[i]) / walls.t_bottom[i] * dT_b[i];
        slip_t[i] = walls.h(walls.t_top[i]) / walls.t_top[i] * dT_t[i];
    }

    // start from rest and the harmonic lift of the wall temperature
    VectorField v1t(grid);
    ScalarField theta0t = poisson.solve(ScalarField(grid), walls.t_bottom, walls.t_top);
    const ScalarField zero(grid);

    LimitingSolution out{ScalarField(grid), ScalarField(grid), ScalarField(grid),
                         VectorField(grid), VectorField(grid)};
    std::vector<double> history;
    double P0t = 0.0;
    for (int it = 1; it <= params.fp_max_iter; ++it) {
        P0t = compute_P0(theta0t, params.M);

        const ScalarField Z2 = compute_Z2(v1t, theta0t);
        ScalarField theta0 = poisson.solve((1.0 / params.kappa) * Z2, walls.t_bottom, walls.t_top);

        const VectorField Z1 = compute_Z1(v1t, theta0t, P0t, params);
        WallVelocity bc_b{P0t * slip_b, Eigen::ArrayXd::Zero(grid.nx)};
        WallVelocity bc_t{P0t * slip_t, Eigen::ArrayXd::Zero(grid.nx)};
        StokesSolution st = stokes.solve(Z1, zero, bc_b, bc_t, 0.0);

        const double change = sobolev_norm(st.velocity - v1t, 2) + sobolev_norm(theta0 - theta0t, 2);
        history.push_back(change);
        v1t = st.velocity;
        theta0t = theta0;

        if (change < params.fp_tol) {
            out.theta0 = theta0t;
            out.P0 = compute_P0(theta0t, params.M);
            out.rho0 = out.P0 / theta0t;
            out.v1 = v1t;
            out.u1 = v1t / out.rho0;
            out.P2 = (1.0 / P0t) * st.pressure;
            out.iterations = it;
            out.final_change = change;
            out.div_v1_residual = st.div_residual;
            return out;
        }
    }
    throw FixedPointDivergence("solve_limiting: no convergence within fp_max_iter", history);
}

LimitingResidual residual_limiting(const LimitingSolution& sol, const WallData& /*walls*/,
                                   const Params& params) {
    LimitingResidual r{};
    r.boussinesq_grad = l2_norm(grad(sol.rho0 * sol.theta0));
    r.continuity = l2_norm(div(sol.v1));
    const ScalarField divu1 = div(sol.u1);
    const VectorField mom = sol.rho0 * advect(sol.u1, sol.u1) + grad(sol.P2) -
                            params.mu * laplacian(sol.u1) - params.zeta() * grad(divu1);
    r.momentum = l2_norm(mom);
    r.energy = l2_norm(params.kappa * laplacian(sol.theta0) - 2.0 * (sol.rho0 * sol.theta0) * divu1);
    r.mass_defect = std::abs(integrate(sol.rho0) - params.M);
    return r;
}

}  // namespace ghostflow
