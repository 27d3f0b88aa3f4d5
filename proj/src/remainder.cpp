#include "ghostflow/remainder.hpp"

namespace ghostflow {

SourceTerms assemble_sources(const LimitingSolution& lim, const FirstOrderSolution& fo,
                             const Params& params) {
    const double e = params.epsilon;
    const VectorField& u1 = lim.u1;
    const VectorField& u2 = fo.u2;
    const ScalarField &rho0 = lim.rho0, &theta0 = lim.theta0;
    const ScalarField &rho1 = fo.rho1, &rho2 = fo.rho2, &rho3 = fo.rho3, &theta1 = fo.theta1;

    SourceTerms src{ScalarField(theta0.grid()), ScalarField(theta0.grid()),
                    VectorField(theta0.grid()), ScalarField(theta0.grid()),
                    ScalarField(theta0.grid()), VectorField(theta0.grid())};

    src.r1 = -div(rho1 * u2 + rho2 * u1) - e * div(rho2 * u2 + rho3 * u1) -
             (e * e) * div(rho3 * u2);

    const VectorField a11 = advect(u1, u1), a12 = advect(u1, u2), a21 = advect(u2, u1),
                      a22 = advect(u2, u2);
    src.r2 = rho0 * (a21 + a12) +
             e * (rho0 * a22 + rho1 * (a21 + a12) + rho2 * a11) +
             (e * e) * (rho1 * a22 + rho2 * (a12 + a21) + rho3 * a11) +
             (e * e * e) * (rho2 * a22 + rho3 * (a12 + a21)) +
             (e * e * e * e) * (rho3 * a22) + e * grad(rho3 * theta1);

    const ScalarField t10 = advect(u1, theta0), t11 = advect(u1, theta1),
                      t20 = advect(u2, theta0), t21 = advect(u2, theta1);
    const ScalarField d1 = div(u1), d2 = div(u2);
    src.r3 = (rho0 * t21 + rho1 * (t20 + t11) + rho2 * t10) +
             e * (rho1 * t21 + rho2 * (t20 + t11) + rho3 * t10) +
             (e * e) * (rho2 * t21 + rho3 * (t20 + t11)) + (e * e * e) * (rho3 * t21) +
             (rho0 * theta1 + rho1 * theta0) * d2 + (rho2 * theta0 + rho1 * theta1) * d1 +
             e * ((rho2 * theta0 + rho1 * theta1) * d2 + (rho2 * theta1 + rho3 * theta0) * d1) +
             (e * e) * ((rho2 * theta1 + rho3 * theta0) * d2 + rho3 * theta1 * d1) +
             (e * e * e) * (rho3 * theta1 * d2);
    return src;
}

void assemble_R_terms(SourceTerms& src, const LimitingSolution& lim, const FirstOrderSolution& fo,
                      const VectorField& u_R_tilde, const Params& params) {
    const double e = params.epsilon;
    const ScalarField rho_123 = fo.rho1 + e * fo.rho2 + (e * e) * fo.rho3;
    src.R1 = -div(rho_123 * u_R_tilde) + src.r1;
    src.R2 = src.r2;
    const VectorField known_flow = lim.u1 + e * (fo.u2 + u_R_tilde);
    src.R3 = (src.r3 - dissipation(known_flow, params.mu, params.lambda)) / lim.theta0;
}

// ---------------------------------------------------------------------------
// Nonlinear coupling terms and their linearized (frozen) forms
// ---------------------------------------------------------------------------

VectorField eval_F_eps(const LimitingSolution& lim, const FirstOrderSolution& fo,
                       const ScalarField& rhoR, const VectorField& uR, const ScalarField& thetaR,
                       const Params& params) {
    // transcribed independently of eval_F_tilde; the two are cross-checked in
    // the tests on the diagonal uRt = uR, thetaRt = thetaR
    const double e = params.epsilon;
    const double e2 = e * e, e3 = e2 * e, e4 = e2 * e2;
    const VectorField& u1 = lim.u1;
    const VectorField& u2 = fo.u2;
    const ScalarField &rho0 = lim.rho0, &rho1 = fo.rho1, &rho2 = fo.rho2, &rho3 = fo.rho3;

    const VectorField a2R = advect(u2, uR), aR2 = advect(uR, u2), aRR = advect(uR, uR);
    const VectorField aR1 = advect(uR, u1), a1R = advect(u1, uR);
    const VectorField a11 = advect(u1, u1), a12 = advect(u1, u2), a21 = advect(u2, u1),
                      a22 = advect(u2, u2);

    return e * (rho0 * (a2R + aR2 + aRR) + rho1 * (aR1 + a1R) + rhoR * a11) +
           e2 * (rho1 * (aR2 + a2R + aRR) + rhoR * (a1R + aR1 + a21 + a12) +
                 rho2 * (aR1 + a1R)) +
           e2 * grad(rho3 * thetaR) +
           e3 * (rho2 * (aR2 + a2R + aRR) + rho3 * (aR1 + a1R) +
                 rhoR * (aR2 + a2R + a22 + aRR)) +
           e4 * (rho3 * (aR2 + a2R + aRR)) + e * grad(rho2 * thetaR + rhoR * thetaR);
}

ScalarField eval_G_eps(const LimitingSolution& lim, const FirstOrderSolution& fo,
                       const ScalarField& rhoR, const VectorField& uR, const ScalarField& thetaR,
                       const Params& params) {
    const double e = params.epsilon;
    const double e2 = e * e, e3 = e2 * e, e4 = e2 * e2;
    const VectorField& u1 = lim.u1;
    const VectorField& u2 = fo.u2;
    const ScalarField &rho0 = lim.rho0, &theta0 = lim.theta0;
    const ScalarField &rho1 = fo.rho1, &rho2 = fo.rho2, &rho3 = fo.rho3, &theta1 = fo.theta1;

    const ScalarField g2R = advect(u2, thetaR), gRR = advect(uR, thetaR),
                      g1R = advect(u1, thetaR);
    const ScalarField gR0 = advect(uR, theta0), gR1 = advect(uR, theta1),
                      g20 = advect(u2, theta0), g11 = advect(u1, theta1),
                      g21 = advect(u2, theta1);
    const ScalarField d1 = div(u1), d2 = div(u2), dR = div(uR);

    return e * (rho0 * (g2R + gRR) + rho2 * gR0 + rhoR * (g20 + gR0 + g11) +
                rho1 * (gR1 + g1R)) +
           e2 * (rho1 * (g2R + gRR) + rhoR * (g21 + gR1 + g1R) + rho2 * (gR1 + g1R) +
                 rho3 * gR0) +
           e3 * (rho2 * (g2R + gRR) + rho3 * (g1R + gR1) + rhoR * (g2R + gRR)) +
           e4 * (rho3 * (g2R + gRR)) +
           e * ((rho0 * thetaR + rhoR * theta0) * d2 +
                (rho0 * thetaR + rhoR * theta0 + rho1 * theta1 + rho2 * theta0) * dR +
                (rho1 * thetaR + rhoR * theta1) * d1) +
           e2 * ((rho1 * thetaR + rhoR * theta1) * d2 + (rho2 * thetaR + rhoR * thetaR) * d1 +
                 (rho2 * theta1 + rho1 * thetaR + rhoR * theta1 + rho3 * theta0) * dR) +
           e3 * ((rho2 * thetaR + rhoR * thetaR) * d2 + rho3 * thetaR * d1 +
                 (rho2 * thetaR + rhoR * thetaR + rho3 * theta1) * dR) +
           e4 * (rho3 * thetaR * d2 + rho3 * thetaR * dR);
}

VectorField eval_F_tilde(const LimitingSolution& lim, const FirstOrderSolution& fo,
                         const ScalarField& rhoR, const VectorField& uR, const ScalarField& thetaR,
                         const VectorField& uRt, const ScalarField& thetaRt, const Params& params) {
    const double e = params.epsilon;
    const double e2 = e * e, e3 = e2 * e, e4 = e2 * e2;
    const VectorField& u1 = lim.u1;
    const VectorField& u2 = fo.u2;
    const ScalarField &rho0 = lim.rho0, &rho1 = fo.rho1, &rho2 = fo.rho2, &rho3 = fo.rho3;

    const VectorField a2R = advect(u2, uR), aR2 = advect(uR, u2), aRt_R = advect(uRt, uR);
    const VectorField aR1 = advect(uR, u1), a1R = advect(u1, uR);

    VectorField f1 = e * (rho0 * (a2R + aR2 + aRt_R) + rho1 * (aR1 + a1R)) +
                     e2 * (rho1 * (aR2 + a2R + aRt_R) + rho2 * (aR1 + a1R)) +
                     e3 * (rho2 * (aR2 + a2R + aRt_R) + rho3 * (aR1 + a1R)) +
                     e4 * (rho3 * (aR2 + a2R + aRt_R)) + e * grad(rho2 * thetaR) +
                     e2 * grad(rho3 * thetaR);

    const VectorField a11 = advect(u1, u1), a12 = advect(u1, u2), a21 = advect(u2, u1),
                      a22 = advect(u2, u2);
    const VectorField a1Rt = advect(u1, uRt), aRt1 = advect(uRt, u1), aRt2 = advect(uRt, u2),
                      a2Rt = advect(u2, uRt), aRtRt = advect(uRt, uRt);
    VectorField f2 = e * (rhoR * a11) + e2 * (rhoR * (a1Rt + aRt1 + a21 + a12)) +
                     e3 * (rhoR * (aRt2 + a2Rt + a22 + aRtRt)) + e * grad(rhoR * thetaRt);
    return f1 + f2;
}

ScalarField eval_G_tilde(const LimitingSolution& lim, const FirstOrderSolution& fo,
                         const ScalarField& rhoR, const VectorField& uR, const ScalarField& thetaR,
                         const VectorField& uRt, const ScalarField& thetaRt, const Params& params) {
    const double e = params.epsilon;
    const double e2 = e * e, e3 = e2 * e, e4 = e2 * e2;
    const VectorField& u1 = lim.u1;
    const VectorField& u2 = fo.u2;
    const ScalarField &rho0 = lim.rho0, &theta0 = lim.theta0;
    const ScalarField &rho1 = fo.rho1, &rho2 = fo.rho2, &rho3 = fo.rho3, &theta1 = fo.theta1;

    const ScalarField g2R = advect(u2, thetaR), gRtR = advect(uRt, thetaR),
                      g1R = advect(u1, thetaR);
    const ScalarField gR0 = advect(uR, theta0), gR1 = advect(uR, theta1);
    const ScalarField d1 = div(u1), d2 = div(u2), dR = div(uR), dRt = div(uRt);

    ScalarField g1 = e * (rho0 * (g2R + gRtR) + rho2 * gR0 + rho1 * (gR1 + g1R)) +
                     e2 * (rho1 * (g2R + gRtR) + rho2 * (gR1 + g1R) + rho3 * gR0) +
                     e3 * (rho2 * (g2R + gRtR) + rho3 * (g1R + gR1)) +
                     e4 * (rho3 * (g2R + gRtR)) +
                     e * (rho0 * thetaR * d2 + (rho1 * theta1 + rho2 * theta0) * dR +
                          rho0 * thetaR * dRt + rho1 * thetaR * d1) +
                     e2 * (rho1 * thetaR * d2 + (rho2 * theta1 + rho3 * theta0) * dR +
                           rho1 * thetaR * dRt + rho2 * thetaR * d1) +
                     e3 * (rho3 * thetaR * d1 + rho2 * thetaR * d2 + rho3 * theta1 * dR +
                           rho2 * thetaR * dRt) +
                     e4 * (rho3 * thetaR * d2 + rho3 * thetaR * dRt);

    const ScalarField g20 = advect(u2, theta0), gRt0 = advect(uRt, theta0),
                      g11 = advect(u1, theta1);
    const ScalarField g21 = advect(u2, theta1), gRt1 = advect(uRt, theta1),
                      g1Rt = advect(u1, thetaRt);
    const ScalarField g2Rt = advect(u2, thetaRt), gRtRt = advect(uRt, thetaRt);
    ScalarField g2 = e * (rhoR * (g20 + gRt0 + g11)) + e2 * (rhoR * (g21 + gRt1 + g1Rt)) +
                     e3 * (rhoR * (g2Rt + gRtRt)) +
                     e * (rhoR * (theta0 * d2 + theta0 * dRt + theta1 * d1)) +
                     e2 * (rhoR * (theta1 * d2 + theta1 * dRt + thetaRt * d1)) +
                     e3 * (rhoR * (thetaRt * dRt + thetaRt * d2));
    return g1 + g2;
}

// ---------------------------------------------------------------------------
// Linearized remainder solve
// ---------------------------------------------------------------------------

RemainderState solve_linearized_remainder(const LimitingSolution& lim, const FirstOrderSolution& fo,
                                          const VectorField& u_R_tilde,
                                          const ScalarField& theta_R_tilde, const Params& params) {
    EllipticWorkspace ws(lim.theta0.grid(), params.mu, params.linear);
    SourceTerms src = assemble_sources(lim, fo, params);
    assemble_R_terms(src, lim, fo, u_R_tilde, params);
    return solve_linearized_remainder(lim, fo, src, u_R_tilde, theta_R_tilde, params, ws);
}

RemainderState solve_linearized_remainder(const LimitingSolution& lim, const FirstOrderSolution& fo,
                                          const SourceTerms& src, const VectorField& u_R_tilde,
                                          const ScalarField& theta_R_tilde, const Params& params,
                                          const EllipticWorkspace& ws) {
    params.validate();
    const Grid& g = lim.theta0.grid();
    const double e = params.epsilon, mu = params.mu, zeta = params.zeta(), kappa = params.kappa;
    const double P0 = lim.P0, P1 = fo.P1;
    const ScalarField &rho0 = lim.rho0, &theta0 = lim.theta0;
    const ScalarField &rho1 = fo.rho1, &theta1 = fo.theta1;
    const VectorField& u1 = lim.u1;

    // smallness condition for the transport step, through the sup bounds the
    // H^3 norms control
    auto sup_bound = [](const VectorField& v) {
        return linf_norm(v) + std::max(linf_norm(grad(v.x())), linf_norm(grad(v.y())));
    };
    const double h1 = e * e * (params.mu + zeta) *
                      (sup_bound(u1) + e * sup_bound(fo.u2) + e * sup_bound(u_R_tilde));
    if (h1 >= 0.5)
        throw SmallnessViolation("solve_linearized_remainder: smallness condition violated", h1);

    const VectorField U = u1 + e * (fo.u2 + u_R_tilde);
    const TransportSolver transport(g, e * e * (mu + zeta) / P0, U, theta0, params.linear);

    const VectorField grad_theta0 = grad(theta0), grad_theta1 = grad(theta1);
    const ScalarField lap_theta0 = laplacian(theta0);
    const ScalarField div_u1 = div(u1);
    const ScalarField u1_grad_theta0 = advect(u1, theta0);
    const ScalarField rho_poly = rho0 + e * fo.rho1 + (e * e) * fo.rho2 + (e * e * e) * fo.rho3;
    const ScalarField theta_shift = theta0 - 1.0 + e * theta1 + (e * e) * theta_R_tilde;
    const ScalarField U_grad_theta0 = advect(U, theta0);
    const ScalarField inv_theta0 = 1.0 / theta0;
    const ScalarField rho1_over_rho0 = rho1 / rho0;
    const double int_R1_over_rho0 = integrate(src.R1 / rho0);
    const ScalarField zero(g);

    ScalarField rhoR(g), thetaR(g), qR(g), PR(g);
    VectorField vR(g), wR(g);
    std::vector<double> history;
    double max_mass = 0.0;
    double omega = 1.0;

    for (int it = 1; it <= params.fp_max_iter; ++it) {
        const VectorField uRk = wR / rho0;

        // energy step: theta_R from the Dirichlet problem
        const ScalarField Gt =
            eval_G_tilde(lim, fo, rhoR, uRk, thetaR, u_R_tilde, theta_R_tilde, params);
        const ScalarField R1x =
            -div(rhoR * U) + src.R1 + inv_theta0 * Gt + src.R3 +
            (P1 / P0) * inv_theta0 * (dot(wR, grad_theta0) + theta0 * div(wR)) +
            inv_theta0 * ((rho0 * thetaR + rhoR * theta0) * div_u1) +
            inv_theta0 * (dot(wR, grad_theta1) + rho0 * advect(u1, thetaR) +
                          rho1_over_rho0 * dot(wR, grad_theta0) + rhoR * u1_grad_theta0);
        ScalarField thetaR_new = ws.dirichlet.solve((1.0 / kappa) * (theta0 * R1x), 0.0, 0.0);

        // Helmholtz potential: Neumann problem
        const ScalarField R2x = e * (-div(rhoR * U) + src.R1);
        ScalarField qR_new = ws.neumann.solve(R2x);

        // Stokes step for the solenoidal part and the effective viscous flux
        const VectorField Ft =
            eval_F_tilde(lim, fo, rhoR, uRk, thetaR, u_R_tilde, theta_R_tilde, params);
        const VectorField Feps = P0 * Ft - (P0 * e) * grad(rhoR * theta_R_tilde + fo.rho2 * thetaR) -
                                 (P0 * e * e) * grad(fo.rho3 * thetaR);
        const VectorField R3x = rho0 * (u1_grad_theta0 * wR + theta0 * advect(u1, wR) +
                                        theta0 * advect(wR, u1)) -
                                mu * ((theta0 - 1.0) * laplacian(vR)) - mu * (lap_theta0 * wR) +
                                mu * (div(wR) * grad_theta0) -
                                2.0 * mu * grad_dot_gradT(theta0, wR) -
                                zeta * grad(dot(wR, grad_theta0)) + Feps + P0 * src.R2;
        const double R4 = P0 * (mu + zeta) * e * int_R1_over_rho0 -
                          (P0 / e) * integrate(rho_poly * thetaR_new) +
                          e * (mu + zeta) * integrate(rhoR * U_grad_theta0) -
                          (P0 / e) * integrate(theta_shift * rhoR);

        // wall trace of -grad q: tangential from the periodic derivative, the
        // normal part vanishes by the Neumann condition
        const ScalarField dxq = dx(qR_new);
        WallVelocity bc_b{Eigen::ArrayXd(g.nx), Eigen::ArrayXd::Zero(g.nx)};
        WallVelocity bc_t{Eigen::ArrayXd(g.nx), Eigen::ArrayXd::Zero(g.nx)};
        for (int i = 0; i < g.nx; ++i) {
            bc_b.x[i] = -dxq(i, 0);
            bc_t.x[i] = -dxq(i, g.ny - 1);
        }
        // (E8) reads  mu Lap v + grad P = R3x ; flip signs for the solver form
        StokesSolution st = ws.stokes.solve(-R3x, zero, bc_b, bc_t, -R4);
        VectorField vR_new = st.velocity;
        ScalarField PR_new = -st.pressure;
        const double div_vR = st.div_residual;

        // transport step for rho_R; its right-hand side is mean-free by the
        // choice of R4, so the conservative solve keeps integral(rhoR) at zero
        const ScalarField R5x = (e * e * (mu + zeta)) * (src.R1 / rho0) - theta_shift * rhoR +
                                (e * e * (mu + zeta) / P0) * (rhoR * U_grad_theta0);
        const ScalarField trhs = -(e / P0) * PR_new - rho_poly * thetaR_new + R5x;
        ScalarField rhoR_new = transport.solve(trhs);

        if (omega != 1.0) {
            const double b = 1.0 - omega;
            thetaR_new = omega * thetaR_new + b * thetaR;
            qR_new = omega * qR_new + b * qR;
            vR_new = omega * vR_new + b * vR;
            rhoR_new = omega * rhoR_new + b * rhoR;
            PR_new = omega * PR_new + b * PR;
        }
        VectorField wR_new = vR_new + grad_neumann(qR_new);

        max_mass = std::max(max_mass, std::abs(integrate(rhoR_new)));
        const double change = sobolev_norm(rhoR_new - rhoR, 2) + sobolev_norm(wR_new - wR, 2) +
                              sobolev_norm(thetaR_new - thetaR, 2);
        const bool worse = !history.empty() && change > history.back();
        history.push_back(change);

        rhoR = std::move(rhoR_new);
        thetaR = std::move(thetaR_new);
        qR = std::move(qR_new);
        vR = std::move(vR_new);
        wR = std::move(wR_new);
        PR = std::move(PR_new);

        if (change < params.fp_tol) {
            RemainderState out;
            out.rhoR = rhoR;
            out.thetaR = thetaR;
            out.uR = wR / rho0;
            out.wR = wR;
            out.vR = vR;
            out.qR = qR;
            out.PR = PR;
            out.PtildeR = PR - mu * (theta0 * div(wR));
            out.norm_rho_H2 = sobolev_norm(rhoR, 2);
            out.norm_u_K = k_norm(out.uR, e);
            out.norm_theta_H3 = sobolev_norm(thetaR, 3);
            out.iterations = it;
            out.final_change = change;
            out.max_mass_defect = max_mass;
            out.div_vR_residual = div_vR;
            out.change_history = history;
            return out;
        }
        if (worse && omega == 1.0) omega = 0.5;  // contraction seems marginal; damp
    }
    throw FixedPointDivergence("solve_linearized_remainder: no convergence within fp_max_iter",
                               history);
}

// ---------------------------------------------------------------------------
// Outer fixed point
// ---------------------------------------------------------------------------

NonlinearRemainderResult solve_remainder_nonlinear(const LimitingSolution& lim,
                                                   const Params& params, double ball_radius) {
    params.validate();
    const Grid& g = lim.theta0.grid();
    EllipticWorkspace ws(g, params.mu, params.linear);

    VectorField uRt(g);
    ScalarField thetaRt(g);
    NonlinearRemainderResult res;
    double A = ball_radius;

    for (int m = 1; m <= params.fp_max_iter; ++m) {
        FirstOrderSolution fo = solve_first_order(lim, uRt, params, ws.dirichlet, ws.stokes);
        SourceTerms src = assemble_sources(lim, fo, params);
        assemble_R_terms(src, lim, fo, uRt, params);
        RemainderState rem =
            solve_linearized_remainder(lim, fo, src, uRt, thetaRt, params, ws);

        const double ball_norm = rem.norm_u_K + rem.norm_theta_H3;
        if (A <= 0.0) A = 10.0 * ball_norm;  // adaptive default from the first sweep
        else if (ball_norm > A)
            throw BallEscape("solve_remainder_nonlinear: iterate left the invariant ball",
                             ball_norm, A);

        const double change =
            sobolev_norm(rem.uR - uRt, 1) + sobolev_norm(rem.thetaR - thetaRt, 1);
        res.outer_history.push_back(change);
        uRt = rem.uR;
        thetaRt = rem.thetaR;

        if (change < params.fp_tol) {
            res.fo = std::move(fo);
            res.rem = std::move(rem);
            res.outer_iterations = m;
            res.ball_radius = A;
            return res;
        }
    }
    throw FixedPointDivergence("solve_remainder_nonlinear: no convergence within fp_max_iter",
                               res.outer_history);
}

// ---------------------------------------------------------------------------
// Residual reports
// ---------------------------------------------------------------------------

double skew_symmetry_defect(const ScalarField& rho0, const ScalarField& theta0,
                            const VectorField& uR, const ScalarField& thetaR,
                            const ScalarField& rhoR) {
    const VectorField w = rho0 * uR;
    const ScalarField combo = rho0 * thetaR + rhoR * theta0;
    return std::abs(integrate(dot(w, grad(combo)) + div(w) * combo));
}

RemainderResidual residual_linearized(const RemainderState& state, const LimitingSolution& lim,
                                      const FirstOrderSolution& fo, const VectorField& u_R_tilde,
                                      const ScalarField& theta_R_tilde, const Params& params) {
    const double e = params.epsilon;
    SourceTerms src = assemble_sources(lim, fo, params);
    assemble_R_terms(src, lim, fo, u_R_tilde, params);
    const VectorField U = lim.u1 + e * (fo.u2 + u_R_tilde);

    RemainderResidual r{};
    r.continuity = l2_norm(div(state.rhoR * U) + (1.0 / e) * div(lim.rho0 * state.uR) - src.R1);

    const VectorField Ft = eval_F_tilde(lim, fo, state.rhoR, state.uR, state.thetaR, u_R_tilde,
                                        theta_R_tilde, params);
    const VectorField mom =
        params.mu * laplacian(state.uR) + params.zeta() * grad(div(state.uR)) -
        (1.0 / e) * grad(lim.rho0 * state.thetaR + state.rhoR * lim.theta0) -
        lim.rho0 * (advect(lim.u1, state.uR) + advect(state.uR, lim.u1)) -
        grad(state.rhoR * fo.theta1 + fo.rho1 * state.thetaR) - Ft - src.R2;
    r.momentum = l2_norm(mom);

    const ScalarField Gt = eval_G_tilde(lim, fo, state.rhoR, state.uR, state.thetaR, u_R_tilde,
                                        theta_R_tilde, params);
    const ScalarField inv_theta0 = 1.0 / lim.theta0;
    const ScalarField en =
        params.kappa * inv_theta0 * laplacian(state.thetaR) -
        (1.0 / e) * div(lim.rho0 * state.uR) - fo.P1 * inv_theta0 * div(state.uR) -
        inv_theta0 * ((lim.rho0 * state.thetaR + state.rhoR * lim.theta0) * div(lim.u1)) -
        inv_theta0 * Gt - src.R3 -
        inv_theta0 * (lim.rho0 * (advect(state.uR, fo.theta1) + advect(lim.u1, state.thetaR)) +
                      fo.rho1 * advect(state.uR, lim.theta0) +
                      state.rhoR * advect(lim.u1, lim.theta0));
    r.energy = l2_norm(en);

    r.skew_symmetry =
        skew_symmetry_defect(lim.rho0, lim.theta0, state.uR, state.thetaR, state.rhoR);
    r.mass_gauge = std::abs(integrate(state.rhoR));
    return r;
}

RemainderResidual residual_nonlinear(const RemainderState& state, const LimitingSolution& lim,
                                     const FirstOrderSolution& fo, const Params& params) {
    const double e = params.epsilon;
    const SourceTerms src = assemble_sources(lim, fo, params);
    const ScalarField rho_123 = fo.rho1 + e * fo.rho2 + (e * e) * fo.rho3;

    RemainderResidual r{};
    r.continuity = l2_norm(div(state.rhoR * (lim.u1 + e * (fo.u2 + state.uR))) +
                           (1.0 / e) * div(lim.rho0 * state.uR) + div(rho_123 * state.uR) -
                           src.r1);

    const VectorField Fe = eval_F_eps(lim, fo, state.rhoR, state.uR, state.thetaR, params);
    const VectorField mom =
        params.mu * laplacian(state.uR) + params.zeta() * grad(div(state.uR)) -
        (1.0 / e) * grad(lim.rho0 * state.thetaR + state.rhoR * lim.theta0) -
        lim.rho0 * (advect(lim.u1, state.uR) + advect(state.uR, lim.u1)) -
        grad(state.rhoR * fo.theta1 + fo.rho1 * state.thetaR) - Fe - src.r2;
    r.momentum = l2_norm(mom);

    const ScalarField Ge = eval_G_eps(lim, fo, state.rhoR, state.uR, state.thetaR, params);
    const ScalarField inv_theta0 = 1.0 / lim.theta0;
    const ScalarField psi =
        dissipation(lim.u1 + e * (fo.u2 + state.uR), params.mu, params.lambda);
    const ScalarField en =
        params.kappa * inv_theta0 * laplacian(state.thetaR) -
        (1.0 / e) * div(lim.rho0 * state.uR) + inv_theta0 * psi -
        inv_theta0 * ((lim.rho0 * fo.theta1 + fo.rho1 * lim.theta0) * div(state.uR)) -
        inv_theta0 * (lim.rho0 * (advect(state.uR, fo.theta1) + advect(lim.u1, state.thetaR)) +
                      fo.rho1 * advect(state.uR, lim.theta0) +
                      state.rhoR * advect(lim.u1, lim.theta0)) -
        inv_theta0 * Ge - inv_theta0 * src.r3 -
        inv_theta0 * ((lim.rho0 * state.thetaR + state.rhoR * lim.theta0) * div(lim.u1));
    r.energy = l2_norm(en);

    r.skew_symmetry =
        skew_symmetry_defect(lim.rho0, lim.theta0, state.uR, state.thetaR, state.rhoR);
    r.mass_gauge = std::abs(integrate(state.rhoR));
    return r;
}

}  // namespace ghostflow
