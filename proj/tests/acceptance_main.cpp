// Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.
//
// The expensive artifacts (one 64x64 sweep over eps = 0.2, 0.1, 0.05, 0.025
// with the full expansion chain and the independent Newton solve per eps) are
// computed once and shared across the criteria that consume them.
#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "ghostflow/harness.hpp"
#include "test_support.hpp"

using namespace ghostflow;

namespace {

int checks_failed = 0;

void report(int criterion, const char* label, bool pass, const std::string& detail) {
    std::printf("criterion %d [%s]: %s  (%s)\n", criterion, label, pass ? "PASS" : "FAIL",
                detail.c_str());
    if (!pass) ++checks_failed;
}

std::string fmt(const char* pattern, auto... vals) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), pattern, vals...);
    return buf;
}

struct EpsCase {
    double eps;
    NonlinearRemainderResult chain;
    FullState expansion;
    FullState newton_state;
    int newton_iters = 0;
};

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();

    const int n = 64;
    const double delta = 0.05;
    const std::vector<double> eps_list = {0.2, 0.1, 0.05, 0.025};
    Grid grid(n, n);
    WallData walls = WallData::cosine(grid, delta);
    Params params;
    params.epsilon = eps_list.front();

    LimitingSolution lim = solve_limiting(grid, walls, params);

    std::vector<EpsCase> cases;
    bool sweep_ok = true;
    std::string sweep_err;
    try {
        for (double eps : eps_list) {
            Params prm = params;
            prm.epsilon = eps;
            EpsCase c;
            c.eps = eps;
            c.chain = solve_remainder_nonlinear(lim, prm);
            c.expansion = assemble_expansion(lim, c.chain.fo, c.chain.rem, prm);
            NewtonReport nr = solve_full_newton(walls, prm, c.expansion);
            c.newton_state = nr.state;
            c.newton_iters = nr.iterations;
            cases.push_back(std::move(c));
        }
    } catch (const SolverError& e) {
        sweep_ok = false;
        sweep_err = e.what();
    }
    const double sweep_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    // ---- criterion 1: convergence rates against the Newton reference -------
    //
    // The u/rho/theta bands assume the Theorem's O(eps) bounds are sharp; the
    // boundary-value problem is invariant under (eps, u) -> (-eps, -u), which
    // forces rho1 = theta1 = u2 = rho3 = 0 and makes every deviation Theta(eps^2)
    // (see the L infinity sweep: the expansion-referenced slopes printed below
    // are 2.00 to three digits). The gradP band matches the true eps^2 rate.
    if (sweep_ok) {
        std::vector<double> eps, du, drho, dth, dgp, xu, xrho, xth;
        for (const EpsCase& c : cases) {
            eps.push_back(c.eps);
            du.push_back(sobolev_norm((1.0 / c.eps) * c.newton_state.u - lim.u1, 2));
            drho.push_back(sobolev_norm(c.newton_state.rho - lim.rho0, 2));
            dth.push_back(sobolev_norm(c.newton_state.theta - lim.theta0, 3));
            dgp.push_back(sobolev_norm(grad(c.newton_state.P), 1));
            xu.push_back(sobolev_norm((1.0 / c.eps) * c.expansion.u - lim.u1, 2));
            xrho.push_back(sobolev_norm(c.expansion.rho - lim.rho0, 2));
            xth.push_back(sobolev_norm(c.expansion.theta - lim.theta0, 3));
        }
        SlopeFit su = fit_slope(eps, du), srho = fit_slope(eps, drho), sth = fit_slope(eps, dth),
                 sgp = fit_slope(eps, dgp);
        SlopeFit eu = fit_slope(eps, xu), erho = fit_slope(eps, xrho), eth = fit_slope(eps, xth);
        const bool in_u = su.valid && su.slope >= 0.8 && su.slope <= 1.5;
        const bool in_rho = srho.valid && srho.slope >= 0.8 && srho.slope <= 1.5;
        const bool in_th = sth.valid && sth.slope >= 0.8 && sth.slope <= 1.5;
        const bool in_gp = sgp.valid && sgp.slope >= 1.7 && sgp.slope <= 2.5;
        const bool in_time = sweep_seconds <= 900.0;
        report(1, "rates",
               in_u && in_rho && in_th && in_gp && in_time,
               fmt("newton-ref slopes u %.2f rho %.2f theta %.2f gradP %.2f (bands [0.8,1.5]^3, "
                   "[1.7,2.5]); expansion-ref u %.2f rho %.2f theta %.2f; sweep %.0f s",
                   su.slope, srho.slope, sth.slope, sgp.slope, eu.slope, erho.slope, eth.slope,
                   sweep_seconds));
    } else {
        report(1, "rates", false, "sweep failed: " + sweep_err);
    }

    // ---- criterion 2: uniform remainder bound ------------------------------
    if (sweep_ok) {
        double lo = 1e300, hi = 0.0;
        for (const EpsCase& c : cases) {
            const double triple =
                c.chain.rem.norm_rho_H2 + c.chain.rem.norm_u_K + c.chain.rem.norm_theta_H3;
            lo = std::min(lo, triple);
            hi = std::max(hi, triple);
        }
        report(2, "uniform-remainder", hi / lo <= 3.0, fmt("max/min = %.3f", hi / lo));
    } else {
        report(2, "uniform-remainder", false, "sweep failed");
    }

    // ---- criterion 3: exactness of the composition -------------------------
    if (sweep_ok) {
        bool residual_ok = true;
        std::string detail;
        for (const EpsCase& c : cases) {
            Params prm = params;
            prm.epsilon = c.eps;
            FullResidual r = residual_full(c.expansion, walls, prm);
            // scale of each equation: sum of the L2 norms of its terms
            const ScalarField P = c.expansion.rho * c.expansion.theta;
            const double sc_c = l2_norm(div(c.expansion.rho * c.expansion.u)) +
                                l2_norm(c.expansion.rho * c.expansion.u);
            const double sc_m =
                l2_norm(c.expansion.rho * advect(c.expansion.u, c.expansion.u)) +
                l2_norm(grad(P)) +
                c.eps * (params.mu * l2_norm(laplacian(c.expansion.u)) +
                         params.zeta() * l2_norm(grad(div(c.expansion.u))));
            const double sc_e = l2_norm(P * div(c.expansion.u)) +
                                c.eps * params.kappa * l2_norm(laplacian(c.expansion.theta)) +
                                c.eps * l2_norm(dissipation(c.expansion.u, params.mu, params.lambda));
            const double band = std::max(10.0 * params.fp_tol, 20.0 * grid.hx * grid.hx);
            if (r.continuity > band * sc_c || r.momentum > band * sc_m || r.energy > band * sc_e) {
                residual_ok = false;
                detail = fmt("eps %.3g: cont %.2e/%.2e mom %.2e/%.2e en %.2e/%.2e", c.eps,
                             r.continuity, band * sc_c, r.momentum, band * sc_m, r.energy,
                             band * sc_e);
            }
        }
        // remainder-free momentum residual decays at O(eps^3)
        std::vector<double> eps3{0.2, 0.1, 0.05}, res3;
        for (double eps : eps3) {
            Params prm = params;
            prm.epsilon = eps;
            for (const EpsCase& c : cases)
                if (c.eps == eps) {
                    FullState trunc = assemble_expansion(lim, c.chain.fo, prm);
                    res3.push_back(residual_full(trunc, walls, prm).momentum);
                }
        }
        SlopeFit s3 = fit_slope(eps3, res3);
        const bool slope_ok = s3.valid && s3.slope >= 2.5;
        report(3, "exactness", residual_ok && slope_ok,
               fmt("%s; remainder-free momentum slope %.3f",
                   residual_ok ? "residual bands ok" : detail.c_str(), s3.slope));
    } else {
        report(3, "exactness", false, "sweep failed");
    }

    // ---- criterion 4: rest-state degeneracy --------------------------------
    try {
        WallData flat(grid, 1.0);
        Params prm = params;
        prm.epsilon = 0.1;
        LimitingSolution rl = solve_limiting(grid, flat, prm);
        NonlinearRemainderResult rr = solve_remainder_nonlinear(rl, prm);
        const double tiers =
            linf_norm(rl.u1) + linf_norm(rl.P2) + linf_norm(rl.theta0 - 1.0) +
            linf_norm(rl.rho0 - prm.M) + linf_norm(rr.fo.u2) + linf_norm(rr.fo.theta1) +
            linf_norm(rr.rem.uR) + linf_norm(rr.rem.thetaR) + linf_norm(rr.rem.rhoR);
        NewtonReport nr = solve_full_newton(flat, prm, FullState::rest(grid, prm));
        const bool pass = tiers <= 1e-10 && nr.iterations <= 2 &&
                          linf_norm(nr.state.u) < 1e-10;
        report(4, "rest-state", pass,
               fmt("tier sum %.2e, newton iters %d", tiers, nr.iterations));
    } catch (const SolverError& e) {
        report(4, "rest-state", false, e.what());
    }

    // ---- criterion 5: manufactured-solution corpus orders ------------------
    {
        auto order_of = [](const std::vector<double>& errs) {
            double worst = 1e300;
            for (size_t k = 1; k < errs.size(); ++k)
                worst = std::min(worst, std::log2(errs[k - 1] / errs[k]));
            return worst;
        };
        const std::vector<int> sizes = {16, 32, 64};
        std::vector<double> e_dir, e_neu, e_stokes;
        for (int m : sizes) {
            Grid g(m, m);
            const double lam = 4.0 * M_PI * M_PI + M_PI * M_PI;
            ScalarField ustar = ScalarField::sample(g, [](double x, double y) {
                return std::sin(2.0 * M_PI * x) * std::sin(M_PI * y);
            });
            ScalarField u = solve_poisson_dirichlet((-lam) * ustar, Eigen::ArrayXd::Zero(g.nx),
                                                    Eigen::ArrayXd::Zero(g.nx));
            e_dir.push_back(linf_norm(u - ustar));

            ScalarField qstar = ScalarField::sample(g, [](double x, double y) {
                return std::cos(2.0 * M_PI * x) * std::cos(M_PI * y);
            });
            ScalarField q = solve_poisson_neumann((-lam) * qstar);
            e_neu.push_back(linf_norm(q - qstar));

            const double mu = 0.8;
            auto vx = [](double x, double y) { return std::sin(2.0 * M_PI * x) * std::sin(M_PI * y); };
            auto vy = [](double x, double y) {
                return 2.0 * std::cos(2.0 * M_PI * x) * std::cos(M_PI * y);
            };
            VectorField f(
                ScalarField::sample(g,
                                    [&](double x, double y) {
                                        return mu * lam * vx(x, y) -
                                               2.0 * M_PI * std::sin(2.0 * M_PI * x);
                                    }),
                ScalarField::sample(g, [&](double x, double y) { return mu * lam * vy(x, y); }));
            WallVelocity bc_b{Eigen::ArrayXd(g.nx), Eigen::ArrayXd(g.nx)};
            WallVelocity bc_t{Eigen::ArrayXd(g.nx), Eigen::ArrayXd(g.nx)};
            for (int i = 0; i < g.nx; ++i) {
                bc_b.x[i] = vx(g.x(i), 0.0);
                bc_b.y[i] = vy(g.x(i), 0.0);
                bc_t.x[i] = vx(g.x(i), g.ly);
                bc_t.y[i] = vy(g.x(i), g.ly);
            }
            StokesSolution s = solve_stokes(mu, f, ScalarField(g), bc_b, bc_t, 0.0);
            double err = std::max(linf_norm(s.velocity.x() - ScalarField::sample(g, vx)),
                                  linf_norm(s.velocity.y() - ScalarField::sample(g, vy)));
            err = std::max(err, linf_norm(s.pressure - ScalarField::sample(g, [](double x, double) {
                                              return std::cos(2.0 * M_PI * x);
                                          })));
            e_stokes.push_back(err);
        }
        const double o_dir = order_of(e_dir), o_neu = order_of(e_neu), o_st = order_of(e_stokes);
        report(5, "solver-corpus", o_dir >= 1.8 && o_neu >= 1.8 && o_st >= 1.8,
               fmt("orders: dirichlet %.2f neumann %.2f stokes %.2f", o_dir, o_neu, o_st));
    }

    // ---- criterion 6: gauge and Boussinesq invariants ----------------------
    if (sweep_ok) {
        double worst_gauge = 0.0, worst_b0 = 0.0, worst_b1 = 0.0;
        for (const EpsCase& c : cases) {
            worst_gauge = std::max({worst_gauge, std::abs(integrate(c.chain.fo.rho1)),
                                    std::abs(integrate(c.chain.fo.rho2)),
                                    std::abs(integrate(c.chain.fo.rho3)),
                                    std::abs(integrate(c.chain.rem.rhoR))});
            worst_b0 = std::max(worst_b0, (lim.rho0 * lim.theta0 - lim.P0).max_abs());
            worst_b1 = std::max(
                worst_b1,
                (c.chain.fo.rho1 * lim.theta0 + lim.rho0 * c.chain.fo.theta1 - c.chain.fo.P1)
                    .max_abs());
        }
        report(6, "gauges", worst_gauge <= 1e-8 && worst_b0 <= 1e-12 && worst_b1 <= 1e-12,
               fmt("max |int rho_i| %.2e, |rho0 th0 - P0| %.2e, |rho1 th0 + rho0 th1 - P1| %.2e",
                   worst_gauge, worst_b0, worst_b1));
    } else {
        report(6, "gauges", false, "sweep failed");
    }

    // ---- criterion 7: skew-symmetry diagnostic -----------------------------
    {
        auto defect = [](int m) {
            Grid g(m, m);
            std::mt19937_64 rng(2026);
            ScalarField rho0 =
                1.0 + 0.3 * ghostflow::test::random_smooth_field(g, rng, false, 3, 0.5);
            ScalarField theta0 =
                1.0 + 0.3 * ghostflow::test::random_smooth_field(g, rng, false, 3, 0.5);
            VectorField uR = ghostflow::test::random_smooth_vector(g, rng, true, 1.0);
            ScalarField thetaR = ghostflow::test::random_smooth_field(g, rng, false, 3, 1.0);
            ScalarField rhoR = ghostflow::test::random_smooth_field(g, rng, false, 3, 1.0);
            return skew_symmetry_defect(rho0, theta0, uR, thetaR, rhoR);
        };
        const double d48 = defect(48), d96 = defect(96), d192 = defect(192);
        const double slope = std::min(std::log2(d48 / d96), std::log2(d96 / d192));
        report(7, "skew-symmetry", slope >= 1.8 && d96 < 1e-2,
               fmt("defects %.2e / %.2e / %.2e, slope %.2f", d48, d96, d192, slope));
    }

    // ---- criterion 8: cross-initial-guess uniqueness -----------------------
    if (sweep_ok) {
        try {
            Params prm = params;
            prm.epsilon = 0.1;
            const EpsCase* c01 = nullptr;
            for (const EpsCase& c : cases)
                if (c.eps == 0.1) c01 = &c;
            NewtonReport from_rest = solve_full_newton(walls, prm, FullState::rest(grid, prm));
            const double gap =
                sobolev_norm(from_rest.state.u - c01->newton_state.u, 1) +
                sobolev_norm(from_rest.state.rho - c01->newton_state.rho, 1) +
                sobolev_norm(from_rest.state.theta - c01->newton_state.theta, 1);
            report(8, "uniqueness", gap <= 1e-6, fmt("H1 gap %.2e", gap));
        } catch (const SolverError& e) {
            report(8, "uniqueness", false, e.what());
        }
    } else {
        report(8, "uniqueness", false, "sweep failed");
    }

    const double total =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("acceptance total: %.1f s, %d criterion(s) failed\n", total, checks_failed);
    return checks_failed == 0 ? 0 : 1;
}
