#include "ghostflow/full_ns.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace ghostflow {

FullState assemble_expansion(const LimitingSolution& lim, const FirstOrderSolution& fo,
                             const RemainderState& rem, const Params& params) {
    const double e = params.epsilon;
    FullState s;
    s.epsilon = e;
    s.rho = lim.rho0 + e * fo.rho1 + (e * e) * fo.rho2 + (e * e * e) * fo.rho3 +
            (e * e) * rem.rhoR;
    s.u = e * lim.u1 + (e * e) * fo.u2 + (e * e) * rem.uR;
    s.theta = lim.theta0 + e * fo.theta1 + (e * e) * rem.thetaR;
    s.P = s.rho * s.theta;
    return s;
}

FullState assemble_expansion(const LimitingSolution& lim, const FirstOrderSolution& fo,
                             const Params& params) {
    const double e = params.epsilon;
    FullState s;
    s.epsilon = e;
    s.rho = lim.rho0 + e * fo.rho1 + (e * e) * fo.rho2 + (e * e * e) * fo.rho3;
    s.u = e * lim.u1 + (e * e) * fo.u2;
    s.theta = lim.theta0 + e * fo.theta1;
    s.P = s.rho * s.theta;
    return s;
}

FullResidual residual_full(const FullState& state, const WallData& /*walls*/,
                           const Params& params) {
    const double e = state.epsilon;
    FullResidual r{};
    r.continuity = l2_norm(div(state.rho * state.u));
    const VectorField mom = state.rho * advect(state.u, state.u) + grad(state.rho * state.theta) -
                            e * (params.mu * laplacian(state.u) +
                                 params.zeta() * grad(div(state.u)));
    r.momentum = l2_norm(mom);
    const ScalarField en = state.rho * advect(state.u, state.theta) +
                           (state.rho * state.theta) * div(state.u) -
                           e * params.kappa * laplacian(state.theta) -
                           e * dissipation(state.u, params.mu, params.lambda);
    r.energy = l2_norm(en);
    r.mass_defect = std::abs(integrate(state.rho) - params.M);
    return r;
}

// ---------------------------------------------------------------------------
// Newton solver
// ---------------------------------------------------------------------------

namespace {

using Triplet = Eigen::Triplet<double>;
using SpMat = Eigen::SparseMatrix<double>;

struct NewtonSystem {
    const Grid& g;
    const Params& prm;
    const WallData& walls;
    Eigen::ArrayXd bc_ux_b, bc_ux_t;  // eps h(T_w) dT_w/dx
    int N;

    NewtonSystem(const Grid& g_, const Params& p_, const WallData& w_)
        : g(g_), prm(p_), walls(w_), N(g_.size()) {
        const Eigen::ArrayXd dT_b = tangential_wall_derivative(walls, WallSide::bottom);
        const Eigen::ArrayXd dT_t = tangential_wall_derivative(walls, WallSide::top);
        bc_ux_b.resize(g.nx);
        bc_ux_t.resize(g.nx);
        for (int i = 0; i < g.nx; ++i) {
            bc_ux_b[i] = prm.epsilon * walls.h(walls.t_bottom[i]) * dT_b[i];
            bc_ux_t[i] = prm.epsilon * walls.h(walls.t_top[i]) * dT_t[i];
        }
    }

    int irho(int i, int j) const { return g.idx(g.wrap(i), j); }
    int iux(int i, int j) const { return N + g.idx(g.wrap(i), j); }
    int iuy(int i, int j) const { return 2 * N + g.idx(g.wrap(i), j); }
    int ith(int i, int j) const { return 3 * N + g.idx(g.wrap(i), j); }
    int ilam() const { return 4 * N; }

    double wq(int j) const { return g.hx * ((j == 0 || j == g.ny - 1) ? 0.5 * g.hy : g.hy); }

    // Residual and (optionally) Jacobian triplets of the discrete system.
    Eigen::VectorXd residual(const Eigen::VectorXd& U, std::vector<Triplet>* J) const {
        const double e = prm.epsilon, mu = prm.mu, zeta = prm.zeta(), kappa = prm.kappa;
        const double lam = U[ilam()];
        // Rhie-Chow face coefficient: inverse of the momentum diagonal
        const double drc =
            1.0 / (e * 2.0 * mu * (1.0 / (g.hx * g.hx) + 1.0 / (g.hy * g.hy)));
        Eigen::VectorXd R = Eigen::VectorXd::Zero(4 * N + 1);

        auto rho = [&](int i, int j) { return U[irho(i, j)]; };
        auto ux = [&](int i, int j) { return U[iux(i, j)]; };
        auto uy = [&](int i, int j) { return U[iuy(i, j)]; };
        auto th = [&](int i, int j) { return U[ith(i, j)]; };

        const double cx = 1.0 / (2.0 * g.hx), cy = 1.0 / (2.0 * g.hy);
        const double cxx = 1.0 / (g.hx * g.hx), cyy = 1.0 / (g.hy * g.hy);

        auto add = [&](int r, int c, double v) {
            if (J && v != 0.0) J->emplace_back(r, c, v);
        };

        // --- continuity: conservative upwind-biased fluxes + mass multiplier ---
        // second-order linear reconstruction toward the face,
        // rho_face = 1.5 rho_up - 0.5 rho_upup, falling back to first order
        // when the second upwind neighbour leaves the domain; low-order
        // reconstruction would leave mesh-rough density error that the H^2
        // deviation norms of the harness amplify by 1/h^2
        for (int i = 0; i < g.nx; ++i) {
            const int ip = g.wrap(i + 1);
            for (int j = 0; j < g.ny; ++j) {
                // x-face (i+1/2, j) feeds nodes i (out) and i+1 (in)
                const double uf = 0.5 * (ux(i, j) + ux(ip, j));
                const int upi = (uf >= 0.0) ? i : ip;
                const int upi2 = (uf >= 0.0) ? g.wrap(i - 1) : g.wrap(i + 2);
                const double rface = 1.5 * rho(upi, j) - 0.5 * rho(upi2, j);
                const double flx = uf * rface;
                const double inv = 1.0 / g.hx;
                R[irho(i, j)] += flx * inv;
                R[irho(ip, j)] -= flx * inv;
                add(irho(i, j), irho(upi, j), 1.5 * uf * inv);
                add(irho(i, j), irho(upi2, j), -0.5 * uf * inv);
                add(irho(ip, j), irho(upi, j), -1.5 * uf * inv);
                add(irho(ip, j), irho(upi2, j), 0.5 * uf * inv);
                add(irho(i, j), iux(i, j), 0.5 * rface * inv);
                add(irho(i, j), iux(ip, j), 0.5 * rface * inv);
                add(irho(ip, j), iux(i, j), -0.5 * rface * inv);
                add(irho(ip, j), iux(ip, j), -0.5 * rface * inv);

                // pressure-weighted mass flux (Rhie-Chow): the compact-minus-
                // central face pressure gradient damps the odd-even rho mode
                // the central momentum gradient cannot see; O(h^2) consistent
                {
                    const int ip2 = g.wrap(i + 2), im = g.wrap(i - 1);
                    const double c = drc / (4.0 * g.hx);
                    const double fs = c * (rho(ip2, j) * th(ip2, j) - 3.0 * rho(ip, j) * th(ip, j) +
                                           3.0 * rho(i, j) * th(i, j) - rho(im, j) * th(im, j));
                    R[irho(i, j)] += fs * inv;
                    R[irho(ip, j)] -= fs * inv;
                    const int cols[4] = {ip2, ip, i, im};
                    const double wts[4] = {1.0, -3.0, 3.0, -1.0};
                    for (int q = 0; q < 4; ++q) {
                        add(irho(i, j), irho(cols[q], j), inv * c * wts[q] * th(cols[q], j));
                        add(irho(i, j), ith(cols[q], j), inv * c * wts[q] * rho(cols[q], j));
                        add(irho(ip, j), irho(cols[q], j), -inv * c * wts[q] * th(cols[q], j));
                        add(irho(ip, j), ith(cols[q], j), -inv * c * wts[q] * rho(cols[q], j));
                    }
                }
            }
            for (int j = 0; j < g.ny - 1; ++j) {
                // y-face (i, j+1/2); wall half-cells have width hy/2
                const double vf = 0.5 * (uy(i, j) + uy(i, j + 1));
                const int upj = (vf >= 0.0) ? j : j + 1;
                const int upj2 = (vf >= 0.0) ? j - 1 : j + 2;
                const bool second = (upj2 >= 0 && upj2 <= g.ny - 1);
                const double c1 = second ? 1.5 : 1.0, c2 = second ? -0.5 : 0.0;
                const double rface = c1 * rho(i, upj) + (second ? c2 * rho(i, upj2) : 0.0);
                const double fly = vf * rface;
                const double s_lo = (j == 0) ? 2.0 / g.hy : 1.0 / g.hy;
                const double s_hi = (j + 1 == g.ny - 1) ? 2.0 / g.hy : 1.0 / g.hy;
                R[irho(i, j)] += fly * s_lo;
                R[irho(i, j + 1)] -= fly * s_hi;
                add(irho(i, j), irho(i, upj), c1 * vf * s_lo);
                add(irho(i, j + 1), irho(i, upj), -c1 * vf * s_hi);
                if (second) {
                    add(irho(i, j), irho(i, upj2), c2 * vf * s_lo);
                    add(irho(i, j + 1), irho(i, upj2), -c2 * vf * s_hi);
                }
                add(irho(i, j), iuy(i, j), 0.5 * rface * s_lo);
                add(irho(i, j), iuy(i, j + 1), 0.5 * rface * s_lo);
                add(irho(i, j + 1), iuy(i, j), -0.5 * rface * s_hi);
                add(irho(i, j + 1), iuy(i, j + 1), -0.5 * rface * s_hi);

                if (j >= 1 && j + 2 <= g.ny - 1) {  // interior y-faces only
                    const double c = drc / (4.0 * g.hy);
                    const double fs =
                        c * (rho(i, j + 2) * th(i, j + 2) - 3.0 * rho(i, j + 1) * th(i, j + 1) +
                             3.0 * rho(i, j) * th(i, j) - rho(i, j - 1) * th(i, j - 1));
                    R[irho(i, j)] += fs * s_lo;
                    R[irho(i, j + 1)] -= fs * s_hi;
                    const int cols[4] = {j + 2, j + 1, j, j - 1};
                    const double wts[4] = {1.0, -3.0, 3.0, -1.0};
                    for (int q = 0; q < 4; ++q) {
                        add(irho(i, j), irho(i, cols[q]), s_lo * c * wts[q] * th(i, cols[q]));
                        add(irho(i, j), ith(i, cols[q]), s_lo * c * wts[q] * rho(i, cols[q]));
                        add(irho(i, j + 1), irho(i, cols[q]), -s_hi * c * wts[q] * th(i, cols[q]));
                        add(irho(i, j + 1), ith(i, cols[q]), -s_hi * c * wts[q] * rho(i, cols[q]));
                    }
                }
            }
            // wall faces: flux uy*rho evaluated at the wall node itself
            {
                const double fb = uy(i, 0) * rho(i, 0);
                R[irho(i, 0)] -= fb * 2.0 / g.hy;
                add(irho(i, 0), iuy(i, 0), -rho(i, 0) * 2.0 / g.hy);
                add(irho(i, 0), irho(i, 0), -uy(i, 0) * 2.0 / g.hy);
                const int jt = g.ny - 1;
                const double ft = uy(i, jt) * rho(i, jt);
                R[irho(i, jt)] += ft * 2.0 / g.hy;
                add(irho(i, jt), iuy(i, jt), rho(i, jt) * 2.0 / g.hy);
                add(irho(i, jt), irho(i, jt), uy(i, jt) * 2.0 / g.hy);
            }
            for (int j = 0; j < g.ny; ++j) {
                R[irho(i, j)] += lam;
                add(irho(i, j), ilam(), 1.0);
            }
        }

        // --- momentum and energy ---
        for (int i = 0; i < g.nx; ++i) {
            const int ip = g.wrap(i + 1), im = g.wrap(i - 1);
            for (int j = 0; j < g.ny; ++j) {
                if (j == 0 || j == g.ny - 1) {
                    const bool bottom = (j == 0);
                    R[iux(i, j)] = ux(i, j) - (bottom ? bc_ux_b[i] : bc_ux_t[i]);
                    R[iuy(i, j)] = uy(i, j);
                    R[ith(i, j)] = th(i, j) - (bottom ? walls.t_bottom[i] : walls.t_top[i]);
                    add(iux(i, j), iux(i, j), 1.0);
                    add(iuy(i, j), iuy(i, j), 1.0);
                    add(ith(i, j), ith(i, j), 1.0);
                    continue;
                }
                const double r0 = rho(i, j);
                const double uxv = ux(i, j), uyv = uy(i, j), thv = th(i, j);

                const double dux_dx = cx * (ux(ip, j) - ux(im, j));
                const double dux_dy = cy * (ux(i, j + 1) - ux(i, j - 1));
                const double duy_dx = cx * (uy(ip, j) - uy(im, j));
                const double duy_dy = cy * (uy(i, j + 1) - uy(i, j - 1));
                const double dth_dx = cx * (th(ip, j) - th(im, j));
                const double dth_dy = cy * (th(i, j + 1) - th(i, j - 1));
                const double divu = dux_dx + duy_dy;

                const double lap_ux = cxx * (ux(ip, j) - 2 * uxv + ux(im, j)) +
                                      cyy * (ux(i, j + 1) - 2 * uxv + ux(i, j - 1));
                const double lap_uy = cxx * (uy(ip, j) - 2 * uyv + uy(im, j)) +
                                      cyy * (uy(i, j + 1) - 2 * uyv + uy(i, j - 1));
                const double lap_th = cxx * (th(ip, j) - 2 * thv + th(im, j)) +
                                      cyy * (th(i, j + 1) - 2 * thv + th(i, j - 1));

                // grad(div u) by composing central stencils
                const double ddivu_dx =
                    cxx * (ux(ip, j) - 2 * uxv + ux(im, j)) +
                    cx * cy * (uy(ip, j + 1) - uy(ip, j - 1) - uy(im, j + 1) + uy(im, j - 1));
                const double ddivu_dy =
                    cx * cy * (ux(ip, j + 1) - ux(im, j + 1) - ux(ip, j - 1) + ux(im, j - 1)) +
                    cyy * (uy(i, j + 1) - 2 * uyv + uy(i, j - 1));

                const double dP_dx = cx * (rho(ip, j) * th(ip, j) - rho(im, j) * th(im, j));
                const double dP_dy = cy * (rho(i, j + 1) * th(i, j + 1) - rho(i, j - 1) * th(i, j - 1));

                // x-momentum
                R[iux(i, j)] = r0 * (uxv * dux_dx + uyv * dux_dy) + dP_dx -
                               e * (mu * lap_ux + zeta * ddivu_dx);
                // y-momentum
                R[iuy(i, j)] = r0 * (uxv * duy_dx + uyv * duy_dy) + dP_dy -
                               e * (mu * lap_uy + zeta * ddivu_dy);
                // energy
                const double shear = dux_dy + duy_dx;
                const double psi = 2.0 * mu * (dux_dx * dux_dx + duy_dy * duy_dy) +
                                   mu * shear * shear + prm.lambda * divu * divu;
                R[ith(i, j)] = r0 * (uxv * dth_dx + uyv * dth_dy) + r0 * thv * divu -
                               e * kappa * lap_th - e * psi;

                if (!J) continue;

                // x-momentum Jacobian
                add(iux(i, j), irho(i, j), uxv * dux_dx + uyv * dux_dy);
                add(iux(i, j), iux(i, j), r0 * dux_dx + 2.0 * e * mu * (cxx + cyy) +
                                              2.0 * e * zeta * cxx);
                add(iux(i, j), iux(ip, j), r0 * uxv * cx - e * (mu + zeta) * cxx);
                add(iux(i, j), iux(im, j), -r0 * uxv * cx - e * (mu + zeta) * cxx);
                add(iux(i, j), iux(i, j + 1), r0 * uyv * cy - e * mu * cyy);
                add(iux(i, j), iux(i, j - 1), -r0 * uyv * cy - e * mu * cyy);
                add(iux(i, j), iuy(i, j), r0 * dux_dy);
                add(iux(i, j), iuy(ip, j + 1), -e * zeta * cx * cy);
                add(iux(i, j), iuy(ip, j - 1), e * zeta * cx * cy);
                add(iux(i, j), iuy(im, j + 1), e * zeta * cx * cy);
                add(iux(i, j), iuy(im, j - 1), -e * zeta * cx * cy);
                add(iux(i, j), irho(ip, j), cx * th(ip, j));
                add(iux(i, j), irho(im, j), -cx * th(im, j));
                add(iux(i, j), ith(ip, j), cx * rho(ip, j));
                add(iux(i, j), ith(im, j), -cx * rho(im, j));

                // y-momentum Jacobian
                add(iuy(i, j), irho(i, j), uxv * duy_dx + uyv * duy_dy);
                add(iuy(i, j), iuy(i, j), r0 * duy_dy + 2.0 * e * mu * (cxx + cyy) +
                                              2.0 * e * zeta * cyy);
                add(iuy(i, j), iuy(ip, j), r0 * uxv * cx - e * mu * cxx);
                add(iuy(i, j), iuy(im, j), -r0 * uxv * cx - e * mu * cxx);
                add(iuy(i, j), iuy(i, j + 1), r0 * uyv * cy - e * (mu + zeta) * cyy);
                add(iuy(i, j), iuy(i, j - 1), -r0 * uyv * cy - e * (mu + zeta) * cyy);
                add(iuy(i, j), iux(i, j), r0 * duy_dx);
                add(iuy(i, j), iux(ip, j + 1), -e * zeta * cx * cy);
                add(iuy(i, j), iux(im, j + 1), e * zeta * cx * cy);
                add(iuy(i, j), iux(ip, j - 1), e * zeta * cx * cy);
                add(iuy(i, j), iux(im, j - 1), -e * zeta * cx * cy);
                add(iuy(i, j), irho(i, j + 1), cy * th(i, j + 1));
                add(iuy(i, j), irho(i, j - 1), -cy * th(i, j - 1));
                add(iuy(i, j), ith(i, j + 1), cy * rho(i, j + 1));
                add(iuy(i, j), ith(i, j - 1), -cy * rho(i, j - 1));

                // energy Jacobian
                add(ith(i, j), irho(i, j), uxv * dth_dx + uyv * dth_dy + thv * divu);
                add(ith(i, j), ith(i, j), r0 * divu + 2.0 * e * kappa * (cxx + cyy));
                add(ith(i, j), ith(ip, j), r0 * uxv * cx - e * kappa * cxx);
                add(ith(i, j), ith(im, j), -r0 * uxv * cx - e * kappa * cxx);
                add(ith(i, j), ith(i, j + 1), r0 * uyv * cy - e * kappa * cyy);
                add(ith(i, j), ith(i, j - 1), -r0 * uyv * cy - e * kappa * cyy);
                add(ith(i, j), iux(i, j), r0 * dth_dx);
                add(ith(i, j), iuy(i, j), r0 * dth_dy);
                // rho theta div u and -eps Psi, through the velocity stencils
                const double dpsi_duxx = 4.0 * mu * dux_dx + 2.0 * prm.lambda * divu;
                const double dpsi_duyy = 4.0 * mu * duy_dy + 2.0 * prm.lambda * divu;
                const double dpsi_dshear = 2.0 * mu * shear;
                add(ith(i, j), iux(ip, j), r0 * thv * cx - e * dpsi_duxx * cx);
                add(ith(i, j), iux(im, j), -r0 * thv * cx + e * dpsi_duxx * cx);
                add(ith(i, j), iuy(i, j + 1), r0 * thv * cy - e * dpsi_duyy * cy);
                add(ith(i, j), iuy(i, j - 1), -r0 * thv * cy + e * dpsi_duyy * cy);
                add(ith(i, j), iux(i, j + 1), -e * dpsi_dshear * cy);
                add(ith(i, j), iux(i, j - 1), e * dpsi_dshear * cy);
                add(ith(i, j), iuy(ip, j), -e * dpsi_dshear * cx);
                add(ith(i, j), iuy(im, j), e * dpsi_dshear * cx);
            }
        }

        // --- total mass ---
        double massdef = -prm.M;
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j) {
                massdef += wq(j) * rho(i, j);
                add(ilam(), irho(i, j), wq(j));
            }
        R[ilam()] = massdef;
        return R;
    }
};

}  // namespace

NewtonReport solve_full_newton(const WallData& walls, const Params& params,
                               const FullState& initial) {
    params.validate();
    walls.validate();
    const Grid& g = initial.rho.grid();
    NewtonSystem sys(g, params, walls);
    const int N = g.size();

    Eigen::VectorXd U(4 * N + 1);
    U.segment(0, N) = initial.rho.data().matrix();
    U.segment(N, N) = initial.u.x().data().matrix();
    U.segment(2 * N, N) = initial.u.y().data().matrix();
    U.segment(3 * N, N) = initial.theta.data().matrix();
    U[4 * N] = 0.0;

    std::vector<double> history;
    Eigen::VectorXd R = sys.residual(U, nullptr);
    double rnorm = R.lpNorm<Eigen::Infinity>();
    history.push_back(rnorm);

    int it = 0;
    while (rnorm >= params.newton_tol) {
        if (it >= params.newton_max_iter)
            throw NewtonDivergence("solve_full_newton: iteration budget exhausted", history);
        ++it;
        std::vector<Triplet> trips;
        trips.reserve(40 * N);
        sys.residual(U, &trips);
        SpMat J(4 * N + 1, 4 * N + 1);
        J.setFromTriplets(trips.begin(), trips.end());
        J.makeCompressed();
        Eigen::SparseLU<SpMat> lu(J);
        if (lu.info() != Eigen::Success)
            throw JacobianSingular("solve_full_newton: Jacobian factorization failed");
        const Eigen::VectorXd d = lu.solve(-R);

        // damped step: halve until the residual actually decreases
        double t = 1.0;
        Eigen::VectorXd Unew, Rnew;
        double rnew = rnorm;
        bool accepted = false;
        for (int k = 0; k < 40; ++k) {
            Unew = U + t * d;
            Rnew = sys.residual(Unew, nullptr);
            rnew = Rnew.lpNorm<Eigen::Infinity>();
            if (rnew < (1.0 - 1e-4 * t) * rnorm || rnew < params.newton_tol) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted)
            throw NewtonDivergence("solve_full_newton: step halving exhausted", history);
        U = Unew;
        R = Rnew;
        rnorm = rnew;
        history.push_back(rnorm);
    }

    NewtonReport rep;
    rep.state.rho = ScalarField(g, U.segment(0, N).array());
    rep.state.u = VectorField(ScalarField(g, U.segment(N, N).array()),
                              ScalarField(g, U.segment(2 * N, N).array()));
    rep.state.theta = ScalarField(g, U.segment(3 * N, N).array());
    rep.state.P = rep.state.rho * rep.state.theta;
    rep.state.epsilon = params.epsilon;
    rep.iterations = it;
    rep.residual_history = std::move(history);
    rep.state.rho.require_finite("solve_full_newton");
    rep.state.theta.require_finite("solve_full_newton");
    rep.state.u.require_finite("solve_full_newton");
    return rep;
}

}  // namespace ghostflow
