#include "ghostflow/elliptic.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <optional>
#include <vector>

namespace ghostflow {

namespace {

using Triplet = Eigen::Triplet<double>;
using SpMat = Eigen::SparseMatrix<double>;
using BiCg = Eigen::BiCGSTAB<SpMat, Eigen::IncompleteLUT<double>>;

// Shared direct/iterative backend: factorize (or build the ILUT-preconditioned
// Krylov solver) once, then solve many right-hand sides against it.
struct LinearBackend {
    LinearSolverConfig cfg;
    SpMat A;
    Eigen::SparseLU<SpMat> lu;
    std::optional<BiCg> krylov;

    void compute(SpMat&& matrix, const LinearSolverConfig& config, const char* who) {
        cfg = config;
        A = std::move(matrix);
        A.makeCompressed();
        if (cfg.method == LinearSolverConfig::Method::direct) {
            lu.compute(A);
            if (lu.info() != Eigen::Success)
                throw LinearSolveFailure(std::string(who) + ": factorization failed", -1.0);
        } else {
            krylov.emplace();
            krylov->setTolerance(cfg.tolerance);
            krylov->setMaxIterations(cfg.max_iterations);
            krylov->compute(A);
            if (krylov->info() != Eigen::Success)
                throw LinearSolveFailure(std::string(who) + ": preconditioner failed", -1.0);
        }
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& b, const char* who) const {
        if (cfg.method == LinearSolverConfig::Method::direct) {
            // one step of iterative refinement; the fixed-point loops stack
            // many solves, so the factorization noise floor matters
            Eigen::VectorXd x = lu.solve(b);
            x += lu.solve(b - A * x);
            const double res = (A * x - b).norm() / std::max(1.0, b.norm());
            if (res > cfg.tolerance)
                throw LinearSolveFailure(std::string(who) + ": residual above tolerance", res);
            return x;
        }
        Eigen::VectorXd x = krylov->solve(b);
        if (krylov->info() != Eigen::Success)
            throw LinearSolveFailure(
                std::string(who) + ": no convergence within max_iterations, residual " +
                    std::to_string(krylov->error()),
                krylov->error());
        return x;
    }
};

// Allowance for the discrete quadrature defect of analytically compatible
// data: divergence-form right-hand sides integrate to O(h^2) * scale, not to
// machine zero, so the compatibility threshold carries an h^2 relative part.
double compat_threshold(const LinearSolverConfig& cfg, const Grid& g, double scale) {
    const double h = std::max(g.hx, g.hy);
    return cfg.compatibility_tol + 50.0 * h * h * scale;
}

// Trapezoid quadrature weight of node row j.
double wy(const Grid& g, int j) { return (j == 0 || j == g.ny - 1) ? 0.5 * g.hy : g.hy; }

}  // namespace

// ---------------------------------------------------------------------------
// Dirichlet Poisson
// ---------------------------------------------------------------------------

struct PoissonDirichlet::Impl {
    Grid g;
    LinearSolverConfig cfg;
    LinearBackend be;

    Impl(const Grid& g_, LinearSolverConfig cfg_) : g(g_), cfg(cfg_) {
        const int N = g.size();
        std::vector<Triplet> t;
        t.reserve(5 * N);
        const double cx = 1.0 / (g.hx * g.hx), cy = 1.0 / (g.hy * g.hy);
        for (int i = 0; i < g.nx; ++i) {
            const int ip = g.wrap(i + 1), im = g.wrap(i - 1);
            for (int j = 0; j < g.ny; ++j) {
                const int row = g.idx(i, j);
                if (j == 0 || j == g.ny - 1) {
                    t.emplace_back(row, row, 1.0);
                    continue;
                }
                t.emplace_back(row, row, -2.0 * (cx + cy));
                t.emplace_back(row, g.idx(ip, j), cx);
                t.emplace_back(row, g.idx(im, j), cx);
                t.emplace_back(row, g.idx(i, j + 1), cy);
                t.emplace_back(row, g.idx(i, j - 1), cy);
            }
        }
        SpMat A(N, N);
        A.setFromTriplets(t.begin(), t.end());
        be.compute(std::move(A), cfg, "PoissonDirichlet");
    }
};

PoissonDirichlet::PoissonDirichlet(const Grid& g, LinearSolverConfig config)
    : impl_(std::make_unique<Impl>(g, config)) {}
PoissonDirichlet::~PoissonDirichlet() = default;
PoissonDirichlet::PoissonDirichlet(PoissonDirichlet&&) noexcept = default;
const Grid& PoissonDirichlet::grid() const { return impl_->g; }

ScalarField PoissonDirichlet::solve(const ScalarField& rhs, const Eigen::ArrayXd& bc_bottom,
                                    const Eigen::ArrayXd& bc_top) const {
    const Grid& g = impl_->g;
    if (rhs.grid() != g) throw std::invalid_argument("PoissonDirichlet: grid mismatch");
    Eigen::VectorXd b(g.size());
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const int row = g.idx(i, j);
            b[row] = (j == 0) ? bc_bottom[i] : (j == g.ny - 1) ? bc_top[i] : rhs.data()[row];
        }
    Eigen::VectorXd u = impl_->be.solve(b, "PoissonDirichlet");
    ScalarField out(g, u.array());
    set_wall_rows(out, bc_bottom, bc_top);  // identity rows, minus LU roundoff
    out.require_finite("PoissonDirichlet");
    return out;
}

ScalarField PoissonDirichlet::solve(const ScalarField& rhs, double bc_bottom, double bc_top) const {
    const int nx = impl_->g.nx;
    return solve(rhs, Eigen::ArrayXd::Constant(nx, bc_bottom), Eigen::ArrayXd::Constant(nx, bc_top));
}

// ---------------------------------------------------------------------------
// Neumann Poisson
// ---------------------------------------------------------------------------
//
// Wall rows eliminate the ghost value via the centered Neumann condition
// q(-1) = q(1). Rows are scaled by the quadrature weights, which makes the
// operator symmetric, so the constant is an exact left null vector and the
// zero-mean projection of the rhs makes the bordered system solvable to
// machine precision (the multiplier comes out at roundoff level).

// The quadrature-scaled operator is symmetric, so the constant is its exact
// left and right null vector. Dense border rows would wreck the fill-reducing
// ordering; instead the data is projected to exact compatibility, the constant
// mode is pinned by one sparse point equation standing in for the (then
// redundant) equation row at that node, and the mean is restored afterwards by
// a constant shift that no remaining equation sees.
struct PoissonNeumann::Impl {
    Grid g;
    LinearSolverConfig cfg;
    LinearBackend be;

    Impl(const Grid& g_, LinearSolverConfig cfg_) : g(g_), cfg(cfg_) {
        const int N = g.size();
        std::vector<Triplet> t;
        t.reserve(6 * N);
        const double cx = 1.0 / (g.hx * g.hx), cy = 1.0 / (g.hy * g.hy);
        for (int i = 0; i < g.nx; ++i) {
            const int ip = g.wrap(i + 1), im = g.wrap(i - 1);
            for (int j = 0; j < g.ny; ++j) {
                const int row = g.idx(i, j);
                if (row == 0) {
                    t.emplace_back(0, 0, 1.0);  // pin: q(0,0) = 0
                    continue;
                }
                const double w = g.hx * wy(g, j);
                t.emplace_back(row, g.idx(ip, j), w * cx);
                t.emplace_back(row, g.idx(im, j), w * cx);
                t.emplace_back(row, row, -2.0 * w * (cx + cy));
                if (j == 0) {
                    t.emplace_back(row, g.idx(i, 1), 2.0 * w * cy);
                } else if (j == g.ny - 1) {
                    t.emplace_back(row, g.idx(i, g.ny - 2), 2.0 * w * cy);
                } else {
                    t.emplace_back(row, g.idx(i, j + 1), w * cy);
                    t.emplace_back(row, g.idx(i, j - 1), w * cy);
                }
            }
        }
        SpMat A(N, N);
        A.setFromTriplets(t.begin(), t.end());
        be.compute(std::move(A), cfg, "PoissonNeumann");
    }
};

PoissonNeumann::PoissonNeumann(const Grid& g, LinearSolverConfig config)
    : impl_(std::make_unique<Impl>(g, config)) {}
PoissonNeumann::~PoissonNeumann() = default;
PoissonNeumann::PoissonNeumann(PoissonNeumann&&) noexcept = default;
const Grid& PoissonNeumann::grid() const { return impl_->g; }

ScalarField PoissonNeumann::solve(const ScalarField& rhs) const {
    const Grid& g = impl_->g;
    if (rhs.grid() != g) throw std::invalid_argument("PoissonNeumann: grid mismatch");
    const double total = integrate(rhs);
    const double threshold = compat_threshold(impl_->cfg, g, l2_norm(rhs));
    if (std::abs(total) > threshold)
        throw CompatibilityViolation("PoissonNeumann: integral of rhs violates solvability", total);
    const double shift = total / (g.lx * g.ly);

    const int N = g.size();
    Eigen::VectorXd b(N);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const int row = g.idx(i, j);
            b[row] = g.hx * wy(g, j) * (rhs.data()[row] - shift);
        }
    const double displaced = b[0];  // the equation the pin row stands in for
    b[0] = 0.0;
    Eigen::VectorXd q = impl_->be.solve(b, "PoissonNeumann");
    ScalarField out(g, q.array());
    out += -mean(out);  // restore the zero-mean gauge; no equation sees a shift

    // the displaced equation is implied by compatibility; verify, don't assume
    const double cx = 1.0 / (g.hx * g.hx), cy = 1.0 / (g.hy * g.hy);
    const double w0 = g.hx * wy(g, 0);
    const double eq0 = w0 * (cx * (out(1, 0) + out(-1, 0) - 2.0 * out(0, 0)) +
                             2.0 * cy * (out(0, 1) - out(0, 0))) -
                       displaced;
    if (std::abs(eq0) > impl_->cfg.tolerance * std::max(1.0, b.norm()) * 10.0)
        throw LinearSolveFailure("PoissonNeumann: displaced equation defect", eq0);
    out.require_finite("PoissonNeumann");
    return out;
}

// ---------------------------------------------------------------------------
// Stokes
// ---------------------------------------------------------------------------

// The discrete pressure has a constant null mode and, on even nx, an exact
// x-alternating column mode; both are invisible to the momentum gradient.
// Dense gauge rows would destroy the sparse ordering, so instead: the
// divergence data is projected onto the exactly-compatible subspace, the null
// modes are pinned by one (or two) sparse point equations standing in for the
// continuity rows they make redundant, and the null components are restored
// afterwards against the quadrature functionals -- which changes no equation.
struct StokesSolver::Impl {
    Grid g;
    double mu;
    LinearSolverConfig cfg;
    int N, Np, npin;
    LinearBackend be;

    int pidx(int i, int jh) const { return 2 * N + i * (g.ny - 1) + jh; }
    static double sigma(int i) { return (i % 2 == 0) ? 1.0 : -1.0; }

    // weight of staggered pressure unknown jh in the collocated trapezoid
    // functional after interpolation back to the nodes
    double tau(int jh) const {
        const int m = g.ny - 2;  // last half index
        if (jh == 0 || jh == m) return 1.25 * g.hy;
        if (jh == 1 || jh == m - 1) return 0.75 * g.hy;
        return g.hy;
    }

    Impl(const Grid& g_, double mu_, LinearSolverConfig cfg_) : g(g_), mu(mu_), cfg(cfg_) {
        if (mu <= 0.0) throw std::invalid_argument("StokesSolver: mu must be positive");
        N = g.size();
        Np = g.nx * (g.ny - 1);
        npin = (g.nx % 2 == 0) ? 2 : 1;
        const int total = 2 * N + Np;
        std::vector<Triplet> t;
        t.reserve(12 * total);
        const double cx = 1.0 / (g.hx * g.hx), cy = 1.0 / (g.hy * g.hy);
        const double gx = 1.0 / (4.0 * g.hx), gy = 1.0 / g.hy;

        auto vx = [&](int i, int j) { return g.idx(g.wrap(i), j); };
        auto vy = [&](int i, int j) { return N + g.idx(g.wrap(i), j); };

        for (int i = 0; i < g.nx; ++i) {
            const int ip = g.wrap(i + 1), im = g.wrap(i - 1);
            for (int j = 0; j < g.ny; ++j) {
                const int rx = vx(i, j), ry = vy(i, j);
                if (j == 0 || j == g.ny - 1) {
                    t.emplace_back(rx, rx, 1.0);
                    t.emplace_back(ry, ry, 1.0);
                    continue;
                }
                // -mu Laplacian, both components
                for (int r : {rx, ry}) {
                    const int base = (r == rx) ? 0 : N;
                    t.emplace_back(r, base + g.idx(i, j), 2.0 * mu * (cx + cy));
                    t.emplace_back(r, base + g.idx(ip, j), -mu * cx);
                    t.emplace_back(r, base + g.idx(im, j), -mu * cx);
                    t.emplace_back(r, base + g.idx(i, j + 1), -mu * cy);
                    t.emplace_back(r, base + g.idx(i, j - 1), -mu * cy);
                }
                // pressure gradient: x by central difference of the y-average,
                // y by the compact half-point difference
                t.emplace_back(rx, pidx(ip, j - 1), gx);
                t.emplace_back(rx, pidx(ip, j), gx);
                t.emplace_back(rx, pidx(im, j - 1), -gx);
                t.emplace_back(rx, pidx(im, j), -gx);
                t.emplace_back(ry, pidx(i, j), gy);
                t.emplace_back(ry, pidx(i, j - 1), -gy);
            }
        }
        // continuity at the pressure points; the pinned rows replace the two
        // equations implied by the compatibility functionals
        for (int i = 0; i < g.nx; ++i) {
            const int ip = g.wrap(i + 1), im = g.wrap(i - 1);
            for (int jh = 0; jh < g.ny - 1; ++jh) {
                const int row = pidx(i, jh);
                if (jh == 0 && i < npin) {
                    t.emplace_back(row, row, 1.0);  // pin p(i, 0) = 0
                    continue;
                }
                t.emplace_back(row, vy(i, jh + 1), gy);
                t.emplace_back(row, vy(i, jh), -gy);
                t.emplace_back(row, vx(ip, jh), gx);
                t.emplace_back(row, vx(ip, jh + 1), gx);
                t.emplace_back(row, vx(im, jh), -gx);
                t.emplace_back(row, vx(im, jh + 1), -gx);
            }
        }

        SpMat A(total, total);
        A.setFromTriplets(t.begin(), t.end());
        LinearSolverConfig direct = cfg;  // the saddle point is always factored
        direct.method = LinearSolverConfig::Method::direct;
        be.compute(std::move(A), direct, "StokesSolver");
    }
};

StokesSolver::StokesSolver(const Grid& g, double mu, LinearSolverConfig config)
    : impl_(std::make_unique<Impl>(g, mu, config)) {}
StokesSolver::~StokesSolver() = default;
StokesSolver::StokesSolver(StokesSolver&&) noexcept = default;
const Grid& StokesSolver::grid() const { return impl_->g; }
double StokesSolver::mu() const { return impl_->mu; }

StokesSolution StokesSolver::solve(const VectorField& forcing, const ScalarField& div_data,
                                   const WallVelocity& bc_bottom, const WallVelocity& bc_top,
                                   double pressure_mean) const {
    const Grid& g = impl_->g;
    if (forcing.grid() != g || div_data.grid() != g)
        throw std::invalid_argument("StokesSolver: grid mismatch");
    const int N = impl_->N, Np = impl_->Np, npin = impl_->npin;
    const int nyh = g.ny - 1;

    // interpolate the divergence data to the pressure points
    Eigen::VectorXd ghalf(Np);
    for (int i = 0; i < g.nx; ++i)
        for (int jh = 0; jh < nyh; ++jh)
            ghalf[i * nyh + jh] =
                0.5 * (div_data.data()[g.idx(i, jh)] + div_data.data()[g.idx(i, jh + 1)]);

    // compatibility: total divergence must balance the wall flux of the bc;
    // project exactly onto the compatible subspace (both functionals)
    const double cell = g.hx * g.hy;
    const double S = cell * ghalf.sum();
    const double F = g.hx * (bc_top.y - bc_bottom.y).sum();
    const double scale = l2_norm(div_data) + std::abs(F) + 1.0e-30;
    if (std::abs(S - F) > compat_threshold(impl_->cfg, g, scale))
        throw CompatibilityViolation("StokesSolver: div data incompatible with wall flux", S - F);
    const double alpha = (S - F) / (Np * cell);
    ghalf.array() -= alpha;
    double beta = 0.0;
    if (npin == 2) {
        double Scb = 0.0, Fcb = 0.0;
        for (int i = 0; i < g.nx; ++i) {
            const double s = Impl::sigma(i);
            for (int jh = 0; jh < nyh; ++jh) Scb += s * ghalf[i * nyh + jh];
            Fcb += s * (bc_top.y[i] - bc_bottom.y[i]);
        }
        beta = (cell * Scb - g.hx * Fcb) / (Np * cell);
        for (int i = 0; i < g.nx; ++i)
            for (int jh = 0; jh < nyh; ++jh) ghalf[i * nyh + jh] -= Impl::sigma(i) * beta;
    }

    Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * N + Np);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const int k = g.idx(i, j);
            if (j == 0) {
                b[k] = bc_bottom.x[i];
                b[N + k] = bc_bottom.y[i];
            } else if (j == g.ny - 1) {
                b[k] = bc_top.x[i];
                b[N + k] = bc_top.y[i];
            } else {
                b[k] = forcing.x().data()[k];
                b[N + k] = forcing.y().data()[k];
            }
        }
    b.segment(2 * N, Np) = ghalf;
    for (int i = 0; i < npin; ++i) b[impl_->pidx(i, 0)] = 0.0;  // pin rows

    Eigen::VectorXd z = impl_->be.solve(b, "StokesSolver");
    const double res = (impl_->be.A * z - b).norm() / std::max(1.0, b.norm());

    StokesSolution sol;
    sol.velocity =
        VectorField(ScalarField(g, z.head(N).array()), ScalarField(g, z.segment(N, N).array()));
    set_wall_rows(sol.velocity.x(), bc_bottom.x, bc_top.x);  // identity rows,
    set_wall_rows(sol.velocity.y(), bc_bottom.y, bc_top.y);  // minus LU roundoff
    sol.residual_norm = res;
    sol.projection_shift = std::abs(alpha) + std::abs(beta);

    // restore the null components of the pressure against the quadrature
    // functionals; the momentum gradient is exactly blind to both modes
    double f1 = 0.0, f2 = 0.0;
    for (int i = 0; i < g.nx; ++i)
        for (int jh = 0; jh < nyh; ++jh) {
            const double w = g.hx * impl_->tau(jh);
            f1 += w * z[impl_->pidx(i, jh)];
            f2 += w * Impl::sigma(i) * z[impl_->pidx(i, jh)];
        }
    const double area = g.lx * g.ly;
    const double a_shift = (pressure_mean - f1) / area;
    const double b_shift = (npin == 2) ? -f2 / area : 0.0;
    for (int i = 0; i < g.nx; ++i)
        for (int jh = 0; jh < nyh; ++jh)
            z[impl_->pidx(i, jh)] += a_shift + b_shift * Impl::sigma(i);

    // continuity defect against the imposed (projected) data, including the
    // rows displaced by the pins -- those hold by the exact projection
    double divsq = 0.0;
    const double gx = 1.0 / (4.0 * g.hx), gy = 1.0 / g.hy;
    for (int i = 0; i < g.nx; ++i) {
        const int ip = g.wrap(i + 1), im = g.wrap(i - 1);
        for (int jh = 0; jh < nyh; ++jh) {
            const double d = gy * (z[N + g.idx(i, jh + 1)] - z[N + g.idx(i, jh)]) +
                             gx * (z[g.idx(ip, jh)] + z[g.idx(ip, jh + 1)] - z[g.idx(im, jh)] -
                                   z[g.idx(im, jh + 1)]) -
                             ghalf[i * nyh + jh];
            divsq += cell * d * d;
        }
    }
    sol.div_residual = std::sqrt(divsq);

    // pressure back to the nodes; the restored mean is the quadrature mean of
    // exactly this interpolant
    ScalarField p(g);
    auto pv = [&](int i, int jh) { return z[impl_->pidx(i, jh)]; };
    for (int i = 0; i < g.nx; ++i) {
        p.data()[g.idx(i, 0)] = 1.5 * pv(i, 0) - 0.5 * pv(i, 1);
        for (int j = 1; j < g.ny - 1; ++j)
            p.data()[g.idx(i, j)] = 0.5 * (pv(i, j - 1) + pv(i, j));
        p.data()[g.idx(i, g.ny - 1)] = 1.5 * pv(i, g.ny - 2) - 0.5 * pv(i, g.ny - 3);
    }
    sol.pressure = p;
    sol.pressure_mean_error = std::abs(integrate(p) - pressure_mean);
    sol.velocity.require_finite("StokesSolver");
    sol.pressure.require_finite("StokesSolver");
    return sol;
}

// ---------------------------------------------------------------------------
// Steady transport
// ---------------------------------------------------------------------------

struct TransportSolver::Impl {
    Grid g;
    LinearSolverConfig cfg;
    double coef;
    double smallness;
    LinearBackend be;

    Impl(const Grid& g_, double coef_, const VectorField& advecting, const ScalarField& weight,
         LinearSolverConfig cfg_)
        : g(g_), cfg(cfg_), coef(coef_) {
        if (advecting.grid() != g || weight.grid() != g)
            throw std::invalid_argument("TransportSolver: grid mismatch");
        const VectorField W = weight * advecting;
        // sup bound of W and grad W: the part of the H^3 control (through the
        // embedding) that the near-identity perturbation actually scales with
        const double b = linf_norm(W) + std::max(linf_norm(grad(W.x())), linf_norm(grad(W.y())));
        smallness = std::abs(coef) * b;
        if (smallness >= 0.5)
            throw SmallnessViolation("TransportSolver: coef * flux-field bound too large",
                                     smallness);

        const int N = g.size();
        std::vector<Triplet> t;
        t.reserve(8 * N);
        for (int k = 0; k < N; ++k) t.emplace_back(k, k, 1.0);

        // conservative upwind fluxes, weighted so the trapezoid-quadrature sum
        // of the divergence telescopes to the wall flux exactly
        auto add = [&](int row, int col, double v) {
            if (v != 0.0) t.emplace_back(row, col, coef * v);
        };
        for (int i = 0; i < g.nx; ++i) {
            const int ip = g.wrap(i + 1);
            for (int j = 0; j < g.ny; ++j) {
                // x-face between i and i+1 at row j contributes to nodes i, i+1
                const double wf = 0.5 * (W.x()(i, j) + W.x()(ip, j));
                const int up = (wf >= 0.0) ? i : ip;
                const double inv = 1.0 / g.hx;
                add(g.idx(i, j), g.idx(up, j), wf * inv);
                add(g.idx(ip, j), g.idx(up, j), -wf * inv);
            }
        }
        for (int i = 0; i < g.nx; ++i) {
            for (int j = 0; j < g.ny - 1; ++j) {
                // y-face between j and j+1; wall half-cells have width hy/2
                const double wf = 0.5 * (W.y()(i, j) + W.y()(i, j + 1));
                const int up = (wf >= 0.0) ? j : j + 1;
                const double s_lo = (j == 0) ? 2.0 / g.hy : 1.0 / g.hy;
                const double s_hi = (j + 1 == g.ny - 1) ? 2.0 / g.hy : 1.0 / g.hy;
                add(g.idx(i, j), g.idx(i, up), wf * s_lo);
                add(g.idx(i, j + 1), g.idx(i, up), -wf * s_hi);
            }
            // wall faces carry the boundary flux of W itself
            const double wb = W.y()(i, 0), wt = W.y()(i, g.ny - 1);
            add(g.idx(i, 0), g.idx(i, 0), -wb * 2.0 / g.hy);
            add(g.idx(i, g.ny - 1), g.idx(i, g.ny - 1), wt * 2.0 / g.hy);
        }
        SpMat A(N, N);
        A.setFromTriplets(t.begin(), t.end());
        be.compute(std::move(A), cfg, "TransportSolver");
    }
};

TransportSolver::TransportSolver(const Grid& g, double coef, const VectorField& advecting,
                                 const ScalarField& weight, LinearSolverConfig config)
    : impl_(std::make_unique<Impl>(g, coef, advecting, weight, config)) {}
TransportSolver::~TransportSolver() = default;
TransportSolver::TransportSolver(TransportSolver&&) noexcept = default;
const Grid& TransportSolver::grid() const { return impl_->g; }
double TransportSolver::smallness() const { return impl_->smallness; }

ScalarField TransportSolver::solve(const ScalarField& rhs) const {
    const Grid& g = impl_->g;
    if (rhs.grid() != g) throw std::invalid_argument("TransportSolver: grid mismatch");
    Eigen::VectorXd b = rhs.data().matrix();
    Eigen::VectorXd r = impl_->be.solve(b, "TransportSolver");
    ScalarField out(g, r.array());
    out.require_finite("TransportSolver");
    return out;
}

// ---------------------------------------------------------------------------
// one-shot wrappers
// ---------------------------------------------------------------------------

ScalarField solve_poisson_dirichlet(const ScalarField& rhs, const Eigen::ArrayXd& bc_bottom,
                                    const Eigen::ArrayXd& bc_top, LinearSolverConfig config) {
    return PoissonDirichlet(rhs.grid(), config).solve(rhs, bc_bottom, bc_top);
}

ScalarField solve_poisson_neumann(const ScalarField& rhs, LinearSolverConfig config) {
    return PoissonNeumann(rhs.grid(), config).solve(rhs);
}

StokesSolution solve_stokes(double mu, const VectorField& forcing, const ScalarField& div_data,
                            const WallVelocity& bc_bottom, const WallVelocity& bc_top,
                            double pressure_mean, LinearSolverConfig config) {
    return StokesSolver(forcing.grid(), mu, config).solve(forcing, div_data, bc_bottom, bc_top,
                                                          pressure_mean);
}

ScalarField solve_steady_transport(double coef, const VectorField& advecting,
                                   const ScalarField& weight, const ScalarField& rhs,
                                   LinearSolverConfig config) {
    return TransportSolver(rhs.grid(), coef, advecting, weight, config).solve(rhs);
}

}  // namespace ghostflow
