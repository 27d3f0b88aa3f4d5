/// @file elliptic.hpp
/// @brief The four linear subproblem solvers: Dirichlet/Neumann Poisson,
/// generalized Stokes with a mean-pressure constraint, and steady transport.
///
/// Each solver assembles and factorizes its sparse operator once at
/// construction; solves against the cached factorization are const and can be
/// issued concurrently. Free-function wrappers build a throwaway solver for
/// one-shot use.
#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <memory>

#include "ghostflow/grid.hpp"
#include "ghostflow/operators.hpp"

namespace ghostflow {

struct LinearSolverConfig {
    enum class Method { direct, iterative };
    Method method = Method::direct;
    double tolerance = 1e-10;  // relative residual target
    int max_iterations = 4000;
    double compatibility_tol = 1e-8;
};

// Dirichlet walls, periodic in x ---------------------------------------------
class PoissonDirichlet {
  public:
    explicit PoissonDirichlet(const Grid& g, LinearSolverConfig config = {});
    ~PoissonDirichlet();
    PoissonDirichlet(PoissonDirichlet&&) noexcept;

    // Laplacian u = rhs at interior nodes, u = bc at walls.
    ScalarField solve(const ScalarField& rhs, const Eigen::ArrayXd& bc_bottom,
                      const Eigen::ArrayXd& bc_top) const;
    ScalarField solve(const ScalarField& rhs, double bc_bottom, double bc_top) const;

    const Grid& grid() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Homogeneous Neumann walls, zero-mean solution ------------------------------
class PoissonNeumann {
  public:
    explicit PoissonNeumann(const Grid& g, LinearSolverConfig config = {});
    ~PoissonNeumann();
    PoissonNeumann(PoissonNeumann&&) noexcept;

    // Laplacian q = rhs, dq/dn = 0 at walls, integral(q) = 0. The rhs is
    // projected to zero mean when its integral is within the compatibility
    // threshold; beyond it, CompatibilityViolation.
    ScalarField solve(const ScalarField& rhs) const;

    const Grid& grid() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Generalized Stokes ----------------------------------------------------------
struct WallVelocity {
    Eigen::ArrayXd x;  // tangential component along the wall
    Eigen::ArrayXd y;  // wall-normal component
    static WallVelocity zero(const Grid& g) {
        return {Eigen::ArrayXd::Zero(g.nx), Eigen::ArrayXd::Zero(g.nx)};
    }
};

struct StokesSolution {
    VectorField velocity;
    ScalarField pressure;       // collocated; quadrature mean pinned exactly
    double residual_norm = 0;   // relative residual of the discrete saddle system
    double div_residual = 0;    // L2 norm of imposed continuity defect
    double pressure_mean_error = 0;
    double projection_shift = 0;  // size of the mean shift applied to div data
};

// Solves  -mu Laplacian v + grad p = forcing,  div v = div_data,
//         v = bc on the walls,      integral(p) = pressure_mean.
//
// Velocity is collocated; the pressure unknowns sit on y-half-points so the
// discrete div/grad pair has no spurious pressure mode beyond the constants
// (and, on even nx, the x-alternating column mode, which gets its own exact
// gauge constraint). Continuity is enforced to solver precision; the returned
// pressure is interpolated back to the nodes with its quadrature mean pinned.
class StokesSolver {
  public:
    StokesSolver(const Grid& g, double mu, LinearSolverConfig config = {});
    ~StokesSolver();
    StokesSolver(StokesSolver&&) noexcept;

    StokesSolution solve(const VectorField& forcing, const ScalarField& div_data,
                         const WallVelocity& bc_bottom, const WallVelocity& bc_top,
                         double pressure_mean) const;

    const Grid& grid() const;
    double mu() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Steady transport -------------------------------------------------------------
// rho + coef * div(rho * weight * advecting) = rhs, with a conservative
// first-order upwind flux discretization. The flux form makes the discrete
// integral of the divergence telescope exactly, so integral(rho) equals
// integral(rhs) whenever the advecting field has no wall-normal component.
class TransportSolver {
  public:
    TransportSolver(const Grid& g, double coef, const VectorField& advecting,
                    const ScalarField& weight, LinearSolverConfig config = {});
    ~TransportSolver();
    TransportSolver(TransportSolver&&) noexcept;

    ScalarField solve(const ScalarField& rhs) const;

    // coef * (sup bound of weight*advecting and its gradient); must stay
    // below 0.5 for the near-identity perturbation argument to apply
    double smallness() const;
    const Grid& grid() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// One-shot wrappers ------------------------------------------------------------
ScalarField solve_poisson_dirichlet(const ScalarField& rhs, const Eigen::ArrayXd& bc_bottom,
                                    const Eigen::ArrayXd& bc_top, LinearSolverConfig config = {});
ScalarField solve_poisson_neumann(const ScalarField& rhs, LinearSolverConfig config = {});
StokesSolution solve_stokes(double mu, const VectorField& forcing, const ScalarField& div_data,
                            const WallVelocity& bc_bottom, const WallVelocity& bc_top,
                            double pressure_mean, LinearSolverConfig config = {});
ScalarField solve_steady_transport(double coef, const VectorField& advecting,
                                   const ScalarField& weight, const ScalarField& rhs,
                                   LinearSolverConfig config = {});

}  // namespace ghostflow
