/// @file operators.hpp
/// @brief Discrete differential operators, quadrature and Sobolev norms.
///
/// All stencils are second order: central in the periodic x-direction and in
/// the interior of the wall-normal direction, one-sided second order at the
/// two wall rows. Quadrature is rectangle-in-x, trapezoid-in-y.
#pragma once

#include "ghostflow/grid.hpp"

namespace ghostflow {

// First derivatives.
ScalarField dx(const ScalarField& f);
ScalarField dy(const ScalarField& f);

VectorField grad(const ScalarField& f);
ScalarField div(const VectorField& v);
ScalarField laplacian(const ScalarField& f);

// like grad, but the wall-normal component is forced to zero at the wall rows;
// used for gradients of fields that carry a homogeneous Neumann condition.
VectorField grad_neumann(const ScalarField& f);

double integrate(const ScalarField& f);
double mean(const ScalarField& f);

double l2_norm(const ScalarField& f);
double l2_norm(const VectorField& v);
double linf_norm(const ScalarField& f);
double linf_norm(const VectorField& v);

// Discrete H^k norm, built by repeated application of grad; k in 0..3.
double sobolev_norm(const ScalarField& f, int k);
double sobolev_norm(const VectorField& v, int k);

// Epsilon-weighted norm ||f||_{H^2} + eps * ||grad^3 f||_{L^2}.
double k_norm(const ScalarField& f, double eps);
double k_norm(const VectorField& v, double eps);

enum class WallSide { bottom, top };

// Periodic second-order derivative of the wall-temperature trace along the wall.
Eigen::ArrayXd tangential_wall_derivative(const WallData& walls, WallSide side);

// Pointwise field algebra used by the equation assemblies -------------------

// u . grad f
ScalarField advect(const VectorField& u, const ScalarField& f);
// (u . grad) v
VectorField advect(const VectorField& u, const VectorField& v);
// u . v
ScalarField dot(const VectorField& u, const VectorField& v);
// component i: sum_j (d_j theta)(d_j v_i); the grad-transpose contraction of
// Delta(theta v) = theta Delta v + v Delta theta + 2 grad theta . (grad v)^t.
VectorField grad_dot_gradT(const ScalarField& theta, const VectorField& v);
// componentwise Laplacian
VectorField laplacian(const VectorField& v);
// viscous dissipation Psi(grad u) = 2 mu D(u):D(u) + lambda |div u|^2
ScalarField dissipation(const VectorField& u, double mu, double lambda);

// Wall handling --------------------------------------------------------------

void set_wall_rows(ScalarField& f, double bottom, double top);
void set_wall_rows(ScalarField& f, const Eigen::ArrayXd& bottom, const Eigen::ArrayXd& top);

// Net volume outflow through the walls, Sum_i hx * (v_y(top) - v_y(bottom)).
double wall_flux(const VectorField& v);

}  // namespace ghostflow
