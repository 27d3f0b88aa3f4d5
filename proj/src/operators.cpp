#include "ghostflow/operators.hpp"

#include <array>

namespace ghostflow {

ScalarField dx(const ScalarField& f) {
    const Grid& g = f.grid();
    ScalarField out(g);
    const double c = 1.0 / (2.0 * g.hx);
    for (int i = 0; i < g.nx; ++i) {
        const int ip = g.wrap(i + 1), im = g.wrap(i - 1);
        for (int j = 0; j < g.ny; ++j)
            out.data()[g.idx(i, j)] = c * (f.data()[g.idx(ip, j)] - f.data()[g.idx(im, j)]);
    }
    return out;
}

ScalarField dy(const ScalarField& f) {
    const Grid& g = f.grid();
    ScalarField out(g);
    const double c = 1.0 / (2.0 * g.hy);
    const int n = g.ny;
    for (int i = 0; i < g.nx; ++i) {
        const double* col = f.data().data() + g.idx(i, 0);
        double* o = out.data().data() + g.idx(i, 0);
        o[0] = c * (-3.0 * col[0] + 4.0 * col[1] - col[2]);
        for (int j = 1; j < n - 1; ++j) o[j] = c * (col[j + 1] - col[j - 1]);
        o[n - 1] = c * (3.0 * col[n - 1] - 4.0 * col[n - 2] + col[n - 3]);
    }
    return out;
}

VectorField grad(const ScalarField& f) { return VectorField(dx(f), dy(f)); }

VectorField grad_neumann(const ScalarField& f) {
    VectorField g = grad(f);
    set_wall_rows(g.y(), 0.0, 0.0);
    return g;
}

ScalarField div(const VectorField& v) { return dx(v.x()) + dy(v.y()); }

ScalarField laplacian(const ScalarField& f) {
    const Grid& g = f.grid();
    ScalarField out(g);
    const double cx = 1.0 / (g.hx * g.hx), cy = 1.0 / (g.hy * g.hy);
    const int n = g.ny;
    for (int i = 0; i < g.nx; ++i) {
        const int ip = g.wrap(i + 1), im = g.wrap(i - 1);
        for (int j = 0; j < n; ++j) {
            const double fxx = cx * (f.data()[g.idx(ip, j)] - 2.0 * f.data()[g.idx(i, j)] +
                                     f.data()[g.idx(im, j)]);
            double fyy;
            const double* col = f.data().data() + g.idx(i, 0);
            if (j == 0)
                fyy = cy * (2.0 * col[0] - 5.0 * col[1] + 4.0 * col[2] - col[3]);
            else if (j == n - 1)
                fyy = cy * (2.0 * col[n - 1] - 5.0 * col[n - 2] + 4.0 * col[n - 3] - col[n - 4]);
            else
                fyy = cy * (col[j + 1] - 2.0 * col[j] + col[j - 1]);
            out.data()[g.idx(i, j)] = fxx + fyy;
        }
    }
    return out;
}

double integrate(const ScalarField& f) {
    const Grid& g = f.grid();
    double s = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        const double* col = f.data().data() + g.idx(i, 0);
        double colsum = 0.5 * (col[0] + col[g.ny - 1]);
        for (int j = 1; j < g.ny - 1; ++j) colsum += col[j];
        s += colsum;
    }
    return s * g.hx * g.hy;
}

double mean(const ScalarField& f) { return integrate(f) / (f.grid().lx * f.grid().ly); }

double l2_norm(const ScalarField& f) { return std::sqrt(std::max(0.0, integrate(f * f))); }

double l2_norm(const VectorField& v) {
    return std::sqrt(std::max(0.0, integrate(v.x() * v.x()) + integrate(v.y() * v.y())));
}

double linf_norm(const ScalarField& f) { return f.max_abs(); }

double linf_norm(const VectorField& v) { return std::max(v.x().max_abs(), v.y().max_abs()); }

namespace {

// Sum of squared L^2 norms of all k-th order derivative components, built by
// repeatedly applying (dx, dy) to the previous derivative level.
double derivative_level_sq(std::vector<ScalarField>& level) {
    std::vector<ScalarField> next;
    next.reserve(level.size() * 2);
    double sq = 0.0;
    for (const ScalarField& f : level) {
        next.push_back(dx(f));
        next.push_back(dy(f));
    }
    for (const ScalarField& f : next) sq += integrate(f * f);
    level = std::move(next);
    return sq;
}

double sobolev_sq(std::vector<ScalarField> level, int k) {
    if (k < 0 || k > 3) throw std::invalid_argument("sobolev_norm: k must be in 0..3");
    double sq = 0.0;
    for (const ScalarField& f : level) sq += integrate(f * f);
    for (int m = 1; m <= k; ++m) sq += derivative_level_sq(level);
    return sq;
}

double third_level_sq(std::vector<ScalarField> level) {
    double sq = 0.0;
    for (int m = 1; m <= 3; ++m) sq = derivative_level_sq(level);
    return sq;
}

}  // namespace

double sobolev_norm(const ScalarField& f, int k) {
    return std::sqrt(std::max(0.0, sobolev_sq({f}, k)));
}

double sobolev_norm(const VectorField& v, int k) {
    return std::sqrt(std::max(0.0, sobolev_sq({v.x(), v.y()}, k)));
}

double k_norm(const ScalarField& f, double eps) {
    return sobolev_norm(f, 2) + eps * std::sqrt(std::max(0.0, third_level_sq({f})));
}

double k_norm(const VectorField& v, double eps) {
    return sobolev_norm(v, 2) + eps * std::sqrt(std::max(0.0, third_level_sq({v.x(), v.y()})));
}

Eigen::ArrayXd tangential_wall_derivative(const WallData& walls, WallSide side) {
    const Eigen::ArrayXd& t = (side == WallSide::bottom) ? walls.t_bottom : walls.t_top;
    const int n = static_cast<int>(t.size());
    if (walls.hx <= 0.0) throw std::invalid_argument("tangential_wall_derivative: wall spacing unset");
    Eigen::ArrayXd out(n);
    const double c = 1.0 / (2.0 * walls.hx);
    for (int i = 0; i < n; ++i) {
        const int ip = (i + 1) % n, im = (i - 1 + n) % n;
        out[i] = c * (t[ip] - t[im]);
    }
    return out;
}

ScalarField advect(const VectorField& u, const ScalarField& f) {
    return u.x() * dx(f) + u.y() * dy(f);
}

VectorField advect(const VectorField& u, const VectorField& v) {
    return VectorField(advect(u, v.x()), advect(u, v.y()));
}

ScalarField dot(const VectorField& u, const VectorField& v) {
    return u.x() * v.x() + u.y() * v.y();
}

VectorField grad_dot_gradT(const ScalarField& theta, const VectorField& v) {
    const ScalarField tx = dx(theta), ty = dy(theta);
    return VectorField(tx * dx(v.x()) + ty * dy(v.x()), tx * dx(v.y()) + ty * dy(v.y()));
}

VectorField laplacian(const VectorField& v) {
    return VectorField(laplacian(v.x()), laplacian(v.y()));
}

ScalarField dissipation(const VectorField& u, double mu, double lambda) {
    const ScalarField uxx = dx(u.x()), uyy = dy(u.y());
    const ScalarField shear = dy(u.x()) + dx(u.y());
    const ScalarField divu = uxx + uyy;
    return 2.0 * mu * (uxx * uxx + uyy * uyy) + mu * (shear * shear) + lambda * (divu * divu);
}

void set_wall_rows(ScalarField& f, double bottom, double top) {
    const Grid& g = f.grid();
    for (int i = 0; i < g.nx; ++i) {
        f.data()[g.idx(i, 0)] = bottom;
        f.data()[g.idx(i, g.ny - 1)] = top;
    }
}

void set_wall_rows(ScalarField& f, const Eigen::ArrayXd& bottom, const Eigen::ArrayXd& top) {
    const Grid& g = f.grid();
    for (int i = 0; i < g.nx; ++i) {
        f.data()[g.idx(i, 0)] = bottom[i];
        f.data()[g.idx(i, g.ny - 1)] = top[i];
    }
}

double wall_flux(const VectorField& v) {
    const Grid& g = v.grid();
    double s = 0.0;
    for (int i = 0; i < g.nx; ++i)
        s += v.y().data()[g.idx(i, g.ny - 1)] - v.y().data()[g.idx(i, 0)];
    return s * g.hx;
}

}  // namespace ghostflow
