/// @file grid.hpp
/// @brief Periodic-channel grid and the field types every solver trades in.
///
/// Domain: x-periodic strip [0,lx) x [0,ly] with walls at y=0 and y=ly.
/// Fields are collocated: one value per node, x-major storage.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "ghostflow/errors.hpp"

namespace ghostflow {

struct Grid {
    int nx = 0;       // periodic x-direction points (no duplicated seam node)
    int ny = 0;       // wall-normal points including both walls
    double lx = 1.0;  // x-period
    double ly = 1.0;  // channel height
    double hx = 0.0;
    double hy = 0.0;

    Grid() = default;
    Grid(int nx_, int ny_, double lx_ = 1.0, double ly_ = 1.0)
        : nx(nx_), ny(ny_), lx(lx_), ly(ly_) {
        if (nx < 8 || ny < 8) throw std::invalid_argument("Grid: need nx >= 8 and ny >= 8");
        if (lx <= 0.0 || ly <= 0.0) throw std::invalid_argument("Grid: need positive extents");
        hx = lx / nx;
        hy = ly / (ny - 1);
    }

    int size() const { return nx * ny; }
    int idx(int i, int j) const { return i * ny + j; }
    int wrap(int i) const { return (i % nx + nx) % nx; }
    double x(int i) const { return i * hx; }
    double y(int j) const { return j * hy; }

    bool operator==(const Grid& o) const {
        return nx == o.nx && ny == o.ny && lx == o.lx && ly == o.ly;
    }
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

class ScalarField {
  public:
    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0)
        : grid_(g), v_(Eigen::ArrayXd::Constant(g.size(), fill)) {}
    ScalarField(const Grid& g, Eigen::ArrayXd values) : grid_(g), v_(std::move(values)) {
        if (v_.size() != grid_.size()) throw std::invalid_argument("ScalarField: size mismatch");
    }

    const Grid& grid() const { return grid_; }
    int size() const { return static_cast<int>(v_.size()); }

    double& operator()(int i, int j) { return v_[grid_.idx(grid_.wrap(i), j)]; }
    double operator()(int i, int j) const { return v_[grid_.idx(grid_.wrap(i), j)]; }

    Eigen::ArrayXd& data() { return v_; }
    const Eigen::ArrayXd& data() const { return v_; }

    // Populate from a callable f(x, y).
    template <class F>
    static ScalarField sample(const Grid& g, F&& f) {
        ScalarField out(g);
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j) out.v_[g.idx(i, j)] = f(g.x(i), g.y(j));
        return out;
    }

    double min() const { return v_.minCoeff(); }
    double max() const { return v_.maxCoeff(); }
    double max_abs() const { return v_.abs().maxCoeff(); }

    bool finite() const { return v_.isFinite().all(); }
    void require_finite(const char* who) const {
        if (!finite()) throw SolverError(std::string(who) + ": non-finite field entries");
    }

    // Elementwise arithmetic; grids must match.
    ScalarField& operator+=(const ScalarField& o) { check(o); v_ += o.v_; return *this; }
    ScalarField& operator-=(const ScalarField& o) { check(o); v_ -= o.v_; return *this; }
    ScalarField& operator*=(const ScalarField& o) { check(o); v_ *= o.v_; return *this; }
    ScalarField& operator/=(const ScalarField& o) { check(o); v_ /= o.v_; return *this; }
    ScalarField& operator*=(double a) { v_ *= a; return *this; }
    ScalarField& operator+=(double a) { v_ += a; return *this; }

    friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
    friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
    friend ScalarField operator*(ScalarField a, const ScalarField& b) { return a *= b; }
    friend ScalarField operator/(ScalarField a, const ScalarField& b) { return a /= b; }
    friend ScalarField operator*(double a, ScalarField b) { return b *= a; }
    friend ScalarField operator*(ScalarField b, double a) { return b *= a; }
    friend ScalarField operator+(ScalarField b, double a) { return b += a; }
    friend ScalarField operator+(double a, ScalarField b) { return b += a; }
    friend ScalarField operator-(ScalarField a, double b) { return a += -b; }
    friend ScalarField operator-(double a, ScalarField b) { b.v_ = a - b.v_; return b; }
    friend ScalarField operator-(ScalarField a) { a.v_ = -a.v_; return a; }
    friend ScalarField operator/(double a, ScalarField b) { b.v_ = a / b.v_; return b; }

  private:
    void check(const ScalarField& o) const {
        if (grid_ != o.grid_) throw std::invalid_argument("ScalarField: grid mismatch");
    }
    Grid grid_;
    Eigen::ArrayXd v_;
};

// Two collocated components: x = tangential, y = wall-normal.
class VectorField {
  public:
    VectorField() = default;
    explicit VectorField(const Grid& g) : x_(g), y_(g) {}
    VectorField(ScalarField x, ScalarField y) : x_(std::move(x)), y_(std::move(y)) {
        if (x_.grid() != y_.grid()) throw std::invalid_argument("VectorField: grid mismatch");
    }

    const Grid& grid() const { return x_.grid(); }
    ScalarField& x() { return x_; }
    ScalarField& y() { return y_; }
    const ScalarField& x() const { return x_; }
    const ScalarField& y() const { return y_; }

    bool finite() const { return x_.finite() && y_.finite(); }
    void require_finite(const char* who) const { x_.require_finite(who); y_.require_finite(who); }

    VectorField& operator+=(const VectorField& o) { x_ += o.x_; y_ += o.y_; return *this; }
    VectorField& operator-=(const VectorField& o) { x_ -= o.x_; y_ -= o.y_; return *this; }
    VectorField& operator*=(double a) { x_ *= a; y_ *= a; return *this; }

    friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
    friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
    friend VectorField operator*(double a, VectorField b) { return b *= a; }
    friend VectorField operator*(VectorField b, double a) { return b *= a; }
    friend VectorField operator*(const ScalarField& a, VectorField b) {
        b.x_ *= a; b.y_ *= a; return b;
    }
    friend VectorField operator/(VectorField b, const ScalarField& a) {
        b.x_ /= a; b.y_ /= a; return b;
    }
    friend VectorField operator-(VectorField a) { return a *= -1.0; }

  private:
    ScalarField x_, y_;
};

// Wall-temperature slip coefficient h(T_w): a tagged family so configs can
// name it. `constant` is the default used throughout.
struct HCoefficient {
    enum class Kind { constant, linear };
    Kind kind = Kind::constant;
    double a = 1.0;  // constant: h = a;   linear: h = a + b*(T - 1)
    double b = 0.0;

    double operator()(double T) const {
        return kind == Kind::constant ? a : a + b * (T - 1.0);
    }
    std::string tag() const { return kind == Kind::constant ? "const" : "linear"; }
};

// Dirichlet wall data: T_w on each wall (periodic arrays over x) plus h(T_w).
struct WallData {
    Eigen::ArrayXd t_bottom;  // size nx
    Eigen::ArrayXd t_top;     // size nx
    HCoefficient h;
    double hx = 0.0;  // spacing of the periodic wall arrays

    WallData() = default;
    WallData(const Grid& g, double value = 1.0)
        : t_bottom(Eigen::ArrayXd::Constant(g.nx, value)),
          t_top(Eigen::ArrayXd::Constant(g.nx, value)),
          hx(g.hx) {}

    template <class F>
    static WallData sample(const Grid& g, F&& bottom, F&& top) {
        WallData w;
        w.hx = g.hx;
        w.t_bottom.resize(g.nx);
        w.t_top.resize(g.nx);
        for (int i = 0; i < g.nx; ++i) {
            w.t_bottom[i] = bottom(g.x(i));
            w.t_top[i] = top(g.x(i));
        }
        w.validate();
        return w;
    }

    // In-phase single-mode profile T_w = 1 + delta*cos(2 pi x / lx) on both walls.
    static WallData cosine(const Grid& g, double delta) {
        auto prof = [&](double x) { return 1.0 + delta * std::cos(2.0 * M_PI * x / g.lx); };
        return sample(g, prof, prof);
    }

    void validate() const {
        if (t_bottom.minCoeff() <= 0.0 || t_top.minCoeff() <= 0.0)
            throw NonPositiveTemperature("WallData: T_w must be positive",
                                         std::min(t_bottom.minCoeff(), t_top.minCoeff()));
    }

    // Mean-oscillation amplitude max|T_w - 1| over both walls.
    double oscillation() const {
        return std::max((t_bottom - 1.0).abs().maxCoeff(), (t_top - 1.0).abs().maxCoeff());
    }
};

}  // namespace ghostflow
