/// @file harness.hpp
/// @brief Epsilon sweeps, convergence-rate fitting and report emission.
#pragma once

#include <string>
#include <vector>

#include "ghostflow/full_ns.hpp"

namespace ghostflow {

inline constexpr const char* kVersion = "ghostflow 0.1.0";

struct RunConfig {
    int nx = 64, ny = 64;
    double lx = 1.0, ly = 1.0;
    double delta = 0.05;              // wall-temperature amplitude
    std::string wall_profile = "cos"; // T_w = 1 + delta cos(2 pi x / lx), both walls
    std::string h_tag = "const";
    double h_a = 1.0, h_b = 0.0;
    std::vector<double> eps_list = {0.2, 0.1, 0.05, 0.025};  // strictly decreasing
    double mu = 1.0, lambda = 0.0, kappa = 1.0, M = 1.0;
    double fp_tol = 1e-10;
    int fp_max_iter = 200;
    double newton_tol = 1e-9;
    int newton_max_iter = 40;
    std::string mode = "newton";  // "expansion" | "newton"
    std::string out_dir = "out";
    unsigned long long seed = 0;

    void validate() const;
    Params params() const;
    Grid grid() const { return Grid(nx, ny, lx, ly); }
    WallData walls(const Grid& g) const;

    // flat key-value text, one `key = value` per line, '#' comments
    static RunConfig from_file(const std::string& path);
};

struct SweepRow {
    double epsilon = 0.0;
    double u_dev_H2 = 0.0, rho_dev_H2 = 0.0, theta_dev_H3 = 0.0, gradP_H1 = 0.0;
    double rem_rho_H2 = 0.0, rem_u_K = 0.0, rem_theta_H3 = 0.0;
    double theta_dev_Linf = 0.0;
    int newton_iters = 0;
    int outer_iters = 0;
    std::string status = "ok";
    bool ok = true;
    double seconds = 0.0;
};

struct SlopeFit {
    double slope = 0.0;
    double r_squared = 0.0;
    int points = 0;
    bool valid = false;  // needs >= 3 successful epsilon rows
};

struct ConvergenceReport {
    RunConfig config;
    std::vector<SweepRow> rows;
    SlopeFit slope_u, slope_rho, slope_theta, slope_gradP, slope_theta_linf;
    bool independent = false;    // deviations measured against the Newton solve
    int limiting_solves = 0;     // must stay at 1 per sweep
    int limiting_iterations = 0;
    double total_seconds = 0.0;
};

ConvergenceReport run_epsilon_sweep(const RunConfig& config);

// least-squares fit of log(norm) against log(eps) over the successful rows
SlopeFit fit_slope(const std::vector<double>& eps, const std::vector<double>& norms);

// Writes report.csv and report.json (and report.svg when plot is requested)
// into config.out_dir; returns the paths written.
std::vector<std::string> emit_report(const ConvergenceReport& report, bool with_plot = false);

// CSV text with the documented fixed column order.
std::string report_csv(const ConvergenceReport& report);
std::string report_json(const ConvergenceReport& report);
ConvergenceReport parse_report_json(const std::string& text);

}  // namespace ghostflow
