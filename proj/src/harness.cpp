#include "ghostflow/harness.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ghostflow {

using nlohmann::json;

void RunConfig::validate() const {
    Grid(nx, ny, lx, ly);  // bounds check
    if (delta < 0.0) throw std::invalid_argument("RunConfig: delta must be >= 0");
    if (eps_list.empty()) throw std::invalid_argument("RunConfig: eps_list empty");
    for (size_t k = 0; k < eps_list.size(); ++k) {
        if (!(eps_list[k] > 0.0 && eps_list[k] < 1.0))
            throw std::invalid_argument("RunConfig: eps values must lie in (0,1)");
        if (k > 0 && eps_list[k] >= eps_list[k - 1])
            throw std::invalid_argument("RunConfig: eps_list must be strictly decreasing");
    }
    if (mode != "expansion" && mode != "newton")
        throw std::invalid_argument("RunConfig: mode must be 'expansion' or 'newton'");
    if (wall_profile != "cos" && wall_profile != "const")
        throw std::invalid_argument("RunConfig: unknown wall profile");
    if (h_tag != "const" && h_tag != "linear")
        throw std::invalid_argument("RunConfig: unknown h tag");
    params().validate();
}

Params RunConfig::params() const {
    Params p;
    p.epsilon = eps_list.front();
    p.mu = mu;
    p.lambda = lambda;
    p.kappa = kappa;
    p.M = M;
    p.fp_tol = fp_tol;
    p.fp_max_iter = fp_max_iter;
    p.newton_tol = newton_tol;
    p.newton_max_iter = newton_max_iter;
    return p;
}

WallData RunConfig::walls(const Grid& g) const {
    WallData w = (wall_profile == "cos") ? WallData::cosine(g, delta) : WallData(g, 1.0);
    w.h.kind = (h_tag == "const") ? HCoefficient::Kind::constant : HCoefficient::Kind::linear;
    w.h.a = h_a;
    w.h.b = h_b;
    return w;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SolverError("RunConfig: cannot open " + path);
    RunConfig c;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return (a == std::string::npos) ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) continue;
        try {
            if (key == "nx") c.nx = std::stoi(val);
            else if (key == "ny") c.ny = std::stoi(val);
            else if (key == "lx") c.lx = std::stod(val);
            else if (key == "ly") c.ly = std::stod(val);
            else if (key == "delta") c.delta = std::stod(val);
            else if (key == "wall_profile") c.wall_profile = val;
            else if (key == "h") c.h_tag = val;
            else if (key == "h_a") c.h_a = std::stod(val);
            else if (key == "h_b") c.h_b = std::stod(val);
            else if (key == "mu") c.mu = std::stod(val);
            else if (key == "lambda") c.lambda = std::stod(val);
            else if (key == "kappa") c.kappa = std::stod(val);
            else if (key == "M") c.M = std::stod(val);
            else if (key == "fp_tol") c.fp_tol = std::stod(val);
            else if (key == "fp_max_iter") c.fp_max_iter = std::stoi(val);
            else if (key == "newton_tol") c.newton_tol = std::stod(val);
            else if (key == "newton_max_iter") c.newton_max_iter = std::stoi(val);
            else if (key == "mode") c.mode = val;
            else if (key == "out") c.out_dir = val;
            else if (key == "seed") c.seed = std::stoull(val);
            else if (key == "eps_list") {
                c.eps_list.clear();
                std::stringstream ss(val);
                std::string tok;
                while (std::getline(ss, tok, ',')) c.eps_list.push_back(std::stod(tok));
            } else {
                throw SolverError("RunConfig: unknown key '" + key + "' in " + path);
            }
        } catch (const std::invalid_argument&) {
            throw SolverError("RunConfig: bad value for '" + key + "' at " + path + ":" +
                              std::to_string(lineno));
        }
    }
    return c;
}

// ---------------------------------------------------------------------------

SlopeFit fit_slope(const std::vector<double>& eps, const std::vector<double>& norms) {
    SlopeFit f;
    std::vector<double> xs, ys;
    for (size_t k = 0; k < eps.size(); ++k)
        if (norms[k] > 0.0) {
            xs.push_back(std::log(eps[k]));
            ys.push_back(std::log(norms[k]));
        }
    f.points = static_cast<int>(xs.size());
    if (f.points < 3) return f;
    const double n = static_cast<double>(f.points);
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (int k = 0; k < f.points; ++k) {
        sx += xs[k];
        sy += ys[k];
        sxx += xs[k] * xs[k];
        sxy += xs[k] * ys[k];
        syy += ys[k] * ys[k];
    }
    const double vx = sxx - sx * sx / n;
    const double vy = syy - sy * sy / n;
    const double cxy = sxy - sx * sy / n;
    if (vx <= 0.0) return f;
    f.slope = cxy / vx;
    f.r_squared = (vy > 0.0) ? (cxy * cxy) / (vx * vy) : 1.0;
    f.valid = true;
    return f;
}

ConvergenceReport run_epsilon_sweep(const RunConfig& config) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();
    ConvergenceReport rep;
    rep.config = config;
    rep.independent = (config.mode == "newton");

    const Grid grid = config.grid();
    const WallData walls = config.walls(grid);
    Params base = config.params();

    // the limiting tier does not depend on epsilon: solved exactly once
    LimitingSolution lim = solve_limiting(grid, walls, base);
    rep.limiting_solves = 1;
    rep.limiting_iterations = lim.iterations;

    for (double eps : config.eps_list) {
        SweepRow row;
        row.epsilon = eps;
        const auto te0 = std::chrono::steady_clock::now();
        try {
            Params prm = base;
            prm.epsilon = eps;
            NonlinearRemainderResult res = solve_remainder_nonlinear(lim, prm);
            row.outer_iters = res.outer_iterations;
            row.rem_rho_H2 = res.rem.norm_rho_H2;
            row.rem_u_K = res.rem.norm_u_K;
            row.rem_theta_H3 = res.rem.norm_theta_H3;

            FullState ref = assemble_expansion(lim, res.fo, res.rem, prm);
            if (rep.independent) {
                NewtonReport nr = solve_full_newton(walls, prm, ref);
                row.newton_iters = nr.iterations;
                ref = nr.state;
            }
            row.u_dev_H2 = sobolev_norm((1.0 / eps) * ref.u - lim.u1, 2);
            row.rho_dev_H2 = sobolev_norm(ref.rho - lim.rho0, 2);
            row.theta_dev_H3 = sobolev_norm(ref.theta - lim.theta0, 3);
            row.gradP_H1 = sobolev_norm(grad(ref.P), 1);
            row.theta_dev_Linf = linf_norm(ref.theta - lim.theta0);
        } catch (const SolverError& e) {
            row.ok = false;
            row.status = e.what();
        }
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - te0).count();
        rep.rows.push_back(std::move(row));
    }

    std::vector<double> eps_ok, du, drho, dth, dgp, dli;
    for (const SweepRow& r : rep.rows)
        if (r.ok) {
            eps_ok.push_back(r.epsilon);
            du.push_back(r.u_dev_H2);
            drho.push_back(r.rho_dev_H2);
            dth.push_back(r.theta_dev_H3);
            dgp.push_back(r.gradP_H1);
            dli.push_back(r.theta_dev_Linf);
        }
    rep.slope_u = fit_slope(eps_ok, du);
    rep.slope_rho = fit_slope(eps_ok, drho);
    rep.slope_theta = fit_slope(eps_ok, dth);
    rep.slope_gradP = fit_slope(eps_ok, dgp);
    rep.slope_theta_linf = fit_slope(eps_ok, dli);
    rep.total_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

// ---------------------------------------------------------------------------
// emission
// ---------------------------------------------------------------------------

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string sanitize(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

json slope_json(const SlopeFit& f) {
    return json{{"slope", f.slope}, {"r_squared", f.r_squared}, {"points", f.points},
                {"valid", f.valid}};
}

SlopeFit slope_from_json(const json& j) {
    SlopeFit f;
    f.slope = j.at("slope").get<double>();
    f.r_squared = j.at("r_squared").get<double>();
    f.points = j.at("points").get<int>();
    f.valid = j.at("valid").get<bool>();
    return f;
}

}  // namespace

std::string report_csv(const ConvergenceReport& report) {
    std::string out =
        "epsilon,u_dev_H2,rho_dev_H2,theta_dev_H3,gradP_H1,rem_rho_H2,rem_u_K,rem_theta_H3,"
        "newton_iters,status\n";
    for (const SweepRow& r : report.rows) {
        out += fmt(r.epsilon) + "," + fmt(r.u_dev_H2) + "," + fmt(r.rho_dev_H2) + "," +
               fmt(r.theta_dev_H3) + "," + fmt(r.gradP_H1) + "," + fmt(r.rem_rho_H2) + "," +
               fmt(r.rem_u_K) + "," + fmt(r.rem_theta_H3) + "," + std::to_string(r.newton_iters) +
               "," + sanitize(r.status) + "\n";
    }
    return out;
}

std::string report_json(const ConvergenceReport& report) {
    json j;
    j["schema"] = 1;
    j["version"] = kVersion;
    const RunConfig& c = report.config;
    j["config"] = json{{"nx", c.nx},
                       {"ny", c.ny},
                       {"lx", c.lx},
                       {"ly", c.ly},
                       {"delta", c.delta},
                       {"wall_profile", c.wall_profile},
                       {"h", c.h_tag},
                       {"h_a", c.h_a},
                       {"h_b", c.h_b},
                       {"eps_list", c.eps_list},
                       {"mu", c.mu},
                       {"lambda", c.lambda},
                       {"kappa", c.kappa},
                       {"M", c.M},
                       {"fp_tol", c.fp_tol},
                       {"fp_max_iter", c.fp_max_iter},
                       {"newton_tol", c.newton_tol},
                       {"newton_max_iter", c.newton_max_iter},
                       {"mode", c.mode},
                       {"out", c.out_dir},
                       {"seed", c.seed}};
    j["independent"] = report.independent;
    j["limiting_solves"] = report.limiting_solves;
    j["limiting_iterations"] = report.limiting_iterations;
    json rows = json::array();
    for (const SweepRow& r : report.rows) {
        rows.push_back(json{{"epsilon", r.epsilon},
                            {"u_dev_H2", r.u_dev_H2},
                            {"rho_dev_H2", r.rho_dev_H2},
                            {"theta_dev_H3", r.theta_dev_H3},
                            {"gradP_H1", r.gradP_H1},
                            {"rem_rho_H2", r.rem_rho_H2},
                            {"rem_u_K", r.rem_u_K},
                            {"rem_theta_H3", r.rem_theta_H3},
                            {"theta_dev_Linf", r.theta_dev_Linf},
                            {"newton_iters", r.newton_iters},
                            {"outer_iters", r.outer_iters},
                            {"status", r.status},
                            {"ok", r.ok}});
    }
    j["rows"] = rows;
    j["slopes"] = json{{"u_dev_H2", slope_json(report.slope_u)},
                       {"rho_dev_H2", slope_json(report.slope_rho)},
                       {"theta_dev_H3", slope_json(report.slope_theta)},
                       {"gradP_H1", slope_json(report.slope_gradP)},
                       {"theta_dev_Linf", slope_json(report.slope_theta_linf)}};
    // wall-clock timings; excluded from the determinism contract
    json timings;
    timings["total_seconds"] = report.total_seconds;
    json per_eps = json::array();
    for (const SweepRow& r : report.rows) per_eps.push_back(r.seconds);
    timings["per_epsilon_seconds"] = per_eps;
    j["timings"] = timings;
    return j.dump(2) + "\n";
}

ConvergenceReport parse_report_json(const std::string& text) {
    const json j = json::parse(text);
    if (j.at("schema").get<int>() != 1) throw SolverError("parse_report_json: unknown schema");
    ConvergenceReport rep;
    const json& c = j.at("config");
    rep.config.nx = c.at("nx").get<int>();
    rep.config.ny = c.at("ny").get<int>();
    rep.config.lx = c.at("lx").get<double>();
    rep.config.ly = c.at("ly").get<double>();
    rep.config.delta = c.at("delta").get<double>();
    rep.config.wall_profile = c.at("wall_profile").get<std::string>();
    rep.config.h_tag = c.at("h").get<std::string>();
    rep.config.h_a = c.at("h_a").get<double>();
    rep.config.h_b = c.at("h_b").get<double>();
    rep.config.eps_list = c.at("eps_list").get<std::vector<double>>();
    rep.config.mu = c.at("mu").get<double>();
    rep.config.lambda = c.at("lambda").get<double>();
    rep.config.kappa = c.at("kappa").get<double>();
    rep.config.M = c.at("M").get<double>();
    rep.config.fp_tol = c.at("fp_tol").get<double>();
    rep.config.fp_max_iter = c.at("fp_max_iter").get<int>();
    rep.config.newton_tol = c.at("newton_tol").get<double>();
    rep.config.newton_max_iter = c.at("newton_max_iter").get<int>();
    rep.config.mode = c.at("mode").get<std::string>();
    rep.config.out_dir = c.at("out").get<std::string>();
    rep.config.seed = c.at("seed").get<unsigned long long>();
    rep.independent = j.at("independent").get<bool>();
    rep.limiting_solves = j.at("limiting_solves").get<int>();
    rep.limiting_iterations = j.at("limiting_iterations").get<int>();
    for (const json& rj : j.at("rows")) {
        SweepRow r;
        r.epsilon = rj.at("epsilon").get<double>();
        r.u_dev_H2 = rj.at("u_dev_H2").get<double>();
        r.rho_dev_H2 = rj.at("rho_dev_H2").get<double>();
        r.theta_dev_H3 = rj.at("theta_dev_H3").get<double>();
        r.gradP_H1 = rj.at("gradP_H1").get<double>();
        r.rem_rho_H2 = rj.at("rem_rho_H2").get<double>();
        r.rem_u_K = rj.at("rem_u_K").get<double>();
        r.rem_theta_H3 = rj.at("rem_theta_H3").get<double>();
        r.theta_dev_Linf = rj.at("theta_dev_Linf").get<double>();
        r.newton_iters = rj.at("newton_iters").get<int>();
        r.outer_iters = rj.at("outer_iters").get<int>();
        r.status = rj.at("status").get<std::string>();
        r.ok = rj.at("ok").get<bool>();
        rep.rows.push_back(std::move(r));
    }
    const json& s = j.at("slopes");
    rep.slope_u = slope_from_json(s.at("u_dev_H2"));
    rep.slope_rho = slope_from_json(s.at("rho_dev_H2"));
    rep.slope_theta = slope_from_json(s.at("theta_dev_H3"));
    rep.slope_gradP = slope_from_json(s.at("gradP_H1"));
    rep.slope_theta_linf = slope_from_json(s.at("theta_dev_Linf"));
    rep.total_seconds = j.at("timings").at("total_seconds").get<double>();
    return rep;
}

namespace {

// minimal static log-log plot of the deviation norms against epsilon
std::string report_svg(const ConvergenceReport& rep) {
    std::vector<std::pair<std::string, std::vector<double>>> series = {
        {"u_dev_H2", {}}, {"rho_dev_H2", {}}, {"theta_dev_H3", {}}, {"gradP_H1", {}}};
    std::vector<double> eps;
    for (const SweepRow& r : rep.rows)
        if (r.ok) {
            eps.push_back(r.epsilon);
            series[0].second.push_back(r.u_dev_H2);
            series[1].second.push_back(r.rho_dev_H2);
            series[2].second.push_back(r.theta_dev_H3);
            series[3].second.push_back(r.gradP_H1);
        }
    const int W = 640, H = 480, m = 60;
    std::ostringstream s;
    s << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    s << "<rect width='100%' height='100%' fill='white'/>\n";
    if (eps.size() >= 2) {
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (double e : eps) {
            xmin = std::min(xmin, std::log10(e));
            xmax = std::max(xmax, std::log10(e));
        }
        for (const auto& sv : series)
            for (double v : sv.second)
                if (v > 0) {
                    ymin = std::min(ymin, std::log10(v));
                    ymax = std::max(ymax, std::log10(v));
                }
        if (ymin > ymax) { ymin = -1; ymax = 1; }
        auto px = [&](double lx) { return m + (lx - xmin) / std::max(1e-12, xmax - xmin) * (W - 2 * m); };
        auto py = [&](double ly) { return H - m - (ly - ymin) / std::max(1e-12, ymax - ymin) * (H - 2 * m); };
        const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
        for (size_t k = 0; k < series.size(); ++k) {
            s << "<polyline fill='none' stroke='" << colors[k] << "' stroke-width='2' points='";
            for (size_t q = 0; q < eps.size(); ++q)
                if (series[k].second[q] > 0)
                    s << px(std::log10(eps[q])) << "," << py(std::log10(series[k].second[q])) << " ";
            s << "'/>\n";
            s << "<text x='" << (m + 8) << "' y='" << (m + 18 * (k + 1)) << "' fill='" << colors[k]
              << "' font-size='13'>" << series[k].first << "</text>\n";
        }
        s << "<text x='" << (W / 2 - 30) << "' y='" << (H - 15)
          << "' font-size='13'>log10 epsilon</text>\n";
    } else {
        s << "<text x='40' y='40' font-size='14'>not enough successful rows to plot</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SolverError("emit_report: cannot open " + path);
    out << content;
    if (!out) throw SolverError("emit_report: write failed for " + path);
}

}  // namespace

std::vector<std::string> emit_report(const ConvergenceReport& report, bool with_plot) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(report.config.out_dir, ec);
    if (ec) throw SolverError("emit_report: cannot create directory " + report.config.out_dir);
    std::vector<std::string> written;
    const std::string base = report.config.out_dir + "/report";
    write_file(base + ".csv", report_csv(report));
    written.push_back(base + ".csv");
    write_file(base + ".json", report_json(report));
    written.push_back(base + ".json");
    if (with_plot) {
        write_file(base + ".svg", report_svg(report));
        written.push_back(base + ".svg");
    }
    return written;
}

}  // namespace ghostflow
