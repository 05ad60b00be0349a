#pragma once

// Parameter sweeps, scaling fits and wavefunction tables.
//
// Config files are flat "key = value" text; dotted keys name sections and
// '#' starts a comment. Every key can also be set from the command line.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "jtent/asymptotics.hpp"
#include "jtent/errors.hpp"
#include "jtent/model.hpp"
#include "jtent/observables.hpp"
#include "jtent/radial.hpp"
#include "jtent/tangles.hpp"

namespace jtent {

// ---------------------------------------------------------------------------
// Configuration

struct AlphaGrid {
    double min = 0.0;
    double max = 4.0;
    int count = 81;
    std::string spacing = "linear"; ///< linear | log
};

struct SolverConfig {
    double tol = 1e-7;
    std::size_t n_initial = 4096;
    std::string q_max_policy = "auto"; ///< auto | fixed
    double q_max = 0.0;                ///< used when q_max_policy = fixed
};

struct SweepConfig {
    std::vector<double> D_values{10.0, 20.0, 50.0, 1000.0};
    AlphaGrid alpha_grid;
    std::vector<double> alpha_values; ///< explicit list; overrides alpha_grid when set
    bool explicit_alphas = false;
    SolverConfig solver;
    std::vector<std::string> outputs{"bloch", "tangles", "residual"};
    std::string output_path = "sweep.csv";
};

inline const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "D_values",      "alpha_grid.min",      "alpha_grid.max", "alpha_grid.count", "alpha_grid.spacing",
        "alpha_values",  "solver.tol",          "solver.n_initial", "solver.q_max_policy", "solver.q_max",
        "outputs",       "output_path",
    };
    return keys;
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

inline double parse_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v))
        throw ConfigError(key + ": '" + text + "' is not a finite number");
    return v;
}

inline long parse_int(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    char* end = nullptr;
    const long v = std::strtol(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size()) throw ConfigError(key + ": '" + text + "' is not an integer");
    return v;
}

inline std::vector<double> parse_doubles(const std::string& key, const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) out.push_back(parse_double(key, item));
    return out;
}

} // namespace detail

inline void apply_config_value(SweepConfig& cfg, const std::string& key, const std::string& value) {
    using namespace detail;
    if (key == "D_values")
        cfg.D_values = parse_doubles(key, value);
    else if (key == "alpha_grid.min")
        cfg.alpha_grid.min = parse_double(key, value);
    else if (key == "alpha_grid.max")
        cfg.alpha_grid.max = parse_double(key, value);
    else if (key == "alpha_grid.count")
        cfg.alpha_grid.count = static_cast<int>(parse_int(key, value));
    else if (key == "alpha_grid.spacing")
        cfg.alpha_grid.spacing = trim(value);
    else if (key == "alpha_values") {
        cfg.alpha_values = parse_doubles(key, value);
        cfg.explicit_alphas = true;
    } else if (key == "solver.tol")
        cfg.solver.tol = parse_double(key, value);
    else if (key == "solver.n_initial") {
        const long n = parse_int(key, value);
        if (n < static_cast<long>(RadialGrid::min_points)) throw ConfigError("solver.n_initial must be >= 64");
        cfg.solver.n_initial = static_cast<std::size_t>(n);
    } else if (key == "solver.q_max_policy")
        cfg.solver.q_max_policy = trim(value);
    else if (key == "solver.q_max")
        cfg.solver.q_max = parse_double(key, value);
    else if (key == "outputs")
        cfg.outputs = split_list(value);
    else if (key == "output_path")
        cfg.output_path = trim(value);
    else
        throw ConfigError("unknown key '" + key + "'");
}

/// Parses config text on top of the defaults in `cfg`.
inline void parse_config_text(SweepConfig& cfg, const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        apply_config_value(cfg, detail::trim(line.substr(0, eq)), line.substr(eq + 1));
    }
}

inline SweepConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    SweepConfig cfg;
    parse_config_text(cfg, ss.str());
    return cfg;
}

inline void validate(const SweepConfig& cfg) {
    if (cfg.D_values.empty()) throw ConfigError("D_values is empty");
    for (double d : cfg.D_values)
        if (!(d > 0.0)) throw ConfigError("D values must be positive");
    if (cfg.explicit_alphas) {
        if (cfg.alpha_values.empty()) throw ConfigError("alpha grid is empty");
        for (double a : cfg.alpha_values)
            if (!(a >= 0.0)) throw ConfigError("alpha values must be nonnegative");
    } else {
        const AlphaGrid& g = cfg.alpha_grid;
        if (g.count < 2) throw ConfigError("alpha_grid.count must be >= 2");
        if (!(g.min < g.max)) throw ConfigError("alpha_grid.min must be < alpha_grid.max");
        if (g.min < 0.0) throw ConfigError("alpha_grid.min must be nonnegative");
        if (g.spacing != "linear" && g.spacing != "log") throw ConfigError("alpha_grid.spacing must be linear or log");
        if (g.spacing == "log" && !(g.min > 0.0)) throw ConfigError("log spacing needs alpha_grid.min > 0");
    }
    if (!(cfg.solver.tol >= 1e-12)) throw ConfigError("solver.tol must be >= 1e-12");
    if (cfg.solver.q_max_policy != "auto" && cfg.solver.q_max_policy != "fixed")
        throw ConfigError("solver.q_max_policy must be auto or fixed");
    if (cfg.solver.q_max_policy == "fixed" && !(cfg.solver.q_max > 0.0))
        throw ConfigError("solver.q_max must be positive with the fixed policy");
    static const std::vector<std::string> known{"wavefunction", "bloch", "tangles", "residual", "scaling"};
    for (const auto& o : cfg.outputs)
        if (std::find(known.begin(), known.end(), o) == known.end()) throw ConfigError("unknown output '" + o + "'");
    if (cfg.output_path.empty()) throw ConfigError("output_path is empty");
}

inline std::vector<double> alpha_values(const SweepConfig& cfg) {
    if (cfg.explicit_alphas) return cfg.alpha_values;
    const AlphaGrid& g = cfg.alpha_grid;
    std::vector<double> out(static_cast<std::size_t>(g.count));
    for (int i = 0; i < g.count; ++i) {
        const double t = static_cast<double>(i) / (g.count - 1);
        out[static_cast<std::size_t>(i)] = g.spacing == "log" ? g.min * std::pow(g.max / g.min, t)
                                                              : g.min + (g.max - g.min) * t;
    }
    out.back() = g.max;
    return out;
}

// ---------------------------------------------------------------------------
// Rows

struct SweepRow {
    double D = 0.0;
    double alpha = 0.0;
    double energy = 0.0;
    double b_z = 0.0;
    double b_phi = 0.0;
    double tau_E_phiq = 0.0;
    double tau_Ephi = 0.0;
    double tau_q_Ephi = 0.0;
    double residual = 0.0;
    double lambda_min = 0.0;
    std::size_t n_grid = 0;
    bool converged = false;
    std::string error; ///< not part of the CSV schema
};

inline const char* sweep_csv_header =
    "D,alpha,energy,b_z,b_phi,tau_E_phiq,tau_Ephi,tau_q_Ephi,residual,lambda_min,n_grid,converged";

inline RadialState solve_state(const ModelParams& p, const SolverConfig& s) {
    if (s.q_max_policy == "fixed")
        return refine_radial(LowerSurface{p}, RadialGrid(s.q_max, s.n_initial), s.tol);
    return refine_until(p, s.tol, s.n_initial);
}

/// refine -> bloch -> tangle_report for one point. Failures are recorded.
inline SweepRow solve_point(double D, double alpha, const SolverConfig& s) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    SweepRow row{D, alpha, nan, nan, nan, nan, nan, nan, nan, nan, 0, false, {}};
    try {
        const ModelParams p = make_params(D, alpha);
        const RadialState st = solve_state(p, s);
        const BlochVector b = bloch(p, st);
        const TangleReport r = tangle_report(b);
        row.energy = st.energy;
        row.b_z = b.b_z;
        row.b_phi = b.b_phi;
        row.tau_E_phiq = r.tau_E_phiq;
        row.tau_Ephi = r.tau_Ephi;
        row.tau_q_Ephi = r.tau_q_Ephi;
        row.residual = r.residual;
        row.lambda_min = r.lambda_min_Ephi;
        row.n_grid = st.grid.size();
        row.converged = true;
    } catch (const Error& e) {
        row.error = e.what();
    }
    return row;
}

/// Worker count from JTENT_WORKERS, else the hardware concurrency.
inline unsigned worker_count() {
    if (const char* env = std::getenv("JTENT_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs f(i) for i in [0, n) on a pool of workers.
template <class F>
void parallel_for(std::size_t n, F&& f, unsigned workers = worker_count()) {
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) f(i);
        });
    for (auto& t : pool) t.join();
}

/// Points in D-major, alpha-minor order.
inline std::vector<SweepRow> solve_points(const std::vector<double>& Ds, const std::vector<double>& alphas,
                                          const SolverConfig& s) {
    std::vector<SweepRow> rows(Ds.size() * alphas.size());
    parallel_for(rows.size(), [&](std::size_t i) { rows[i] = solve_point(Ds[i / alphas.size()], alphas[i % alphas.size()], s); });
    return rows;
}

/// Range and monogamy checks every converged row must pass.
inline void check_row(const SweepRow& r) {
    if (!r.converged) return;
    constexpr double tol = 1e-12;
    auto in_unit = [&](double v, const char* name) {
        if (!(v >= -tol && v <= 1.0 + tol))
            throw ContractError(std::string(name) + " = " + std::to_string(v) + " outside [0, 1] at D = " +
                                std::to_string(r.D) + ", alpha = " + std::to_string(r.alpha));
    };
    in_unit(r.tau_E_phiq, "tau_E_phiq");
    in_unit(r.tau_Ephi, "tau_Ephi");
    in_unit(r.tau_q_Ephi, "tau_q_Ephi");
    in_unit(r.residual, "residual");
    if (!(r.lambda_min >= -0.5 - tol && r.lambda_min <= tol)) throw ContractError("lambda_min outside [-1/2, 0]");
    if (r.tau_E_phiq < r.tau_Ephi - tol)
        throw ContractError("monogamy violated at D = " + std::to_string(r.D) + ", alpha = " + std::to_string(r.alpha));
}

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Shortest text that round-trips, for labels and file names.
inline std::string format_short(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << sweep_csv_header << '\n';
    for (const SweepRow& r : rows) {
        check_row(r);
        for (double v : {r.D, r.alpha, r.energy, r.b_z, r.b_phi, r.tau_E_phiq, r.tau_Ephi, r.tau_q_Ephi, r.residual,
                         r.lambda_min})
            os << format_g17(v) << ',';
        os << r.n_grid << ',' << (r.converged ? "true" : "false") << '\n';
    }
}

// ---------------------------------------------------------------------------
// Fits

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("line fit needs at least two points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw DomainError("line fit needs distinct abscissae");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

struct PowerLawFit {
    std::string quantity;
    double slope = 0.0;           ///< free least-squares exponent
    double prefactor_free = 0.0;  ///< exp(intercept) of the free fit
    double prefactor_fixed = 0.0; ///< intercept with the exponent pinned to -2/3
};

struct ScalingResult {
    double alpha = 1.0;
    std::vector<SweepRow> rows;
    std::vector<PowerLawFit> fits; ///< tau_E_phiq, tau_Ephi, residual
};

inline constexpr double critical_exponent = -2.0 / 3.0;

inline ScalingResult run_scaling(const std::vector<double>& D_list, double alpha = 1.0, const SolverConfig& s = {}) {
    if (D_list.size() < 4) throw ConfigError("scaling needs at least 4 D values, got " + std::to_string(D_list.size()));
    for (double d : D_list)
        if (!(d > 0.0)) throw ConfigError("D values must be positive");
    const auto [lo, hi] = std::minmax_element(D_list.begin(), D_list.end());
    if (std::log10(*hi / *lo) < 1.5) throw ConfigError("D values must span at least 1.5 decades");

    ScalingResult out;
    out.alpha = alpha;
    out.rows = solve_points(D_list, {alpha}, s);
    std::vector<double> logD;
    for (const auto& r : out.rows) {
        if (!r.converged) throw ConvergenceError("scaling point D = " + std::to_string(r.D) + " failed: " + r.error);
        logD.push_back(std::log(r.D));
    }
    const std::vector<std::pair<std::string, double SweepRow::*>> cols{
        {"tau_E_phiq", &SweepRow::tau_E_phiq}, {"tau_Ephi", &SweepRow::tau_Ephi}, {"residual", &SweepRow::residual}};
    for (const auto& [name, member] : cols) {
        std::vector<double> logt;
        double fixed = 0.0;
        for (std::size_t i = 0; i < out.rows.size(); ++i) {
            logt.push_back(std::log(out.rows[i].*member));
            fixed += logt.back() - critical_exponent * logD[i];
        }
        const LineFit f = fit_line(logD, logt);
        out.fits.push_back({name, f.slope, std::exp(f.intercept), std::exp(fixed / static_cast<double>(logD.size()))});
    }
    return out;
}

inline void write_scaling_csv(std::ostream& os, const ScalingResult& r) {
    os << "D,tau_E_phiq,tau_Ephi,residual\n";
    for (const auto& row : r.rows)
        os << format_g17(row.D) << ',' << format_g17(row.tau_E_phiq) << ',' << format_g17(row.tau_Ephi) << ','
           << format_g17(row.residual) << '\n';
}

inline void write_fit_csv(std::ostream& os, const ScalingResult& r) {
    os << "quantity,slope,prefactor_free,prefactor_fixed\n";
    for (const auto& f : r.fits)
        os << f.quantity << ',' << format_g17(f.slope) << ',' << format_g17(f.prefactor_free) << ','
           << format_g17(f.prefactor_fixed) << '\n';
}

// ---------------------------------------------------------------------------
// Wavefunctions on a shared grid

struct WavefunctionTable {
    double D = 0.0;
    std::vector<double> alphas;
    std::vector<double> q;
    std::vector<std::vector<double>> phi; ///< one column per alpha
};

inline WavefunctionTable run_wavefunctions(double D, const std::vector<double>& alphas, std::size_t n = 8192) {
    if (alphas.empty()) throw ConfigError("alpha list is empty");
    double q_max = 0.0;
    for (double a : alphas) q_max = std::max(q_max, default_physical_grid(make_params(D, a)).q_max());
    const RadialGrid grid(q_max, n);
    WavefunctionTable t{D, alphas, std::vector<double>(n), std::vector<std::vector<double>>(alphas.size())};
    for (std::size_t i = 0; i < n; ++i) t.q[i] = grid.node(i);
    parallel_for(alphas.size(), [&](std::size_t k) { t.phi[k] = solve_physical(make_params(D, alphas[k]), grid).phi; });
    return t;
}

inline void write_wavefunctions_csv(std::ostream& os, const WavefunctionTable& t) {
    os << 'q';
    for (double a : t.alphas) os << ",phi_" << format_short(a);
    os << '\n';
    for (std::size_t i = 0; i < t.q.size(); ++i) {
        os << format_g17(t.q[i]);
        for (const auto& col : t.phi) os << ',' << format_g17(col[i]);
        os << '\n';
    }
}

/// Location of the maximum of f(q_i, phi_i) over the grid.
template <class F>
double argmax_over(const std::vector<double>& q, const std::vector<double>& phi, F&& f) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < q.size(); ++i)
        if (f(q[i], phi[i]) > f(q[best], phi[best])) best = i;
    return q[best];
}

// ---------------------------------------------------------------------------
// Sweep driver

struct SweepResult {
    std::vector<SweepRow> rows;
    double seconds = 0.0;
};

inline std::string path_stem(const std::string& path) {
    const auto dot = path.rfind('.');
    const auto slash = path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path;
    return path.substr(0, dot);
}

inline nlohmann::ordered_json config_json(const SweepConfig& cfg) {
    nlohmann::ordered_json j;
    j["D_values"] = cfg.D_values;
    if (cfg.explicit_alphas)
        j["alpha_values"] = cfg.alpha_values;
    else
        j["alpha_grid"] = {{"min", cfg.alpha_grid.min},
                           {"max", cfg.alpha_grid.max},
                           {"count", cfg.alpha_grid.count},
                           {"spacing", cfg.alpha_grid.spacing}};
    j["solver"] = {{"tol", cfg.solver.tol},
                   {"n_initial", cfg.solver.n_initial},
                   {"q_max_policy", cfg.solver.q_max_policy},
                   {"q_max", cfg.solver.q_max}};
    j["outputs"] = cfg.outputs;
    j["output_path"] = cfg.output_path;
    return j;
}

inline bool wants(const SweepConfig& cfg, const std::string& output) {
    return std::find(cfg.outputs.begin(), cfg.outputs.end(), output) != cfg.outputs.end();
}

/// Solves every (D, alpha) point, writes the CSV, a .meta.json sidecar and
/// any extra outputs requested.
inline SweepResult run_sweep(const SweepConfig& cfg, bool write_files = true) {
    validate(cfg);
    const auto start = std::chrono::steady_clock::now();
    const std::vector<double> alphas = alpha_values(cfg);
    SweepResult res;
    res.rows = solve_points(cfg.D_values, alphas, cfg.solver);
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const auto& r : res.rows) check_row(r);
    if (!write_files) return res;

    {
        std::ofstream out(cfg.output_path);
        if (!out) throw ConfigError("cannot write '" + cfg.output_path + "'");
        write_sweep_csv(out, res.rows);
    }
    const std::string stem = path_stem(cfg.output_path);

    nlohmann::ordered_json meta;
    meta["config"] = config_json(cfg);
    std::size_t failed = 0, max_n = 0;
    nlohmann::ordered_json failures = nlohmann::ordered_json::array();
    for (const auto& r : res.rows) {
        max_n = std::max(max_n, r.n_grid);
        if (!r.converged) {
            ++failed;
            failures.push_back({{"D", r.D}, {"alpha", r.alpha}, {"error", r.error}});
        }
    }
    meta["stats"] = {{"rows", res.rows.size()},
                     {"failed", failed},
                     {"max_n_grid", max_n},
                     {"workers", worker_count()},
                     {"seconds", res.seconds}};
    meta["failures"] = failures;

    if (wants(cfg, "wavefunction"))
        for (double D : cfg.D_values) {
            const std::string path = stem + ".wavefunctions_D" + format_short(D) + ".csv";
            std::ofstream out(path);
            write_wavefunctions_csv(out, run_wavefunctions(D, alphas));
            meta["wavefunction_files"].push_back(path);
        }
    if (wants(cfg, "scaling")) {
        // exponent of each column vs D at fixed alpha, when there are enough D values
        nlohmann::ordered_json sc = nlohmann::ordered_json::array();
        if (cfg.D_values.size() >= 2)
            for (std::size_t a = 0; a < alphas.size(); ++a) {
                std::vector<double> x, y;
                for (std::size_t d = 0; d < cfg.D_values.size(); ++d) {
                    const SweepRow& r = res.rows[d * alphas.size() + a];
                    if (r.converged && r.tau_E_phiq > 0.0) {
                        x.push_back(std::log(r.D));
                        y.push_back(std::log(r.tau_E_phiq));
                    }
                }
                if (x.size() >= 2) sc.push_back({{"alpha", alphas[a]}, {"tau_E_phiq_slope", fit_line(x, y).slope}});
            }
        meta["scaling"] = sc;
    }
    std::ofstream(stem + ".meta.json") << meta.dump(2) << '\n';
    return res;
}

} // namespace jtent
