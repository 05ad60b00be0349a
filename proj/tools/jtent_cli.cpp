// jtent: ground state and entanglement of the E x epsilon Jahn-Teller model
// in a transverse field.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "jtent/acceptance.hpp"
#include "jtent/jtent.hpp"

namespace {

using namespace jtent;

int cmd_solve(double D, double alpha, double tol, std::size_t n_initial, const std::string& wf_path) {
    const ModelParams p = make_params(D, alpha);
    const RadialState s = refine_until(p, tol, n_initial);
    const BlochVector b = bloch(p, s);
    const TangleReport t = tangle_report(b);
    nlohmann::ordered_json j;
    j["D"] = D;
    j["alpha"] = alpha;
    j["L"] = p.L;
    j["energy"] = s.energy;
    j["n_grid"] = s.grid.size();
    j["q_max"] = s.grid.q_max();
    j["b_z"] = b.b_z;
    j["b_phi"] = b.b_phi;
    j["tau_E_phiq"] = t.tau_E_phiq;
    j["tau_phi_Eq"] = t.tau_phi_Eq;
    j["tau_q_Ephi"] = t.tau_q_Ephi;
    j["tau_Ephi"] = t.tau_Ephi;
    j["tau_Eq"] = t.tau_Eq;
    j["tau_phiq"] = t.tau_phiq;
    j["lambda_min"] = t.lambda_min_Ephi;
    j["residual"] = t.residual;
    std::cout << j.dump(2) << '\n';
    if (!wf_path.empty()) {
        std::ofstream out(wf_path);
        if (!out) throw ConfigError("cannot write '" + wf_path + "'");
        write_wavefunction_csv(out, s);
    }
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::map<std::string, std::string>& overrides) {
    SweepConfig cfg = config_path.empty() ? SweepConfig{} : load_config(config_path);
    for (const auto& [k, v] : overrides) apply_config_value(cfg, k, v);
    const SweepResult r = run_sweep(cfg);
    std::size_t failed = 0;
    for (const auto& row : r.rows) failed += row.converged ? 0 : 1;
    std::fprintf(stderr, "%zu rows (%zu failed) written to %s in %.2f s\n", r.rows.size(), failed,
                 cfg.output_path.c_str(), r.seconds);
    return 0;
}

int cmd_scaling(const std::string& d_list, double alpha, double tol, const std::string& out_path) {
    SolverConfig s;
    s.tol = tol;
    const ScalingResult r = run_scaling(detail::parse_doubles("--D-list", d_list), alpha, s);
    if (out_path.empty()) {
        write_scaling_csv(std::cout, r);
        std::cout << '\n';
        write_fit_csv(std::cout, r);
    } else {
        std::ofstream out(out_path);
        write_scaling_csv(out, r);
        std::ofstream fit(path_stem(out_path) + ".fit.csv");
        write_fit_csv(fit, r);
        write_fit_csv(std::cout, r);
    }
    return 0;
}

int cmd_wavefunctions(double D, const std::string& alpha_list, std::size_t n, const std::string& out_path) {
    const WavefunctionTable t = run_wavefunctions(D, detail::parse_doubles("--alpha-list", alpha_list), n);
    if (out_path.empty()) {
        write_wavefunctions_csv(std::cout, t);
    } else {
        std::ofstream out(out_path);
        if (!out) throw ConfigError("cannot write '" + out_path + "'");
        write_wavefunctions_csv(out, t);
    }
    return 0;
}

int cmd_validate(const std::vector<int>& only) {
    bool all = true;
    const auto checks = acceptance::all_checks();
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        const acceptance::CheckResult r = checks[i]();
        std::cout << acceptance::format_line(r) << std::endl;
        all = all && r.passed;
    }
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adiabatic ground state and entanglement sharing for the E x epsilon Jahn-Teller model"};
    app.require_subcommand(1);

    double D = 10.0, alpha = 1.0, tol = 1e-8;
    std::size_t n_initial = 4096;
    std::string wf_path;
    auto* solve = app.add_subcommand("solve", "Solve one (D, alpha) point and print Bloch vector and tangles as JSON");
    solve->add_option("--D", D, "Field parameter D = 2 Delta/omega")->required();
    solve->add_option("--alpha", alpha, "Coupling ratio alpha = L^2/(2D)")->required();
    solve->add_option("--tol", tol, "Energy convergence tolerance")->capture_default_str();
    solve->add_option("--n-initial", n_initial, "Initial grid size")->capture_default_str();
    solve->add_option("--wavefunction", wf_path, "Write (q, phi) CSV here");

    std::string config_path;
    std::map<std::string, std::string> overrides;
    auto* sweep = app.add_subcommand("sweep", "Sweep a (D, alpha) grid and write CSV plus a .meta.json sidecar");
    sweep->add_option("--config", config_path, "Config file (key = value lines); defaults used when absent");
    for (const auto& key : config_keys()) {
        sweep->add_option_function<std::string>(
            "--" + key, [key, &overrides](const std::string& v) { overrides[key] = v; }, "Override config key " + key);
    }

    std::string d_list = "10,30,100,300,1000", scaling_out;
    double scaling_alpha = 1.0, scaling_tol = 1e-8;
    auto* scaling = app.add_subcommand("scaling", "Fit log tau against log D at fixed alpha");
    scaling->add_option("--D-list", d_list, "Comma-separated D values")->capture_default_str();
    scaling->add_option("--alpha", scaling_alpha, "Coupling ratio")->capture_default_str();
    scaling->add_option("--tol", scaling_tol, "Energy convergence tolerance")->capture_default_str();
    scaling->add_option("--output", scaling_out, "CSV path (fit goes to <stem>.fit.csv)");

    double wf_D = 10.0;
    std::string alpha_list = "0.8,1.0,1.2,1.6,2.0", wf_out;
    std::size_t wf_n = 8192;
    auto* wfs = app.add_subcommand("wavefunctions", "Ground-state wavefunctions on a shared grid, one column per alpha");
    wfs->add_option("--D", wf_D, "Field parameter")->capture_default_str();
    wfs->add_option("--alpha-list", alpha_list, "Comma-separated alpha values")->capture_default_str();
    wfs->add_option("--n", wf_n, "Grid points")->capture_default_str();
    wfs->add_option("--output", wf_out, "CSV path (stdout when absent)");

    std::vector<int> only;
    auto* validate_cmd = app.add_subcommand("validate", "Run the acceptance checks; exit 0 only if all pass");
    validate_cmd->add_option("--only", only, "Run only these check ids");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) return cmd_solve(D, alpha, tol, n_initial, wf_path);
        if (*sweep) return cmd_sweep(config_path, overrides);
        if (*scaling) return cmd_scaling(d_list, scaling_alpha, scaling_tol, scaling_out);
        if (*wfs) return cmd_wavefunctions(wf_D, alpha_list, wf_n, wf_out);
        if (*validate_cmd) return cmd_validate(only);
    } catch (const jtent::Error& e) {
        std::cerr << "jtent: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
