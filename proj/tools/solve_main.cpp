#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mpsolve/errors.hpp"
#include "mpsolve/field_io.hpp"
#include "mpsolve/pipeline.hpp"

namespace {

// exit codes: 0 success, 2 config error, 3 regime-gate failure,
// 4 solver non-convergence, 5 geometry failure
int run(int argc, char** argv) {
    CLI::App app{"two-solution solver for -Delta u = c(x) u + mu |grad u|^2 + f(x)"};
    std::string config_path;
    std::string preset, out_dir, mu_scan;
    std::uint64_t seed = 0;
    double theta = 0.0, p = 0.0, lambda = 0.0;
    bool have_seed = false;

    app.add_option("--config", config_path, "path to a key = value config file")->required();
    app.add_option("--preset", preset, "coefficient preset (paper-regime, coercive, czero, gate-fail, custom)");
    app.add_option("--out", out_dir, "output directory for reports and fields");
    auto* seed_opt = app.add_option("--seed", seed, "probe RNG seed");
    app.add_option("--theta", theta, "sphere radius exponent in (0,1)");
    app.add_option("--p", p, "growth exponent p > 1");
    app.add_option("--lambda", lambda, "pin the transform parameter lambda instead of searching");
    app.add_option("--mu-scan", mu_scan, "tabulate lambda_1(-c - mu f) for mu in lo:hi:n");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    have_seed = seed_opt->count() > 0;

    mps::ConfigOverlay overlay;
    if (!preset.empty()) overlay.emplace_back("preset", preset);
    if (!out_dir.empty()) overlay.emplace_back("out_dir", out_dir);
    if (have_seed) overlay.emplace_back("seed", std::to_string(seed));
    if (theta > 0.0) overlay.emplace_back("theta", mps::format_double(theta));
    if (p > 0.0) overlay.emplace_back("p", mps::format_double(p));
    if (lambda > 0.0) overlay.emplace_back("lambda", mps::format_double(lambda));
    if (!mu_scan.empty()) overlay.emplace_back("mu_scan", mu_scan);

    const mps::RunConfig cfg = mps::parse_config_file(config_path, overlay);
    const mps::ScenarioResult result = mps::run_scenario(cfg);

    if (result.outcome) {
        const auto& oc = *result.outcome;
        std::cout << (oc.two_solution_mode ? "two solutions computed" : "single solution computed")
                  << " (" << oc.mode_note << ")\n";
        std::cout << "  lambda_1(-c) = " << oc.lambda1_minus_c
                  << ", lambda_1(-c - mu f) = " << oc.lambda1_gate << ", gamma_1 = " << oc.gamma1
                  << "\n";
        std::cout << "  reports written to " << cfg.out_dir << "\n";
    } else {
        std::cout << "mu scan written to " << cfg.out_dir << "/mu_scan.csv\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const mps::ConfigError& e) {
        std::cerr << "error [config]: " << e.what() << "\n";
        return 2;
    } catch (const mps::RegimeError& e) {
        std::cerr << "error [" << e.stage() << "]: " << e.what() << "\n";
        return 3;
    } catch (const mps::ConvergenceError& e) {
        std::cerr << "error [" << e.stage() << "]: " << e.what()
                  << " (last residual " << e.last_residual() << ")\n";
        return 4;
    } catch (const mps::GeometryError& e) {
        std::cerr << "error [" << e.stage() << "]: " << e.what() << "\n";
        return 5;
    } catch (const mps::Error& e) {
        std::cerr << "error [" << e.stage() << "]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
