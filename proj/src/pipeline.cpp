#include "mpsolve/pipeline.hpp"

#include <cmath>
#include <fstream>

#include "mpsolve/errors.hpp"
#include "mpsolve/field_io.hpp"
#include "mpsolve/presets.hpp"
#include "mpsolve/spectral.hpp"

namespace mps {

namespace {

// Two-column slice along axis 0 through the midpoint of the other axes.
void write_midline_profile(const std::filesystem::path& path, const ScalarField& field) {
    const Grid& g = field.grid();
    const int jmid = g.interior_count(1) / 2;
    const int kmid = g.dimension() == 3 ? g.interior_count(2) / 2 : 0;
    std::ofstream out(path);
    if (!out) throw Error("io", "cannot open '" + path.string() + "' for writing");
    for (int i = 0; i < g.interior_count(0); ++i)
        out << format_double(g.coordinate(0, i)) << ' '
            << format_double(field[g.index(i, jmid, kmid)]) << '\n';
}

void write_path_trace(const std::filesystem::path& path, const PathTrace& trace) {
    std::ofstream out(path);
    if (!out) throw Error("io", "cannot open '" + path.string() + "' for writing");
    for (std::size_t i = 0; i < trace.arclength.size(); ++i)
        out << format_double(trace.arclength[i]) << ' ' << format_double(trace.energy[i]) << '\n';
}

struct MuScanSpec {
    double lo = 0.0, hi = 0.0;
    int n = 0;
};

MuScanSpec parse_mu_scan(const std::string& text) {
    MuScanSpec s;
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw ConfigError("mu_scan expects 'lo:hi:n', got '" + text + "'");
    s.lo = parse_double(text.substr(0, c1));
    s.hi = parse_double(text.substr(c1 + 1, c2 - c1 - 1));
    s.n = static_cast<int>(parse_double(text.substr(c2 + 1)));
    if (!(s.lo > 0.0) || !(s.hi > s.lo) || s.n < 2)
        throw ConfigError("mu_scan needs 0 < lo < hi and n >= 2");
    return s;
}

ScenarioResult run_mu_scan(const RunConfig& cfg, const Grid& grid, const PresetData& preset) {
    const MuScanSpec scan = parse_mu_scan(cfg.mu_scan);
    const std::filesystem::path out_dir(cfg.out_dir);
    std::filesystem::create_directories(out_dir);

    std::ofstream out(out_dir / "mu_scan.csv", std::ios::binary);
    if (!out) throw Error("io", "cannot open mu_scan.csv for writing");
    out << "mu,lambda1\n";

    SolveReport report;
    for (int i = 0; i < scan.n; ++i) {
        const double mu =
            scan.lo + (scan.hi - scan.lo) * static_cast<double>(i) / static_cast<double>(scan.n - 1);
        ScalarField V(grid);
        for (std::size_t j = 0; j < V.size(); ++j) V[j] = -preset.c[j] - mu * preset.f[j];
        const double lam = principal_eigenvalue(V, cfg.solver.eigen).value;
        out << format_double(mu) << ',' << format_double(lam) << '\n';
        report.entries.emplace_back("mu_scan." + format_double(mu), format_double(lam));
    }
    for (const auto& [k, v] : echo_config(cfg)) report.entries.emplace_back("config." + k, v);
    write_csv(out_dir / "report.csv", report);
    write_text(out_dir / "report.txt", report);
    return {std::move(report), std::nullopt};
}

}  // namespace

ScenarioResult run_scenario(const RunConfig& cfg) {
    const Grid grid = cfg.make_grid();
    const PresetData preset = build_preset(cfg, grid);

    if (!cfg.mu_scan.empty()) return run_mu_scan(cfg, grid, preset);

    const ProblemSpec spec = make_problem(cfg, grid, preset);
    const SolveOutcome outcome = solve_two(spec, cfg.solver);

    const std::filesystem::path out_dir(cfg.out_dir);
    std::filesystem::create_directories(out_dir);

    SolveReport report = build_report(cfg, outcome);
    write_csv(out_dir / "report.csv", report);
    write_text(out_dir / "report.txt", report);

    write_field(out_dir / "v1.field", outcome.pair1.v);
    write_field(out_dir / "u1.field", outcome.pair1.u);
    write_midline_profile(out_dir / "profile_u1.txt", outcome.pair1.u);
    if (outcome.pair2) {
        write_field(out_dir / "v2.field", outcome.pair2->v);
        write_field(out_dir / "u2.field", outcome.pair2->u);
        write_midline_profile(out_dir / "profile_u2.txt", outcome.pair2->u);
        write_path_trace(out_dir / "path_energy.txt", outcome.path_trace);
    }
    return {std::move(report), outcome};
}

}  // namespace mps
