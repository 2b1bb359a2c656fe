#include "mpsolve/report.hpp"

#include <fstream>

#include "mpsolve/errors.hpp"
#include "mpsolve/field_io.hpp"

namespace mps {

namespace {

void append_solution_block(std::vector<std::pair<std::string, std::string>>& kv,
                           const std::string& tag, const CriticalPoint& cp, const TransformPair& pair) {
    auto num = [](double x) { return format_double(x); };
    kv.emplace_back(tag + ".energy", num(cp.energy));
    kv.emplace_back(tag + ".grad_norm", num(cp.grad_norm));
    kv.emplace_back(tag + ".residual_P", num(pair.residual_p));
    kv.emplace_back(tag + ".residual_Q", num(pair.residual_q));
    kv.emplace_back(tag + ".roundtrip_error", num(pair.roundtrip_error));
    kv.emplace_back(tag + ".positivity_margin", num(pair.positivity_margin));
    double umin = pair.u.size() ? pair.u[0] : 0.0;
    double umax = umin;
    for (double x : pair.u.values()) {
        umin = std::min(umin, x);
        umax = std::max(umax, x);
    }
    kv.emplace_back(tag + ".u_min", num(umin));
    kv.emplace_back(tag + ".u_max", num(umax));
    kv.emplace_back(tag + ".u_norm_h1", num(norm_h10(pair.u)));
    kv.emplace_back(tag + ".v_norm_h1", num(norm_h10(cp.v)));
}

}  // namespace

const std::string* SolveReport::find(const std::string& key) const {
    for (const auto& [k, v] : entries)
        if (k == key) return &v;
    return nullptr;
}

SolveReport build_report(const RunConfig& cfg, const SolveOutcome& outcome) {
    SolveReport report;
    auto& kv = report.entries;
    auto num = [](double x) { return format_double(x); };

    kv.emplace_back("mode", outcome.two_solution_mode ? "two-solution" : "single-solution");
    kv.emplace_back("mode_note", outcome.mode_note);
    kv.emplace_back("eigen.lambda1_minus_c", num(outcome.lambda1_minus_c));
    kv.emplace_back("eigen.lambda1_gate", num(outcome.lambda1_gate));
    kv.emplace_back("eigen.gamma1", num(outcome.gamma1));
    kv.emplace_back("eigen.K1", num(outcome.coercivity));
    kv.emplace_back("eigen.alpha_c", num(outcome.alpha_c));
    kv.emplace_back("geometry.lambda", num(outcome.geometry.lambda));
    kv.emplace_back("geometry.theta", num(outcome.geometry.theta));
    kv.emplace_back("geometry.p", num(outcome.geometry.p));
    kv.emplace_back("geometry.radius", num(outcome.geometry.radius));
    kv.emplace_back("geometry.sphere_min", num(outcome.geometry.sphere_min));

    append_solution_block(kv, "solution1", outcome.minimizer, outcome.pair1);
    if (outcome.pass && outcome.pair2) {
        append_solution_block(kv, "solution2", *outcome.pass, *outcome.pair2);
        kv.emplace_back("solution2.level", num(outcome.pass->level));
        kv.emplace_back("distinctness.h1", num(outcome.distinctness));
        kv.emplace_back("distinctness.threshold", num(outcome.distinctness_threshold));
    }

    for (const auto& [k, v] : echo_config(cfg)) kv.emplace_back("config." + k, v);
    report.timings = outcome.timings;
    return report;
}

void write_csv(const std::filesystem::path& path, const SolveReport& report) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io", "cannot open '" + path.string() + "' for writing");
    out << "key,value\n";
    for (const auto& [k, v] : report.entries) out << k << ',' << v << '\n';
    if (!out) throw Error("io", "write failed for '" + path.string() + "'");
}

SolveReport parse_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open report '" + path.string() + "'");
    SolveReport report;
    std::string line;
    if (!std::getline(in, line) || line != "key,value")
        throw ConfigError(path.string() + ": missing 'key,value' header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ConfigError(path.string() + ": malformed row '" + line + "'");
        report.entries.emplace_back(line.substr(0, comma), line.substr(comma + 1));
    }
    return report;
}

void write_text(const std::filesystem::path& path, const SolveReport& report) {
    std::ofstream out(path);
    if (!out) throw Error("io", "cannot open '" + path.string() + "' for writing");
    out << "solve report\n============\n\n";
    std::string section;
    for (const auto& [k, v] : report.entries) {
        const auto dot = k.find('.');
        const std::string sec = dot == std::string::npos ? "" : k.substr(0, dot);
        if (sec != section) {
            section = sec;
            out << '\n' << "[" << (section.empty() ? "general" : section) << "]\n";
        }
        out << "  " << k << " = " << v << '\n';
    }
    if (!report.timings.empty()) {
        out << "\n[timings]\n";
        for (const auto& t : report.timings)
            out << "  " << t.name << " = " << format_double(t.seconds) << " s\n";
    }
}

}  // namespace mps
