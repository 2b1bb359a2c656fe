#pragma once

#include <filesystem>
#include <optional>

#include "mpsolve/config.hpp"
#include "mpsolve/report.hpp"

namespace mps {

struct ScenarioResult {
    SolveReport report;
    std::optional<SolveOutcome> outcome;  // absent for mu-scan runs
};

// Execute the configured scenario and write all artifacts into
// cfg.out_dir: report.txt, report.csv, solution fields (u1/v1 and u2/v2
// when two solutions exist), midline profiles and the energy-along-path
// trace. A configured mu_scan instead tabulates lambda_1(-c - mu f)
// against mu into mu_scan.csv.
ScenarioResult run_scenario(const RunConfig& cfg);

}  // namespace mps
