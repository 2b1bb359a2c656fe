#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "mpsolve/config.hpp"
#include "mpsolve/solvers.hpp"

namespace mps {

// Flat, deterministic key/value report. CSV emission is byte-reproducible
// for a fixed config and seed (timings live only in the text rendering).
struct SolveReport {
    std::vector<std::pair<std::string, std::string>> entries;  // CSV content, ordered
    std::vector<StageTiming> timings;                          // text report only

    const std::string* find(const std::string& key) const;
};

SolveReport build_report(const RunConfig& cfg, const SolveOutcome& outcome);

void write_csv(const std::filesystem::path& path, const SolveReport& report);
SolveReport parse_csv(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const SolveReport& report);

}  // namespace mps
