#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "mpsolve/solvers.hpp"

namespace mps {

// Run configuration parsed from `key = value` lines (# comments). Parsing is
// strict: unknown keys, duplicate keys and malformed values are errors with
// line numbers, and `preset` must be supplied (by the file or by a CLI
// overlay) before validation passes.
struct RunConfig {
    std::string preset;  // required
    double mu = std::numeric_limits<double>::quiet_NaN();  // NaN: preset decides

    int dimension = 2;
    std::array<int, 3> nodes{65, 65, 65};
    std::array<double, 3> extents{1.0, 1.0, 1.0};
    double q = 10.0;

    std::string c_file;  // custom preset inputs
    std::string f_file;

    std::string out_dir = ".";
    std::string mu_scan;  // "lo:hi:n" optional sweep of lambda_1(-c - mu f)

    SolveOptions solver{};

    Grid make_grid() const;
};

using ConfigOverlay = std::vector<std::pair<std::string, std::string>>;

// Parse config text; `overlay` entries (typically CLI flags) override file
// values and may satisfy required keys.
RunConfig parse_config(const std::string& text, const ConfigOverlay& overlay = {});
RunConfig parse_config_file(const std::string& path, const ConfigOverlay& overlay = {});

// Canonical `key = value` serialization of every setting (used for the
// config echo in reports; deterministic ordering).
std::vector<std::pair<std::string, std::string>> echo_config(const RunConfig& cfg);

}  // namespace mps
