#pragma once

#include <string>

#include "mpsolve/config.hpp"
#include "mpsolve/functional.hpp"
#include "mpsolve/grid.hpp"

namespace mps {

// Built-in coefficient scenarios. Amplitudes are tuned at build time so the
// advertised spectral conditions hold on the requested grid:
//   paper-regime  sign-changing c with lambda_1(-c) > 0, mu = gamma_1/2
//   czero         c == 0 (existence governed by lambda_1(-mu f) alone)
//   coercive      c == -1 (uniqueness regime)
//   gate-fail     c >= 0 with mu = 2 gamma_1 (violates the necessary gate)
//   custom        coefficients read from field files
struct PresetData {
    ScalarField c;
    ScalarField f;
    double mu = 0.0;
    std::string name;
};

PresetData build_preset(const RunConfig& cfg, const Grid& grid);

ProblemSpec make_problem(const RunConfig& cfg, const Grid& grid, const PresetData& preset);

}  // namespace mps
