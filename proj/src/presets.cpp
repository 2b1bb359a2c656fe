#include "mpsolve/presets.hpp"

#include <cmath>
#include <functional>

#include "mpsolve/errors.hpp"
#include "mpsolve/field_io.hpp"
#include "mpsolve/spectral.hpp"

namespace mps {

namespace {

// Smooth compactly supported bump, value 1 at the center, support radius r
// (relative to each axis extent).
ScalarField bump(const Grid& g, std::array<double, 3> center, double radius) {
    ScalarField out(g);
    const int m0 = g.interior_count(0);
    const int m1 = g.interior_count(1);
    const int m2 = g.dimension() == 3 ? g.interior_count(2) : 1;
    std::size_t idx = 0;
    for (int k = 0; k < m2; ++k)
        for (int j = 0; j < m1; ++j)
            for (int i = 0; i < m0; ++i, ++idx) {
                double rho2 = 0.0;
                const int pos[3] = {i, j, k};
                for (int d = 0; d < g.dimension(); ++d) {
                    const double x = g.coordinate(d, pos[d]) / g.extent(d);
                    const double dx = (x - center[static_cast<std::size_t>(d)]) / radius;
                    rho2 += dx * dx;
                }
                out[idx] = rho2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - rho2)) : 0.0;
            }
    return out;
}

// Halve the amplitude until lambda_1(-A*shape) keeps a positive margin.
double tune_amplitude(const Grid& g, const ScalarField& shape, double start,
                      const EigenOptions& eig) {
    ScalarField zero(g);
    const double lambda_free = principal_eigenvalue(zero, eig).value;
    double amp = start;
    for (int it = 0; it < 60; ++it) {
        ScalarField V(g);
        for (std::size_t i = 0; i < V.size(); ++i) V[i] = -amp * shape[i];
        if (principal_eigenvalue(V, eig).value > 0.2 * lambda_free) return amp;
        amp *= 0.5;
    }
    throw ConfigError("preset tuning failed: could not keep lambda_1(-c) positive");
}

double preset_mu(const RunConfig& cfg, const ScalarField& c, const ScalarField& f, double factor) {
    if (!std::isnan(cfg.mu)) return cfg.mu;
    const double gamma1 = weighted_eigenvalue(c, f, cfg.solver.eigen).value;
    return factor * gamma1;
}

}  // namespace

PresetData build_preset(const RunConfig& cfg, const Grid& grid) {
    PresetData data;
    data.name = cfg.preset;
    const bool three_d = grid.dimension() == 3;
    const std::array<double, 3> left{0.3, 0.5, three_d ? 0.5 : 0.0};
    const std::array<double, 3> right{0.7, 0.5, three_d ? 0.5 : 0.0};
    const std::array<double, 3> middle{0.5, 0.5, three_d ? 0.5 : 0.0};

    if (cfg.preset == "paper-regime") {
        const ScalarField pos = bump(grid, left, 0.22);
        const ScalarField neg = bump(grid, right, 0.22);
        ScalarField shape(grid);
        for (std::size_t i = 0; i < shape.size(); ++i) shape[i] = pos[i];
        const double amp = tune_amplitude(grid, shape, 80.0, cfg.solver.eigen);
        data.c = ScalarField(grid);
        for (std::size_t i = 0; i < data.c.size(); ++i) data.c[i] = amp * (pos[i] - neg[i]);
        ScalarField fb = bump(grid, middle, 0.3);
        scale(fb, 0.5);
        data.f = std::move(fb);
        data.mu = preset_mu(cfg, data.c, data.f, 0.5);
    } else if (cfg.preset == "czero") {
        data.c = ScalarField(grid);
        ScalarField fb = bump(grid, middle, 0.3);
        scale(fb, 0.5);
        data.f = std::move(fb);
        data.mu = preset_mu(cfg, data.c, data.f, 0.5);
    } else if (cfg.preset == "coercive") {
        data.c = ScalarField(grid, -1.0);
        ScalarField fb = bump(grid, middle, 0.3);
        scale(fb, 0.5);
        data.f = std::move(fb);
        data.mu = preset_mu(cfg, data.c, data.f, 0.5);
    } else if (cfg.preset == "gate-fail") {
        const ScalarField pos = bump(grid, left, 0.22);
        const double amp = tune_amplitude(grid, pos, 10.0, cfg.solver.eigen);
        data.c = pos;
        scale(data.c, amp);
        ScalarField fb = bump(grid, middle, 0.3);
        scale(fb, 0.5);
        data.f = std::move(fb);
        data.mu = preset_mu(cfg, data.c, data.f, 2.0);
    } else if (cfg.preset == "custom") {
        data.c = read_field(cfg.c_file);
        data.f = read_field(cfg.f_file);
        if (!(data.c.grid() == grid) || !(data.f.grid() == grid))
            throw ConfigError("custom coefficient files do not match the configured grid");
        if (std::isnan(cfg.mu)) {
            data.mu = preset_mu(cfg, data.c, data.f, 0.5);
        } else {
            data.mu = cfg.mu;
        }
    } else {
        throw ConfigError("unknown preset '" + cfg.preset + "'");
    }
    return data;
}

ProblemSpec make_problem(const RunConfig& cfg, const Grid& grid, const PresetData& preset) {
    return ProblemSpec(grid, preset.c, preset.f, preset.mu, cfg.q);
}

}  // namespace mps
