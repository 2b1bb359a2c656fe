#include "mpsolve/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "mpsolve/errors.hpp"

namespace mps {

Grid::Grid(int dimension, std::span<const double> extents, std::span<const int> node_counts) {
    if (dimension != 2 && dimension != 3)
        throw ConfigError("grid dimension must be 2 or 3, got " + std::to_string(dimension));
    if (extents.size() < static_cast<std::size_t>(dimension) ||
        node_counts.size() < static_cast<std::size_t>(dimension))
        throw ConfigError("grid needs one extent and one node count per axis");
    dim_ = dimension;
    size_ = 1;
    vol_ = 1.0;
    for (int d = 0; d < dimension; ++d) {
        auto du = static_cast<std::size_t>(d);
        if (!(extents[du] > 0.0) || !std::isfinite(extents[du]))
            throw ConfigError("grid extent along axis " + std::to_string(d) + " must be positive");
        if (node_counts[du] < 3)
            throw ConfigError("grid needs at least 3 nodes per axis (no interior nodes otherwise)");
        extent_[du] = extents[du];
        nodes_[du] = node_counts[du];
        h_[du] = extents[du] / static_cast<double>(node_counts[du] - 1);
        size_ *= static_cast<std::size_t>(node_counts[du] - 2);
        vol_ *= h_[du];
    }
    if (dimension == 2) {
        nodes_[2] = 0;
        extent_[2] = 0.0;
        h_[2] = 0.0;
    }
}

Grid build_grid(int dimension, std::span<const double> extents, std::span<const int> node_counts) {
    return Grid(dimension, extents, node_counts);
}

ScalarField::ScalarField(const Grid& grid, std::vector<double> values)
    : grid_(grid), v_(std::move(values)) {
    if (v_.size() != grid.interior_size())
        throw ConfigError("field length " + std::to_string(v_.size()) + " does not match grid interior size " +
                          std::to_string(grid.interior_size()));
}

namespace {

void require_same_grid(const ScalarField& a, const ScalarField& b) {
    if (!(a.grid() == b.grid())) throw ConfigError("fields live on different grids");
}

struct Dims {
    int m0, m1, m2;
    std::size_t s0, s1, s2;
};

Dims dims_of(const Grid& g) {
    Dims d{};
    d.m0 = g.interior_count(0);
    d.m1 = g.interior_count(1);
    d.m2 = g.dimension() == 3 ? g.interior_count(2) : 1;
    d.s0 = 1;
    d.s1 = static_cast<std::size_t>(d.m0);
    d.s2 = static_cast<std::size_t>(d.m0) * static_cast<std::size_t>(d.m1);
    return d;
}

}  // namespace

void apply_neg_laplacian(const Grid& grid, std::span<const double> in, std::span<double> out) {
    const Dims d = dims_of(grid);
    const double ih0 = 1.0 / (grid.spacing(0) * grid.spacing(0));
    const double ih1 = 1.0 / (grid.spacing(1) * grid.spacing(1));
    const double ih2 = grid.dimension() == 3 ? 1.0 / (grid.spacing(2) * grid.spacing(2)) : 0.0;
    const double diag = 2.0 * (ih0 + ih1 + ih2);

    std::size_t idx = 0;
    for (int k = 0; k < d.m2; ++k) {
        for (int j = 0; j < d.m1; ++j) {
            for (int i = 0; i < d.m0; ++i, ++idx) {
                double acc = diag * in[idx];
                if (i > 0) acc -= ih0 * in[idx - d.s0];
                if (i + 1 < d.m0) acc -= ih0 * in[idx + d.s0];
                if (j > 0) acc -= ih1 * in[idx - d.s1];
                if (j + 1 < d.m1) acc -= ih1 * in[idx + d.s1];
                if (grid.dimension() == 3) {
                    if (k > 0) acc -= ih2 * in[idx - d.s2];
                    if (k + 1 < d.m2) acc -= ih2 * in[idx + d.s2];
                }
                out[idx] = acc;
            }
        }
    }
}

ScalarField apply_neg_laplacian(const ScalarField& field) {
    ScalarField out(field.grid());
    apply_neg_laplacian(field.grid(), field.values(), out.values());
    check_finite(out, "apply_neg_laplacian");
    return out;
}

double inner_h10(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a, b);
    const Grid& g = a.grid();
    const Dims d = dims_of(g);
    const auto av = a.values();
    const auto bv = b.values();

    // Sum over grid edges of (difference in a)*(difference in b)/h^2,
    // including the edges to the zero boundary layer. Term-by-term symmetric
    // in (a, b), and a sum of squares when a == b.
    double total = 0.0;
    for (int axis = 0; axis < g.dimension(); ++axis) {
        const double ih = 1.0 / (g.spacing(axis) * g.spacing(axis));
        const std::size_t stride = axis == 0 ? d.s0 : (axis == 1 ? d.s1 : d.s2);
        const int m_axis = axis == 0 ? d.m0 : (axis == 1 ? d.m1 : d.m2);
        double axis_sum = 0.0;
        std::size_t idx = 0;
        for (int k = 0; k < d.m2; ++k) {
            for (int j = 0; j < d.m1; ++j) {
                for (int i = 0; i < d.m0; ++i, ++idx) {
                    const int pos = axis == 0 ? i : (axis == 1 ? j : k);
                    // edge toward the negative side (boundary when pos == 0)
                    const double da0 = pos > 0 ? av[idx] - av[idx - stride] : av[idx];
                    const double db0 = pos > 0 ? bv[idx] - bv[idx - stride] : bv[idx];
                    axis_sum += da0 * db0;
                    // the positive-side boundary edge is visited by nobody else
                    if (pos + 1 == m_axis) axis_sum += av[idx] * bv[idx];
                }
            }
        }
        total += axis_sum * ih;
    }
    return total * g.cell_volume();
}

double norm_h10(const ScalarField& a) { return std::sqrt(inner_h10(a, a)); }

double integrate(const ScalarField& field) {
    double s = 0.0;
    for (double v : field.values()) s += v;
    return s * field.grid().cell_volume();
}

double inner_l2(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a, b);
    double s = 0.0;
    const auto av = a.values();
    const auto bv = b.values();
    for (std::size_t i = 0; i < av.size(); ++i) s += av[i] * bv[i];
    return s * a.grid().cell_volume();
}

double norm_l2(const ScalarField& a) { return std::sqrt(inner_l2(a, a)); }

double norm_inf(const ScalarField& a) {
    double m = 0.0;
    for (double v : a.values()) m = std::max(m, std::abs(v));
    return m;
}

double weighted_integral(const ScalarField& weight, const ScalarField& field, double power) {
    require_same_grid(weight, field);
    const auto wv = weight.values();
    const auto fv = field.values();
    double s = 0.0;
    if (power == 1.0) {
        for (std::size_t i = 0; i < fv.size(); ++i) s += wv[i] * fv[i];
    } else if (power == 2.0) {
        for (std::size_t i = 0; i < fv.size(); ++i) s += wv[i] * fv[i] * fv[i];
    } else {
        for (std::size_t i = 0; i < fv.size(); ++i) s += wv[i] * std::pow(fv[i], power);
    }
    return s * field.grid().cell_volume();
}

ScalarField positive_part(const ScalarField& field) {
    ScalarField out(field.grid());
    for (std::size_t i = 0; i < field.size(); ++i) out[i] = field[i] > 0.0 ? field[i] : 0.0;
    return out;
}

ScalarField negative_part(const ScalarField& field) {
    ScalarField out(field.grid());
    for (std::size_t i = 0; i < field.size(); ++i) out[i] = field[i] < 0.0 ? -field[i] : 0.0;
    return out;
}

void add_scaled(ScalarField& y, double alpha, const ScalarField& x) {
    require_same_grid(y, x);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

void scale(ScalarField& y, double alpha) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] *= alpha;
}

void check_finite(const ScalarField& field, const char* label) {
    for (double v : field.values())
        if (!std::isfinite(v)) throw Error("numerics", std::string(label) + ": non-finite nodal value");
}

}  // namespace mps
