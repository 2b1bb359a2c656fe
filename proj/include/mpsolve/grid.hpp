#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace mps {

// Uniform tensor-product grid on an axis-aligned box in R^N, N = 2 or 3,
// with homogeneous Dirichlet boundary. Fields live on interior nodes only;
// the boundary layer is implicitly zero. Node ordering is row-major with
// axis 0 fastest, fixed so that field files are bit-reproducible.
class Grid {
public:
    Grid() = default;
    Grid(int dimension, std::span<const double> extents, std::span<const int> node_counts);

    int dimension() const { return dim_; }
    double extent(int axis) const { return extent_[static_cast<std::size_t>(axis)]; }
    int node_count(int axis) const { return nodes_[static_cast<std::size_t>(axis)]; }
    int interior_count(int axis) const { return nodes_[static_cast<std::size_t>(axis)] - 2; }
    double spacing(int axis) const { return h_[static_cast<std::size_t>(axis)]; }

    // Number of interior nodes (field length).
    std::size_t interior_size() const { return size_; }
    // Quadrature weight of one interior node: h0*h1(*h2).
    double cell_volume() const { return vol_; }
    // Physical coordinate of interior node i (0-based) along an axis.
    double coordinate(int axis, int i) const {
        return h_[static_cast<std::size_t>(axis)] * static_cast<double>(i + 1);
    }

    // Flat index of interior node (i, j[, k]), axis 0 fastest.
    std::size_t index(int i, int j, int k = 0) const {
        auto m0 = static_cast<std::size_t>(nodes_[0] - 2);
        auto m1 = static_cast<std::size_t>(nodes_[1] - 2);
        return static_cast<std::size_t>(i) + m0 * (static_cast<std::size_t>(j) + m1 * static_cast<std::size_t>(k));
    }

    bool operator==(const Grid&) const = default;

private:
    int dim_ = 0;
    std::array<double, 3> extent_{0.0, 0.0, 0.0};
    std::array<int, 3> nodes_{0, 0, 0};
    std::array<double, 3> h_{0.0, 0.0, 0.0};
    std::size_t size_ = 0;
    double vol_ = 0.0;
};

Grid build_grid(int dimension, std::span<const double> extents, std::span<const int> node_counts);

// Nodal values of a function vanishing on the boundary (the discrete
// surrogate of H^1_0). Value semantics; operations never mutate inputs.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const Grid& grid, double fill = 0.0)
        : grid_(grid), v_(grid.interior_size(), fill) {}
    ScalarField(const Grid& grid, std::vector<double> values);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return v_.size(); }
    double operator[](std::size_t i) const { return v_[i]; }
    double& operator[](std::size_t i) { return v_[i]; }
    std::span<const double> values() const { return v_; }
    std::span<double> values() { return v_; }
    std::vector<double>& raw() { return v_; }
    const std::vector<double>& raw() const { return v_; }

private:
    Grid grid_;
    std::vector<double> v_;
};

// Discrete -Laplace with zero Dirichlet boundary: 5-point stencil in 2D,
// 7-point in 3D. Symmetric positive definite on interior nodes.
ScalarField apply_neg_laplacian(const ScalarField& field);
// Raw-vector variant used inside iterative solvers (no allocation).
void apply_neg_laplacian(const Grid& grid, std::span<const double> in, std::span<double> out);

// Discrete H^1_0 inner product: sum of edge-difference products, exactly
// symmetric in its arguments and positive definite.
double inner_h10(const ScalarField& a, const ScalarField& b);
double norm_h10(const ScalarField& a);

// Composite quadrature over interior nodes (midpoint weights).
double integrate(const ScalarField& field);
double inner_l2(const ScalarField& a, const ScalarField& b);
double norm_l2(const ScalarField& a);
double norm_inf(const ScalarField& a);
// integral of w * field^power; power 1 and 2 take fast paths.
double weighted_integral(const ScalarField& weight, const ScalarField& field, double power);

ScalarField positive_part(const ScalarField& field);
ScalarField negative_part(const ScalarField& field);

// y += alpha * x
void add_scaled(ScalarField& y, double alpha, const ScalarField& x);
void scale(ScalarField& y, double alpha);

// Throws if any nodal value is NaN or infinite.
void check_finite(const ScalarField& field, const char* label);

}  // namespace mps
