#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace ecl {

enum class Topology { truncated_box, periodic_circle };

struct GridSpec {
    int dimension = 1;
    Topology topology = Topology::truncated_box;
    // Box: half-width L per axis (domain [-L, L]).
    // Circle: circumference per axis (domain [0, C)).
    std::array<double, 2> extent{0.0, 0.0};
    std::array<std::size_t, 2> points{0, 0};
    // Potential sampled at nodes (row-major, axis 0 fastest). Empty means V == 0.
    std::vector<double> potential;
};

// Discretized domain with quadrature weights against the reference
// measure m = e^{-V} * (volume weights). Immutable after construction.
class Grid {
public:
    static std::shared_ptr<const Grid> build(const GridSpec& spec);

    int dimension() const { return dim_; }
    Topology topology() const { return topology_; }
    double extent(int axis) const { return extent_[axis]; }
    std::size_t points(int axis) const { return points_[axis]; }
    double spacing(int axis) const { return h_[axis]; }
    std::size_t node_count() const { return node_count_; }
    bool has_potential() const { return has_potential_; }

    // Node coordinate along `axis` for flattened index `node`.
    double coord(std::size_t node, int axis) const {
        std::size_t i = (axis == 0) ? node % points_[0] : node / points_[0];
        return axis_coord(axis, i);
    }
    double axis_coord(int axis, std::size_t i) const {
        if (topology_ == Topology::periodic_circle) return static_cast<double>(i) * h_[axis];
        return -extent_[axis] + static_cast<double>(i) * h_[axis];
    }

    const std::vector<double>& potential() const { return potential_; }
    const std::vector<double>& weights() const { return weights_; }
    // Pure volume quadrature weight (no e^{-V} factor) along one axis.
    double axis_volume_weight(int axis, std::size_t i) const;
    // Total reference mass = sum of weights.
    double reference_mass() const { return reference_mass_; }

private:
    Grid() = default;
    int dim_ = 1;
    Topology topology_ = Topology::truncated_box;
    std::array<double, 2> extent_{};
    std::array<std::size_t, 2> points_{};
    std::array<double, 2> h_{};
    std::size_t node_count_ = 0;
    bool has_potential_ = false;
    std::vector<double> potential_;
    std::vector<double> weights_;
    double reference_mass_ = 0.0;
};

using GridPtr = std::shared_ptr<const Grid>;

class ScalarField {
public:
    ScalarField() = default;
    ScalarField(GridPtr grid, std::vector<double> values);
    ScalarField(GridPtr grid, double fill);

    const GridPtr& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

private:
    GridPtr grid_;
    std::vector<double> values_;
};

// Probability density w.r.t. the grid reference measure m.
class DensityField {
public:
    static constexpr double kDefaultMassTolerance = 1e-7;

    DensityField() = default;
    // Validates nonnegativity and unit mass within tolerance.
    DensityField(ScalarField field, double mass_tolerance = kDefaultMassTolerance);

    const ScalarField& field() const { return field_; }
    const GridPtr& grid() const { return field_.grid(); }
    const std::vector<double>& values() const { return field_.values(); }
    double operator[](std::size_t i) const { return field_[i]; }
    double mass_tolerance() const { return mass_tolerance_; }

private:
    ScalarField field_;
    double mass_tolerance_ = kDefaultMassTolerance;
};

// Quadrature: trapezoid on box axes, rectangle on periodic ones.
double integrate(const ScalarField& phi);
// Integral restricted to nodes where mask != 0.
double integrate_masked(const ScalarField& phi, const std::vector<unsigned char>& mask);

DensityField normalize(const ScalarField& phi, double mass_tolerance = DensityField::kDefaultMassTolerance);

}  // namespace ecl
