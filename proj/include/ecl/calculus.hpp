#pragma once

#include "ecl/grid.hpp"

namespace ecl {

// One real per node per axis; component(a) is the a-th partial derivative slot.
class VectorField {
public:
    VectorField() = default;
    explicit VectorField(GridPtr grid)
        : grid_(std::move(grid)),
          comps_(static_cast<std::size_t>(grid_->dimension()), std::vector<double>(grid_->node_count(), 0.0)) {}

    const GridPtr& grid() const { return grid_; }
    std::vector<double>& component(int axis) { return comps_[axis]; }
    const std::vector<double>& component(int axis) const { return comps_[axis]; }
    // |v|^2 at each node.
    ScalarField squared_norm() const;

private:
    GridPtr grid_;
    std::vector<std::vector<double>> comps_;
};

// Symmetric d x d matrix per node; upper triangle stored.
class MatrixField {
public:
    MatrixField() = default;
    explicit MatrixField(GridPtr grid);

    const GridPtr& grid() const { return grid_; }
    const std::vector<double>& entry(int i, int j) const { return entries_[index(i, j)]; }
    std::vector<double>& entry(int i, int j) { return entries_[index(i, j)]; }
    // Sum over i,j of entry(i,j)^2 per node (Hilbert-Schmidt norm squared).
    ScalarField hs_norm_squared() const;
    ScalarField trace() const;

private:
    int index(int i, int j) const {
        if (i > j) std::swap(i, j);
        return i == 0 ? j : 2;  // (0,0)->0, (0,1)->1, (1,1)->2
    }
    GridPtr grid_;
    std::vector<std::vector<double>> entries_;
};

// Grid plus the effective dimension n >= m of the curvature-dimension
// condition; K is the computed lower Ricci bound.
struct GeometryConfig {
    GridPtr grid;
    int effective_dimension = 1;
    double curvature_K = 0.0;
};

GeometryConfig make_geometry(GridPtr grid, int effective_dimension);

// Partial derivative along one axis: spectral on periodic axes,
// 4th-order central differences with one-sided closure on box axes.
std::vector<double> derivative_axis(const Grid& grid, const std::vector<double>& values, int axis);

VectorField gradient(const ScalarField& phi);
MatrixField hessian(const ScalarField& phi);
ScalarField laplacian(const ScalarField& phi);
// Witten Laplacian L(phi) = Delta(phi) - <grad V, grad phi>.
ScalarField generator(const ScalarField& phi, const GeometryConfig& geo);
// Gamma_2(phi) = (1/2) L|grad phi|^2 - <grad phi, grad L phi>.
ScalarField gamma2(const ScalarField& phi, const GeometryConfig& geo);

// K = min over the domain of the smallest eigenvalue of
// Hess V - (grad V tensor grad V)/(n - m); zero when V == 0.
double curvature_bound(const GridPtr& grid, int n);

}  // namespace ecl
