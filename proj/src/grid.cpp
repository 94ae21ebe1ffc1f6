#include "ecl/grid.hpp"

#include <cmath>

namespace ecl {

namespace {

bool finite_all(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

std::shared_ptr<const Grid> Grid::build(const GridSpec& spec) {
    if (spec.dimension < 1 || spec.dimension > 2)
        throw std::invalid_argument("Grid: dimension must be 1 or 2");
    auto g = std::shared_ptr<Grid>(new Grid());
    g->dim_ = spec.dimension;
    g->topology_ = spec.topology;
    g->node_count_ = 1;
    for (int a = 0; a < spec.dimension; ++a) {
        if (spec.points[a] < 16)
            throw std::invalid_argument("Grid: point count below resolution floor of 16");
        if (!(spec.extent[a] > 0.0))
            throw std::invalid_argument("Grid: extent must be positive");
        g->extent_[a] = spec.extent[a];
        g->points_[a] = spec.points[a];
        if (spec.topology == Topology::periodic_circle)
            g->h_[a] = spec.extent[a] / static_cast<double>(spec.points[a]);
        else
            g->h_[a] = 2.0 * spec.extent[a] / static_cast<double>(spec.points[a] - 1);
        g->node_count_ *= spec.points[a];
    }
    if (!spec.potential.empty()) {
        if (spec.potential.size() != g->node_count_)
            throw std::invalid_argument("Grid: potential size does not match node count");
        if (!finite_all(spec.potential))
            throw std::invalid_argument("Grid: potential has non-finite values");
        g->potential_ = spec.potential;
        for (double v : spec.potential)
            if (v != 0.0) { g->has_potential_ = true; break; }
    }
    if (g->potential_.empty()) g->potential_.assign(g->node_count_, 0.0);

    g->weights_.resize(g->node_count_);
    double mass = 0.0;
    for (std::size_t node = 0; node < g->node_count_; ++node) {
        double w = 1.0;
        std::size_t i0 = node % g->points_[0];
        w *= g->axis_volume_weight(0, i0);
        if (g->dim_ == 2) w *= g->axis_volume_weight(1, node / g->points_[0]);
        w *= std::exp(-g->potential_[node]);
        g->weights_[node] = w;
        mass += w;
    }
    g->reference_mass_ = mass;
    return g;
}

double Grid::axis_volume_weight(int axis, std::size_t i) const {
    if (topology_ == Topology::periodic_circle) return h_[axis];
    // Trapezoid rule: halved weight at the two faces.
    if (i == 0 || i + 1 == points_[axis]) return 0.5 * h_[axis];
    return h_[axis];
}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_->node_count())
        throw std::invalid_argument("ScalarField: value count does not match node count");
}

ScalarField::ScalarField(GridPtr grid, double fill)
    : grid_(std::move(grid)) {
    values_.assign(grid_->node_count(), fill);
}

DensityField::DensityField(ScalarField field, double mass_tolerance)
    : field_(std::move(field)), mass_tolerance_(mass_tolerance) {
    for (double x : field_.values())
        if (!(x >= 0.0)) throw std::invalid_argument("DensityField: negative or NaN value");
    double m = integrate(field_);
    if (std::abs(m - 1.0) > mass_tolerance_)
        throw std::invalid_argument("DensityField: mass " + std::to_string(m) +
                                    " outside tolerance");
}

double integrate(const ScalarField& phi) {
    const auto& w = phi.grid()->weights();
    const auto& v = phi.values();
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * w[i];
    return s;
}

double integrate_masked(const ScalarField& phi, const std::vector<unsigned char>& mask) {
    const auto& w = phi.grid()->weights();
    const auto& v = phi.values();
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (mask[i]) s += v[i] * w[i];
    return s;
}

DensityField normalize(const ScalarField& phi, double mass_tolerance) {
    for (double x : phi.values())
        if (!(x >= 0.0)) throw std::invalid_argument("normalize: field must be nonnegative");
    double m = integrate(phi);
    if (!(m > 0.0)) throw std::invalid_argument("normalize: field has zero mass");
    // Skip rescaling at rounding level so normalize is exactly idempotent.
    if (std::abs(m - 1.0) <= 1e-14)
        return DensityField(phi, mass_tolerance);
    std::vector<double> out(phi.values());
    for (double& x : out) x /= m;
    return DensityField(ScalarField(phi.grid(), std::move(out)), mass_tolerance);
}

}  // namespace ecl
