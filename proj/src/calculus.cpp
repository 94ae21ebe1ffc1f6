#include "ecl/calculus.hpp"

#include <cmath>
#include <numbers>

namespace ecl {

namespace {

// Spectral differentiation matrix for a uniform periodic grid of N points
// on a circle of circumference L (Trefethen's construction).
std::vector<double> spectral_d1_matrix(std::size_t n, double circumference) {
    std::vector<double> d(n * n, 0.0);
    const double pi = std::numbers::pi;
    const bool even = (n % 2 == 0);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            if (p == q) continue;
            auto k = static_cast<std::ptrdiff_t>(p) - static_cast<std::ptrdiff_t>(q);
            double sign = (k % 2 == 0) ? 1.0 : -1.0;
            double arg = pi * static_cast<double>(k) / static_cast<double>(n);
            double entry = even ? sign / std::tan(arg) : sign / std::sin(arg);
            d[p * n + q] = (pi / circumference) * entry;
        }
    }
    return d;
}

// 4th-order one-sided first-derivative closures for box boundaries
// (5-point stencils anchored at the wall, rows 0 and 1).
constexpr double kEdge[2][5] = {
    {-25.0 / 12.0, 4.0, -3.0, 4.0 / 3.0, -1.0 / 4.0},
    {-1.0 / 4.0, -5.0 / 6.0, 3.0 / 2.0, -1.0 / 2.0, 1.0 / 12.0},
};

void derivative_line(const double* in, double* out, std::size_t n, std::ptrdiff_t stride,
                     double h, bool periodic, const std::vector<double>& d1) {
    if (periodic) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            const double* row = d1.data() + i * n;
            for (std::size_t j = 0; j < n; ++j) s += row[j] * in[j * stride];
            out[i * stride] = s;
        }
        return;
    }
    auto at = [&](std::size_t i) { return in[static_cast<std::ptrdiff_t>(i) * stride]; };
    auto rat = [&](std::size_t back) { return at(n - 1 - back); };
    for (std::size_t r = 0; r < 2; ++r) {
        double fwd = 0.0, bwd = 0.0;
        for (std::size_t j = 0; j < 5; ++j) {
            fwd += kEdge[r][j] * at(j);
            bwd += kEdge[r][j] * rat(j);
        }
        out[static_cast<std::ptrdiff_t>(r) * stride] = fwd / h;
        out[static_cast<std::ptrdiff_t>(n - 1 - r) * stride] = -bwd / h;
    }
    for (std::size_t i = 2; i + 2 < n; ++i)
        out[static_cast<std::ptrdiff_t>(i) * stride] =
            (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) / (12.0 * h);
}

// Band-limited interpolant of periodic samples (periodic sinc basis).
double trig_interpolate(const std::vector<double>& values, double circumference, double x) {
    const std::size_t n = values.size();
    const double pi = std::numbers::pi;
    const double h = circumference / static_cast<double>(n);
    const bool even = (n % 2 == 0);
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double phi = 2.0 * pi * (x - static_cast<double>(j) * h) / circumference;
        double w;
        if (std::abs(std::remainder(phi, 2.0 * pi)) < 1e-13) {
            w = 1.0;
        } else if (even) {
            w = std::sin(0.5 * static_cast<double>(n) * phi) /
                (static_cast<double>(n) * std::tan(0.5 * phi));
        } else {
            w = std::sin(0.5 * static_cast<double>(n) * phi) /
                (static_cast<double>(n) * std::sin(0.5 * phi));
        }
        s += values[j] * w;
    }
    return s;
}

double golden_minimize(const std::vector<double>& values, double circumference, double lo,
                       double hi) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = trig_interpolate(values, circumference, c);
    double fd = trig_interpolate(values, circumference, d);
    for (int it = 0; it < 120 && (b - a) > 1e-13 * circumference; ++it) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - inv_phi * (b - a);
            fc = trig_interpolate(values, circumference, c);
        } else {
            a = c; c = d; fc = fd;
            d = a + inv_phi * (b - a);
            fd = trig_interpolate(values, circumference, d);
        }
    }
    return std::min(fc, fd);
}

}  // namespace

ScalarField VectorField::squared_norm() const {
    ScalarField out(grid_, 0.0);
    for (const auto& comp : comps_)
        for (std::size_t i = 0; i < comp.size(); ++i) out[i] += comp[i] * comp[i];
    return out;
}

MatrixField::MatrixField(GridPtr grid) : grid_(std::move(grid)) {
    int d = grid_->dimension();
    entries_.assign(d == 1 ? 1 : 3, std::vector<double>(grid_->node_count(), 0.0));
}

ScalarField MatrixField::hs_norm_squared() const {
    ScalarField out(grid_, 0.0);
    int d = grid_->dimension();
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const auto& e = entry(i, j);
            for (std::size_t k = 0; k < e.size(); ++k) out[k] += e[k] * e[k];
        }
    return out;
}

ScalarField MatrixField::trace() const {
    ScalarField out(grid_, 0.0);
    for (int i = 0; i < grid_->dimension(); ++i) {
        const auto& e = entry(i, i);
        for (std::size_t k = 0; k < e.size(); ++k) out[k] += e[k];
    }
    return out;
}

std::vector<double> derivative_axis(const Grid& grid, const std::vector<double>& values, int axis) {
    std::vector<double> out(values.size());
    const bool periodic = grid.topology() == Topology::periodic_circle;
    const std::size_t n = grid.points(axis);
    std::vector<double> d1;
    if (periodic) d1 = spectral_d1_matrix(n, grid.extent(axis));
    const double h = grid.spacing(axis);

    if (grid.dimension() == 1) {
        derivative_line(values.data(), out.data(), n, 1, h, periodic, d1);
        return out;
    }
    const std::size_t n0 = grid.points(0);
    const std::size_t n1 = grid.points(1);
    if (axis == 0) {
        for (std::size_t j = 0; j < n1; ++j)
            derivative_line(values.data() + j * n0, out.data() + j * n0, n0, 1, h, periodic, d1);
    } else {
        for (std::size_t i = 0; i < n0; ++i)
            derivative_line(values.data() + i, out.data() + i, n1,
                            static_cast<std::ptrdiff_t>(n0), h, periodic, d1);
    }
    return out;
}

VectorField gradient(const ScalarField& phi) {
    VectorField out(phi.grid());
    for (int a = 0; a < phi.grid()->dimension(); ++a)
        out.component(a) = derivative_axis(*phi.grid(), phi.values(), a);
    return out;
}

MatrixField hessian(const ScalarField& phi) {
    const auto& grid = phi.grid();
    MatrixField out(grid);
    int d = grid->dimension();
    std::vector<std::vector<double>> grads(d);
    for (int a = 0; a < d; ++a) grads[a] = derivative_axis(*grid, phi.values(), a);
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            auto dij = derivative_axis(*grid, grads[i], j);
            if (i != j) {
                // Symmetrize the mixed derivative.
                auto dji = derivative_axis(*grid, grads[j], i);
                for (std::size_t k = 0; k < dij.size(); ++k) dij[k] = 0.5 * (dij[k] + dji[k]);
            }
            out.entry(i, j) = std::move(dij);
        }
    }
    return out;
}

ScalarField laplacian(const ScalarField& phi) {
    const auto& grid = phi.grid();
    ScalarField out(grid, 0.0);
    for (int a = 0; a < grid->dimension(); ++a) {
        auto d1 = derivative_axis(*grid, phi.values(), a);
        auto d2 = derivative_axis(*grid, d1, a);
        for (std::size_t k = 0; k < d2.size(); ++k) out[k] += d2[k];
    }
    return out;
}

GeometryConfig make_geometry(GridPtr grid, int effective_dimension) {
    GeometryConfig geo;
    geo.grid = std::move(grid);
    geo.effective_dimension = effective_dimension;
    geo.curvature_K = curvature_bound(geo.grid, effective_dimension);
    return geo;
}

ScalarField generator(const ScalarField& phi, const GeometryConfig& geo) {
    ScalarField out = laplacian(phi);
    if (geo.grid->has_potential()) {
        ScalarField v(geo.grid, geo.grid->potential());
        VectorField gv = gradient(v);
        VectorField gp = gradient(phi);
        for (int a = 0; a < geo.grid->dimension(); ++a) {
            const auto& gva = gv.component(a);
            const auto& gpa = gp.component(a);
            for (std::size_t k = 0; k < gva.size(); ++k) out[k] -= gva[k] * gpa[k];
        }
    }
    return out;
}

ScalarField gamma2(const ScalarField& phi, const GeometryConfig& geo) {
    VectorField grad_phi = gradient(phi);
    ScalarField carre = grad_phi.squared_norm();
    ScalarField l_carre = generator(carre, geo);
    ScalarField l_phi = generator(phi, geo);
    VectorField grad_l = gradient(l_phi);
    ScalarField out(phi.grid(), 0.0);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = 0.5 * l_carre[k];
    for (int a = 0; a < phi.grid()->dimension(); ++a) {
        const auto& gp = grad_phi.component(a);
        const auto& gl = grad_l.component(a);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] -= gp[k] * gl[k];
    }
    return out;
}

double curvature_bound(const GridPtr& grid, int n) {
    const int m = grid->dimension();
    if (n < m) throw std::invalid_argument("curvature_bound: n must be >= grid dimension");
    if (!grid->has_potential()) return 0.0;
    if (n == m)
        throw std::invalid_argument("curvature_bound: n == m requires V == 0");

    ScalarField v(grid, grid->potential());
    MatrixField hv = hessian(v);
    VectorField gv = gradient(v);
    const double inv_nm = 1.0 / static_cast<double>(n - m);

    std::vector<double> lambda(grid->node_count());
    if (m == 1) {
        const auto& h00 = hv.entry(0, 0);
        const auto& g0 = gv.component(0);
        for (std::size_t k = 0; k < lambda.size(); ++k)
            lambda[k] = h00[k] - g0[k] * g0[k] * inv_nm;
    } else {
        const auto& a00 = hv.entry(0, 0);
        const auto& a01 = hv.entry(0, 1);
        const auto& a11 = hv.entry(1, 1);
        const auto& g0 = gv.component(0);
        const auto& g1 = gv.component(1);
        for (std::size_t k = 0; k < lambda.size(); ++k) {
            double m00 = a00[k] - g0[k] * g0[k] * inv_nm;
            double m01 = a01[k] - g0[k] * g1[k] * inv_nm;
            double m11 = a11[k] - g1[k] * g1[k] * inv_nm;
            double tr = 0.5 * (m00 + m11);
            double disc = std::sqrt(0.25 * (m00 - m11) * (m00 - m11) + m01 * m01);
            lambda[k] = tr - disc;
        }
    }

    std::size_t argmin = 0;
    for (std::size_t k = 1; k < lambda.size(); ++k)
        if (lambda[k] < lambda[argmin]) argmin = k;
    double kmin = lambda[argmin];

    // On a 1D circle the eigenvalue field is smooth and periodic; refine the
    // discrete minimum through its band-limited interpolant.
    if (m == 1 && grid->topology() == Topology::periodic_circle) {
        double x0 = grid->axis_coord(0, argmin);
        double h = grid->spacing(0);
        kmin = std::min(kmin, golden_minimize(lambda, grid->extent(0), x0 - h, x0 + h));
    }
    return kmin;
}

}  // namespace ecl
