#include "ecl/bridge.hpp"
#include "ecl/oracles.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

using namespace ecl;
using namespace ecl::testing;

namespace {

const double kPi = std::numbers::pi;

std::shared_ptr<const SemigroupOperator> box_semigroup(const GridPtr& grid) {
    return std::make_shared<SemigroupOperator>(SemigroupOperator::build(make_geometry(grid, 1)));
}

DensityField truncated_gaussian(const GridPtr& grid, double mean, double var) {
    return normalize(gaussian_field(grid, mean, var));
}

}  // namespace

TEST_CASE("heat-flow marginals solve in one sweep: f = u, g constant") {
    auto grid = box_grid_1d(10.0, 513);
    auto sem = box_semigroup(grid);
    auto u = truncated_gaussian(grid, 0.0, 0.5);
    auto v = normalize(sem->apply(u.field(), 1.0));
    auto dec = solve_schrodinger(u, v, sem, 1.0);
    CHECK(dec.residual <= 1e-10);

    // After the gauge fix, g == 1 / reference mass everywhere.
    double c = 1.0 / grid->reference_mass();
    for (double gv : dec.g.values()) CHECK(std::abs(gv - c) <= 1e-10 * c);
    // And f recovers u up to the same constant.
    for (std::size_t i = 0; i < grid->node_count(); ++i)
        CHECK(std::abs(dec.f[i] * c - u[i]) <= 1e-8);
}

TEST_CASE("symmetric marginals give f = g after gauge alignment") {
    auto grid = box_grid_1d(8.0, 513);
    auto sem = box_semigroup(grid);
    auto u = normalize(sample(grid, [](double x) { return bump(x, 0.0, 2.0); }));
    auto dec = solve_schrodinger(u, u, sem, 1.0);
    CHECK(dec.residual <= 1e-10);
    // Align gauges: rescale f to match g's normalization.
    double sf = integrate(dec.f), sg = integrate(dec.g);
    double err = 0.0;
    for (std::size_t i = 0; i < grid->node_count(); ++i)
        err = std::max(err, std::abs(dec.f[i] / sf - dec.g[i] / sg));
    CHECK(err <= 1e-8);
}

TEST_CASE("Gaussian bridge matches the closed-form oracle at midtime") {
    auto grid = box_grid_1d(10.0, 513);
    auto sem = box_semigroup(grid);
    auto u = truncated_gaussian(grid, 0.0, 0.25);
    auto v = truncated_gaussian(grid, 0.0, 2.25);
    auto dec = solve_schrodinger(u, v, sem, 1.0);
    CHECK(dec.residual <= 1e-10);

    oracles::GaussianBridge oracle(0.25, 2.25, 1.0);
    auto mid = interpolate(dec, 0.5);
    double err = 0.0;
    for (std::size_t i = 0; i < grid->node_count(); ++i)
        err = std::max(err, std::abs(mid.rho[i] - oracle.density(0.5, grid->coord(i, 0))));
    CHECK(err <= 1e-5);

    // Velocity is linear in x on the support: v(x) = slope * x.
    double slope = oracle.velocity_slope(0.5);
    for (std::size_t i = 0; i < grid->node_count(); ++i) {
        if (!mid.mask[i]) continue;
        double x = grid->coord(i, 0);
        if (std::abs(x) > 3.0) continue;
        CHECK(std::abs(mid.velocity.component(0)[i] - slope * x) <= 1e-4);
    }
}

TEST_CASE("asymmetric Gaussian pair reproduces the oracle density") {
    auto grid = box_grid_1d(10.0, 513);
    auto sem = box_semigroup(grid);
    auto u = truncated_gaussian(grid, 0.0, 0.5 * 0.5);
    auto v = truncated_gaussian(grid, 0.0, 1.5 * 1.5);
    auto dec = solve_schrodinger(u, v, sem, 1.0);
    oracles::GaussianBridge ob(0.5 * 0.5, 1.5 * 1.5, 1.0);
    auto mid = interpolate(dec, 0.5);
    double err = 0.0;
    for (std::size_t i = 0; i < grid->node_count(); ++i)
        err = std::max(err, std::abs(mid.rho[i] - ob.density(0.5, grid->coord(i, 0))));
    CHECK(err <= 1e-5);
}

TEST_CASE("interpolation endpoints recover the marginals") {
    auto grid = box_grid_1d(8.0, 513);
    auto sem = box_semigroup(grid);
    auto u = truncated_gaussian(grid, -1.0, 0.3);
    auto v = truncated_gaussian(grid, 1.5, 0.4);
    auto dec = solve_schrodinger(u, v, sem, 1.0);
    CHECK(dec.residual <= 1e-10);
    auto s0 = interpolate(dec, 0.0);
    auto s1 = interpolate(dec, 1.0);
    CHECK(sup_diff(s0.rho.values(), u.values()) <= 1e-8);
    CHECK(sup_diff(s1.rho.values(), v.values()) <= 1e-8);
}

TEST_CASE("every interpolation sample has unit mass") {
    auto grid = box_grid_1d(8.0, 513);
    auto sem = box_semigroup(grid);
    auto u = normalize(sample(grid, [](double x) { return bump(x, -2.0, 1.5); }));
    auto v = normalize(sample(grid, [](double x) { return bump(x, 2.0, 1.5); }));
    auto dec = solve_schrodinger(u, v, sem, 1.0);
    for (double t : {0.1, 0.25, 0.5, 0.75, 0.9})
        CHECK(std::abs(integrate(interpolate(dec, t).rho.field()) - 1.0) <= 1e-12);
}

TEST_CASE("gauge invariance: initial scale of g changes neither rho nor grad theta") {
    auto grid = box_grid_1d(8.0, 513);
    auto sem = box_semigroup(grid);
    auto u = normalize(sample(grid, [](double x) { return bump(x, -1.5, 1.2); }));
    auto v = normalize(sample(grid, [](double x) { return bump(x, 1.5, 1.2); }));
    SolverOptions base, scaled;
    scaled.g_initial_scale = 100.0;
    auto d1 = solve_schrodinger(u, v, sem, 1.0, base);
    auto d2 = solve_schrodinger(u, v, sem, 1.0, scaled);
    auto s1 = interpolate(d1, 0.5);
    auto s2 = interpolate(d2, 0.5);
    CHECK(sup_diff(s1.rho.values(), s2.rho.values()) <= 1e-10);
    double verr = 0.0;
    for (std::size_t i = 0; i < grid->node_count(); ++i)
        if (s1.mask[i] && std::abs(grid->coord(i, 0)) < 3.0)
            verr = std::max(verr, std::abs(s1.velocity.component(0)[i] - s2.velocity.component(0)[i]));
    CHECK(verr <= 1e-10);
}

TEST_CASE("residual trace is non-increasing after the first iteration") {
    auto grid = box_grid_1d(8.0, 513);
    auto sem = box_semigroup(grid);
    auto u = normalize(sample(grid, [](double x) { return bump(x, -2.0, 1.5); }));
    auto v = truncated_gaussian(grid, 1.0, 0.4);
    auto dec = solve_schrodinger(u, v, sem, 0.5);
    REQUIRE(dec.residual_trace.size() >= 2);
    for (std::size_t k = 2; k < dec.residual_trace.size(); ++k)
        CHECK(dec.residual_trace[k] <= dec.residual_trace[k - 1] + 1e-12);
    CHECK(dec.residual == dec.residual_trace.back());
    CHECK(dec.iterations == static_cast<int>(dec.residual_trace.size()));
}

TEST_CASE("solver works on the weighted circle") {
    auto circle = circle_grid(256, 2.0 * kPi, [](double x) { return -std::cos(x); });
    auto sem = std::make_shared<SemigroupOperator>(
        SemigroupOperator::build(make_geometry(circle, 2)));
    auto u = normalize(sample(circle, [](double x) { return 0.05 + bump(x, 2.0, 1.0); }));
    auto v = normalize(sample(circle, [](double x) { return 0.05 + bump(x, 4.5, 1.0); }));
    auto dec = solve_schrodinger(u, v, sem, 1.0);
    CHECK(dec.residual <= 1e-10);
    auto mid = interpolate(dec, 0.5);
    CHECK(std::abs(integrate(mid.rho.field()) - 1.0) <= 1e-12);
    for (double r : mid.rho.values()) CHECK(r >= 0.0);
}

TEST_CASE("support mask follows the relative floor") {
    auto grid = box_grid_1d(8.0, 257);
    auto rho = normalize(sample(grid, [](double x) { return bump(x, 0.0, 1.0); }));
    auto mask = support_mask(rho);
    double peak = 0.0;
    for (double r : rho.values()) peak = std::max(peak, r);
    for (std::size_t i = 0; i < grid->node_count(); ++i)
        CHECK(static_cast<bool>(mask[i]) == (rho[i] > kSupportFloorRel * peak));
}

TEST_CASE("continuity equation holds at discretization accuracy") {
    auto grid = box_grid_1d(10.0, 513);
    auto sem = box_semigroup(grid);
    auto u = truncated_gaussian(grid, -1.0, 0.5);
    auto v = truncated_gaussian(grid, 1.0, 0.8);
    auto dec = solve_schrodinger(u, v, sem, 1.0);
    CHECK(continuity_residual(dec, 0.5, 1e-4) <= 1e-5);
}

TEST_CASE("solver error paths") {
    auto grid = box_grid_1d(8.0, 257);
    auto sem = box_semigroup(grid);
    auto u = truncated_gaussian(grid, 0.0, 0.5);
    CHECK_THROWS_AS(solve_schrodinger(u, u, sem, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(solve_schrodinger(u, u, sem, 0.0), std::invalid_argument);
    auto dec = solve_schrodinger(u, u, sem, 1.0);
    CHECK_THROWS_AS(interpolate(dec, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(interpolate(dec, 1.1), std::invalid_argument);
}
