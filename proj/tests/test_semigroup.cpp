#include "ecl/semigroup.hpp"
#include "ecl/oracles.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace ecl;
using namespace ecl::testing;

namespace {
const double kPi = std::numbers::pi;
}

TEST_CASE("build selects representation by topology and rejects bad inputs") {
    auto box = box_grid_1d(8.0, 257);
    auto sem_box = SemigroupOperator::build(make_geometry(box, 1));
    CHECK(sem_box.representation() == SemigroupRepresentation::gaussian_kernel);

    auto circle = circle_grid(128);
    auto sem_c = SemigroupOperator::build(make_geometry(circle, 1));
    CHECK(sem_c.representation() == SemigroupRepresentation::spectral);

    // A potential on a box has no kernel form and no spectral fallback here.
    GridSpec spec;
    spec.dimension = 1;
    spec.topology = Topology::truncated_box;
    spec.extent[0] = 4.0;
    spec.points[0] = 64;
    spec.potential.assign(64, 0.0);
    spec.potential[10] = 0.5;
    CHECK_THROWS_AS(SemigroupOperator::build(make_geometry(Grid::build(spec), 1)),
                    std::invalid_argument);

    CHECK_THROWS_AS(sem_box.apply(ScalarField(box, 1.0), -0.1), std::invalid_argument);
}

TEST_CASE("t = 0 is the identity") {
    auto box = box_grid_1d(6.0, 129);
    auto sem = SemigroupOperator::build(make_geometry(box, 1));
    auto phi = sample(box, [](double x) { return std::sin(x) + x * x; });
    auto out = sem.apply(phi, 0.0);
    CHECK(sup_diff(out.values(), phi.values()) == 0.0);
}

TEST_CASE("constants are invariant") {
    auto box = box_grid_1d(8.0, 257);
    auto sem_box = SemigroupOperator::build(make_geometry(box, 1));
    auto one_box = sem_box.apply(ScalarField(box, 1.0), 0.7);
    for (double v : one_box.values()) CHECK(std::abs(v - 1.0) <= 1e-12);

    auto circle = circle_grid(128, 2.0 * kPi, [](double x) { return -std::cos(x); });
    auto sem_c = SemigroupOperator::build(make_geometry(circle, 2));
    auto one_c = sem_c.apply(ScalarField(circle, 1.0), 1.3);
    for (double v : one_c.values()) CHECK(std::abs(v - 1.0) <= 1e-12);
}

TEST_CASE("mass is conserved") {
    auto circle = circle_grid(128, 2.0 * kPi, [](double x) { return -std::cos(x); });
    auto sem = SemigroupOperator::build(make_geometry(circle, 2));
    auto u = normalize(sample(circle, [](double x) { return 1.0 + 0.8 * std::sin(3.0 * x); }));
    CHECK(sem.mass_defect(u, 0.5) <= 1e-12);
    CHECK(sem.mass_defect(u, 4.0) <= 1e-12);

    auto box = box_grid_1d(8.0, 257);
    auto sem_box = SemigroupOperator::build(make_geometry(box, 1));
    auto g = normalize(gaussian_field(box, 0.0, 0.5));
    CHECK(sem_box.mass_defect(g, 0.25) <= 1e-10);
}

TEST_CASE("positivity is preserved") {
    auto box = box_grid_1d(8.0, 257);
    auto sem = SemigroupOperator::build(make_geometry(box, 1));
    auto ind = sample(box, [](double x) { return std::abs(x) < 1.0 ? 1.0 : 0.0; });
    auto out = sem.apply(ind, 0.3);
    for (double v : out.values()) CHECK(v >= -1e-14);

    // Spectral mode preserves positivity up to the spectral resolution of the
    // data; use an analytic field that touches zero at x = pi.
    auto circle = circle_grid(128);
    auto sem_c = SemigroupOperator::build(make_geometry(circle, 1));
    auto hump = sample(circle, [](double x) { return std::exp(std::cos(x)) - std::exp(-1.0); });
    auto oc = sem_c.apply(hump, 0.1);
    for (double v : oc.values()) CHECK(v >= -1e-10);
}

TEST_CASE("semigroup property P_s P_t = P_{s+t}") {
    auto box = box_grid_1d(14.0, 513);
    auto sem = SemigroupOperator::build(make_geometry(box, 1));
    auto phi = gaussian_field(box, 0.3, 0.4);
    auto two_step = sem.apply(sem.apply(phi, 0.2), 0.3);
    auto one_step = sem.apply(phi, 0.5);
    CHECK(sup_diff(two_step.values(), one_step.values()) <= 1e-8);

    auto circle = circle_grid(128, 2.0 * kPi, [](double x) { return -std::cos(x); });
    auto sem_c = SemigroupOperator::build(make_geometry(circle, 2));
    auto psi = sample(circle, [](double x) { return std::exp(std::cos(2.0 * x)); });
    auto two_c = sem_c.apply(sem_c.apply(psi, 0.4), 0.6);
    auto one_c = sem_c.apply(psi, 1.0);
    CHECK(sup_diff(two_c.values(), one_c.values()) <= 1e-10);
}

TEST_CASE("Gaussian evolves with variance + 2t on the box") {
    // Standard Gaussian, t = 0.5: the factor-of-2 pin for the P_t normalization.
    auto box12 = box_grid_1d(12.0, 513);
    auto sem12 = SemigroupOperator::build(make_geometry(box12, 1));
    auto std_out = sem12.apply(gaussian_field(box12, 0.0, 1.0), 0.5);
    CHECK(sup_diff(std_out.values(), gaussian_field(box12, 0.0, 2.0).values()) <= 1e-8);

    // Wider box so kernel truncation stays below tolerance at larger t.
    auto box = box_grid_1d(14.0, 1025);
    auto sem = SemigroupOperator::build(make_geometry(box, 1));
    oracles::GaussianState gs{{0.0, 0.0}, 0.5};
    auto phi = gaussian_field(box, gs.mean[0], gs.variance);
    for (double t : {0.1, 0.5, 1.0}) {
        auto out = sem.apply(phi, t);
        auto evolved = oracles::gaussian_heat(gs, t);
        auto want = gaussian_field(box, evolved.mean[0], evolved.variance);
        CHECK(sup_diff(out.values(), want.values()) <= 5e-8);
    }
}

TEST_CASE("spectral mode matches the exact Fourier multiplier on the flat circle") {
    auto circle = circle_grid(128);
    auto sem = SemigroupOperator::build(make_geometry(circle, 1));
    // Eigenfunction: P_t cos(kx) = e^{-k^2 t} cos(kx).
    for (int k : {1, 3}) {
        auto phi = sample(circle, [&](double x) { return std::cos(k * x); });
        auto out = sem.apply(phi, 0.2);
        double factor = std::exp(-double(k * k) * 0.2);
        double err = 0.0;
        for (std::size_t i = 0; i < circle->node_count(); ++i)
            err = std::max(err, std::abs(out[i] - factor * std::cos(k * circle->coord(i, 0))));
        CHECK(err <= 1e-10);
    }
}

TEST_CASE("spectral generator is negative semidefinite with a simple zero mode") {
    auto circle = circle_grid(128, 2.0 * kPi, [](double x) { return -std::cos(x); });
    auto sem = SemigroupOperator::build(make_geometry(circle, 2));
    const auto& ev = sem.eigenvalues();
    REQUIRE(ev.size() == 128);
    CHECK(std::abs(ev[ev.size() - 1]) <= 1e-10);   // the constant mode
    CHECK(ev[ev.size() - 2] < -1e-3);              // spectral gap
}

TEST_CASE("P_t is self-adjoint in L2(m)") {
    auto circle = circle_grid(128, 2.0 * kPi, [](double x) { return -std::cos(x); });
    auto sem = SemigroupOperator::build(make_geometry(circle, 2));
    auto u = sample(circle, [](double x) { return 1.0 + 0.5 * std::sin(2.0 * x); });
    auto v = sample(circle, [](double x) { return std::cos(3.0 * x) + 2.0; });
    auto pu = sem.apply(u, 0.4);
    auto pv = sem.apply(v, 0.4);
    std::vector<double> a(circle->node_count()), b(circle->node_count());
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = pu[i] * v[i];
        b[i] = u[i] * pv[i];
    }
    CHECK(std::abs(integrate(ScalarField(circle, a)) - integrate(ScalarField(circle, b))) <= 1e-12);
}

TEST_CASE("long-time limit is the m-average") {
    auto circle = circle_grid(128, 2.0 * kPi, [](double x) { return -std::cos(x); });
    auto sem = SemigroupOperator::build(make_geometry(circle, 2));
    auto u = sample(circle, [](double x) { return 1.0 + std::sin(x) + 0.3 * std::cos(4.0 * x); });
    auto grid = circle;
    double avg = integrate(u) / grid->reference_mass();
    auto out = sem.apply(u, 50.0);
    for (double v : out.values()) CHECK(std::abs(v - avg) <= 1e-10);
}

TEST_CASE("node budget guards the dense eigensolve") {
    GridSpec spec;
    spec.dimension = 2;
    spec.topology = Topology::periodic_circle;
    spec.extent[0] = 2.0 * kPi;
    spec.extent[1] = 2.0 * kPi;
    spec.points[0] = 128;
    spec.points[1] = 128;  // 16384 nodes > budget
    CHECK_THROWS_AS(SemigroupOperator::build(make_geometry(Grid::build(spec), 2)),
                    std::invalid_argument);
}
