#pragma once

#include "ecl/calculus.hpp"
#include "ecl/grid.hpp"
#include "ecl/semigroup.hpp"

#include <memory>
#include <vector>

namespace ecl {

// Converged pair (f, g) with u = f P_T g and v = g P_T f.
// Gauge fixed so that the integral of g against m equals 1.
struct Decomposition {
    ScalarField f;
    ScalarField g;
    double horizon = 0.0;
    std::shared_ptr<const SemigroupOperator> semigroup;
    DensityField u;
    DensityField v;
    int iterations = 0;
    double residual = 0.0;  // final L1 marginal error
    std::vector<double> residual_trace;
};

// Entropic interpolation at one time: rho = P_t f * P_{T-t} g (then
// renormalized), theta = log P_{T-t} g - log P_t f, velocity = grad theta.
struct InterpolationSample {
    double t = 0.0;
    DensityField rho;
    ScalarField theta;
    VectorField velocity;
    ScalarField pt_f;
    ScalarField ptt_g;
    // Support mask: rho above 1e-12 * max(rho); all functional integrals
    // of one sample are restricted to it.
    std::vector<unsigned char> mask;
};

struct SolverOptions {
    double tol = 1e-10;
    int max_iter = 10000;
    double g_initial_scale = 1.0;  // gauge-invariance probe
};

Decomposition solve_schrodinger(const DensityField& u, const DensityField& v,
                                std::shared_ptr<const SemigroupOperator> semigroup,
                                double horizon, const SolverOptions& opts = {});

InterpolationSample interpolate(const Decomposition& dec, double t);

// L1 residual of the continuity equation d_t rho + div(v rho) = 0 at time t,
// with a centered difference in time; a pure discretization diagnostic.
double continuity_residual(const Decomposition& dec, double t, double dt);

constexpr double kSupportFloorRel = 1e-12;

std::vector<unsigned char> support_mask(const DensityField& rho);

}  // namespace ecl
