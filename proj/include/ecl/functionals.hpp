#pragma once

#include "ecl/bridge.hpp"
#include "ecl/calculus.hpp"
#include "ecl/grid.hpp"

namespace ecl {

// Scalar functionals of one interpolation sample. Entropies in nats.
struct FunctionalReport {
    double t = 0.0;
    double entropy = 0.0;        // H
    double entropy_power = 0.0;  // N = exp(2H/n)
    double fisher = 0.0;         // I
    double kinetic = 0.0;        // integral of |v|^2 rho dm
    double energy = 0.0;         // (kinetic - I) / 2
    double dH = 0.0;             // first entropy derivative
    double d2H = 0.0;            // second entropy derivative
};

struct DeficitReport {
    double t = 0.0;
    double lambda_star = 0.0;
    double eta_star = 0.0;
    double a1 = 0.0;      // A1(lambda*), integral of squares
    double a2 = 0.0;      // A2(eta*)
    double cs_gap = 0.0;  // Cauchy-Schwarz slack
    double lhs_alternative = 0.0;
};

double entropy(const DensityField& rho);
double entropy_power(const DensityField& rho, int n);
// Fisher information in the grad-log form: integral of |grad log rho|^2 rho dm.
double fisher(const DensityField& rho);
double kinetic(const InterpolationSample& sample);

FunctionalReport functional_report(const InterpolationSample& sample, const GeometryConfig& geo);
DeficitReport deficit_report(const InterpolationSample& sample, const GeometryConfig& geo);

// Convenience: report at time t of a converged decomposition.
FunctionalReport functional_report(const Decomposition& dec, const GeometryConfig& geo, double t);
double energy(const Decomposition& dec, const GeometryConfig& geo, double t);

}  // namespace ecl
