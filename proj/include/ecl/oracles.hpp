#pragma once

#include <array>
#include <cstddef>

namespace ecl::oracles {

// Isotropic Gaussian N(mean, variance * Id).
struct GaussianState {
    std::array<double, 2> mean{0.0, 0.0};
    double variance = 1.0;
};

struct GaussianFunctionals {
    double entropy;
    double entropy_power;
    double fisher;
};

// Closed forms: H = (n/2) ln(2*pi*e*var), N = 2*pi*e*var, I = n/var.
GaussianFunctionals gaussian_functionals(const GaussianState& gs, int n);

// Heat evolution: variance grows by 2t, mean unchanged.
GaussianState gaussian_heat(const GaussianState& gs, double t);

// Closed-form 1D Schroedinger bridge between centered Gaussians
// N(0, var0) and N(0, var1) over horizon T, built from the two-scalar
// fixed point for the quadratic coefficients of log f and log g.
// Independent of the grid solver by construction.
class GaussianBridge {
public:
    GaussianBridge(double var0, double var1, double horizon);

    double horizon() const { return horizon_; }
    // Quadratic coefficients: f ~ exp(-a x^2 / 2), g ~ exp(-b x^2 / 2).
    double coeff_a() const { return a_; }
    double coeff_b() const { return b_; }

    double variance(double t) const;                 // Var of rho_t
    double density(double t, double x) const;        // rho_t(x)
    double velocity_slope(double t) const;           // v_t(x) = slope * x
    double entropy(double t) const;
    double fisher(double t) const { return 1.0 / variance(t); }
    double kinetic(double t) const;                  // integral of |v|^2 rho
    double energy() const;                           // E_T, evaluated at T/2

private:
    double var0_, var1_, horizon_;
    double a_ = 0.0, b_ = 0.0;
    // Precision of P_s applied to exp(-c x^2 / 2): c / (1 + 2 s c).
    static double evolved_coeff(double c, double s) { return c / (1.0 + 2.0 * s * c); }
};

}  // namespace ecl::oracles
