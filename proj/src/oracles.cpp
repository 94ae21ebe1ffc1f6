#include "ecl/oracles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ecl::oracles {

namespace {
constexpr double kTwoPiE = 2.0 * std::numbers::pi * std::numbers::e;
}

GaussianFunctionals gaussian_functionals(const GaussianState& gs, int n) {
    if (!(gs.variance > 0.0)) throw std::invalid_argument("gaussian_functionals: variance <= 0");
    GaussianFunctionals out{};
    out.entropy = 0.5 * static_cast<double>(n) * std::log(kTwoPiE * gs.variance);
    out.entropy_power = kTwoPiE * gs.variance;
    out.fisher = static_cast<double>(n) / gs.variance;
    return out;
}

GaussianState gaussian_heat(const GaussianState& gs, double t) {
    if (t < 0.0) throw std::invalid_argument("gaussian_heat: negative time");
    GaussianState out = gs;
    out.variance = gs.variance + 2.0 * t;
    return out;
}

GaussianBridge::GaussianBridge(double var0, double var1, double horizon)
    : var0_(var0), var1_(var1), horizon_(horizon) {
    if (!(var0 > 0.0) || !(var1 > 0.0) || !(horizon > 0.0))
        throw std::invalid_argument("GaussianBridge: variances and horizon must be positive");

    // Marginal constraints on the quadratic coefficients:
    //   a + b/(1+2Tb) = 1/var0,   b + a/(1+2Ta) = 1/var1.
    // Eliminate a and solve the scalar equation in b by bisection.
    const double t = horizon_;
    auto a_of_b = [&](double b) { return 1.0 / var0_ - evolved_coeff(b, t); };
    auto resid = [&](double b) {
        double a = a_of_b(b);
        return b + evolved_coeff(a, t) - 1.0 / var1_;
    };

    // Bracket: b > -1/(2T) keeps P_T g well defined; scan upward for a
    // sign change starting just above that pole.
    double lo = -0.5 / t + 1e-12;
    double hi = lo;
    double step = 1.0 / var0_ + 1.0 / var1_ + 1.0 / t;
    double flo = resid(lo);
    bool bracketed = false;
    for (int i = 0; i < 200; ++i) {
        hi = lo + step;
        double fhi = resid(hi);
        if (flo == 0.0 || flo * fhi <= 0.0) { bracketed = true; break; }
        lo = hi;
        flo = fhi;
        step *= 1.5;
    }
    if (!bracketed) throw std::runtime_error("GaussianBridge: failed to bracket fixed point");
    for (int i = 0; i < 200 && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = resid(mid);
        if (flo * fm <= 0.0) hi = mid;
        else { lo = mid; flo = fm; }
    }
    b_ = 0.5 * (lo + hi);
    if (std::abs(b_) < 1e-12) b_ = 0.0;  // heat-flow case
    a_ = a_of_b(b_);
}

double GaussianBridge::variance(double t) const {
    double precision = evolved_coeff(a_, t) + evolved_coeff(b_, horizon_ - t);
    return 1.0 / precision;
}

double GaussianBridge::density(double t, double x) const {
    double var = variance(t);
    return std::exp(-0.5 * x * x / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

double GaussianBridge::velocity_slope(double t) const {
    // v_t = grad(log P_{T-t} g - log P_t f) = (a_t - b_{T-t}) x.
    return evolved_coeff(a_, t) - evolved_coeff(b_, horizon_ - t);
}

double GaussianBridge::entropy(double t) const {
    return 0.5 * std::log(kTwoPiE * variance(t));
}

double GaussianBridge::kinetic(double t) const {
    double s = velocity_slope(t);
    return s * s * variance(t);
}

double GaussianBridge::energy() const {
    double t = 0.5 * horizon_;
    return 0.5 * (kinetic(t) - fisher(t));
}

}  // namespace ecl::oracles
