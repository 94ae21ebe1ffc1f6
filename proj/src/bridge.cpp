#include "ecl/bridge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ecl {

namespace {

constexpr double kDenomFloor = 1e-300;

double l1_error(const ScalarField& a, const std::vector<double>& b) {
    const auto& w = a.grid()->weights();
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]) * w[i];
    return s;
}

// Marginal fitting step: out = target / denom, with the division guarded
// where the target vanishes.
std::vector<double> fit_marginal(const std::vector<double>& target,
                                 const ScalarField& denom) {
    std::vector<double> out(target.size());
    for (std::size_t i = 0; i < target.size(); ++i) {
        if (target[i] > 0.0)
            out[i] = target[i] / std::max(denom[i], kDenomFloor);
        else
            out[i] = 0.0;
    }
    return out;
}

void check_finite(const std::vector<double>& v, int iteration) {
    for (double x : v)
        if (!std::isfinite(x))
            throw std::runtime_error("solve_schrodinger: NaN/Inf at iteration " +
                                     std::to_string(iteration));
}

}  // namespace

std::vector<unsigned char> support_mask(const DensityField& rho) {
    double mx = 0.0;
    for (double x : rho.values()) mx = std::max(mx, x);
    const double floor = kSupportFloorRel * mx;
    std::vector<unsigned char> mask(rho.values().size());
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = rho[i] > floor ? 1 : 0;
    return mask;
}

Decomposition solve_schrodinger(const DensityField& u, const DensityField& v,
                                std::shared_ptr<const SemigroupOperator> semigroup,
                                double horizon, const SolverOptions& opts) {
    if (!(horizon > 0.0)) throw std::invalid_argument("solve_schrodinger: horizon must be > 0");
    const GridPtr& grid = u.grid();

    ScalarField g(grid, opts.g_initial_scale);
    ScalarField f(grid, 0.0);
    std::vector<double> trace;
    double residual = std::numeric_limits<double>::infinity();
    int it = 0;
    for (; it < opts.max_iter; ++it) {
        ScalarField ptg = semigroup->apply(g, horizon);
        f = ScalarField(grid, fit_marginal(u.values(), ptg));
        check_finite(f.values(), it);
        ScalarField ptf = semigroup->apply(f, horizon);
        g = ScalarField(grid, fit_marginal(v.values(), ptf));
        check_finite(g.values(), it);

        // After the g-update the second marginal is met by construction;
        // the residual is dominated by the first one.
        ScalarField ptg2 = semigroup->apply(g, horizon);
        std::vector<double> u_fit(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) u_fit[i] = f[i] * ptg2[i];
        std::vector<double> v_fit(f.size());
        ScalarField ptf2 = semigroup->apply(f, horizon);
        for (std::size_t i = 0; i < f.size(); ++i) v_fit[i] = g[i] * ptf2[i];
        residual = std::max(l1_error(u.field(), u_fit), l1_error(v.field(), v_fit));
        trace.push_back(residual);
        if (residual <= opts.tol) { ++it; break; }
    }

    // Gauge: integral of g against m equals 1.
    double c = integrate(g);
    if (!(c > 0.0)) throw std::runtime_error("solve_schrodinger: degenerate g iterate");
    for (auto& x : g.values()) x /= c;
    for (auto& x : f.values()) x *= c;

    Decomposition dec;
    dec.f = std::move(f);
    dec.g = std::move(g);
    dec.horizon = horizon;
    dec.semigroup = std::move(semigroup);
    dec.u = u;
    dec.v = v;
    dec.iterations = it;
    dec.residual = residual;
    dec.residual_trace = std::move(trace);
    return dec;
}

InterpolationSample interpolate(const Decomposition& dec, double t) {
    if (t < 0.0 || t > dec.horizon)
        throw std::invalid_argument("interpolate: t outside [0, T]");
    InterpolationSample s;
    s.t = t;
    s.pt_f = dec.semigroup->apply(dec.f, t);
    s.ptt_g = dec.semigroup->apply(dec.g, dec.horizon - t);

    std::vector<double> prod(s.pt_f.size());
    for (std::size_t i = 0; i < prod.size(); ++i)
        prod[i] = std::max(s.pt_f[i] * s.ptt_g[i], 0.0);
    s.rho = normalize(ScalarField(dec.f.grid(), std::move(prod)));
    s.mask = support_mask(s.rho);

    // theta stays smooth well past the support mask; the floor only guards
    // underflowed semigroup tails far outside it.
    std::vector<double> theta(s.pt_f.size());
    for (std::size_t i = 0; i < theta.size(); ++i)
        theta[i] = std::log(std::max(s.ptt_g[i], kDenomFloor)) -
                   std::log(std::max(s.pt_f[i], kDenomFloor));
    s.theta = ScalarField(dec.f.grid(), std::move(theta));
    s.velocity = gradient(s.theta);
    return s;
}

double continuity_residual(const Decomposition& dec, double t, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("continuity_residual: dt must be > 0");
    if (t - dt <= 0.0 || t + dt >= dec.horizon)
        throw std::invalid_argument("continuity_residual: t +/- dt outside (0, T)");
    InterpolationSample mid = interpolate(dec, t);
    InterpolationSample fwd = interpolate(dec, t + dt);
    InterpolationSample bwd = interpolate(dec, t - dt);

    const GridPtr& grid = dec.f.grid();
    ScalarField div_flux(grid, 0.0);
    for (int a = 0; a < grid->dimension(); ++a) {
        std::vector<double> flux(mid.rho.values().size());
        const auto& va = mid.velocity.component(a);
        for (std::size_t i = 0; i < flux.size(); ++i) flux[i] = va[i] * mid.rho[i];
        auto d = derivative_axis(*grid, flux, a);
        for (std::size_t i = 0; i < flux.size(); ++i) div_flux[i] += d[i];
    }
    ScalarField resid(grid, 0.0);
    for (std::size_t i = 0; i < resid.size(); ++i)
        resid[i] = std::abs((fwd.rho[i] - bwd.rho[i]) / (2.0 * dt) + div_flux[i]);
    return integrate_masked(resid, mid.mask);
}

}  // namespace ecl
