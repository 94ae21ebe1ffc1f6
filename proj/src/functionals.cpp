#include "ecl/functionals.hpp"

#include <algorithm>
#include <cmath>

namespace ecl {

namespace {

constexpr double kLogFloor = 1e-300;

ScalarField log_field(const DensityField& rho) {
    std::vector<double> out(rho.values().size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = std::log(std::max(rho[i], kLogFloor));
    return ScalarField(rho.grid(), std::move(out));
}

double inner_weighted(const VectorField& a, const VectorField& b, const DensityField& rho,
                      const std::vector<unsigned char>& mask) {
    const auto& w = rho.grid()->weights();
    double s = 0.0;
    for (int ax = 0; ax < rho.grid()->dimension(); ++ax) {
        const auto& ca = a.component(ax);
        const auto& cb = b.component(ax);
        for (std::size_t i = 0; i < ca.size(); ++i)
            if (mask[i]) s += ca[i] * cb[i] * rho[i] * w[i];
    }
    return s;
}

double integral_against_rho(const ScalarField& phi, const DensityField& rho,
                            const std::vector<unsigned char>& mask) {
    const auto& w = rho.grid()->weights();
    double s = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i)
        if (mask[i]) s += phi[i] * rho[i] * w[i];
    return s;
}

}  // namespace

double entropy(const DensityField& rho) {
    const auto& w = rho.grid()->weights();
    double mx = 0.0;
    for (double x : rho.values()) mx = std::max(mx, x);
    const double floor = kSupportFloorRel * mx;
    double h = 0.0;
    for (std::size_t i = 0; i < rho.values().size(); ++i)
        if (rho[i] > floor) h -= rho[i] * std::log(rho[i]) * w[i];
    return h;
}

double entropy_power(const DensityField& rho, int n) {
    return std::exp(2.0 * entropy(rho) / static_cast<double>(n));
}

double fisher(const DensityField& rho) {
    VectorField grad_log = gradient(log_field(rho));
    auto mask = support_mask(rho);
    return inner_weighted(grad_log, grad_log, rho, mask);
}

double kinetic(const InterpolationSample& sample) {
    return inner_weighted(sample.velocity, sample.velocity, sample.rho, sample.mask);
}

FunctionalReport functional_report(const InterpolationSample& sample, const GeometryConfig& geo) {
    const int n = geo.effective_dimension;
    FunctionalReport r;
    r.t = sample.t;
    r.entropy = entropy(sample.rho);
    r.entropy_power = std::exp(2.0 * r.entropy / static_cast<double>(n));

    ScalarField log_rho = log_field(sample.rho);
    VectorField grad_log = gradient(log_rho);
    r.fisher = inner_weighted(grad_log, grad_log, sample.rho, sample.mask);
    r.kinetic = inner_weighted(sample.velocity, sample.velocity, sample.rho, sample.mask);
    r.energy = 0.5 * (r.kinetic - r.fisher);

    // <grad rho, grad theta> dm written in the rho-weighted form.
    double s = inner_weighted(grad_log, sample.velocity, sample.rho, sample.mask);
    r.dH = -s;

    ScalarField g2_theta = gamma2(sample.theta, geo);
    ScalarField g2_log = gamma2(log_rho, geo);
    r.d2H = -(integral_against_rho(g2_theta, sample.rho, sample.mask) +
              integral_against_rho(g2_log, sample.rho, sample.mask));
    return r;
}

DeficitReport deficit_report(const InterpolationSample& sample, const GeometryConfig& geo) {
    const int n = geo.effective_dimension;
    const double nd = static_cast<double>(n);
    DeficitReport r;
    r.t = sample.t;

    ScalarField log_rho = log_field(sample.rho);
    VectorField grad_log = gradient(log_rho);
    double fisher_i = inner_weighted(grad_log, grad_log, sample.rho, sample.mask);
    double kin = inner_weighted(sample.velocity, sample.velocity, sample.rho, sample.mask);
    double s = inner_weighted(grad_log, sample.velocity, sample.rho, sample.mask);
    double energy_t = 0.5 * (kin - fisher_i);

    r.lambda_star = s / nd;
    r.eta_star = fisher_i / nd;

    // A1, A2 straight from their definitions as integrals of squares.
    auto quadratic_deficit = [&](const ScalarField& phi, double shift) {
        MatrixField h = hessian(phi);
        const int d = sample.rho.grid()->dimension();
        ScalarField sq(sample.rho.grid(), 0.0);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                const auto& e = h.entry(i, j);
                for (std::size_t k = 0; k < sq.size(); ++k) {
                    double v = e[k] + (i == j ? shift : 0.0);
                    sq[k] += v * v;
                }
            }
        // Off-grid effective dimensions contribute (n - d) pure-shift terms.
        double extra = static_cast<double>(n - d) * shift * shift;
        for (std::size_t k = 0; k < sq.size(); ++k) sq[k] += extra;
        return integral_against_rho(sq, sample.rho, sample.mask);
    };
    ScalarField g2_theta = gamma2(sample.theta, geo);
    ScalarField g2_log = gamma2(log_rho, geo);

    r.a1 = quadratic_deficit(sample.theta, r.lambda_star);
    r.a2 = quadratic_deficit(log_rho, r.eta_star);

    if (sample.rho.grid()->has_potential()) {
        // With a potential, Gamma2 picks up grad phi . Hess V . grad phi and
        // the binomial cross term pairs with L phi = Delta phi - <grad V,
        // grad phi> instead of the plain Laplacian, so the Hessian-square
        // value needs both corrections to satisfy
        // A(lambda) = int Gamma2 rho + 2 lambda int L phi rho + n lambda^2.
        ScalarField v(sample.rho.grid(), sample.rho.grid()->potential());
        MatrixField hess_v = hessian(v);
        VectorField grad_v = gradient(v);
        const int d = sample.rho.grid()->dimension();
        auto correction = [&](const ScalarField& phi, double shift) {
            VectorField g = gradient(phi);
            ScalarField acc(sample.rho.grid(), 0.0);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    const auto& hv = hess_v.entry(i, j);
                    const auto& gi = g.component(i);
                    const auto& gj = g.component(j);
                    for (std::size_t k = 0; k < acc.size(); ++k)
                        acc[k] += hv[k] * gi[k] * gj[k];
                }
            for (int i = 0; i < d; ++i) {
                const auto& gv = grad_v.component(i);
                const auto& gi = g.component(i);
                for (std::size_t k = 0; k < acc.size(); ++k)
                    acc[k] -= 2.0 * shift * gv[k] * gi[k];
            }
            return integral_against_rho(acc, sample.rho, sample.mask);
        };
        r.a1 += correction(sample.theta, r.lambda_star);
        r.a2 += correction(log_rho, r.eta_star);
    }

    r.cs_gap = (2.0 / nd) * fisher_i * energy_t - s * s / nd + fisher_i * fisher_i / nd;

    r.lhs_alternative = integral_against_rho(g2_theta, sample.rho, sample.mask) +
                        integral_against_rho(g2_log, sample.rho, sample.mask) -
                        (2.0 / nd) * s * s + (2.0 / nd) * fisher_i * energy_t;
    return r;
}

FunctionalReport functional_report(const Decomposition& dec, const GeometryConfig& geo, double t) {
    return functional_report(interpolate(dec, t), geo);
}

double energy(const Decomposition& dec, const GeometryConfig& geo, double t) {
    return functional_report(dec, geo, t).energy;
}

}  // namespace ecl
