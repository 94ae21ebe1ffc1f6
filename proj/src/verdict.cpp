#include "ecl/verdict.hpp"

#include "ecl/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

namespace ecl {

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    std::size_t workers = std::min(worker_count(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) fn(i);
        });
    for (auto& th : pool) th.join();
}

std::size_t worker_count() {
    std::size_t n = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("ECL_THREADS")) {
        long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) n = std::min(n, static_cast<std::size_t>(cap));
    }
    return n;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::PASS: return "PASS";
        case Verdict::FAIL: return "FAIL";
        default: return "INCONCLUSIVE";
    }
}

CurveReport build_curve(const Decomposition& dec, const GeometryConfig& geo, int samples) {
    if (dec.residual > 1e-6)
        throw std::invalid_argument("build_curve: decomposition not converged");
    CurveReport curve;
    curve.effective_dimension = geo.effective_dimension;
    curve.curvature_K = geo.curvature_K;
    const double nd = static_cast<double>(geo.effective_dimension);
    const int m = samples;
    curve.t.resize(m);
    curve.functionals.resize(m);
    curve.deficits.resize(m);
    for (int k = 0; k < m; ++k)
        curve.t[k] = dec.horizon * static_cast<double>(k + 1) / static_cast<double>(m + 1);

    parallel_for(static_cast<std::size_t>(m), [&](std::size_t k) {
        InterpolationSample s = interpolate(dec, curve.t[k]);
        curve.functionals[k] = functional_report(s, geo);
        curve.deficits[k] = deficit_report(s, geo);
    });

    curve.d2n_analytic.resize(m);
    curve.bound.resize(m);
    curve.margin.resize(m);
    const bool weighted = geo.grid->has_potential() || geo.curvature_K != 0.0;
    for (int k = 0; k < m; ++k) {
        const auto& f = curve.functionals[k];
        curve.d2n_analytic[k] = f.entropy_power *
            ((4.0 / (nd * nd)) * f.dH * f.dH + (2.0 / nd) * f.d2H);
        double b = (4.0 / (nd * nd)) * f.entropy_power * f.fisher * f.energy;
        if (weighted)
            b -= (2.0 * geo.curvature_K / nd) * f.entropy_power * (f.kinetic + f.fisher);
        curve.bound[k] = b;
        curve.margin[k] = b - curve.d2n_analytic[k];
    }

    curve.d2n_fd.assign(m, std::numeric_limits<double>::quiet_NaN());
    const double dt = dec.horizon / static_cast<double>(m + 1);
    for (int k = 1; k + 1 < m; ++k) {
        double np = curve.functionals[k + 1].entropy_power;
        double n0 = curve.functionals[k].entropy_power;
        double nm = curve.functionals[k - 1].entropy_power;
        curve.d2n_fd[k] = (np - 2.0 * n0 + nm) / (dt * dt);
    }
    return curve;
}

namespace {

VerdictRecord judge(const CurveReport& curve, const std::vector<double>& margin,
                    double tol_margin) {
    VerdictRecord rec;
    double scale = 1.0;
    for (double d2n : curve.d2n_analytic) scale = std::max(scale, std::abs(d2n));
    rec.tol_margin = tol_margin * scale;
    rec.min_margin = *std::min_element(margin.begin(), margin.end());

    double emin = std::numeric_limits<double>::infinity(), emax = -emin;
    double lmin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < curve.functionals.size(); ++k) {
        emin = std::min(emin, curve.functionals[k].energy);
        emax = std::max(emax, curve.functionals[k].energy);
        lmin = std::min(lmin, curve.deficits[k].lhs_alternative);
    }
    rec.max_energy_drift = emax - emin;
    rec.min_lhs_alternative = lmin;

    if (rec.min_margin > rec.tol_margin) rec.verdict = Verdict::PASS;
    else if (rec.min_margin >= -rec.tol_margin) rec.verdict = Verdict::INCONCLUSIVE;
    else rec.verdict = Verdict::FAIL;
    return rec;
}

}  // namespace

VerdictRecord check_euclidean(const CurveReport& curve, double tol_margin) {
    if (curve.curvature_K != 0.0)
        throw std::invalid_argument("check_euclidean: curve was built with a curvature term");
    return judge(curve, curve.margin, tol_margin);
}

VerdictRecord check_weighted(const CurveReport& curve, double curvature_K, double tol_margin) {
    const double nd = static_cast<double>(curve.effective_dimension);
    std::vector<double> margin(curve.t.size());
    for (std::size_t k = 0; k < margin.size(); ++k) {
        const auto& f = curve.functionals[k];
        double b = (4.0 / (nd * nd)) * f.entropy_power * f.fisher * f.energy -
                   (2.0 * curvature_K / nd) * f.entropy_power * (f.kinetic + f.fisher);
        margin[k] = b - curve.d2n_analytic[k];
    }
    return judge(curve, margin, tol_margin);
}

EqualityDiagnostic equality_diagnostic(const Decomposition& dec, double t) {
    InterpolationSample s = interpolate(dec, t);
    const GridPtr& grid = dec.f.grid();
    auto log_floored = [&](const ScalarField& phi) {
        std::vector<double> out(phi.size());
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = std::log(std::max(phi[i], 1e-300));
        return ScalarField(grid, std::move(out));
    };
    VectorField grad_f = gradient(log_floored(s.pt_f));
    VectorField grad_g = gradient(log_floored(s.ptt_g));

    const auto& w = grid->weights();
    auto weighted_norm2 = [&](const VectorField& a, const VectorField& b) {
        double acc = 0.0;
        for (int ax = 0; ax < grid->dimension(); ++ax) {
            const auto& ca = a.component(ax);
            const auto& cb = b.component(ax);
            for (std::size_t i = 0; i < ca.size(); ++i)
                if (s.mask[i]) acc += ca[i] * cb[i] * s.rho[i] * w[i];
        }
        return acc;
    };
    EqualityDiagnostic diag;
    diag.r_f = std::sqrt(std::max(weighted_norm2(grad_f, grad_f), 0.0));
    diag.r_g = std::sqrt(std::max(weighted_norm2(grad_g, grad_g), 0.0));

    // grad log rho = grad log P_t f + grad log P_{T-t} g, grad theta = their difference.
    VectorField grad_rho(grid), grad_theta(grid);
    for (int ax = 0; ax < grid->dimension(); ++ax)
        for (std::size_t i = 0; i < grad_rho.component(ax).size(); ++i) {
            grad_rho.component(ax)[i] = grad_f.component(ax)[i] + grad_g.component(ax)[i];
            grad_theta.component(ax)[i] = grad_g.component(ax)[i] - grad_f.component(ax)[i];
        }
    double ip = weighted_norm2(grad_rho, grad_theta);
    double na = std::sqrt(std::max(weighted_norm2(grad_rho, grad_rho), 0.0));
    double nb = std::sqrt(std::max(weighted_norm2(grad_theta, grad_theta), 0.0));
    diag.parallelism_defect = (na > 0.0 && nb > 0.0) ? 1.0 - std::abs(ip) / (na * nb) : 0.0;
    diag.near_equality = std::min(diag.r_f, diag.r_g) < 1e-3 || diag.parallelism_defect < 1e-3;
    return diag;
}

}  // namespace ecl
