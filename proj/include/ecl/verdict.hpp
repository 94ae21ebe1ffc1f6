#pragma once

#include "ecl/bridge.hpp"
#include "ecl/functionals.hpp"

#include <string>
#include <vector>

namespace ecl {

// Time-sampled functionals plus the two routes to N'' and the theorem margin.
struct CurveReport {
    std::vector<double> t;
    std::vector<FunctionalReport> functionals;
    std::vector<DeficitReport> deficits;
    std::vector<double> d2n_analytic;  // N * ((4/n^2) dH^2 + (2/n) d2H)
    std::vector<double> d2n_fd;        // centered differences of N; NaN at the ends
    std::vector<double> bound;         // theorem right-hand side
    std::vector<double> margin;        // bound - d2n_analytic
    int effective_dimension = 1;
    double curvature_K = 0.0;
};

enum class Verdict { PASS, FAIL, INCONCLUSIVE };

std::string to_string(Verdict v);

struct VerdictRecord {
    Verdict verdict = Verdict::INCONCLUSIVE;
    double min_margin = 0.0;
    double tol_margin = 0.0;
    double max_energy_drift = 0.0;
    double min_lhs_alternative = 0.0;
};

// Defaults: M = 63 interior samples t_k = T k / (M+1), base margin tolerance
// 1e-3 (scaled by the curve magnitude at verdict time).
constexpr int kDefaultCurveSamples = 63;
constexpr double kDefaultMarginTol = 1e-3;

// Populates reports at the interior sample times; the bound column follows
// the geometry (Euclidean when K-term absent, weighted otherwise).
CurveReport build_curve(const Decomposition& dec, const GeometryConfig& geo,
                        int samples = kDefaultCurveSamples);

// Euclidean entropy-power concavity check (V == 0, n = m).
VerdictRecord check_euclidean(const CurveReport& curve, double tol_margin = kDefaultMarginTol);
// Weighted check including the curvature term with the given K.
VerdictRecord check_weighted(const CurveReport& curve, double curvature_K,
                             double tol_margin = kDefaultMarginTol);

struct EqualityDiagnostic {
    double r_f = 0.0;  // L2(rho) norm of grad log P_t f
    double r_g = 0.0;  // L2(rho) norm of grad log P_{T-t} g
    double parallelism_defect = 0.0;
    bool near_equality = false;
};

EqualityDiagnostic equality_diagnostic(const Decomposition& dec, double t);

}  // namespace ecl
