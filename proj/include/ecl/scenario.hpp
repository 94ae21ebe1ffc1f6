#pragma once

#include "ecl/bridge.hpp"
#include "ecl/verdict.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ecl {

enum class TheoremKind { euclidean, weighted, costa_reduction };

std::string to_string(TheoremKind k);

// One marginal block: a parametric preset sampled onto the grid.
struct MarginalSpec {
    std::string family;  // gaussian | bump | uniform | mixture | file | heat_of
    std::vector<double> mean;    // gaussian
    double var = 1.0;            // gaussian
    std::vector<double> center;  // bump
    double width = 1.0;          // bump
    double a = 0.0, b = 1.0;     // uniform
    std::string components;      // mixture, e.g. "bump(-2,0.8)@1, bump(2,0.8)@1"
    std::string path;            // file
    double heat_time = 0.0;      // heat_of (0 means "use T")
};

struct ScenarioConfig {
    std::string id;
    GridSpec grid;
    std::string potential_preset = "zero";  // zero | neg_cos
    int effective_n = 0;                    // 0 means grid dimension
    MarginalSpec mu;
    MarginalSpec nu;
    double horizon = 1.0;
    SolverOptions solver;
    int curve_samples = kDefaultCurveSamples;
    double tol_margin = kDefaultMarginTol;
    std::string curve_path = "curve.csv";
    std::string verdict_path = "verdict.txt";
};

// Flat key-value config: one `key = value` per line, '#' comments.
ScenarioConfig parse_config(const std::string& text, const std::string& fallback_id);
ScenarioConfig load_config(const std::string& path);

struct ScenarioResult {
    ScenarioConfig config;
    TheoremKind theorem = TheoremKind::euclidean;
    CurveReport curve;
    VerdictRecord record;
    int iterations = 0;
    double residual = 0.0;
    double curvature_K = 0.0;
};

struct RunFlags {
    std::string out_dir;
    std::optional<int> samples;
    std::optional<double> tol;
    bool quiet = false;
};

// Full pipeline: grid -> marginals -> solver -> curve -> verdict.
// Throws ConfigError for invalid configs.
ScenarioResult run_scenario(const ScenarioConfig& config);

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exit codes: 0 all PASS/INCONCLUSIVE, 1 invalid config, 2 solver
// non-convergence, 3 any FAIL verdict, 4 internal numerical failure.
int run_command(const std::string& config_path, const RunFlags& flags);
int sweep_command(const std::string& config_path, const std::vector<double>& horizons,
                  const RunFlags& flags);

// CSV schema: fixed column order, %.12e, LF endings, atomic replace.
void write_curve_csv(const CurveReport& curve, const std::string& path);
void write_verdict_report(const ScenarioResult& result, const std::string& path);

// Internals exposed for tests.
DensityField sample_marginal(const MarginalSpec& spec, const GridPtr& grid,
                             const SemigroupOperator& op, const DensityField* mu,
                             double horizon);
GridPtr build_scenario_grid(const ScenarioConfig& config);

}  // namespace ecl
