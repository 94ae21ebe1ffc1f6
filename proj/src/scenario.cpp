#include "ecl/scenario.hpp"

#include "ecl/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace ecl {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

double to_real(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (...) {
        throw ConfigError("invalid real value for " + key + ": '" + s + "'");
    }
}

long to_int(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (...) {
        throw ConfigError("invalid integer value for " + key + ": '" + s + "'");
    }
}

std::vector<double> to_reals(const std::string& s, const std::string& key) {
    std::vector<double> out;
    for (const auto& part : split(s, ',')) out.push_back(to_real(part, key));
    return out;
}

void parse_marginal_key(MarginalSpec& m, const std::string& field, const std::string& value,
                        const std::string& key) {
    if (field == "family") m.family = value;
    else if (field == "mean") m.mean = to_reals(value, key);
    else if (field == "var") m.var = to_real(value, key);
    else if (field == "center") m.center = to_reals(value, key);
    else if (field == "width") m.width = to_real(value, key);
    else if (field == "a") m.a = to_real(value, key);
    else if (field == "b") m.b = to_real(value, key);
    else if (field == "components") m.components = value;
    else if (field == "path") m.path = value;
    else if (field == "time") m.heat_time = to_real(value, key);
    else throw ConfigError("unknown config key: " + key);
}

// Periodic-aware distance to a center along one axis.
double axis_distance(const Grid& grid, double x, double c, int axis) {
    double d = x - c;
    if (grid.topology() == Topology::periodic_circle) {
        double circ = grid.extent(axis);
        d = std::remainder(d, circ);
    }
    return d;
}

std::vector<double> sample_family(const std::string& family, const MarginalSpec& m,
                                  const GridPtr& grid) {
    const int dim = grid->dimension();
    std::vector<double> out(grid->node_count(), 0.0);
    if (family == "gaussian") {
        if (!(m.var > 0.0)) throw ConfigError("gaussian marginal needs var > 0");
        std::vector<double> mean = m.mean;
        mean.resize(dim, 0.0);
        for (std::size_t i = 0; i < out.size(); ++i) {
            double q = 0.0;
            for (int a = 0; a < dim; ++a) {
                double d = axis_distance(*grid, grid->coord(i, a), mean[a], a);
                q += d * d;
            }
            out[i] = std::exp(-0.5 * q / m.var);
        }
    } else if (family == "bump") {
        if (!(m.width > 0.0)) throw ConfigError("bump marginal needs width > 0");
        std::vector<double> center = m.center;
        center.resize(dim, 0.0);
        for (std::size_t i = 0; i < out.size(); ++i) {
            double q = 0.0;
            for (int a = 0; a < dim; ++a) {
                double d = axis_distance(*grid, grid->coord(i, a), center[a], a);
                q += d * d;
            }
            double r = std::sqrt(q) / m.width;
            // cos^16 profile: compact support with 15 vanishing edge
            // derivatives, so finite-difference layers at the support
            // boundary stay benign on coarse grids.
            out[i] = r < 1.0 ? std::pow(std::cos(0.5 * std::numbers::pi * r), 16) : 0.0;
        }
    } else if (family == "uniform") {
        if (!(m.b > m.a)) throw ConfigError("uniform marginal needs b > a");
        if (dim != 1) throw ConfigError("uniform marginal is 1D only");
        for (std::size_t i = 0; i < out.size(); ++i) {
            double x = grid->coord(i, 0);
            out[i] = (x >= m.a && x <= m.b) ? 1.0 : 0.0;
        }
    } else {
        throw ConfigError("unknown marginal family: " + family);
    }
    return out;
}

// Mixture component syntax: name(arg1,arg2)@weight, comma-separated list.
std::vector<double> sample_mixture(const MarginalSpec& m, const GridPtr& grid) {
    std::vector<double> out(grid->node_count(), 0.0);
    std::string rest = m.components;
    if (trim(rest).empty()) throw ConfigError("mixture marginal needs components");
    std::size_t pos = 0;
    while (pos < rest.size()) {
        std::size_t open = rest.find('(', pos);
        std::size_t close = rest.find(')', pos);
        if (open == std::string::npos || close == std::string::npos || close < open)
            throw ConfigError("malformed mixture component list");
        std::string name = trim(rest.substr(pos, open - pos));
        auto args = split(rest.substr(open + 1, close - open - 1), ',');
        double weight = 1.0;
        std::size_t next = close + 1;
        if (next < rest.size() && rest[next] == '@') {
            std::size_t comma = rest.find(',', next);
            std::string wstr = rest.substr(next + 1, comma == std::string::npos
                                                         ? std::string::npos
                                                         : comma - next - 1);
            weight = to_real(trim(wstr), "mixture weight");
            next = comma == std::string::npos ? rest.size() : comma + 1;
        } else if (next < rest.size() && rest[next] == ',') {
            ++next;
        }
        pos = next;

        MarginalSpec comp;
        if (name == "gaussian") {
            if (args.size() < 2) throw ConfigError("gaussian(mean,var) needs 2 args");
            comp.var = to_real(args.back(), "mixture gaussian var");
            for (std::size_t i = 0; i + 1 < args.size(); ++i)
                comp.mean.push_back(to_real(args[i], "mixture gaussian mean"));
        } else if (name == "bump") {
            if (args.size() < 2) throw ConfigError("bump(center,width) needs 2 args");
            comp.width = to_real(args.back(), "mixture bump width");
            for (std::size_t i = 0; i + 1 < args.size(); ++i)
                comp.center.push_back(to_real(args[i], "mixture bump center"));
        } else if (name == "uniform") {
            if (args.size() != 2) throw ConfigError("uniform(a,b) needs 2 args");
            comp.a = to_real(args[0], "mixture uniform a");
            comp.b = to_real(args[1], "mixture uniform b");
        } else {
            throw ConfigError("unknown mixture component: " + name);
        }
        auto vals = sample_family(name, comp, grid);
        ScalarField field(grid, std::move(vals));
        double mass = integrate(field);
        if (!(mass > 0.0)) throw ConfigError("mixture component has zero mass");
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] += weight * field[i] / mass;
    }
    return out;
}

std::vector<double> load_node_file(const std::string& path, std::size_t nodes) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open marginal file: " + path);
    std::vector<double> vals;
    double x;
    while (in >> x) vals.push_back(x);
    if (vals.size() != nodes)
        throw ConfigError("marginal file has " + std::to_string(vals.size()) +
                          " values, grid has " + std::to_string(nodes) + " nodes");
    return vals;
}

// Effective support interval per axis, for the box fit check.
struct Interval { double lo, hi; };

std::vector<Interval> effective_support(const MarginalSpec& m, int dim) {
    std::vector<Interval> out;
    auto widen = [&](const std::vector<double>& centers, double radius) {
        for (int a = 0; a < dim; ++a) {
            double c = a < static_cast<int>(centers.size()) ? centers[a] : 0.0;
            out.push_back({c - radius, c + radius});
        }
    };
    if (m.family == "gaussian") widen(m.mean, 6.0 * std::sqrt(m.var));
    else if (m.family == "bump") widen(m.center, m.width);
    else if (m.family == "uniform") out.push_back({m.a, m.b});
    return out;  // mixture/file/heat_of: checked at sampling time only
}

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, target);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12e", v);
    return buf;
}

}  // namespace

std::string to_string(TheoremKind k) {
    switch (k) {
        case TheoremKind::euclidean: return "euclidean";
        case TheoremKind::weighted: return "weighted";
        default: return "costa_reduction";
    }
}

ScenarioConfig parse_config(const std::string& text, const std::string& fallback_id) {
    ScenarioConfig cfg;
    cfg.id = fallback_id;
    cfg.grid.points = {0, 0};
    std::map<std::string, std::string> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::vector<double> extents;
    std::vector<long> points;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (seen.count(key)) throw ConfigError("duplicate key: " + key);
        seen[key] = value;

        if (key == "scenario.id") cfg.id = value;
        else if (key == "geometry.topology") {
            if (value == "box") cfg.grid.topology = Topology::truncated_box;
            else if (value == "circle") cfg.grid.topology = Topology::periodic_circle;
            else throw ConfigError("geometry.topology must be box or circle");
        } else if (key == "geometry.dimension") cfg.grid.dimension = static_cast<int>(to_int(value, key));
        else if (key == "geometry.extent") extents = to_reals(value, key);
        else if (key == "geometry.points") {
            for (const auto& p : split(value, ',')) points.push_back(to_int(p, key));
        } else if (key == "geometry.potential") cfg.potential_preset = value;
        else if (key == "geometry.n") cfg.effective_n = static_cast<int>(to_int(value, key));
        else if (key == "T") cfg.horizon = to_real(value, key);
        else if (key.rfind("marginal.mu.", 0) == 0)
            parse_marginal_key(cfg.mu, key.substr(12), value, key);
        else if (key.rfind("marginal.nu.", 0) == 0)
            parse_marginal_key(cfg.nu, key.substr(12), value, key);
        else if (key == "solver.tol") cfg.solver.tol = to_real(value, key);
        else if (key == "solver.max_iter") cfg.solver.max_iter = static_cast<int>(to_int(value, key));
        else if (key == "curve.samples") cfg.curve_samples = static_cast<int>(to_int(value, key));
        else if (key == "curve.tol_margin") cfg.tol_margin = to_real(value, key);
        else if (key == "output.curve") cfg.curve_path = value;
        else if (key == "output.verdict") cfg.verdict_path = value;
        else throw ConfigError("unknown config key: " + key);
    }

    if (cfg.grid.dimension < 1 || cfg.grid.dimension > 2)
        throw ConfigError("geometry.dimension must be 1 or 2");
    if (extents.empty()) throw ConfigError("geometry.extent is required");
    if (points.empty()) throw ConfigError("geometry.points is required");
    for (int a = 0; a < cfg.grid.dimension; ++a) {
        double ext = a < static_cast<int>(extents.size()) ? extents[a] : extents[0];
        long pts = a < static_cast<int>(points.size()) ? points[a] : points[0];
        if (!(ext > 0.0)) throw ConfigError("geometry.extent must be positive");
        if (pts < 16) throw ConfigError("geometry.points must be at least 16");
        cfg.grid.extent[a] = ext;
        cfg.grid.points[a] = static_cast<std::size_t>(pts);
    }
    if (cfg.potential_preset != "zero" && cfg.potential_preset != "neg_cos")
        throw ConfigError("geometry.potential must be zero or neg_cos");
    if (cfg.potential_preset == "neg_cos" && cfg.grid.topology != Topology::periodic_circle)
        throw ConfigError("neg_cos potential requires circle topology");
    if (cfg.effective_n == 0) cfg.effective_n = cfg.grid.dimension;
    if (cfg.effective_n < cfg.grid.dimension)
        throw ConfigError("geometry.n must be at least the grid dimension");
    if (cfg.potential_preset != "zero" && cfg.effective_n == cfg.grid.dimension)
        throw ConfigError("geometry.n must exceed the grid dimension with a potential");
    if (!(cfg.horizon > 0.0)) throw ConfigError("T must be positive");
    if (cfg.mu.family.empty()) throw ConfigError("marginal.mu.family is required");
    if (cfg.nu.family.empty()) throw ConfigError("marginal.nu.family is required");
    if (cfg.mu.family == "heat_of") throw ConfigError("heat_of is only valid for marginal.nu");
    if (!(cfg.solver.tol > 0.0)) throw ConfigError("solver.tol must be positive");
    if (cfg.solver.max_iter < 1) throw ConfigError("solver.max_iter must be at least 1");
    if (cfg.curve_samples < 3) throw ConfigError("curve.samples must be at least 3");

    // Box grids: supports must fit with a 10% margin of the extent.
    if (cfg.grid.topology == Topology::truncated_box) {
        for (const MarginalSpec* m : {&cfg.mu, &cfg.nu}) {
            auto support = effective_support(*m, cfg.grid.dimension);
            for (int a = 0; a < static_cast<int>(support.size()); ++a) {
                double limit = 0.9 * cfg.grid.extent[std::min(a, cfg.grid.dimension - 1)];
                if (support[a].lo < -limit || support[a].hi > limit)
                    throw ConfigError("marginal support does not fit the box with 10% margin");
            }
        }
    }
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string id = std::filesystem::path(path).stem().string();
    return parse_config(buf.str(), id);
}

GridPtr build_scenario_grid(const ScenarioConfig& config) {
    GridSpec spec = config.grid;
    if (config.potential_preset == "neg_cos") {
        std::size_t nodes = 1;
        for (int a = 0; a < spec.dimension; ++a) nodes *= spec.points[a];
        spec.potential.resize(nodes);
        // V(x) = -cos(2 pi x / circumference); the canonical circle has
        // circumference 2 pi so this is -cos x there.
        double scale = 2.0 * std::numbers::pi / spec.extent[0];
        for (std::size_t i = 0; i < nodes; ++i) {
            double x = (i % spec.points[0]) * (spec.extent[0] / spec.points[0]);
            spec.potential[i] = -std::cos(scale * x);
        }
    }
    return Grid::build(spec);
}

DensityField sample_marginal(const MarginalSpec& spec, const GridPtr& grid,
                             const SemigroupOperator& op, const DensityField* mu,
                             double horizon) {
    if (spec.family == "heat_of") {
        if (mu == nullptr) throw ConfigError("heat_of requires the mu marginal");
        double t = spec.heat_time > 0.0 ? spec.heat_time : horizon;
        ScalarField evolved = op.apply(mu->field(), t);
        for (auto& x : evolved.values()) x = std::max(x, 0.0);
        return normalize(evolved);
    }
    std::vector<double> vals;
    if (spec.family == "mixture") vals = sample_mixture(spec, grid);
    else if (spec.family == "file") vals = load_node_file(spec.path, grid->node_count());
    else vals = sample_family(spec.family, spec, grid);
    for (double v : vals)
        if (!(v >= 0.0)) throw ConfigError("marginal sampling produced negative values");
    return normalize(ScalarField(grid, std::move(vals)));
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
    ScenarioResult result;
    result.config = config;

    GridPtr grid = build_scenario_grid(config);
    GeometryConfig geo = make_geometry(grid, config.effective_n);
    result.curvature_K = geo.curvature_K;
    auto op = std::make_shared<SemigroupOperator>(SemigroupOperator::build(geo));

    DensityField mu = sample_marginal(config.mu, grid, *op, nullptr, config.horizon);
    DensityField nu = sample_marginal(config.nu, grid, *op, &mu, config.horizon);

    Decomposition dec = solve_schrodinger(mu, nu, op, config.horizon, config.solver);
    result.iterations = dec.iterations;
    result.residual = dec.residual;
    if (dec.residual > config.solver.tol)
        throw std::runtime_error("solver did not converge: residual " +
                                 std::to_string(dec.residual));

    result.curve = build_curve(dec, geo, config.curve_samples);
    if (config.nu.family == "heat_of") result.theorem = TheoremKind::costa_reduction;
    else if (grid->topology() == Topology::periodic_circle) result.theorem = TheoremKind::weighted;
    else result.theorem = TheoremKind::euclidean;

    if (grid->topology() == Topology::periodic_circle)
        result.record = check_weighted(result.curve, geo.curvature_K, config.tol_margin);
    else
        result.record = check_euclidean(result.curve, config.tol_margin);
    return result;
}

void write_curve_csv(const CurveReport& curve, const std::string& path) {
    std::string out = "t,H,N,I,kinetic,energy,dH,d2H,d2N_analytic,d2N_fd,bound,margin,A1,A2,cs_gap\n";
    for (std::size_t k = 0; k < curve.t.size(); ++k) {
        const auto& f = curve.functionals[k];
        const auto& d = curve.deficits[k];
        out += fmt(curve.t[k]) + "," + fmt(f.entropy) + "," + fmt(f.entropy_power) + "," +
               fmt(f.fisher) + "," + fmt(f.kinetic) + "," + fmt(f.energy) + "," + fmt(f.dH) +
               "," + fmt(f.d2H) + "," + fmt(curve.d2n_analytic[k]) + "," + fmt(curve.d2n_fd[k]) +
               "," + fmt(curve.bound[k]) + "," + fmt(curve.margin[k]) + "," + fmt(d.a1) + "," +
               fmt(d.a2) + "," + fmt(d.cs_gap) + "\n";
    }
    write_atomic(path, out);
}

void write_verdict_report(const ScenarioResult& result, const std::string& path) {
    std::string out = "scenario=" + result.config.id + " theorem=" + to_string(result.theorem) +
                      " verdict=" + to_string(result.record.verdict) +
                      " min_margin=" + fmt(result.record.min_margin) +
                      " tol_margin=" + fmt(result.record.tol_margin) +
                      " max_energy_drift=" + fmt(result.record.max_energy_drift) +
                      " iterations=" + std::to_string(result.iterations) +
                      " residual=" + fmt(result.residual) + " K=" + fmt(result.curvature_K) + "\n";
    write_atomic(path, out);
}

namespace {

std::string joined(const std::string& dir, const std::string& leaf) {
    if (dir.empty()) return leaf;
    return (std::filesystem::path(dir) / leaf).string();
}

}  // namespace

int run_command(const std::string& config_path, const RunFlags& flags) {
    ScenarioConfig cfg;
    try {
        cfg = load_config(config_path);
        if (flags.samples) cfg.curve_samples = *flags.samples;
        if (flags.tol) cfg.solver.tol = *flags.tol;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
    ScenarioResult result;
    try {
        result = run_scenario(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::runtime_error& e) {
        std::string msg = e.what();
        std::cerr << "error: " << msg << "\n";
        if (msg.find("NaN") != std::string::npos || msg.find("Inf") != std::string::npos)
            return 4;
        return 2;
    }
    write_curve_csv(result.curve, joined(flags.out_dir, cfg.curve_path));
    write_verdict_report(result, joined(flags.out_dir, cfg.verdict_path));
    if (!flags.quiet)
        std::cout << cfg.id << ": " << to_string(result.theorem) << " "
                  << to_string(result.record.verdict)
                  << " min_margin=" << fmt(result.record.min_margin) << "\n";
    return result.record.verdict == Verdict::FAIL ? 3 : 0;
}

int sweep_command(const std::string& config_path, const std::vector<double>& horizons,
                  const RunFlags& flags) {
    ScenarioConfig cfg;
    try {
        cfg = load_config(config_path);
        if (horizons.empty()) throw ConfigError("sweep-T needs at least one horizon");
        for (double t : horizons)
            if (!(t > 0.0)) throw ConfigError("sweep-T horizons must be positive");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }

    struct Row {
        double horizon, energy, rho_dist, g_defect;
    };
    std::vector<Row> rows(horizons.size());
    std::string error;
    GridPtr grid;
    std::shared_ptr<SemigroupOperator> op;
    DensityField mu, nu;
    try {
        grid = build_scenario_grid(cfg);
        GeometryConfig geo = make_geometry(grid, cfg.effective_n);
        op = std::make_shared<SemigroupOperator>(SemigroupOperator::build(geo));
        mu = sample_marginal(cfg.mu, grid, *op, nullptr, cfg.horizon);
        nu = sample_marginal(cfg.nu, grid, *op, &mu, cfg.horizon);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
    const double t_star = 0.5;
    GeometryConfig geo = make_geometry(grid, cfg.effective_n);

    parallel_for(horizons.size(), [&](std::size_t i) {
        try {
            double horizon = horizons[i];
            Decomposition dec = solve_schrodinger(mu, nu, op, horizon, cfg.solver);
            if (dec.residual > cfg.solver.tol)
                throw std::runtime_error("solver did not converge at T=" + std::to_string(horizon));
            double ts = std::min(t_star, 0.5 * horizon);
            InterpolationSample s = interpolate(dec, ts);
            FunctionalReport f = functional_report(s, geo);

            // L1 distance between rho_t* and the plain heat flow P_t* mu.
            ScalarField heat = op->apply(mu.field(), ts);
            const auto& w = grid->weights();
            double dist = 0.0;
            for (std::size_t k = 0; k < heat.size(); ++k)
                dist += std::abs(s.rho[k] - heat[k]) * w[k];

            // How far P_{T-t*} g is from a constant, relative to its mean.
            ScalarField pg = s.ptt_g;
            double mean = integrate(pg) / grid->reference_mass();
            double gdef = 0.0;
            for (std::size_t k = 0; k < pg.size(); ++k)
                gdef += std::abs(pg[k] / mean - 1.0) * w[k];
            gdef /= grid->reference_mass();

            rows[i] = {horizon, f.energy, dist, gdef};
        } catch (const std::exception& e) {
            error = e.what();
        }
    });
    if (!error.empty()) {
        std::cerr << "error: " << error << "\n";
        return error.find("NaN") != std::string::npos ? 4 : 2;
    }

    std::string out = "T,energy,rho_heat_l1,g_defect\n";
    for (const auto& r : rows)
        out += fmt(r.horizon) + "," + fmt(r.energy) + "," + fmt(r.rho_dist) + "," +
               fmt(r.g_defect) + "\n";
    std::string path = joined(flags.out_dir, "sweep_" + cfg.id + ".csv");
    write_atomic(path, out);
    if (!flags.quiet) {
        for (const auto& r : rows)
            std::cout << "T=" << r.horizon << " energy=" << fmt(r.energy)
                      << " rho_heat_l1=" << fmt(r.rho_dist) << "\n";
    }
    return 0;
}

}  // namespace ecl
