#include "ecl/scenario.hpp"

#include <CLI11.hpp>

#include <string>
#include <vector>

int main(int argc, char** argv) {
    CLI::App app{"Entropic interpolation laboratory: Schroedinger bridges and "
                 "entropy-power concavity checks on 1D/2D grids"};
    app.require_subcommand(1);

    std::string config_path;
    ecl::RunFlags flags;
    int samples = 0;
    double tol = 0.0;

    auto* run = app.add_subcommand("run", "Run one scenario: solve, build curve, check verdict");
    run->add_option("config", config_path, "Scenario config file")->required();
    run->add_option("--out-dir", flags.out_dir, "Directory for output files");
    run->add_option("--samples", samples, "Override curve.samples");
    run->add_option("--tol", tol, "Override solver.tol");
    run->add_flag("--quiet", flags.quiet, "Suppress console summary");

    std::string horizon_list;
    auto* sweep = app.add_subcommand("sweep-T", "Solve the scenario for several horizons T");
    sweep->add_option("config", config_path, "Scenario config file")->required();
    sweep->add_option("--T", horizon_list, "Comma-separated horizon list, e.g. 1,2,4,8")
        ->required();
    sweep->add_option("--out-dir", flags.out_dir, "Directory for output files");
    sweep->add_flag("--quiet", flags.quiet, "Suppress console summary");

    CLI11_PARSE(app, argc, argv);

    if (samples > 0) flags.samples = samples;
    if (tol > 0.0) flags.tol = tol;

    if (run->parsed()) return ecl::run_command(config_path, flags);

    std::vector<double> horizons;
    std::size_t pos = 0;
    while (pos <= horizon_list.size()) {
        std::size_t comma = horizon_list.find(',', pos);
        std::string part = horizon_list.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!part.empty()) {
            try {
                horizons.push_back(std::stod(part));
            } catch (...) {
                std::fprintf(stderr, "config error: bad horizon '%s'\n", part.c_str());
                return 1;
            }
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return ecl::sweep_command(config_path, horizons, flags);
}
