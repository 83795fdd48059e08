#include <cmath>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dropletfem/driver.hpp"

int main(int argc, char** argv) {
    CLI::App app{"1D shear-driven droplet formation: mixed FEM with flux-recovery AMR"};
    app.require_subcommand(1);

    dropletfem::RunCommand cmd;
    std::string config, strategy, preset;
    double lambda = std::numeric_limits<double>::quiet_NaN();

    CLI::App* run = app.add_subcommand("run", "advance the droplet until pinch-off or t_max");
    run->add_option("--config", config, "key = value configuration file");
    run->add_option("--out", cmd.out_dir, "output directory")->capture_default_str();
    run->add_option("--strategy", strategy, "marking strategy: none, max, doerfler");
    run->add_option("--lambda", lambda, "marking parameter override");
    run->add_option("--seed-preset", preset, "packaged scenario: glycerol85");

    int levels = 4;
    CLI::App* mms = app.add_subcommand("mms", "manufactured-solution convergence study");
    mms->add_option("--levels", levels, "number of doubling mesh levels")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        if (!config.empty()) cmd.config_path = config;
        if (!strategy.empty()) cmd.strategy = strategy;
        if (!preset.empty()) cmd.preset = preset;
        if (std::isfinite(lambda)) cmd.lambda = lambda;
        return dropletfem::execute_run(cmd);
    }
    return dropletfem::execute_mms(levels);
}
