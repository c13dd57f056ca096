// Command-line front end: validate, stats, simulate, optimize.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "p2m/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Power-to-methanol plant design and scheduling toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string scenario_path;
    std::string schedule_path;
    std::string mode_str = "grid";
    double rl_pct = -1.0;

    auto* validate = app.add_subcommand("validate", "Check a run configuration");
    validate->add_option("config", config_path, "Configuration file")->required();

    auto* stats = app.add_subcommand("stats", "Hourly variation statistics of a scenario");
    stats->add_option("scenario", scenario_path, "Scenario CSV (hour,value)")->required();
    stats->add_option("--mode", mode_str, "grid or standalone (default grid)");

    auto* simulate = app.add_subcommand("simulate", "Replay a schedule and report costs");
    simulate->add_option("config", config_path, "Configuration file")->required();
    simulate->add_option("--schedule", schedule_path, "Schedule CSV")->required();
    simulate->add_option("--rl", rl_pct, "Ramp limit in %/h (0 = no flexibility)");

    long seed_override = -1;
    auto* optimize = app.add_subcommand("optimize", "Run the (topology x ramp-limit) grid");
    optimize->add_option("config", config_path, "Configuration file")->required();
    optimize->add_option("--seed", seed_override, "Override the configured seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return p2m::cli::run_validate(config_path, std::cout);
        if (stats->parsed()) {
            if (mode_str != "grid" && mode_str != "standalone") {
                std::cout << "error: --mode must be grid or standalone\n";
                return p2m::cli::kConfigError;
            }
            const p2m::Mode mode =
                mode_str == "grid" ? p2m::Mode::GridConnected : p2m::Mode::StandAlone;
            return p2m::cli::run_stats(scenario_path, mode, std::cout);
        }
        if (simulate->parsed())
            return p2m::cli::run_simulate(config_path, schedule_path, std::cout, rl_pct);
        if (optimize->parsed())
            return p2m::cli::run_optimize(config_path, std::cout, seed_override);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return p2m::cli::kConfigError;
    }
    return p2m::cli::kConfigError;
}
