#pragma once

// Command implementations behind the CLI front end. Each returns the process
// exit code: 0 success, 1 infeasible / no result, 2 configuration error.
// Keeping them as library functions lets the test suite drive full runs
// in-process (including the byte-identical rerun check).

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "p2m/config.hpp"
#include "p2m/io.hpp"

namespace p2m::cli {

inline constexpr int kOk = 0;
inline constexpr int kInfeasible = 1;
inline constexpr int kConfigError = 2;

inline int run_validate(const std::string& config_path, std::ostream& out) {
    std::vector<std::string> issues;
    RunConfig cfg;
    try {
        cfg = parse_config(config_path, issues);
    } catch (const std::exception& e) {
        out << "error: " << e.what() << "\n";
        return kConfigError;
    }
    for (const auto& i : validate_config(cfg)) issues.push_back(i);
    if (!cfg.scenario_file || std::filesystem::exists(*cfg.scenario_file)) {
        try {
            if (cfg.scenario_file || cfg.synth) (void)resolve_scenario(cfg);
        } catch (const std::exception& e) {
            issues.push_back(std::string("scenario: ") + e.what());
        }
    }
    for (const auto& i : issues) out << "issue: " << i << "\n";
    out << issues.size() << " issue" << (issues.size() == 1 ? "" : "s") << "\n";
    return issues.empty() ? kOk : kConfigError;
}

inline int run_stats(const std::string& scenario_path, Mode mode, std::ostream& out) {
    try {
        const Scenario s = load_scenario(scenario_path, mode);
        const VariationStats v = hourly_variation_stats(s);
        out << "steps," << s.steps() << "\n";
        out << "mean," << csv::format(v.mean, "%.4f") << "\n";
        out << "frac_le_5pct," << csv::format(v.frac_le_5pct, "%.4f") << "\n";
        out << "frac_le_10pct," << csv::format(v.frac_le_10pct, "%.4f") << "\n";
        out << "frac_le_25pct," << csv::format(v.frac_le_25pct, "%.4f") << "\n";
        return kOk;
    } catch (const std::exception& e) {
        out << "error: " << e.what() << "\n";
        return kConfigError;
    }
}

namespace detail {

inline RunConfig load_config_or_throw(const std::string& path) {
    std::vector<std::string> issues;
    RunConfig cfg = parse_config(path, issues);
    for (const auto& i : validate_config(cfg)) issues.push_back(i);
    if (!issues.empty()) {
        std::string msg = "configuration problems:";
        for (const auto& i : issues) msg += "\n  " + i;
        throw std::runtime_error(msg);
    }
    return cfg;
}

inline FlexPolicy flex_from_pct(double rl_pct) {
    return rl_pct > 0.0 ? FlexPolicy::ramp(rl_pct / 100.0) : FlexPolicy::none();
}

}  // namespace detail

// Replays a schedule file against the configured design and scenario, then
// writes trajectory.csv (always) and costs.csv (feasible runs only).
inline int run_simulate(const std::string& config_path, const std::string& schedule_path,
                        std::ostream& out, double rl_pct = -1.0) {
    RunConfig cfg;
    Schedule schedule;
    Scenario scenario;
    try {
        cfg = detail::load_config_or_throw(config_path);
        if (!cfg.design)
            throw std::runtime_error("simulate needs a [design] section in the config");
        scenario = resolve_scenario(cfg);
        schedule = io::load_schedule(schedule_path);
        if (schedule.steps() != scenario.steps())
            throw std::runtime_error("schedule has " + std::to_string(schedule.steps()) +
                                     " rows but the scenario has " +
                                     std::to_string(scenario.steps()));
    } catch (const std::exception& e) {
        out << "error: " << e.what() << "\n";
        return kConfigError;
    }

    const FlexPolicy flex =
        detail::flex_from_pct(rl_pct >= 0.0 ? rl_pct : cfg.rl_pct.empty() ? 0.0 : cfg.rl_pct[0]);
    const Trajectory traj = simulate(*cfg.design, scenario, schedule, flex, cfg.plant);

    const std::string dir = resolve_outdir(cfg.outdir);
    std::filesystem::create_directories(dir);
    io::save_trajectory(traj, dir + "/trajectory.csv");

    if (!feasible(traj)) {
        out << "infeasible: " << traj.violation_count << " violation(s)\n";
        int shown = 0;
        for (const auto& v : traj.all_violations()) {
            if (++shown > 10) {
                out << "  ...\n";
                break;
            }
            out << "  hour " << v.hour << ": " << to_string(v.type) << "\n";
        }
        return kInfeasible;
    }
    const CostReport report = build_cost_report(*cfg.design, traj, scenario, cfg.plant, cfg.econ);
    io::save_costs(report, dir + "/costs.csv");
    out << "feasible: 0 violations\n" << io::cost_table(report);
    return kOk;
}

// Runs the (topology x ramp-limit) experiment grid and writes one result
// bundle per combination plus a master summary.csv. seed_override, when
// non-negative, takes precedence over the configured seed.
inline int run_optimize(const std::string& config_path, std::ostream& out,
                        long seed_override = -1) {
    RunConfig cfg;
    Scenario scenario;
    try {
        cfg = detail::load_config_or_throw(config_path);
        if (seed_override >= 0) {
            cfg.seed = static_cast<unsigned>(seed_override);
            cfg.search.seed = cfg.seed;
        }
        scenario = resolve_scenario(cfg);
    } catch (const std::exception& e) {
        out << "error: " << e.what() << "\n";
        return kConfigError;
    }

    std::vector<Topology> topologies;
    if (cfg.mode == Mode::StandAlone) {
        topologies = {Topology::Both};
    } else if (cfg.topology) {
        topologies = {*cfg.topology};
    } else {
        topologies = {Topology::None, Topology::BatteryOnly, Topology::VesselOnly,
                      Topology::Both};
    }

    const std::string root = resolve_outdir(cfg.outdir);
    std::filesystem::create_directories(root);

    std::vector<io::SummaryRow> rows;
    int feasible_runs = 0;
    // Best design of each finished topology, lifted into later topologies
    // as an extra warm start.
    std::vector<PlantDesign> bank;
    for (Topology topo : topologies) {
        // Winners of earlier ramp limits seed the later searches of the
        // same topology: any design feasible at one ramp limit admits the
        // always-nominal schedule at every other.
        std::vector<PlantDesign> winners;
        for (const PlantDesign& d : bank)
            winners.push_back(lift_design(d, topo, cfg.plant, cfg.search.bounds));
        std::optional<std::pair<double, PlantDesign>> topo_best;
        for (double rl : cfg.rl_pct) {
            DesignSearchOptions search = cfg.search;
            search.topology = topo;
            search.warm_starts = winners;
            const FlexPolicy flex = detail::flex_from_pct(rl);
            OptimizationResult res = optimize_design(scenario, search, flex, cfg.econ, cfg.plant);
            if (res.feasible) {
                winners.push_back(res.design);
                if (!topo_best || res.objective < topo_best->first)
                    topo_best = {res.objective, res.design};
            }

            io::SummaryRow row;
            row.topology = to_string(topo);
            row.rl_pct = rl;
            row.feasible = res.feasible;
            if (res.feasible) {
                row.report = res.cost_report;
                row.design = res.design;
                ++feasible_runs;
            }
            rows.push_back(row);

            const std::string dir =
                root + "/" + to_string(topo) + "_rl" + csv::format(rl, "%g");
            std::filesystem::create_directories(dir);
            csv::write_file(dir + "/search_log.csv", io::serialize_search_log(res));
            if (res.feasible) {
                io::save_design(res.design, dir + "/design.csv");
                io::save_schedule(res.schedule, dir + "/schedule.csv");
                io::save_trajectory(res.trajectory, dir + "/trajectory.csv");
                io::save_costs(res.cost_report, dir + "/costs.csv");
                out << to_string(topo) << " rl=" << csv::format(rl, "%g")
                    << ": c_meoh=" << csv::format(res.cost_report.c_meoh, "%.4f")
                    << " EUR/kg (evals=" << res.evals_used << ")\n";
            } else {
                out << to_string(topo) << " rl=" << csv::format(rl, "%g")
                    << ": infeasible (" << res.reason << ")\n";
            }
        }
        if (topo_best) bank.push_back(topo_best->second);
    }
    csv::write_file(root + "/summary.csv", io::serialize_summary(rows));
    out << "summary: " << root << "/summary.csv\n";
    return feasible_runs > 0 ? kOk : kInfeasible;
}

}  // namespace p2m::cli
