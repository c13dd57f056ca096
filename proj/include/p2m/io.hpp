#pragma once

// CSV exchange formats. Column orders are fixed and documented in the
// README; all writers use fixed number formatting so reruns with the same
// seed produce byte-identical files.

#include <filesystem>
#include <string>
#include <vector>

#include "p2m/csv.hpp"
#include "p2m/economics.hpp"
#include "p2m/optimize.hpp"
#include "p2m/plant.hpp"

namespace p2m::io {

inline const char* kScheduleHeader =
    "hour,p_grid_to_pem,x_pem_on,p_batt_in,x_batt_in,p_batt_to_pem,p_batt_to_grid,x_batt_out,"
    "h2_to_meoh";

// Schedules are replay inputs, so the flows are written with full
// round-trip precision; a feasible schedule must stay feasible after a
// save/load cycle.
inline std::string serialize_schedule(const Schedule& s) {
    std::string out = kScheduleHeader;
    out += '\n';
    for (int t = 0; t < s.steps(); ++t) {
        const auto& d = s.decisions[static_cast<std::size_t>(t)];
        out += std::to_string(t);
        out += ',' + csv::format_exact(d.p_grid_to_pem);
        out += ',' + std::to_string(d.x_pem_on ? 1 : 0);
        out += ',' + csv::format_exact(d.p_batt_in);
        out += ',' + std::to_string(d.x_batt_in ? 1 : 0);
        out += ',' + csv::format_exact(d.p_batt_to_pem);
        out += ',' + csv::format_exact(d.p_batt_to_grid);
        out += ',' + std::to_string(d.x_batt_out ? 1 : 0);
        out += ',' + csv::format_exact(d.h2_to_meoh);
        out += '\n';
    }
    return out;
}

inline void save_schedule(const Schedule& s, const std::string& path) {
    csv::write_file(path, serialize_schedule(s));
}

inline Schedule load_schedule(const std::string& path) {
    auto lines = csv::read_lines(path);
    if (lines.empty()) throw std::runtime_error("empty schedule file: " + path);
    if (csv::trim(lines[0]) != kScheduleHeader)
        throw std::runtime_error("bad schedule header in " + path);
    Schedule s;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (csv::trim(lines[i]).empty()) continue;
        auto f = csv::split(lines[i]);
        if (f.size() != 9) throw std::runtime_error("bad schedule row in " + path);
        const std::string ctx = path + ":" + std::to_string(i);
        if (csv::parse_int(f[0], ctx) != static_cast<long>(s.decisions.size()))
            throw std::runtime_error("non-contiguous hours in " + path);
        ScheduleDecision d;
        d.p_grid_to_pem = csv::parse_number(f[1], ctx);
        d.x_pem_on = csv::parse_int(f[2], ctx) != 0;
        d.p_batt_in = csv::parse_number(f[3], ctx);
        d.x_batt_in = csv::parse_int(f[4], ctx) != 0;
        d.p_batt_to_pem = csv::parse_number(f[5], ctx);
        d.p_batt_to_grid = csv::parse_number(f[6], ctx);
        d.x_batt_out = csv::parse_int(f[7], ctx) != 0;
        d.h2_to_meoh = csv::parse_number(f[8], ctx);
        s.decisions.push_back(d);
    }
    return s;
}

inline std::string serialize_trajectory(const Trajectory& traj) {
    std::string out =
        "hour,pem_power,h2_produced,h2_to_meoh,compressor_power,compressor_beta,meoh_rate,"
        "co2_rate,battery_energy,vessel_mass,vessel_pressure,elec_drawn,elec_sold,curtailed,"
        "violations\n";
    for (const auto& h : traj.hours) {
        out += std::to_string(h.hour);
        for (double v : {h.pem_power, h.h2_produced, h.h2_to_meoh, h.compressor_power,
                         h.compressor_beta, h.meoh_rate, h.co2_rate, h.battery_energy,
                         h.vessel_mass, h.vessel_pressure, h.elec_drawn, h.elec_sold,
                         h.curtailed})
            out += ',' + csv::format(v);
        out += ',';
        for (std::size_t i = 0; i < h.violations.size(); ++i) {
            if (i) out += ';';
            out += to_string(h.violations[i].type);
        }
        out += '\n';
    }
    return out;
}

inline void save_trajectory(const Trajectory& traj, const std::string& path) {
    csv::write_file(path, serialize_trajectory(traj));
}

// Monetary values in MEUR with three decimals.
inline std::string serialize_costs(const CostReport& r) {
    auto m = [](double v) { return csv::format(v, "%.3f"); };
    std::string out = "item,value,unit\n";
    out += "capex_battery," + m(r.capex_battery) + ",MEUR\n";
    out += "capex_electrolyzer," + m(r.capex_pem) + ",MEUR\n";
    out += "capex_vessel," + m(r.capex_vessel) + ",MEUR\n";
    out += "capex_meoh_plant," + m(r.capex_meoh) + ",MEUR\n";
    out += "capex_compressor," + m(r.capex_comp) + ",MEUR\n";
    out += "capex_total," + m(r.capex0) + ",MEUR\n";
    out += "pem_replacement," + m(r.pem_replacement) + ",MEUR\n";
    out += "opex_electricity_buy," + m(r.opex_buy_y) + ",MEUR/y\n";
    out += "opex_electricity_sell," + m(r.opex_sell_y) + ",MEUR/y\n";
    out += "opex_cooling," + m(r.cooling_y) + ",MEUR/y\n";
    out += "opex_co2," + m(r.co2_y) + ",MEUR/y\n";
    out += "opex_total," + m(r.opex_y) + ",MEUR/y\n";
    out += "om," + m(r.om_y) + ",MEUR/y\n";
    out += "meoh_production," + csv::format(r.meoh_y_kt, "%.3f") + ",kt/y\n";
    out += "c_meoh," + csv::format(r.c_meoh, "%.4f") + ",EUR/kg\n";
    return out;
}

inline void save_costs(const CostReport& r, const std::string& path) {
    csv::write_file(path, serialize_costs(r));
}

inline std::string cost_table(const CostReport& r) {
    char buf[512];
    std::string out;
    auto row = [&](const char* name, double v, const char* unit) {
        std::snprintf(buf, sizeof(buf), "  %-24s %12.3f %s\n", name, v, unit);
        out += buf;
    };
    out += "CAPEX breakdown\n";
    row("battery", r.capex_battery, "MEUR");
    row("electrolyzer", r.capex_pem, "MEUR");
    row("vessel", r.capex_vessel, "MEUR");
    row("methanol plant", r.capex_meoh, "MEUR");
    row("compressor", r.capex_comp, "MEUR");
    row("total", r.capex0, "MEUR");
    row("PEM replacement (y10)", r.pem_replacement, "MEUR");
    out += "Yearly figures\n";
    row("electricity bought", r.opex_buy_y, "MEUR/y");
    row("electricity sold", r.opex_sell_y, "MEUR/y");
    row("cooling", r.cooling_y, "MEUR/y");
    row("CO2", r.co2_y, "MEUR/y");
    row("OPEX net", r.opex_y, "MEUR/y");
    row("O&M", r.om_y, "MEUR/y");
    row("methanol", r.meoh_y_kt, "kt/y");
    std::snprintf(buf, sizeof(buf), "  %-24s %12.4f EUR/kg\n", "specific cost", r.c_meoh);
    out += buf;
    return out;
}

inline std::string serialize_design(const PlantDesign& d) {
    std::string out = "key,value\n";
    out += std::string("topology,") + to_string(d.topology) + "\n";
    out += "e_batt_nom," + (d.e_batt_nom ? csv::format(*d.e_batt_nom) : std::string()) + "\n";
    out += "n_mod," + std::to_string(d.n_mod) + "\n";
    out += "p_pem," + csv::format(d.p_pem) + "\n";
    out += "beta_max," + csv::format(d.beta_max) + "\n";
    out += "volume," + (d.volume ? csv::format(*d.volume) : std::string()) + "\n";
    out += "h2_meoh_nom," + csv::format(d.h2_meoh_nom) + "\n";
    return out;
}

inline void save_design(const PlantDesign& d, const std::string& path) {
    csv::write_file(path, serialize_design(d));
}

// One summary row per (topology, ramp-limit) optimization, laid out like the
// result tables: design variables first, then yearly production and costs.
struct SummaryRow {
    std::string topology;
    double rl_pct = 0.0;
    bool feasible = false;
    CostReport report;
    PlantDesign design;
};

inline std::string serialize_summary(const std::vector<SummaryRow>& rows) {
    std::string out =
        "topology,rl_pct,c_meoh,e_batt_mwh,volume_m3,n_mod,p_pem_bar,beta_max,h2_nom_t_h,"
        "meoh_y_kt,capex0_meur,opex_y_meur\n";
    for (const auto& r : rows) {
        out += r.topology + ',' + csv::format(r.rl_pct);
        if (!r.feasible) {
            out += ",infeasible,,,,,,,,,\n";
            continue;
        }
        out += ',' + csv::format(r.report.c_meoh, "%.4f");
        out += ',' + (r.design.e_batt_nom ? csv::format(*r.design.e_batt_nom) : std::string());
        out += ',' + (r.design.volume ? csv::format(*r.design.volume) : std::string());
        out += ',' + std::to_string(r.design.n_mod);
        out += ',' + csv::format(r.design.p_pem);
        out += ',' + csv::format(r.design.beta_max);
        out += ',' + csv::format(r.design.h2_meoh_nom);
        out += ',' + csv::format(r.report.meoh_y_kt, "%.3f");
        out += ',' + csv::format(r.report.capex0, "%.3f");
        out += ',' + csv::format(r.report.opex_y, "%.3f");
        out += '\n';
    }
    return out;
}

// One row per evaluated candidate: objective, incumbent, and the design
// vector that produced it.
inline std::string serialize_search_log(const OptimizationResult& r) {
    auto num = [](double v) {
        return v == kInf ? std::string("inf") : csv::format(v, "%.6f");
    };
    std::string out =
        "eval,c_meoh,incumbent_c_meoh,e_batt_mwh,volume_m3,n_mod,p_pem_bar,beta_max,"
        "h2_nom_t_h\n";
    for (std::size_t i = 0; i < r.eval_log.size(); ++i) {
        const auto& e = r.eval_log[i];
        out += std::to_string(e.eval);
        out += ',' + num(e.c_meoh);
        out += ',' + (i < r.best_objective_history.size() ? num(r.best_objective_history[i])
                                                          : std::string());
        out += ',' + (e.design.e_batt_nom ? csv::format(*e.design.e_batt_nom) : std::string());
        out += ',' + (e.design.volume ? csv::format(*e.design.volume) : std::string());
        out += ',' + std::to_string(e.design.n_mod);
        out += ',' + csv::format(e.design.p_pem);
        out += ',' + csv::format(e.design.beta_max);
        out += ',' + csv::format(e.design.h2_meoh_nom);
        out += '\n';
    }
    return out;
}

}  // namespace p2m::io
