#pragma once

// Declarative run configuration: one INI-style file with sections instead of
// a long flag list. Parsing collects diagnostics instead of failing fast so
// `validate` can report every problem at once. The format is documented in
// the README.

#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "p2m/csv.hpp"
#include "p2m/economics.hpp"
#include "p2m/optimize.hpp"
#include "p2m/plant.hpp"
#include "p2m/scenario.hpp"

namespace p2m {

struct SynthSpec {
    std::string kind;  // "price" or "renewable"
    int steps = 1440;
    double low = 0.0, high = 300.0;
    int period_h = 24;
    double jitter = 0.0;
    double pv_peak = 110.0, wind_base = 126.0;
};

struct RunConfig {
    Mode mode = Mode::GridConnected;
    std::optional<Topology> topology;  // nullopt = enumerate all
    std::vector<double> rl_pct = {0.0};
    unsigned seed = 0;
    std::string outdir = "out";

    std::optional<std::string> scenario_file;
    std::optional<SynthSpec> synth;

    std::optional<PlantDesign> design;  // fixed design for `simulate`
    PlantParams plant;
    EconParams econ;
    DesignSearchOptions search;

    std::string source_path;
};

namespace detail {

using Section = std::map<std::string, std::string>;
using IniData = std::map<std::string, Section>;

inline IniData parse_ini(const std::vector<std::string>& lines, std::vector<std::string>& issues) {
    IniData data;
    std::string section;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string line = csv::trim(lines[i]);
        auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = csv::trim(line.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                issues.push_back("line " + std::to_string(i + 1) + ": malformed section header");
                continue;
            }
            section = csv::trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            issues.push_back("line " + std::to_string(i + 1) + ": expected key = value");
            continue;
        }
        data[section][csv::trim(line.substr(0, eq))] = csv::trim(line.substr(eq + 1));
    }
    return data;
}

struct SectionReader {
    const Section* sec;
    std::string name;
    std::vector<std::string>* issues;
    std::set<std::string> seen;

    bool has(const std::string& key) {
        if (!sec) return false;
        seen.insert(key);
        return sec->count(key) > 0;
    }
    std::string str(const std::string& key, const std::string& def = "") {
        if (!has(key)) return def;
        return sec->at(key);
    }
    double num(const std::string& key, double def) {
        if (!has(key)) return def;
        try {
            return csv::parse_number(sec->at(key), name + "." + key);
        } catch (const std::exception& e) {
            issues->push_back(e.what());
            return def;
        }
    }
    long integer(const std::string& key, long def) {
        if (!has(key)) return def;
        try {
            return csv::parse_int(sec->at(key), name + "." + key);
        } catch (const std::exception& e) {
            issues->push_back(e.what());
            return def;
        }
    }
    void check_unknown() {
        if (!sec) return;
        for (const auto& [k, v] : *sec)
            if (!seen.count(k)) issues->push_back("unknown key '" + k + "' in [" + name + "]");
    }
};

inline std::optional<Topology> parse_topology(const std::string& s,
                                              std::vector<std::string>& issues) {
    if (s == "none") return Topology::None;
    if (s == "battery") return Topology::BatteryOnly;
    if (s == "vessel") return Topology::VesselOnly;
    if (s == "both") return Topology::Both;
    if (s == "all") return std::nullopt;
    issues.push_back("unknown topology '" + s + "'");
    return std::nullopt;
}

}  // namespace detail

// Parses the file and collects every syntactic problem. Semantic checks
// live in validate_config.
inline RunConfig parse_config(const std::string& path, std::vector<std::string>& issues) {
    RunConfig cfg;
    cfg.source_path = path;
    auto lines = csv::read_lines(path);
    auto ini = detail::parse_ini(lines, issues);

    auto reader = [&](const std::string& name) {
        auto it = ini.find(name);
        return detail::SectionReader{it == ini.end() ? nullptr : &it->second, name, &issues, {}};
    };
    for (const auto& [name, sec] : ini)
        if (name != "run" && name != "scenario" && name != "design" && name != "plant" &&
            name != "econ" && name != "search")
            issues.push_back("unknown section [" + name + "]");

    auto run = reader("run");
    {
        const std::string mode = run.str("mode", "grid");
        if (mode == "grid") cfg.mode = Mode::GridConnected;
        else if (mode == "standalone") cfg.mode = Mode::StandAlone;
        else issues.push_back("run.mode must be 'grid' or 'standalone'");
        if (run.has("topology")) cfg.topology = detail::parse_topology(run.str("topology"), issues);
        if (run.has("rl_list")) {
            cfg.rl_pct.clear();
            for (const auto& tok : csv::split(run.str("rl_list"))) {
                try {
                    cfg.rl_pct.push_back(csv::parse_number(tok, "run.rl_list"));
                } catch (const std::exception& e) {
                    issues.push_back(e.what());
                }
            }
        }
        cfg.seed = static_cast<unsigned>(run.integer("seed", 0));
        cfg.outdir = run.str("outdir", "out");
        run.check_unknown();
    }

    auto scen = reader("scenario");
    if (scen.sec) {
        if (scen.has("file")) cfg.scenario_file = scen.str("file");
        if (scen.has("synth")) {
            SynthSpec sp;
            sp.kind = scen.str("synth");
            if (sp.kind != "price" && sp.kind != "renewable")
                issues.push_back("scenario.synth must be 'price' or 'renewable'");
            sp.steps = static_cast<int>(scen.integer("steps", sp.steps));
            sp.low = scen.num("low", sp.low);
            sp.high = scen.num("high", sp.high);
            sp.period_h = static_cast<int>(scen.integer("period_h", sp.period_h));
            sp.jitter = scen.num("jitter", sp.jitter);
            sp.pv_peak = scen.num("pv_peak", sp.pv_peak);
            sp.wind_base = scen.num("wind_base", sp.wind_base);
            cfg.synth = sp;
        } else {
            // Consume the synth keys so they are not reported twice.
            for (const char* k :
                 {"steps", "low", "high", "period_h", "jitter", "pv_peak", "wind_base"})
                if (scen.has(k)) issues.push_back(std::string("scenario.") + k +
                                                  " given without scenario.synth");
        }
        scen.check_unknown();
    }

    auto plant = reader("plant");
    {
        auto& b = cfg.plant.battery;
        b.eta_ch = plant.num("eta_ch", b.eta_ch);
        b.eta_disch = plant.num("eta_disch", b.eta_disch);
        b.eta_dc_ac = plant.num("eta_dc_ac", b.eta_dc_ac);
        if (plant.has("self_discharge_daily"))
            b.r_self_disch_hourly =
                1.0 - std::pow(1.0 - plant.num("self_discharge_daily", 0.002), 1.0 / 24.0);
        b.soc_min_frac = plant.num("soc_min_frac", b.soc_min_frac);
        b.min_flow = plant.num("batt_min_flow", b.min_flow);
        auto& p = cfg.plant.pem;
        p.a00 = plant.num("pem_a00", p.a00);
        p.a10 = plant.num("pem_a10", p.a10);
        p.a20 = plant.num("pem_a20", p.a20);
        p.a01 = plant.num("pem_a01", p.a01);
        p.p_module_nom = plant.num("pem_module_nom", p.p_module_nom);
        p.p_module_max = plant.num("pem_module_max", p.p_module_max);
        p.aux_frac = plant.num("pem_aux_frac", p.aux_frac);
        p.lhv_h2 = plant.num("lhv_h2", p.lhv_h2);
        p.load_min_frac = plant.num("pem_load_min_frac", p.load_min_frac);
        auto& c = cfg.plant.comp;
        c.cp_h2 = plant.num("comp_cp", c.cp_h2);
        c.k_h2 = plant.num("comp_k", c.k_h2);
        c.eta_is = plant.num("comp_eta_is", c.eta_is);
        c.eta_mec = plant.num("comp_eta_mec", c.eta_mec);
        c.t_in = plant.num("comp_t_in", c.t_in);
        c.load_min_frac = plant.num("comp_load_min_frac", c.load_min_frac);
        auto& v = cfg.plant.vessel;
        v.slope = plant.num("vessel_slope", v.slope);
        v.p_floor = plant.num("vessel_p_floor", v.p_floor);
        auto& m = cfg.plant.meoh;
        m.h2_ref = plant.num("meoh_h2_ref", m.h2_ref);
        m.meoh_ref = plant.num("meoh_meoh_ref", m.meoh_ref);
        m.co2_ref = plant.num("meoh_co2_ref", m.co2_ref);
        m.elec_ref = plant.num("meoh_elec_ref", m.elec_ref);
        m.cooling_ref = plant.num("meoh_cooling_ref", m.cooling_ref);
        m.load_min_frac = plant.num("meoh_load_min_frac", m.load_min_frac);
        plant.check_unknown();
    }

    auto econ = reader("econ");
    {
        auto& e = cfg.econ;
        e.lifetime_years = static_cast<int>(econ.integer("lifetime_years", e.lifetime_years));
        e.discount_rate = econ.num("discount_rate", e.discount_rate);
        e.om_frac = econ.num("om_frac", e.om_frac);
        e.usd_to_eur = econ.num("usd_to_eur", e.usd_to_eur);
        e.cooling_cost = econ.num("cooling_cost", e.cooling_cost);
        e.co2_cost = econ.num("co2_cost", e.co2_cost);
        e.operating_weeks = static_cast<int>(econ.integer("operating_weeks", e.operating_weeks));
        e.battery_cost_usd_kwh = econ.num("battery_cost_usd_kwh", e.battery_cost_usd_kwh);
        e.battery_update_factor = econ.num("battery_update_factor", e.battery_update_factor);
        e.vessel_cost_usd_m3 = econ.num("vessel_cost_usd_m3", e.vessel_cost_usd_m3);
        e.pem_install_factor = econ.num("pem_install_factor", e.pem_install_factor);
        e.pem_specific_cost_eur_kw = econ.num("pem_specific_cost", e.pem_specific_cost_eur_kw);
        e.capex_meoh_ref_meur = econ.num("capex_meoh_ref", e.capex_meoh_ref_meur);
        e.meoh_ref_capacity_t_y = econ.num("meoh_ref_capacity", e.meoh_ref_capacity_t_y);
        e.sixtenths_b = econ.num("sixtenths_b", e.sixtenths_b);
        e.comp_cost_c0_meur = econ.num("comp_cost_c0", e.comp_cost_c0_meur);
        e.comp_cost_p_ref_mw = econ.num("comp_cost_p_ref", e.comp_cost_p_ref_mw);
        e.comp_cost_c1 = econ.num("comp_cost_c1", e.comp_cost_c1);
        e.pem_replacement_year =
            static_cast<int>(econ.integer("pem_replacement_year", e.pem_replacement_year));
        e.sell_price_factor = econ.num("sell_price_factor", e.sell_price_factor);
        econ.check_unknown();
    }

    auto search = reader("search");
    {
        auto& s = cfg.search;
        s.multistart_count = static_cast<int>(search.integer("multistart", s.multistart_count));
        s.max_evals = static_cast<int>(search.integer("max_evals", s.max_evals));
        s.pattern_step_init = search.num("step_init", s.pattern_step_init);
        s.pattern_shrink = search.num("shrink", s.pattern_shrink);
        s.pattern_step_min = search.num("step_min", s.pattern_step_min);
        s.sched.improvement_iters =
            static_cast<int>(search.integer("improvement_iters", s.sched.improvement_iters));
        s.kappa_init = search.num("kappa_init", s.kappa_init);
        s.sched.objective.startup_cost =
            search.num("startup_cost", s.sched.objective.startup_cost);
        auto& b = s.bounds;
        b.e_batt_min = search.num("e_batt_min", b.e_batt_min);
        b.e_batt_max = search.num("e_batt_max", b.e_batt_max);
        b.n_mod_min = static_cast<int>(search.integer("n_mod_min", b.n_mod_min));
        b.n_mod_max = static_cast<int>(search.integer("n_mod_max", b.n_mod_max));
        b.p_pem_min = search.num("p_pem_min", b.p_pem_min);
        b.p_pem_max = search.num("p_pem_max", b.p_pem_max);
        b.beta_min = search.num("beta_min", b.beta_min);
        b.beta_max = search.num("beta_max", b.beta_max);
        b.volume_min = search.num("volume_min", b.volume_min);
        b.volume_max = search.num("volume_max", b.volume_max);
        b.h2_nom_min = search.num("h2_nom_min", b.h2_nom_min);
        b.h2_nom_max = search.num("h2_nom_max", b.h2_nom_max);
        search.check_unknown();
    }
    cfg.search.seed = cfg.seed;

    auto design = reader("design");
    if (design.sec) {
        std::optional<Topology> topo;
        if (design.has("topology")) topo = detail::parse_topology(design.str("topology"), issues);
        else topo = cfg.topology;
        if (!topo) {
            issues.push_back("design.topology required (run.topology is 'all' or unset)");
        } else {
            cfg.design = make_design(*topo, design.num("e_batt", 0.0),
                                     static_cast<int>(design.integer("n_mod", 40)),
                                     design.num("p_pem", 40.0), design.num("beta_max", 1.88),
                                     design.num("volume", 0.0), design.num("h2_nom", 0.0),
                                     cfg.plant.pem);
        }
        design.check_unknown();
    }
    return cfg;
}

// Semantic diagnostics over a parsed configuration and its referenced data.
inline std::vector<std::string> validate_config(const RunConfig& cfg) {
    std::vector<std::string> issues;
    if (cfg.scenario_file && cfg.synth)
        issues.push_back("exactly one scenario source allowed (file and synth both set)");
    if (!cfg.scenario_file && !cfg.synth)
        issues.push_back("no scenario source ([scenario] needs file= or synth=)");
    if (cfg.scenario_file && !std::filesystem::exists(*cfg.scenario_file))
        issues.push_back("scenario file does not exist: " + *cfg.scenario_file);
    if (cfg.synth) {
        if (cfg.synth->kind == "price" && cfg.mode != Mode::GridConnected)
            issues.push_back("price scenario requires grid mode");
        if (cfg.synth->kind == "renewable" && cfg.mode != Mode::StandAlone)
            issues.push_back("renewable scenario requires standalone mode");
    }
    for (double rl : cfg.rl_pct)
        if (rl < 0.0)
            issues.push_back("negative ramp limit in rl_list: " + csv::format(rl));
    if (cfg.mode == Mode::StandAlone && cfg.topology && *cfg.topology != Topology::Both)
        issues.push_back("stand-alone runs support only the 'both' topology");

    const auto& b = cfg.search.bounds;
    DesignBounds table3;
    if (b.e_batt_min < table3.e_batt_min || b.e_batt_max > table3.e_batt_max)
        issues.push_back("battery bounds outside the admissible 5-400 MWh box");
    if (b.n_mod_min < table3.n_mod_min || b.n_mod_max > table3.n_mod_max)
        issues.push_back("module-count bounds outside the admissible 10-40 box");
    if (b.p_pem_min < table3.p_pem_min || b.p_pem_max > table3.p_pem_max)
        issues.push_back("electrolyzer pressure bounds outside the admissible 20-40 bar box");
    if (b.beta_min < table3.beta_min || b.beta_max > table3.beta_max)
        issues.push_back("pressure-ratio bounds outside the admissible 1.88-3.5 box");
    if (b.volume_min < table3.volume_min || b.volume_max > table3.volume_max)
        issues.push_back("vessel bounds outside the admissible 25-5000 m3 box");
    if (b.h2_nom_min < table3.h2_nom_min || b.h2_nom_max > table3.h2_nom_max)
        issues.push_back("nominal-feed bounds outside the admissible 0.4-2 t/h box");

    const bool wants_vessel =
        !cfg.topology || has_vessel(*cfg.topology) || cfg.mode == Mode::StandAlone;
    if (wants_vessel && b.beta_max * b.p_pem_max <= cfg.plant.vessel.p_floor)
        issues.push_back("vessel unusable: beta_max*p_pem cannot exceed the 75 bar floor "
                         "anywhere in the search box");

    if (cfg.design) {
        for (const auto& d : validate_design(*cfg.design, cfg.plant, cfg.search.bounds))
            issues.push_back("design: " + d);
    }
    if (cfg.econ.operating_weeks < 1 || cfg.econ.operating_weeks > 52)
        issues.push_back("operating_weeks must be in 1-52");
    if (cfg.econ.discount_rate < 0.0) issues.push_back("negative discount rate");
    return issues;
}

inline Scenario resolve_scenario(const RunConfig& cfg) {
    if (cfg.scenario_file) return load_scenario(*cfg.scenario_file, cfg.mode);
    if (!cfg.synth) throw std::runtime_error("no scenario source configured");
    const auto& sp = *cfg.synth;
    if (sp.kind == "price")
        return synth_price_scenario(sp.steps, sp.low, sp.high, sp.period_h, cfg.seed, sp.jitter);
    return synth_renewable_scenario(sp.steps, sp.pv_peak, sp.wind_base, cfg.seed);
}

// The environment may point all relative output directories at a common root.
inline std::string resolve_outdir(const std::string& outdir) {
    const char* root = std::getenv("P2M_OUT_ROOT");
    std::filesystem::path p(outdir);
    if (root && *root && p.is_relative()) return (std::filesystem::path(root) / p).string();
    return outdir;
}

}  // namespace p2m
