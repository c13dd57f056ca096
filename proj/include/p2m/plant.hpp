#pragma once

// Plant assembly: topology and design, per-hour state advance, and the
// feasibility checks for every operating constraint. simulate() folds the
// hourly step over a scenario and never aborts on a violation; it collects
// all of them so a caller (or the optimizer) sees the full picture.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "p2m/scenario.hpp"
#include "p2m/units.hpp"

namespace p2m {

enum class Topology { None, BatteryOnly, VesselOnly, Both };

inline bool has_battery(Topology t) { return t == Topology::BatteryOnly || t == Topology::Both; }
inline bool has_vessel(Topology t) { return t == Topology::VesselOnly || t == Topology::Both; }

inline const char* to_string(Topology t) {
    switch (t) {
        case Topology::None: return "none";
        case Topology::BatteryOnly: return "battery";
        case Topology::VesselOnly: return "vessel";
        case Topology::Both: return "both";
    }
    return "?";
}

struct DesignBounds {
    double e_batt_min = 5.0, e_batt_max = 400.0;    // MWh
    int n_mod_min = 10, n_mod_max = 40;
    double p_pem_min = 20.0, p_pem_max = 40.0;      // bar
    double beta_min = 1.88, beta_max = 3.50;
    double volume_min = 25.0, volume_max = 5000.0;  // m^3
    double h2_nom_min = 0.4, h2_nom_max = 2.0;      // t/h
};

// The six design degrees of freedom plus the storage topology. Battery
// capacity and vessel volume are present exactly when the topology includes
// the unit. Without a vessel the nominal methanol feed is not free: it
// equals the electrolyzer's maximum hydrogen production.
struct PlantDesign {
    Topology topology = Topology::None;
    std::optional<double> e_batt_nom;  // MWh
    int n_mod = 40;
    double p_pem = 40.0;      // bar
    double beta_max = 1.88;
    std::optional<double> volume;  // m^3
    double h2_meoh_nom = 0.0;      // t/h

    double battery_capacity() const { return e_batt_nom.value_or(0.0); }
    double vessel_volume() const { return volume.value_or(0.0); }
    double max_storage_pressure() const { return beta_max * p_pem; }
    double battery_flow_cap() const {
        return std::min(100.0, 0.9 * battery_capacity());
    }
};

// Factory that derives the dependent fields: h2_meoh_nom for vessel-free
// topologies and the absent/present storage sizes.
inline PlantDesign make_design(Topology topo, double e_batt, int n_mod, double p_pem,
                               double beta_max, double volume, double h2_nom,
                               const ElectrolyzerParams& pem) {
    PlantDesign d;
    d.topology = topo;
    d.n_mod = n_mod;
    d.p_pem = p_pem;
    d.beta_max = beta_max;
    if (has_battery(topo)) d.e_batt_nom = e_batt;
    if (has_vessel(topo)) {
        d.volume = volume;
        d.h2_meoh_nom = h2_nom;
    } else {
        d.h2_meoh_nom = electrolyzer_max_h2(n_mod, p_pem, pem);
    }
    return d;
}

// Returns every violated design invariant as a diagnostic string; empty
// means the design is usable.
inline std::vector<std::string> validate_design(const PlantDesign& d, const PlantParams& params,
                                                const DesignBounds& b = {},
                                                double vessel_margin_bar = 0.0) {
    std::vector<std::string> out;
    auto fail = [&out](const std::string& msg) { out.push_back(msg); };

    if (d.n_mod < b.n_mod_min || d.n_mod > b.n_mod_max) fail("n_mod outside bounds");
    if (d.p_pem < b.p_pem_min || d.p_pem > b.p_pem_max) fail("p_pem outside bounds");
    if (d.beta_max < b.beta_min || d.beta_max > b.beta_max) fail("beta_max outside bounds");

    if (has_battery(d.topology)) {
        if (!d.e_batt_nom) fail("battery topology without battery capacity");
        else if (*d.e_batt_nom < b.e_batt_min || *d.e_batt_nom > b.e_batt_max)
            fail("e_batt_nom outside bounds");
    } else if (d.e_batt_nom) {
        fail("battery capacity set without battery topology");
    }

    const double p_floor = params.vessel.p_floor;
    if (has_vessel(d.topology)) {
        if (!d.volume) fail("vessel topology without volume");
        else if (*d.volume < b.volume_min || *d.volume > b.volume_max)
            fail("volume outside bounds");
        if (d.h2_meoh_nom < b.h2_nom_min || d.h2_meoh_nom > b.h2_nom_max)
            fail("h2_meoh_nom outside bounds");
        if (d.max_storage_pressure() <= p_floor + vessel_margin_bar)
            fail("vessel unusable: beta_max*p_pem does not exceed the 75 bar floor");
    } else {
        if (d.volume) fail("vessel volume set without vessel topology");
        const double h2_max = electrolyzer_max_h2(d.n_mod, d.p_pem, params.pem);
        if (std::abs(d.h2_meoh_nom - h2_max) > 1e-9 * std::max(1.0, h2_max))
            fail("h2_meoh_nom must equal the electrolyzer's maximum production without a vessel");
        if (d.max_storage_pressure() < p_floor - 1e-9)
            fail("compressor cannot reach the 75 bar delivery pressure (beta_max*p_pem < 75)");
    }
    return out;
}

// One hour of control decisions. Binaries mirror the operational rules: a
// unit with its binary off must have zero flow, and battery charge and
// discharge are mutually exclusive within the hour.
struct ScheduleDecision {
    double p_grid_to_pem = 0.0;  // MW from the grid / renewable bus
    bool x_pem_on = false;
    double p_batt_in = 0.0;      // MW charged
    bool x_batt_in = false;
    double p_batt_to_pem = 0.0;  // MW, DC discharge into the electrolyzer
    double p_batt_to_grid = 0.0; // MW, AC discharge (sold or serving plant AC loads)
    bool x_batt_out = false;
    double h2_to_meoh = 0.0;     // t/h fed to the methanol plant
};

struct Schedule {
    std::vector<ScheduleDecision> decisions;
    int steps() const { return static_cast<int>(decisions.size()); }
};

// Ramp policy of the methanol plant. Without flexibility the hydrogen feed
// is pinned at the nominal value for every hour.
struct FlexPolicy {
    bool flexible = false;
    double rl = 0.0;  // max |change| per hour as a fraction of the nominal feed

    static FlexPolicy none() { return {}; }
    static FlexPolicy ramp(double rl_frac) { return {true, rl_frac}; }
};

enum class ViolationType {
    PemWindow,
    MeohWindow,
    MeohRamp,
    MeohPinned,
    CompressorLoad,
    VesselPressureLow,
    VesselPressureHigh,
    BatterySocLow,
    BatterySocHigh,
    BatteryFlowWindow,
    BatterySimultaneous,
    PowerBalance,
    NoVesselFeedMismatch,
};

inline const char* to_string(ViolationType v) {
    switch (v) {
        case ViolationType::PemWindow: return "pem-window";
        case ViolationType::MeohWindow: return "meoh-window";
        case ViolationType::MeohRamp: return "meoh-ramp";
        case ViolationType::MeohPinned: return "meoh-pinned";
        case ViolationType::CompressorLoad: return "compressor-load";
        case ViolationType::VesselPressureLow: return "vessel-pressure-low";
        case ViolationType::VesselPressureHigh: return "vessel-pressure-high";
        case ViolationType::BatterySocLow: return "battery-soc-low";
        case ViolationType::BatterySocHigh: return "battery-soc-high";
        case ViolationType::BatteryFlowWindow: return "battery-flow-window";
        case ViolationType::BatterySimultaneous: return "battery-simultaneous";
        case ViolationType::PowerBalance: return "power-balance";
        case ViolationType::NoVesselFeedMismatch: return "no-vessel-feed-mismatch";
    }
    return "?";
}

struct Violation {
    int hour = 0;
    ViolationType type{};
    double value = 0.0;
    double limit = 0.0;
};

struct PlantState {
    double battery_energy = 0.0;  // MWh
    double vessel_mass = 0.0;     // kg above the 75 bar floor content
    // The SOC floor decays with self-discharge so that an idle battery
    // starting at the floor stays feasible; decisions cannot be blamed for
    // unavoidable leakage.
    double soc_floor = 0.0;  // MWh
};

// Initial convention: battery at the SOC floor, vessel empty above the
// floor. The terminal state is unconstrained but reported, so storage
// cannot mine unpaid initial stock.
inline PlantState initial_state(const PlantDesign& d, const PlantParams& params) {
    PlantState s;
    if (has_battery(d.topology)) {
        s.battery_energy = params.battery.soc_min_frac * d.battery_capacity();
        s.soc_floor = s.battery_energy;
    }
    return s;
}

struct HourRecord {
    int hour = 0;
    double pem_power = 0.0;       // MW, grid + battery DC feed
    double h2_produced = 0.0;     // t/h
    double h2_to_meoh = 0.0;      // t/h actually fed (equals production without a vessel)
    double compressor_power = 0.0;
    double compressor_beta = 0.0;
    double pem_cooling = 0.0;
    double pem_aux = 0.0;
    double comp_cooling = 0.0;
    double meoh_rate = 0.0;       // t/h
    double co2_rate = 0.0;        // t/h
    double meoh_elec = 0.0;       // MW
    double meoh_cooling = 0.0;    // MW
    double battery_energy = 0.0;  // MWh at end of hour
    double vessel_mass = 0.0;     // kg at end of hour
    double vessel_pressure = 0.0; // bar at end of hour
    double elec_drawn = 0.0;      // MW bought (grid) or taken from the park
    double elec_sold = 0.0;       // MW sold back (grid-connected only)
    double curtailed = 0.0;       // MW (stand-alone only)
    std::vector<Violation> violations;
};

struct Trajectory {
    std::vector<HourRecord> hours;
    int violation_count = 0;

    std::vector<Violation> all_violations() const {
        std::vector<Violation> out;
        for (const auto& h : hours) out.insert(out.end(), h.violations.begin(), h.violations.end());
        return out;
    }
    double total(double HourRecord::* field) const {
        double s = 0.0;
        for (const auto& h : hours) s += h.*field;
        return s;
    }
};

inline bool feasible(const Trajectory& t) { return t.violation_count == 0; }

namespace detail {

constexpr double kPowerTol = 1e-6;   // MW
constexpr double kFlowTol = 1e-9;    // t/h
constexpr double kMassTol = 1e-6;    // kg
constexpr double kEnergyTol = 1e-6;  // MWh

inline void check_structure(const PlantDesign& d, const ScheduleDecision& u) {
    if (!has_battery(d.topology)) {
        if (u.p_batt_in != 0.0 || u.p_batt_to_pem != 0.0 || u.p_batt_to_grid != 0.0 ||
            u.x_batt_in || u.x_batt_out)
            throw std::invalid_argument("decision uses the battery but the design has none");
    }
}

}  // namespace detail

// Advances the full plant state by one hour and records every flow and
// constraint check. scenario_value is the spot price (grid-connected) or the
// available park power (stand-alone) for this hour.
inline std::pair<PlantState, HourRecord> step(const PlantDesign& design, const PlantState& state,
                                              const ScheduleDecision& u, double scenario_value,
                                              Mode mode, const PlantParams& params,
                                              int hour = 0) {
    using detail::kEnergyTol;
    using detail::kFlowTol;
    using detail::kMassTol;
    using detail::kPowerTol;

    detail::check_structure(design, u);

    HourRecord rec;
    rec.hour = hour;
    auto flag = [&rec, hour](ViolationType t, double value, double limit) {
        rec.violations.push_back({hour, t, value, limit});
    };

    const auto& pem = params.pem;
    const double dt = 1.0;

    // Electrolyzer: the window applies to the total power; production is
    // evaluated on the fit domain even for flagged off-window powers so the
    // trajectory stays numerically defined.
    rec.pem_power = u.p_grid_to_pem + u.p_batt_to_pem;
    const double pem_lo = pem.p_module_min() * design.n_mod;
    const double pem_hi = pem.p_module_max * design.n_mod;
    if (u.x_pem_on) {
        if (rec.pem_power < pem_lo - kPowerTol || rec.pem_power > pem_hi + kPowerTol)
            flag(ViolationType::PemWindow, rec.pem_power, pem_lo);
    } else if (rec.pem_power > kPowerTol) {
        flag(ViolationType::PemWindow, rec.pem_power, 0.0);
    }
    ElectrolyzerOutput eo;
    if (rec.pem_power > 0.0) {
        const double per_mod = std::clamp(rec.pem_power / design.n_mod, pem.p_module_min(),
                                          pem.p_module_max);
        const double eta = electrolyzer_efficiency(per_mod, design.p_pem, pem);
        eo.h2_rate = eta * rec.pem_power / pem.lhv_h2;
        eo.cooling = (1.0 - eta) * rec.pem_power;
        eo.aux_power = pem.aux_frac * rec.pem_power;
    }
    rec.h2_produced = eo.h2_rate;
    rec.pem_cooling = eo.cooling;
    rec.pem_aux = eo.aux_power;

    // Hydrogen routing. Without a vessel the methanol feed is structurally
    // the produced flow; a disagreeing decision is flagged and overridden.
    PlantState next = state;
    if (has_vessel(design.topology)) {
        rec.h2_to_meoh = u.h2_to_meoh;
        next.vessel_mass = vessel_step(state.vessel_mass, rec.h2_produced, rec.h2_to_meoh, dt);
        rec.vessel_mass = next.vessel_mass;
        rec.vessel_pressure = vessel_pressure(next.vessel_mass, design.vessel_volume(),
                                              params.vessel);
        if (next.vessel_mass < -kMassTol)
            flag(ViolationType::VesselPressureLow, rec.vessel_pressure, params.vessel.p_floor);
        const double p_max = design.max_storage_pressure();
        if (rec.vessel_pressure > p_max + kPowerTol)
            flag(ViolationType::VesselPressureHigh, rec.vessel_pressure, p_max);
    } else {
        if (std::abs(u.h2_to_meoh - rec.h2_produced) > kFlowTol)
            flag(ViolationType::NoVesselFeedMismatch, u.h2_to_meoh, rec.h2_produced);
        rec.h2_to_meoh = rec.h2_produced;
        rec.vessel_pressure = params.vessel.p_floor;
    }

    // Compression of the full produced flow up to the storage pressure (or
    // the 75 bar delivery pressure without a vessel). End-of-step pressure
    // is the conservative target.
    const double p_target = has_vessel(design.topology)
                                ? std::max(rec.vessel_pressure, params.vessel.p_floor)
                                : params.vessel.p_floor;
    rec.compressor_beta = std::max(1.0, p_target / design.p_pem);
    const auto comp = compressor_power(rec.h2_produced, rec.compressor_beta, params.comp);
    rec.compressor_power = comp.power;
    rec.comp_cooling = comp.cooling;
    const double comp_design_flow = electrolyzer_max_h2(design.n_mod, design.p_pem, pem);
    if (rec.h2_produced > kFlowTol) {
        const double flow_lo = params.comp.load_min_frac * comp_design_flow;
        if (rec.h2_produced < flow_lo - kFlowTol || rec.h2_produced > comp_design_flow + kFlowTol)
            flag(ViolationType::CompressorLoad, rec.h2_produced, flow_lo);
    }

    // Methanol plant: always operating within 20-100 % of the nominal feed.
    const double meoh_lo = params.meoh.load_min_frac * design.h2_meoh_nom;
    if (rec.h2_to_meoh < meoh_lo - kFlowTol || rec.h2_to_meoh > design.h2_meoh_nom + kFlowTol)
        flag(ViolationType::MeohWindow, rec.h2_to_meoh, meoh_lo);
    const auto mr = meoh_rates(std::max(0.0, rec.h2_to_meoh), params.meoh);
    rec.meoh_rate = mr.meoh;
    rec.co2_rate = mr.co2_in;
    rec.meoh_elec = mr.elec;
    rec.meoh_cooling = mr.cooling;

    // Battery.
    double batt_ac_out = 0.0;
    if (has_battery(design.topology)) {
        const auto& bp = params.battery;
        const double cap = design.battery_flow_cap();
        if (u.x_batt_in && u.x_batt_out)
            flag(ViolationType::BatterySimultaneous, 1.0, 0.0);
        if (u.x_batt_in) {
            if (u.p_batt_in < bp.min_flow - kPowerTol || u.p_batt_in > cap + kPowerTol)
                flag(ViolationType::BatteryFlowWindow, u.p_batt_in, bp.min_flow);
        } else if (u.p_batt_in > kPowerTol) {
            flag(ViolationType::BatteryFlowWindow, u.p_batt_in, 0.0);
        }
        if (u.x_batt_out) {
            bool any = false;
            for (double f : {u.p_batt_to_pem, u.p_batt_to_grid}) {
                if (f > kPowerTol) {
                    any = true;
                    if (f < bp.min_flow - kPowerTol || f > cap + kPowerTol)
                        flag(ViolationType::BatteryFlowWindow, f, bp.min_flow);
                }
            }
            if (!any) flag(ViolationType::BatteryFlowWindow, 0.0, bp.min_flow);
        } else if (u.p_batt_to_pem > kPowerTol || u.p_batt_to_grid > kPowerTol) {
            flag(ViolationType::BatteryFlowWindow, u.p_batt_to_pem + u.p_batt_to_grid, 0.0);
        }

        const double p_out = battery_output_split(u.p_batt_to_grid, u.p_batt_to_pem, bp);
        BatteryState bs{state.battery_energy};
        bs = battery_step(bs, u.p_batt_in, p_out, bp, dt);
        next.battery_energy = bs.energy;
        next.soc_floor = state.soc_floor * (1.0 - bp.r_self_disch_hourly);
        if (next.battery_energy < next.soc_floor - kEnergyTol)
            flag(ViolationType::BatterySocLow, next.battery_energy, next.soc_floor);
        if (next.battery_energy > design.battery_capacity() + kEnergyTol)
            flag(ViolationType::BatterySocHigh, next.battery_energy, design.battery_capacity());
        batt_ac_out = u.p_batt_to_grid;
    }
    rec.battery_energy = next.battery_energy;

    // Electricity accounting.
    const double ac_demand = rec.pem_aux + rec.compressor_power + rec.meoh_elec;
    if (mode == Mode::GridConnected) {
        rec.elec_drawn = u.p_grid_to_pem + u.p_batt_in + ac_demand;
        rec.elec_sold = batt_ac_out;
    } else {
        // Battery AC output serves the plant's AC loads instead of being sold.
        const double served = std::min(ac_demand, batt_ac_out);
        rec.elec_drawn = u.p_grid_to_pem + u.p_batt_in + (ac_demand - served);
        rec.elec_sold = 0.0;
        rec.curtailed = std::max(0.0, scenario_value - rec.elec_drawn);
        if (rec.elec_drawn > scenario_value + kPowerTol)
            flag(ViolationType::PowerBalance, rec.elec_drawn, scenario_value);
    }

    return {next, rec};
}

// Folds step() over the horizon, adding the cross-hour ramp checks and the
// no-flexibility pinning. Pure: replaying a schedule always reproduces the
// same trajectory.
inline Trajectory simulate(const PlantDesign& design, const Scenario& scenario,
                           const Schedule& schedule, const FlexPolicy& flex,
                           const PlantParams& params,
                           std::optional<PlantState> init = std::nullopt) {
    if (schedule.steps() != scenario.steps())
        throw std::invalid_argument("simulate: schedule length != scenario steps");

    Trajectory traj;
    traj.hours.reserve(static_cast<std::size_t>(scenario.steps()));
    PlantState state = init ? *init : initial_state(design, params);

    const double nom = design.h2_meoh_nom;
    double prev_feed = 0.0;
    for (int t = 0; t < scenario.steps(); ++t) {
        const auto& u = schedule.decisions[static_cast<std::size_t>(t)];
        auto [next, rec] = step(design, state, u, scenario.values[static_cast<std::size_t>(t)],
                                scenario.mode, params, t);
        if (!flex.flexible) {
            if (std::abs(rec.h2_to_meoh - nom) > detail::kFlowTol)
                rec.violations.push_back({t, ViolationType::MeohPinned, rec.h2_to_meoh, nom});
        } else if (t > 0) {
            const double limit = flex.rl * nom;
            if (std::abs(rec.h2_to_meoh - prev_feed) > limit + detail::kFlowTol)
                rec.violations.push_back(
                    {t, ViolationType::MeohRamp, std::abs(rec.h2_to_meoh - prev_feed), limit});
        }
        prev_feed = rec.h2_to_meoh;
        traj.violation_count += static_cast<int>(rec.violations.size());
        traj.hours.push_back(std::move(rec));
        state = next;
    }
    return traj;
}

}  // namespace p2m
