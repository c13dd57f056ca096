#pragma once

// Physical models of the plant components: battery, PEM electrolyzer,
// hydrogen compressor with aftercooler, hydrogen vessel, and the linear
// methanol synthesis plant. All operations are pure functions of
// (state, params). State variables are never clamped here; operating-limit
// violations are surfaced by the plant-level feasibility checker.

#include <cmath>
#include <span>
#include <stdexcept>

namespace p2m {

// ---------------------------------------------------------------- battery

struct BatteryParams {
    double eta_ch = 0.975;          // charging efficiency
    double eta_disch = 0.975;       // discharging efficiency
    double eta_dc_ac = 0.95;        // DC->AC conversion for grid-bound output
    // Hourly self-discharge from a 0.2 %/day energy loss, compounded hourly.
    double r_self_disch_hourly = 1.0 - std::pow(1.0 - 0.002, 1.0 / 24.0);
    double soc_min_frac = 0.10;     // minimum state of charge
    double min_flow = 0.5;          // MW, smallest admissible power transfer
};

struct BatteryState {
    double energy = 0.0;  // MWh
};

// Energy balance over one step. p_out_total is the DC-side power drawn from
// the battery (see battery_output_split).
inline BatteryState battery_step(BatteryState state, double p_in, double p_out_total,
                                 const BatteryParams& p, double dt) {
    if (p_in < 0.0 || p_out_total < 0.0)
        throw std::invalid_argument("battery_step: negative power flow");
    if (dt <= 0.0) throw std::invalid_argument("battery_step: dt <= 0");
    BatteryState next;
    next.energy = state.energy * (1.0 - p.r_self_disch_hourly) + p_in * p.eta_ch * dt -
                  p_out_total / p.eta_disch * dt;
    return next;
}

// DC-side power needed for a given battery output: grid-bound power passes
// the DC/AC converter, electrolyzer-bound power stays DC.
inline double battery_output_split(double p_to_grid, double p_to_pem, const BatteryParams& p) {
    if (p_to_grid < 0.0 || p_to_pem < 0.0)
        throw std::invalid_argument("battery_output_split: negative power flow");
    return p_to_grid / p.eta_dc_ac + p_to_pem;
}

// ------------------------------------------------------------ electrolyzer

struct ElectrolyzerParams {
    // LHV-based efficiency fit: eta = a00 + a10*P_mod + a20*P_mod^2 + a01*p.
    double a00 = 0.813;
    double a10 = -1.010e-1;   // 1/MW
    double a20 = +1.397e-2;   // 1/MW^2
    double a01 = -3.118e-4;   // 1/bar
    double p_module_nom = 2.0;   // MW
    double p_module_max = 2.5;   // MW
    double load_min_frac = 0.25; // of nominal module power
    double aux_frac = 0.05;      // auxiliary electricity, fraction of PEM power
    double lhv_h2 = 33.33;       // MWh/t

    double p_module_min() const { return load_min_frac * p_module_nom; }
};

// Module efficiency at per-module power p_mod [MW] and operating pressure
// p_pem [bar]. The fit is only valid on its fitting domain; inputs outside
// the module operating window are rejected.
inline double electrolyzer_efficiency(double p_mod, double p_pem, const ElectrolyzerParams& p) {
    const double tol = 1e-9;
    if (p_mod < p.p_module_min() - tol || p_mod > p.p_module_max + tol)
        throw std::domain_error("electrolyzer_efficiency: module power outside operating window");
    if (p_pem < 20.0 - tol || p_pem > 40.0 + tol)
        throw std::domain_error("electrolyzer_efficiency: pressure outside 20-40 bar");
    return p.a00 + p.a10 * p_mod + p.a20 * p_mod * p_mod + p.a01 * p_pem;
}

struct ElectrolyzerOutput {
    double h2_rate = 0.0;    // t/h
    double cooling = 0.0;    // MW
    double aux_power = 0.0;  // MW
};

// Fleet output at total power p_total shared equally by n_mod modules.
// p_total = 0 means the unit is off and all outputs are zero.
inline ElectrolyzerOutput electrolyzer_output(double p_total, int n_mod, double p_pem,
                                              const ElectrolyzerParams& p) {
    if (n_mod < 1) throw std::invalid_argument("electrolyzer_output: n_mod < 1");
    ElectrolyzerOutput out;
    if (p_total == 0.0) return out;
    if (p_total < 0.0) throw std::invalid_argument("electrolyzer_output: negative power");
    const double eta = electrolyzer_efficiency(p_total / n_mod, p_pem, p);
    out.h2_rate = eta * p_total / p.lhv_h2;
    out.cooling = (1.0 - eta) * p_total;
    out.aux_power = p.aux_frac * p_total;
    return out;
}

// Largest hydrogen production of the fleet (all modules at maximum power).
inline double electrolyzer_max_h2(int n_mod, double p_pem, const ElectrolyzerParams& p) {
    return electrolyzer_output(p.p_module_max * n_mod, n_mod, p_pem, p).h2_rate;
}

// -------------------------------------------------------------- compressor

struct CompressorParams {
    double cp_h2 = 14.31;        // kJ/(kg K)
    double k_h2 = 1.405;         // heat-capacity ratio
    double eta_is = 0.8;         // isentropic efficiency
    double eta_mec = 0.876;      // mechanical efficiency (least-squares calibrated)
    double t_in = 298.0;         // K
    double load_min_frac = 0.25; // of the design flow, applies only when flow > 0
};

struct CompressorOutput {
    double power = 0.0;    // MW
    double cooling = 0.0;  // MW, aftercooler duty assumed equal to power
};

inline CompressorOutput compressor_power(double m_dot, double beta, const CompressorParams& p) {
    if (m_dot < 0.0) throw std::invalid_argument("compressor_power: negative flow");
    if (beta < 1.0) throw std::invalid_argument("compressor_power: beta < 1");
    CompressorOutput out;
    if (m_dot == 0.0) return out;
    const double kg_per_s = m_dot * 1000.0 / 3600.0;
    const double exponent = (p.k_h2 - 1.0) / p.k_h2;
    const double kw =
        kg_per_s * p.cp_h2 * p.t_in / (p.eta_is * p.eta_mec) * (std::pow(beta, exponent) - 1.0);
    out.power = kw / 1000.0;
    out.cooling = out.power;
    return out;
}

struct CompressorReferencePoint {
    double m_dot;      // t/h
    double beta;       // pressure ratio
    double power_kw;   // reference shaft power
};

// Least-squares fit of the mechanical efficiency against reference power
// data. The model is linear in 1/eta_mec, so the optimum is closed-form.
inline double calibrate_eta_mec(std::span<const CompressorReferencePoint> refs,
                                CompressorParams params) {
    if (refs.empty()) throw std::invalid_argument("calibrate_eta_mec: no reference points");
    params.eta_mec = 1.0;
    double sum_aa = 0.0, sum_ay = 0.0;
    for (const auto& r : refs) {
        const double a = compressor_power(r.m_dot, r.beta, params).power * 1000.0;
        sum_aa += a * a;
        sum_ay += a * r.power_kw;
    }
    if (sum_ay <= 0.0) throw std::invalid_argument("calibrate_eta_mec: degenerate references");
    return sum_aa / sum_ay;
}

// ------------------------------------------------------------------ vessel

struct VesselParams {
    double slope = 0.073;   // kg/(m^3 bar), linear density interpolation
    double p_floor = 75.0;  // bar, methanol synthesis pressure
};

// Pressure from stored mass above the floor. Mass accounting is relative to
// the content at floor pressure, so an empty-above-floor vessel reads 75 bar.
inline double vessel_pressure(double mass, double volume, const VesselParams& p) {
    if (volume <= 0.0) throw std::invalid_argument("vessel_pressure: volume <= 0");
    return p.p_floor + mass / (p.slope * volume);
}

inline double vessel_mass_at(double pressure, double volume, const VesselParams& p) {
    return p.slope * volume * (pressure - p.p_floor);
}

// Hourly mass balance, kg. Flows are t/h; no clamping on underflow.
inline double vessel_step(double mass, double h2_in, double h2_out, double dt) {
    if (h2_in < 0.0 || h2_out < 0.0) throw std::invalid_argument("vessel_step: negative flow");
    return mass + (h2_in - h2_out) * dt * 1000.0;
}

// ------------------------------------------------------------- meoh plant

// Linear model extracted from the detailed flowsheet: all rates scale with
// the hydrogen feed through one reference operating point. Keeping the
// reference point itself (instead of pre-divided ratios) makes the model
// exact at that point.
struct MeohPlantParams {
    double h2_ref = 1.9;          // t/h
    double meoh_ref = 9.9;        // t/h
    double co2_ref = 15.4;        // t/h
    double elec_ref = 1.8;        // MW
    double cooling_ref = 13.8;    // MW
    double load_min_frac = 0.20;  // of the nominal hydrogen feed

    double meoh_per_h2() const { return meoh_ref / h2_ref; }
    double co2_per_meoh() const { return co2_ref / meoh_ref; }
    double elec_per_meoh() const { return elec_ref / meoh_ref; }
    double cooling_per_meoh() const { return cooling_ref / meoh_ref; }
};

struct MeohRates {
    double meoh = 0.0;     // t/h
    double co2_in = 0.0;   // t/h
    double elec = 0.0;     // MW
    double cooling = 0.0;  // MW
};

inline MeohRates meoh_rates(double h2_in, const MeohPlantParams& p) {
    if (h2_in < 0.0) throw std::invalid_argument("meoh_rates: negative hydrogen feed");
    MeohRates out;
    const double x = h2_in / p.h2_ref;
    out.meoh = x * p.meoh_ref;
    out.co2_in = x * p.co2_ref;
    out.elec = x * p.elec_ref;
    out.cooling = x * p.cooling_ref;
    return out;
}

// ---------------------------------------------------------------- bundled

struct PlantParams {
    BatteryParams battery;
    ElectrolyzerParams pem;
    CompressorParams comp;
    VesselParams vessel;
    MeohPlantParams meoh;
};

}  // namespace p2m
