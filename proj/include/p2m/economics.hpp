#pragma once

// Capital and operating cost models plus the annualized specific cost of
// methanol. Monetary convention: CAPEX in MEUR, periodic OPEX in EUR per
// horizon, yearly figures in MEUR/y, production in t (kt/y in reports).
// MEUR per kt equals EUR per kg, so c_meoh falls out of the annuity ratio
// directly.

#include <cmath>
#include <functional>
#include <stdexcept>

#include "p2m/plant.hpp"

namespace p2m {

struct EconParams {
    int lifetime_years = 20;
    double discount_rate = 0.05;
    double om_frac = 0.05;          // yearly O&M as a fraction of CAPEX_0
    double usd_to_eur = 0.85;
    double cooling_cost = 1.0;      // EUR/MWh
    double co2_cost = 50.0;         // EUR/t
    int operating_weeks = 48;       // per year
    double battery_cost_usd_kwh = 310.0;
    double battery_update_factor = 1.0;   // cost-year update, assumption
    double vessel_cost_usd_m3 = 7800.0;
    double pem_install_factor = 1.75;
    double pem_specific_cost_eur_kw = 1000.0;  // constant default, assumption
    // Optional override: specific cost as a function of nominal power [MW].
    std::function<double(double)> pem_specific_cost_fn;
    double capex_meoh_ref_meur = 27.8;
    double meoh_ref_capacity_t_y = 80000.0;  // 0.08 Mt/y reference
    double sixtenths_b = 0.6;
    // Compressor cost power law on the maximum compression power,
    // cost = c0 * (P_max / P_ref)^c1. Defaults are assumptions.
    double comp_cost_c0_meur = 3.0;
    double comp_cost_p_ref_mw = 1.0;
    double comp_cost_c1 = 0.7;
    int pem_replacement_year = 10;
    double sell_price_factor = 1.0;  // haircut on electricity sold back

    double hours_per_year() const { return operating_weeks * 7.0 * 24.0; }
    double pem_specific_cost(double p_nom_mw) const {
        return pem_specific_cost_fn ? pem_specific_cost_fn(p_nom_mw) : pem_specific_cost_eur_kw;
    }
};

inline double annuity_factor(double rate, int years) {
    double sum = 0.0;
    for (int j = 1; j <= years; ++j) sum += std::pow(1.0 + rate, -j);
    return sum;
}

// ------------------------------------------------------------------ CAPEX

inline double capex_battery(double e_nom_mwh, const EconParams& e) {
    if (e_nom_mwh < 0.0) throw std::invalid_argument("capex_battery: negative capacity");
    const double usd = e_nom_mwh * 1000.0 * e.battery_cost_usd_kwh * e.battery_update_factor;
    return usd * e.usd_to_eur / 1e6;
}

struct ElectrolyzerCapex {
    double initial = 0.0;      // MEUR, installed
    double replacement = 0.0;  // MEUR, stack purchase without the install factor
};

inline ElectrolyzerCapex capex_electrolyzer(int n_mod, const ElectrolyzerParams& pem,
                                            const EconParams& e) {
    if (n_mod < 1) throw std::invalid_argument("capex_electrolyzer: n_mod < 1");
    const double p_nom_mw = pem.p_module_nom * n_mod;  // costing at nominal, not maximum
    const double base_meur = p_nom_mw * 1000.0 * e.pem_specific_cost(p_nom_mw) / 1e6;
    return {base_meur * e.pem_install_factor, base_meur};
}

inline double capex_vessel(double volume_m3, const EconParams& e) {
    if (volume_m3 < 0.0) throw std::invalid_argument("capex_vessel: negative volume");
    return volume_m3 * e.vessel_cost_usd_m3 * e.usd_to_eur / 1e6;
}

// Six-tenths scaling against the reference plant, on a yearly-capacity basis.
inline double capex_meoh_from_capacity(double capacity_t_y, const EconParams& e) {
    if (capacity_t_y <= 0.0) throw std::invalid_argument("capex_meoh: non-positive capacity");
    return e.capex_meoh_ref_meur * std::pow(capacity_t_y / e.meoh_ref_capacity_t_y, e.sixtenths_b);
}

inline double capex_meoh(double meoh_nom_t_h, const EconParams& e) {
    return capex_meoh_from_capacity(meoh_nom_t_h * e.hours_per_year(), e);
}

// Sized at the maximum flow and the maximum design pressure ratio.
inline double capex_compressor(double max_flow_t_h, double beta_max, double p_pem,
                               const CompressorParams& comp, const EconParams& e) {
    if (max_flow_t_h < 0.0) throw std::invalid_argument("capex_compressor: negative flow");
    (void)p_pem;  // the ideal-gas power law depends on the ratio only
    if (max_flow_t_h == 0.0) return 0.0;
    const double p_max = compressor_power(max_flow_t_h, beta_max, comp).power;
    return e.comp_cost_c0_meur * std::pow(p_max / e.comp_cost_p_ref_mw, e.comp_cost_c1);
}

// ------------------------------------------------------------------- OPEX

struct OpexBreakdown {
    double electricity_buy = 0.0;   // EUR per horizon
    double electricity_sell = 0.0;  // EUR per horizon (revenue)
    double cooling = 0.0;           // EUR per horizon
    double co2 = 0.0;               // EUR per horizon

    double net() const { return electricity_buy - electricity_sell + cooling + co2; }
};

// Periodic operating cost of a feasible trajectory. Stand-alone electricity
// is free by assumption and the excess is curtailed, so both electricity
// terms are zero in that mode.
inline OpexBreakdown opex_period(const Trajectory& traj, const Scenario& scenario,
                                 const EconParams& e) {
    if (!feasible(traj)) throw std::invalid_argument("opex_period: infeasible trajectory");
    if (static_cast<int>(traj.hours.size()) != scenario.steps())
        throw std::invalid_argument("opex_period: trajectory/scenario length mismatch");

    OpexBreakdown out;
    const double dt = scenario.dt;
    for (std::size_t t = 0; t < traj.hours.size(); ++t) {
        const auto& h = traj.hours[t];
        if (scenario.mode == Mode::GridConnected) {
            const double price = scenario.values[t];
            out.electricity_buy += price * h.elec_drawn * dt;
            out.electricity_sell += price * h.elec_sold * dt * e.sell_price_factor;
        }
        out.cooling += e.cooling_cost * (h.pem_cooling + h.comp_cooling + h.meoh_cooling) * dt;
        out.co2 += e.co2_cost * h.co2_rate * dt;
    }
    return out;
}

struct Annualized {
    double opex_buy = 0.0;   // MEUR/y
    double opex_sell = 0.0;  // MEUR/y
    double cooling = 0.0;    // MEUR/y
    double co2 = 0.0;        // MEUR/y
    double meoh_t = 0.0;     // t/y

    double opex_net() const { return opex_buy - opex_sell + cooling + co2; }
};

inline double annualize_factor(double horizon_h, const EconParams& e) {
    if (horizon_h <= 0.0) throw std::invalid_argument("annualize: non-positive horizon");
    return e.hours_per_year() / horizon_h;
}

inline Annualized annualize(const OpexBreakdown& opex, double meoh_period_t, double horizon_h,
                            const EconParams& e) {
    const double f = annualize_factor(horizon_h, e);
    Annualized a;
    a.opex_buy = opex.electricity_buy * f / 1e6;
    a.opex_sell = opex.electricity_sell * f / 1e6;
    a.cooling = opex.cooling * f / 1e6;
    a.co2 = opex.co2 * f / 1e6;
    a.meoh_t = meoh_period_t * f;
    return a;
}

// Annualized specific cost of methanol in EUR/kg. capex0 and the yearly
// terms are MEUR; production is t/y. The replacement electrolyzer is
// discounted to its purchase year.
inline double c_meoh(double capex0_meur, double pem_replacement_meur, double om_y_meur,
                     double opex_y_meur, double meoh_t_y, const EconParams& e) {
    if (meoh_t_y <= 0.0) throw std::invalid_argument("c_meoh: non-positive production");
    const double af = annuity_factor(e.discount_rate, e.lifetime_years);
    const double repl =
        pem_replacement_meur * std::pow(1.0 + e.discount_rate, -e.pem_replacement_year);
    const double numerator = capex0_meur + repl + (om_y_meur + opex_y_meur) * af;
    const double denominator = (meoh_t_y / 1000.0) * af;  // kt/y
    return numerator / denominator;
}

// ----------------------------------------------------------------- report

struct CostReport {
    // CAPEX breakdown, MEUR.
    double capex_battery = 0.0;
    double capex_pem = 0.0;
    double capex_vessel = 0.0;
    double capex_meoh = 0.0;
    double capex_comp = 0.0;
    double capex0 = 0.0;
    double pem_replacement = 0.0;
    // Yearly figures.
    double opex_buy_y = 0.0;   // MEUR/y
    double opex_sell_y = 0.0;  // MEUR/y
    double cooling_y = 0.0;    // MEUR/y
    double co2_y = 0.0;        // MEUR/y
    double opex_y = 0.0;       // MEUR/y, net
    double om_y = 0.0;         // MEUR/y
    double meoh_y_kt = 0.0;    // kt/y
    double c_meoh = 0.0;       // EUR/kg
    double horizon_h = 0.0;
};

inline CostReport build_cost_report(const PlantDesign& design, const Trajectory& traj,
                                    const Scenario& scenario, const PlantParams& params,
                                    const EconParams& e) {
    CostReport r;
    r.horizon_h = scenario.steps() * scenario.dt;

    r.capex_battery = capex_battery(design.battery_capacity(), e);
    const auto pem_cx = capex_electrolyzer(design.n_mod, params.pem, e);
    r.capex_pem = pem_cx.initial;
    r.pem_replacement = pem_cx.replacement;
    r.capex_vessel = capex_vessel(design.vessel_volume(), e);
    r.capex_meoh = capex_meoh(params.meoh.meoh_per_h2() * design.h2_meoh_nom, e);
    const double max_flow = electrolyzer_max_h2(design.n_mod, design.p_pem, params.pem);
    r.capex_comp = capex_compressor(max_flow, design.beta_max, design.p_pem, params.comp, e);
    r.capex0 = r.capex_battery + r.capex_pem + r.capex_vessel + r.capex_meoh + r.capex_comp;

    const auto opex = opex_period(traj, scenario, e);
    double meoh_t = 0.0;
    for (const auto& h : traj.hours) meoh_t += h.meoh_rate * scenario.dt;
    const auto a = annualize(opex, meoh_t, r.horizon_h, e);
    r.opex_buy_y = a.opex_buy;
    r.opex_sell_y = a.opex_sell;
    r.cooling_y = a.cooling;
    r.co2_y = a.co2;
    r.opex_y = a.opex_net();
    r.om_y = e.om_frac * r.capex0;
    r.meoh_y_kt = a.meoh_t / 1000.0;
    r.c_meoh = c_meoh(r.capex0, r.pem_replacement, r.om_y, r.opex_y, a.meoh_t, e);
    return r;
}

}  // namespace p2m
