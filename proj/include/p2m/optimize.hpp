#pragma once

// Scheduling and design optimization. Three layers:
//   - schedule_oracle: exhaustive enumeration of discretized schedules on
//     tiny horizons, the ground truth the heuristic is checked against.
//   - schedule_heuristic: constructive dispatch plus local improvement for
//     arbitrary horizons; its output is always feasible or an explicit
//     infeasibility report.
//   - optimize_design: multi-start pattern search over the design box,
//     scoring each candidate by heuristic scheduling and the annualized
//     specific methanol cost.
//
// The inner objective is the horizon operating cost net of sale revenue
// minus a production credit (kappa, EUR/kg). The credit makes the inner
// problem consistent with minimizing the cost-per-kilogram ratio at fixed
// design; optimize_design refreshes kappa once from the incumbent specific
// cost. The stand-alone oracle can instead rank schedules lexicographically
// by production, then cost.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "p2m/economics.hpp"
#include "p2m/plant.hpp"

namespace p2m {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ObjectiveOptions {
    double kappa = 1.0;         // EUR/kg production credit
    double startup_cost = 0.0;  // EUR per electrolyzer off->on transition
};

inline double hour_cost(const HourRecord& h, double scenario_value, Mode mode,
                        const EconParams& e, const ObjectiveOptions& o, bool pem_startup) {
    double c = 0.0;
    if (mode == Mode::GridConnected)
        c += scenario_value * h.elec_drawn - scenario_value * h.elec_sold * e.sell_price_factor;
    c += e.cooling_cost * (h.pem_cooling + h.comp_cooling + h.meoh_cooling);
    c += e.co2_cost * h.co2_rate;
    c -= o.kappa * 1000.0 * h.meoh_rate;
    if (pem_startup) c += o.startup_cost;
    return c;
}

inline double schedule_objective(const Trajectory& traj, const Scenario& scenario,
                                 const EconParams& e, const ObjectiveOptions& o) {
    double total = 0.0;
    bool prev_on = false;
    for (std::size_t t = 0; t < traj.hours.size(); ++t) {
        const bool on = traj.hours[t].pem_power > 0.0;
        total += hour_cost(traj.hours[t], scenario.values[t], scenario.mode, e, o,
                           on && !prev_on);
        prev_on = on;
    }
    return total;
}

// --------------------------------------------------------------- oracle

enum class BattMove { Idle, Charge, DischargeGrid, DischargePem };

struct OracleGrid {
    std::vector<double> pem_fracs = {0.0, 0.25, 0.5, 1.0, 1.25};  // of nominal fleet power
    std::vector<double> draw_fracs = {0.2, 0.6, 1.0};             // of the nominal feed
    std::vector<BattMove> batt_moves = {BattMove::Idle, BattMove::Charge,
                                        BattMove::DischargeGrid};
    // Battery moves act at this fraction of the rate cap. Note that a
    // full-rate discharge never fits between the SOC floor and the capacity
    // (0.9/(eta_disch*eta_dc_ac) + 0.1 > 1), so grids that should exercise
    // discharging want a fraction around one half.
    double batt_rate_frac = 1.0;
    long budget = 10'000'000;  // enumeration nodes
};

enum class OracleObjective { CostMinusCredit, LexMaxMeohThenCost };

struct OracleResult {
    bool found = false;
    Schedule schedule;
    Trajectory trajectory;
    double objective = kInf;  // cost-minus-credit of the winner
    double meoh_t = 0.0;      // horizon production of the winner
    long nodes = 0;
};

namespace detail {

struct OracleContext {
    const PlantDesign& design;
    const Scenario& scenario;
    const FlexPolicy& flex;
    const PlantParams& params;
    const EconParams& econ;
    const ObjectiveOptions& obj;
    OracleObjective kind;
    long budget;

    std::vector<double> pem_levels;   // MW
    std::vector<double> draw_levels;  // t/h
    std::vector<BattMove> moves;
    double batt_rate = 0.0;

    long nodes = 0;
    bool found = false;
    double best_cost = kInf;
    double best_meoh = -kInf;
    std::vector<ScheduleDecision> current;
    std::vector<ScheduleDecision> best;
};

inline bool oracle_better(const OracleContext& c, double cost, double meoh) {
    if (!c.found) return true;
    if (c.kind == OracleObjective::CostMinusCredit) return cost < c.best_cost;
    if (meoh > c.best_meoh) return true;
    return meoh == c.best_meoh && cost < c.best_cost;
}

inline void oracle_dfs(OracleContext& c, int t, const PlantState& state, double prev_feed,
                       bool prev_on, double cost, double meoh) {
    const int steps = c.scenario.steps();
    if (t == steps) {
        if (oracle_better(c, cost, meoh)) {
            c.found = true;
            c.best_cost = cost;
            c.best_meoh = meoh;
            c.best = c.current;
        }
        return;
    }
    const double nom = c.design.h2_meoh_nom;
    const bool vessel = has_vessel(c.design.topology);

    for (double pem_power : c.pem_levels) {
        for (std::size_t di = 0; di < (vessel ? c.draw_levels.size() : 1); ++di) {
            for (BattMove mv : c.moves) {
                ScheduleDecision u;
                u.x_pem_on = pem_power > 0.0;
                u.p_grid_to_pem = pem_power;
                if (mv == BattMove::Charge) {
                    u.p_batt_in = c.batt_rate;
                    u.x_batt_in = true;
                } else if (mv == BattMove::DischargeGrid) {
                    u.p_batt_to_grid = c.batt_rate;
                    u.x_batt_out = true;
                } else if (mv == BattMove::DischargePem) {
                    if (pem_power < c.batt_rate) continue;  // battery feeds the electrolyzer
                    u.p_batt_to_pem = c.batt_rate;
                    u.p_grid_to_pem = pem_power - c.batt_rate;
                    u.x_batt_out = true;
                }
                if (vessel) {
                    u.h2_to_meoh = c.draw_levels[di];
                } else {
                    u.h2_to_meoh = pem_power > 0.0
                                       ? electrolyzer_output(pem_power, c.design.n_mod,
                                                             c.design.p_pem, c.params.pem)
                                             .h2_rate
                                       : 0.0;
                }

                // Cross-hour feed constraints.
                if (!c.flex.flexible) {
                    if (std::abs(u.h2_to_meoh - nom) > detail::kFlowTol) continue;
                } else if (t > 0) {
                    if (std::abs(u.h2_to_meoh - prev_feed) > c.flex.rl * nom + detail::kFlowTol)
                        continue;
                }

                if (++c.nodes > c.budget)
                    throw std::runtime_error("schedule_oracle: enumeration budget exceeded");

                auto [next, rec] =
                    step(c.design, state, u, c.scenario.values[static_cast<std::size_t>(t)],
                         c.scenario.mode, c.params, t);
                if (!rec.violations.empty()) continue;  // any violation is permanent

                const bool on = rec.pem_power > 0.0;
                const double hc = hour_cost(rec, c.scenario.values[static_cast<std::size_t>(t)],
                                            c.scenario.mode, c.econ, c.obj, on && !prev_on);
                c.current[static_cast<std::size_t>(t)] = u;
                oracle_dfs(c, t + 1, next, rec.h2_to_meoh, on, cost + hc, meoh + rec.meoh_rate);
            }
        }
    }
}

}  // namespace detail

// Exhaustively enumerates all feasible discretized schedules with storage
// state propagation. Ties are broken by the lexicographically smallest
// control vector (the depth-first visit order).
inline OracleResult schedule_oracle(const PlantDesign& design, const Scenario& scenario,
                                    const FlexPolicy& flex, const OracleGrid& grid,
                                    const PlantParams& params, const EconParams& econ,
                                    const ObjectiveOptions& obj = {},
                                    std::optional<OracleObjective> objective = std::nullopt) {
    if (scenario.steps() > 8)
        throw std::invalid_argument("schedule_oracle: horizon too long (max 8 steps)");
    if (scenario.steps() < 1) throw std::invalid_argument("schedule_oracle: empty scenario");

    detail::OracleContext ctx{design,
                              scenario,
                              flex,
                              params,
                              econ,
                              obj,
                              objective.value_or(scenario.mode == Mode::StandAlone
                                                     ? OracleObjective::LexMaxMeohThenCost
                                                     : OracleObjective::CostMinusCredit),
                              grid.budget,
                              {},
                              {},
                              {},
                              0.0,
                              0,
                              false,
                              kInf,
                              -kInf,
                              {},
                              {}};

    const double p_nom_fleet = params.pem.p_module_nom * design.n_mod;
    for (double f : grid.pem_fracs) ctx.pem_levels.push_back(f * p_nom_fleet);
    for (double f : grid.draw_fracs) ctx.draw_levels.push_back(f * design.h2_meoh_nom);
    if (has_battery(design.topology)) {
        ctx.moves = grid.batt_moves;
        ctx.batt_rate = std::max(params.battery.min_flow,
                                 grid.batt_rate_frac * design.battery_flow_cap());
    } else {
        ctx.moves = {BattMove::Idle};
    }
    ctx.current.resize(static_cast<std::size_t>(scenario.steps()));

    detail::oracle_dfs(ctx, 0, initial_state(design, params), 0.0, false, 0.0, 0.0);

    OracleResult out;
    out.nodes = ctx.nodes;
    if (!ctx.found) return out;
    out.found = true;
    out.schedule.decisions = ctx.best;
    out.trajectory = simulate(design, scenario, out.schedule, flex, params);
    out.objective = ctx.best_cost;
    out.meoh_t = ctx.best_meoh * scenario.dt;
    return out;
}

// ------------------------------------------------------------- heuristic

enum MoveType : unsigned {
    MovePemSet = 1u << 0,
    MoveDrawSet = 1u << 1,
    MovePemTransfer = 1u << 2,
    MoveBattery = 1u << 3,
    MoveAll = MovePemSet | MoveDrawSet | MovePemTransfer | MoveBattery,
};

struct ScheduleOptions {
    FlexPolicy flex;
    int improvement_iters = 4;       // local-improvement passes
    unsigned neighborhood = MoveAll;
    unsigned seed = 0;
    double tolerance = 1e-9;         // minimum relative improvement to accept
    ObjectiveOptions objective;
};

struct ScheduleResult {
    bool feasible = false;
    std::string reason;  // set when infeasible
    Schedule schedule;
    Trajectory trajectory;
    double objective = kInf;
    double meoh_t = 0.0;
    std::vector<double> history;  // incumbent objective after each accepted move
};

namespace detail {

class HeuristicBuilder {
public:
    HeuristicBuilder(const PlantDesign& design, const Scenario& scenario,
                     const ScheduleOptions& options, const PlantParams& params,
                     const EconParams& econ)
        : design_(design), scenario_(scenario), opt_(options), params_(params), econ_(econ) {
        steps_ = scenario.steps();
        nom_ = design.h2_meoh_nom;
        floor_ = params.meoh.load_min_frac * nom_;
        pem_max_ = params.pem.p_module_max * design.n_mod;
        prod_max_ = electrolyzer_max_h2(design.n_mod, design.p_pem, params.pem);
        pem_min_ = effective_pem_min();
        prod_min_ = production(pem_min_);
        vessel_cap_t_ = has_vessel(design.topology)
                            ? vessel_mass_at(design.max_storage_pressure(),
                                             design.vessel_volume(), params.vessel) /
                                  1000.0
                            : 0.0;
        batt_rate_ = has_battery(design.topology) ? design.battery_flow_cap() : 0.0;
        pem_.assign(static_cast<std::size_t>(steps_), 0.0);
        draw_.assign(static_cast<std::size_t>(steps_), 0.0);
        b_in_.assign(static_cast<std::size_t>(steps_), 0.0);
        b_pem_.assign(static_cast<std::size_t>(steps_), 0.0);
        b_grid_.assign(static_cast<std::size_t>(steps_), 0.0);
    }

    ScheduleResult run() {
        ScheduleResult res;
        std::string why;
        if (!construct(why)) {
            res.reason = why;
            return res;
        }
        Trajectory traj;
        double obj = evaluate(&traj);
        if (obj == kInf) {
            res.reason = "constructive schedule is infeasible: " + first_violation(traj);
            return res;
        }
        res.history.push_back(obj);
        improve(obj, res.history);

        res.feasible = true;
        res.schedule = to_schedule();
        res.trajectory = simulate(design_, scenario_, res.schedule, opt_.flex, params_);
        res.objective = schedule_objective(res.trajectory, scenario_, econ_, opt_.objective);
        for (const auto& h : res.trajectory.hours) res.meoh_t += h.meoh_rate * scenario_.dt;
        return res;
    }

private:
    // Production as a function of total electrolyzer power, and its inverse.
    double production(double p_total) const {
        if (p_total <= 0.0) return 0.0;
        return electrolyzer_output(p_total, design_.n_mod, design_.p_pem, params_.pem).h2_rate;
    }
    double power_for(double target) const {
        double lo = pem_min_, hi = pem_max_;
        if (target <= prod_min_) return pem_min_;
        if (target >= prod_max_) return pem_max_;
        for (int i = 0; i < 80; ++i) {
            const double mid = 0.5 * (lo + hi);
            (production(mid) < target ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }
    // The compressor's 25 % floor can sit above the electrolyzer's own
    // minimum load; the effective minimum respects both.
    double effective_pem_min() const {
        const double window_min = params_.pem.p_module_min() * design_.n_mod;
        const double flow_floor = params_.comp.load_min_frac * prod_max_;
        double lo = window_min, hi = pem_max_;
        if (production(window_min) >= flow_floor) return window_min;
        for (int i = 0; i < 80; ++i) {
            const double mid = 0.5 * (lo + hi);
            (production(mid) < flow_floor ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

    bool construct(std::string& why) {
        if (scenario_.mode == Mode::GridConnected) return construct_grid(why);
        return construct_standalone(why);
    }

    bool construct_grid(std::string& why) {
        double d_base;
        if (!opt_.flex.flexible) {
            d_base = nom_;
        } else {
            d_base = std::min(nom_, prod_max_);
            d_base = std::max(d_base, floor_);
        }
        if (!has_vessel(design_.topology)) {
            if (d_base < prod_min_ - 1e-12 || d_base > prod_max_ + 1e-12) {
                why = "methanol feed " + std::to_string(d_base) +
                      " t/h outside the electrolyzer's feasible production range";
                return false;
            }
            for (int t = 0; t < steps_; ++t) {
                draw_[static_cast<std::size_t>(t)] = d_base;
                pem_[static_cast<std::size_t>(t)] = power_for(d_base);
            }
            return true;
        }
        // Vessel: coast on stock when possible, otherwise produce just in
        // time; net surplus of a minimum-load run goes to storage.
        double inv = 0.0;
        for (int t = 0; t < steps_; ++t) {
            draw_[static_cast<std::size_t>(t)] = d_base;
            if (inv >= d_base - 1e-12) {
                pem_[static_cast<std::size_t>(t)] = 0.0;
                inv -= d_base;
                continue;
            }
            const double needed = d_base - inv;
            if (needed > prod_max_ + 1e-9) {
                why = "nominal methanol feed exceeds the electrolyzer's maximum production";
                return false;
            }
            double level = std::max(prod_min_, needed);
            // Respect the storage ceiling.
            const double headroom = vessel_cap_t_ - inv + d_base;
            if (level > headroom) level = std::max(needed, headroom);
            if (level > headroom + 1e-9) {
                why = "vessel too small to absorb the minimum electrolyzer run";
                return false;
            }
            pem_[static_cast<std::size_t>(t)] = power_for(level);
            inv += production(pem_[static_cast<std::size_t>(t)]) - d_base;
        }
        return true;
    }

    // Stand-alone: the park funds everything. A constant methanol feed is
    // searched (largest sustainable level), the electrolyzer runs as high
    // as the hourly surplus allows, and the battery bridges AC deficits.
    bool construct_standalone(std::string& why) {
        auto attempt = [this](double d_base) {
            return build_standalone_forward(d_base);
        };
        if (!opt_.flex.flexible) {
            if (attempt(nom_)) return true;
            why = "stand-alone power availability cannot sustain the nominal methanol feed";
            return false;
        }
        double lo = floor_, hi = std::min(nom_, prod_max_);
        if (hi < lo) hi = lo;
        if (!attempt(lo)) {
            why = "stand-alone power availability cannot sustain the minimum methanol feed";
            return false;
        }
        if (attempt(hi)) return true;
        for (int i = 0; i < 24; ++i) {
            const double mid = 0.5 * (lo + hi);
            (attempt(mid) ? lo : hi) = mid;
        }
        attempt(lo);  // rebuild the last known-good schedule
        return true;
    }

    bool build_standalone_forward(double d_base) {
        std::vector<double> pem(pem_.size(), 0.0), draw(draw_.size(), d_base);
        std::vector<double> b_in(b_in_.size(), 0.0), b_pem(b_pem_.size(), 0.0),
            b_grid(b_grid_.size(), 0.0);
        const auto& bp = params_.battery;
        double inv = 0.0;
        double soc = has_battery(design_.topology)
                         ? bp.soc_min_frac * design_.battery_capacity()
                         : 0.0;
        double soc_floor = soc;
        const double e_cap = design_.battery_capacity();

        // Compression target once this hour's production is stored.
        auto beta_at = [&](double inv_t, double prod, double feed) {
            if (!has_vessel(design_.topology))
                return std::max(1.0, params_.vessel.p_floor / design_.p_pem);
            const double end_mass_kg =
                std::clamp(inv_t + prod - feed, 0.0, vessel_cap_t_) * 1000.0;
            return std::max(1.0, vessel_pressure(end_mass_kg, design_.vessel_volume(),
                                                 params_.vessel) /
                                     design_.p_pem);
        };

        for (int t = 0; t < steps_; ++t) {
            const std::size_t ti = static_cast<std::size_t>(t);
            const double avail = scenario_.values[ti];
            const double meoh_elec = meoh_rates(d_base, params_.meoh).elec;
            const double aux_frac = params_.pem.aux_frac;

            // Highest electrolyzer power fundable from the park after the
            // methanol plant's AC load; the fixed point resolves the
            // compressor demand at the end-of-hour storage pressure.
            double pem_p = 0.0;
            double budget = avail - meoh_elec;
            if (budget > 0.0) {
                double guess = std::min(pem_max_, budget / (1.0 + aux_frac));
                for (int it = 0; it < 6 && guess >= pem_min_; ++it) {
                    const double prod_guess = production(guess);
                    const double beta = beta_at(inv, prod_guess, d_base);
                    const double comp = compressor_power(prod_guess, beta, params_.comp).power;
                    guess = std::min(pem_max_, (budget - comp) / (1.0 + aux_frac));
                }
                if (guess >= pem_min_) pem_p = guess;
            }
            // Storage ceiling.
            if (pem_p > 0.0 && has_vessel(design_.topology)) {
                const double headroom = vessel_cap_t_ - inv + d_base;
                if (production(pem_p) > headroom) {
                    if (headroom >= prod_min_) pem_p = power_for(headroom);
                    else if (inv >= d_base - 1e-12) pem_p = 0.0;
                }
            }
            // Shave any residual fixed-point deficit off the electrolyzer
            // before the battery has to step in.
            for (int k = 0; k < 8 && pem_p > 0.0; ++k) {
                const double prod = production(pem_p);
                const double comp =
                    compressor_power(prod, beta_at(inv, prod, d_base), params_.comp).power;
                const double deficit = pem_p * (1.0 + aux_frac) + comp + meoh_elec - avail;
                if (deficit <= kPowerTol) break;
                const double shaved = pem_p - deficit / (1.0 + aux_frac);
                if (shaved < pem_min_) {
                    pem_p = 0.0;
                    break;
                }
                pem_p = shaved;
            }
            // Hydrogen need: without enough stock the electrolyzer must run.
            const double produced = production(pem_p);
            if (inv + produced < d_base - 1e-9) {
                if (!has_vessel(design_.topology)) return false;
                // Try battery assistance into the electrolyzer.
                const double needed_power = power_for(d_base - inv);
                const double missing = needed_power - pem_p;
                const double dischargeable =
                    std::max(0.0, (soc - soc_floor) * bp.eta_disch);
                if (has_battery(design_.topology) && missing <= dischargeable &&
                    missing <= batt_rate_ && missing >= bp.min_flow) {
                    b_pem[ti] = missing;
                    pem_p = needed_power;
                } else {
                    return false;
                }
            }

            // Battery covers any AC deficit, then charges on surplus.
            const double prod_now = production(pem_p);
            const double beta_now = beta_at(inv, prod_now, d_base);
            const double comp_now = compressor_power(prod_now, beta_now, params_.comp).power;
            const double aux_now = aux_frac * pem_p;
            const double ac_demand = aux_now + comp_now + meoh_elec;
            const double grid_pem = std::max(0.0, pem_p - b_pem[ti]);
            double deficit = grid_pem + ac_demand - avail;
            if (deficit > kPowerTol) {
                if (!has_battery(design_.topology)) return false;
                const double remaining =
                    std::max(0.0, (soc - soc_floor) - b_pem[ti] / bp.eta_disch);
                const double dischargeable = remaining * bp.eta_disch * bp.eta_dc_ac;
                double need_ac = std::max(deficit, bp.min_flow);
                const double cap_left = batt_rate_ - b_pem[ti];
                if (b_in[ti] > 0.0 || need_ac > dischargeable + 1e-12 ||
                    need_ac > cap_left + 1e-12)
                    return false;
                b_grid[ti] = need_ac;
            } else if (has_battery(design_.topology) && b_pem[ti] == 0.0 &&
                       b_grid[ti] == 0.0) {
                const double surplus = avail - (grid_pem + ac_demand);
                const double headroom = (e_cap - soc) / bp.eta_ch;
                double charge = std::min({surplus, batt_rate_, headroom});
                if (charge >= bp.min_flow) b_in[ti] = charge;
            }

            // Advance state.
            const double p_out = battery_output_split(b_grid[ti], b_pem[ti], bp);
            soc = soc * (1.0 - bp.r_self_disch_hourly) + b_in[ti] * bp.eta_ch -
                  p_out / bp.eta_disch;
            soc_floor *= (1.0 - bp.r_self_disch_hourly);
            if (has_battery(design_.topology) &&
                (soc < soc_floor - kEnergyTol || soc > e_cap + kEnergyTol))
                return false;
            inv += prod_now - d_base;
            if (inv < -1e-9) return false;
            if (has_vessel(design_.topology) && inv > vessel_cap_t_ + 1e-9) return false;
            pem[ti] = pem_p;
        }

        pem_ = std::move(pem);
        draw_ = std::move(draw);
        b_in_ = std::move(b_in);
        b_pem_ = std::move(b_pem);
        b_grid_ = std::move(b_grid);
        return true;
    }

    ScheduleDecision decision_at(int t) const {
        const std::size_t ti = static_cast<std::size_t>(t);
        ScheduleDecision d;
        const double to_pem = std::min(b_pem_[ti], pem_[ti]);
        d.p_batt_to_pem = to_pem;
        d.p_batt_to_grid = b_grid_[ti];
        d.p_batt_in = b_in_[ti];
        d.x_batt_in = b_in_[ti] > 0.0;
        d.x_batt_out = (to_pem > 0.0 || b_grid_[ti] > 0.0);
        d.p_grid_to_pem = pem_[ti] - to_pem;
        d.x_pem_on = pem_[ti] > 0.0;
        d.h2_to_meoh = has_vessel(design_.topology) ? draw_[ti] : production(pem_[ti]);
        return d;
    }

    Schedule to_schedule() const {
        Schedule s;
        s.decisions.reserve(static_cast<std::size_t>(steps_));
        for (int t = 0; t < steps_; ++t) s.decisions.push_back(decision_at(t));
        return s;
    }

    double evaluate(Trajectory* out = nullptr) const {
        const Schedule s = to_schedule();
        Trajectory traj = simulate(design_, scenario_, s, opt_.flex, params_);
        double obj = kInf;
        if (feasible(traj)) obj = schedule_objective(traj, scenario_, econ_, opt_.objective);
        if (out) *out = std::move(traj);
        return obj;
    }

    // Incremental evaluation. The incumbent's per-hour entry states and
    // running costs are cached so a candidate mutated from hour t0 onward
    // only re-simulates the suffix; the first violation aborts. The
    // accumulation order matches a full pass bit for bit.
    void rebuild_cache() {
        state_cache_.assign(static_cast<std::size_t>(steps_) + 1, PlantState{});
        cost_cache_.assign(static_cast<std::size_t>(steps_) + 1, 0.0);
        feed_cache_.assign(static_cast<std::size_t>(steps_) + 1, 0.0);
        on_cache_.assign(static_cast<std::size_t>(steps_) + 1, false);
        state_cache_[0] = initial_state(design_, params_);
        for (int t = 0; t < steps_; ++t) {
            const std::size_t ti = static_cast<std::size_t>(t);
            auto [next, rec] = step(design_, state_cache_[ti], decision_at(t),
                                    scenario_.values[ti], scenario_.mode, params_, t);
            const bool on = rec.pem_power > 0.0;
            cost_cache_[ti + 1] =
                cost_cache_[ti] + hour_cost(rec, scenario_.values[ti], scenario_.mode, econ_,
                                            opt_.objective, on && !on_cache_[ti]);
            state_cache_[ti + 1] = next;
            feed_cache_[ti + 1] = rec.h2_to_meoh;
            on_cache_[ti + 1] = on;
        }
    }

    double suffix_objective(int t0) const {
        const std::size_t s0 = static_cast<std::size_t>(t0);
        PlantState st = state_cache_[s0];
        double cost = cost_cache_[s0];
        double prev_feed = feed_cache_[s0];
        bool prev_on = on_cache_[s0];
        for (int t = t0; t < steps_; ++t) {
            const std::size_t ti = static_cast<std::size_t>(t);
            auto [next, rec] = step(design_, st, decision_at(t), scenario_.values[ti],
                                    scenario_.mode, params_, t);
            if (!rec.violations.empty()) return kInf;
            if (!opt_.flex.flexible) {
                if (std::abs(rec.h2_to_meoh - nom_) > kFlowTol) return kInf;
            } else if (t > 0) {
                if (std::abs(rec.h2_to_meoh - prev_feed) > opt_.flex.rl * nom_ + kFlowTol)
                    return kInf;
            }
            const bool on = rec.pem_power > 0.0;
            cost += hour_cost(rec, scenario_.values[ti], scenario_.mode, econ_,
                              opt_.objective, on && !prev_on);
            prev_feed = rec.h2_to_meoh;
            prev_on = on;
            st = next;
        }
        return cost;
    }

    static std::string first_violation(const Trajectory& traj) {
        for (const auto& h : traj.hours)
            if (!h.violations.empty())
                return std::string(to_string(h.violations.front().type)) + " at hour " +
                       std::to_string(h.violations.front().hour);
        return "unknown";
    }

    // Applies production-conserving transfer of delta t/h from hour j to
    // hour i (raising i). Returns the earliest changed hour, -1 when the
    // levels cannot absorb the move.
    int transfer_production(std::size_t i, std::size_t j, double delta) {
        const double prod_i = production(pem_[i]);
        const double prod_j = production(pem_[j]);
        double take = std::min(delta, prod_j);
        double src_new = prod_j - take;
        if (src_new > 0.0 && src_new < prod_min_) {
            take = prod_j;  // shut the source hour down entirely
            src_new = 0.0;
        }
        const double dst_new = prod_i + take;
        if (take <= 0.0 || dst_new > prod_max_ + 1e-12) return -1;
        if (dst_new < prod_min_) return -1;
        pem_[i] = power_for(dst_new);
        pem_[j] = src_new == 0.0 ? 0.0 : power_for(src_new);
        return static_cast<int>(std::min(i, j));
    }

    // Turns hour j off and pre-banks its production in the cheapest earlier
    // hours that still have headroom. The vessel bounds are verified by the
    // evaluation, not here.
    int shutdown_with_prebank(std::size_t j) {
        double remaining = production(pem_[j]);
        if (remaining <= 0.0) return -1;
        std::vector<std::size_t> earlier;
        for (std::size_t i = 0; i < j; ++i)
            if (production(pem_[i]) < prod_max_ - 1e-12) earlier.push_back(i);
        std::stable_sort(earlier.begin(), earlier.end(), [this](std::size_t a, std::size_t b) {
            return scenario_.values[a] < scenario_.values[b];
        });
        std::vector<std::pair<std::size_t, double>> raised;
        for (std::size_t i : earlier) {
            if (remaining <= 1e-12) break;
            const double cur = production(pem_[i]);
            const double target = std::min(prod_max_, std::max(cur, prod_min_) + remaining);
            const double contribution = target - cur;
            if (contribution <= 0.0) continue;
            raised.push_back({i, target});
            remaining -= contribution;
        }
        if (remaining > 1e-9) return -1;
        std::size_t first = j;
        for (const auto& [i, level] : raised) {
            pem_[i] = power_for(level);
            first = std::min(first, i);
        }
        pem_[j] = 0.0;
        return static_cast<int>(first);
    }

    // Turns hour j off and frees the missing stock by cutting the methanol
    // feed at hours up to the first shortfall, latest cut first.
    int coast_with_draw_cut(std::size_t j) {
        const double prod_j = production(pem_[j]);
        if (prod_j <= 0.0 || !opt_.flex.flexible) return -1;
        std::vector<double> prod(static_cast<std::size_t>(steps_));
        for (int t = 0; t < steps_; ++t)
            prod[static_cast<std::size_t>(t)] = production(pem_[static_cast<std::size_t>(t)]);
        prod[j] = 0.0;
        double inv = 0.0, min_inv = 0.0;
        std::optional<std::size_t> first_deficit;
        for (int t = 0; t < steps_; ++t) {
            inv += prod[static_cast<std::size_t>(t)] - draw_[static_cast<std::size_t>(t)];
            if (inv < -1e-12 && !first_deficit) first_deficit = static_cast<std::size_t>(t);
            min_inv = std::min(min_inv, inv);
        }
        double need = -min_inv;
        if (need <= 1e-12) {
            pem_[j] = 0.0;
            return static_cast<int>(j);
        }
        // Cuts must land at or before the first shortfall to lift the whole
        // deficit tail.
        std::vector<std::pair<std::size_t, double>> cuts;
        for (std::size_t i = *first_deficit + 1; i-- > 0;) {
            if (need <= 1e-12) break;
            const double room = draw_[i] - floor_;
            if (room <= 0.0) continue;
            const double cut = std::min(room, need);
            cuts.push_back({i, draw_[i] - cut});
            need -= cut;
        }
        if (need > 1e-9) return -1;
        std::size_t first = j;
        for (const auto& [i, v] : cuts) {
            draw_[i] = v;
            first = std::min(first, i);
        }
        pem_[j] = 0.0;
        return static_cast<int>(first);
    }

    // Local improvement: first-improvement over a deterministic move order.
    // Candidate moves report the earliest hour they touch so only the
    // suffix needs re-simulation.
    void improve(double& best, std::vector<double>& history) {
        const double dp1 = prod_max_ / 4.0;
        const double dp2 = prod_max_ / 16.0;
        const double d2 = (pem_max_ - pem_min_) / 16.0;
        const double rl_step = opt_.flex.flexible ? opt_.flex.rl * nom_ : 0.0;
        rebuild_cache();

        for (int pass = 0; pass < opt_.improvement_iters; ++pass) {
            bool improved = false;
            auto try_accept = [&](auto&& mutate) {
                std::vector<double> p = pem_, d = draw_, bi = b_in_, bp = b_pem_,
                                    bg = b_grid_;
                const int t0 = mutate();
                if (t0 >= 0) {
                    const double obj = suffix_objective(t0);
                    const double gate = best - std::max(1e-7, opt_.tolerance * std::abs(best));
                    if (obj < gate) {
                        best = obj;
                        history.push_back(obj);
                        improved = true;
                        rebuild_cache();
                        return true;
                    }
                }
                pem_ = std::move(p);
                draw_ = std::move(d);
                b_in_ = std::move(bi);
                b_pem_ = std::move(bp);
                b_grid_ = std::move(bg);
                return false;
            };
            auto snap_pem = [this](double v) {
                if (v < pem_min_ * 0.5) return 0.0;
                return std::clamp(v, pem_min_, pem_max_);
            };

            for (int t = 0; t < steps_; ++t) {
                const std::size_t ti = static_cast<std::size_t>(t);
                if (opt_.neighborhood & MovePemSet) {
                    const double cur = pem_[ti];
                    const double jit =
                        has_vessel(design_.topology) && draw_[ti] >= prod_min_ &&
                                draw_[ti] <= prod_max_
                            ? power_for(draw_[ti])
                            : 0.0;
                    for (double cand : {0.0, pem_min_, pem_max_, jit, snap_pem(cur + d2),
                                        snap_pem(cur - d2)}) {
                        if (cand == cur) continue;
                        if (cand > 0.0 && (cand < pem_min_ || cand > pem_max_)) continue;
                        try_accept([&] {
                            pem_[ti] = cand;
                            return t;
                        });
                    }
                }
                if ((opt_.neighborhood & MoveDrawSet) && opt_.flex.flexible &&
                    has_vessel(design_.topology)) {
                    const double cur = draw_[ti];
                    for (double cand :
                         {floor_, nom_, cur + rl_step, cur - rl_step, cur + rl_step / 4.0,
                          cur - rl_step / 4.0}) {
                        const double v = std::clamp(cand, floor_, nom_);
                        if (v == cur) continue;
                        try_accept([&] {
                            draw_[ti] = v;
                            return t;
                        });
                        // Joint variant: shift this hour's production along
                        // with the feed so storage is untouched downstream.
                        try_accept([&] {
                            const double target = production(pem_[ti]) + (v - draw_[ti]);
                            draw_[ti] = v;
                            pem_[ti] = target <= 0.0 ? 0.0 : power_for(target);
                            return t;
                        });
                    }
                }
                if ((opt_.neighborhood & MovePemTransfer) && has_vessel(design_.topology)) {
                    for (int off : {1, 2, 3, 6, 24}) {
                        if (t + off >= steps_) continue;
                        const std::size_t tj = static_cast<std::size_t>(t + off);
                        for (double delta : {dp1, dp2}) {
                            // Later production moved earlier (banked), and
                            // the reverse direction.
                            try_accept([&] { return transfer_production(ti, tj, delta); });
                            try_accept([&] { return transfer_production(tj, ti, delta); });
                        }
                    }
                    if (pem_[ti] > 0.0) {
                        try_accept([&] { return shutdown_with_prebank(ti); });
                        try_accept([&] { return coast_with_draw_cut(ti); });
                    }
                }
            }

            if ((opt_.neighborhood & MoveBattery) && has_battery(design_.topology))
                improved |= battery_moves(best, history);

            if (!improved) break;
        }
    }

    bool battery_moves(double& best, std::vector<double>& history) {
        bool improved = false;
        auto try_accept = [&](auto&& mutate) {
            std::vector<double> bi = b_in_, bp = b_pem_, bg = b_grid_;
            const int t0 = mutate();
            const double obj = suffix_objective(t0);
            const double gate = best - std::max(1e-7, opt_.tolerance * std::abs(best));
            if (obj < gate) {
                best = obj;
                history.push_back(obj);
                improved = true;
                rebuild_cache();
                return true;
            }
            b_in_ = std::move(bi);
            b_pem_ = std::move(bp);
            b_grid_ = std::move(bg);
            return false;
        };

        // Candidate hours ranked by scenario value.
        std::vector<int> order(static_cast<std::size_t>(steps_));
        for (int t = 0; t < steps_; ++t) order[static_cast<std::size_t>(t)] = t;
        std::stable_sort(order.begin(), order.end(), [this](int a, int b) {
            return scenario_.values[static_cast<std::size_t>(a)] <
                   scenario_.values[static_cast<std::size_t>(b)];
        });
        const int k = std::min(steps_, 24);
        const double rates[2] = {batt_rate_, std::max(params_.battery.min_flow, batt_rate_ / 2.0)};

        for (int ci = 0; ci < k; ++ci) {
            const int tc = order[static_cast<std::size_t>(ci)];
            for (int di = 0; di < k; ++di) {
                const int td = order[static_cast<std::size_t>(steps_ - 1 - di)];
                if (td <= tc) continue;  // charge first, discharge later
                for (double r : rates) {
                    const std::size_t ci_ = static_cast<std::size_t>(tc);
                    const std::size_t di_ = static_cast<std::size_t>(td);
                    try_accept([&] {
                        b_in_[ci_] = r;
                        b_pem_[ci_] = b_grid_[ci_] = 0.0;
                        b_grid_[di_] = r;
                        b_in_[di_] = b_pem_[di_] = 0.0;
                        return tc;
                    });
                }
            }
        }
        // Clearing moves.
        for (int t = 0; t < steps_; ++t) {
            const std::size_t ti = static_cast<std::size_t>(t);
            if (b_in_[ti] > 0.0 || b_pem_[ti] > 0.0 || b_grid_[ti] > 0.0)
                try_accept([&] {
                    b_in_[ti] = b_pem_[ti] = b_grid_[ti] = 0.0;
                    return t;
                });
        }
        return improved;
    }

    const PlantDesign& design_;
    const Scenario& scenario_;
    const ScheduleOptions& opt_;
    const PlantParams& params_;
    const EconParams& econ_;
    int steps_ = 0;
    double nom_ = 0.0, floor_ = 0.0;
    double pem_max_ = 0.0, pem_min_ = 0.0;
    double prod_max_ = 0.0, prod_min_ = 0.0;
    double vessel_cap_t_ = 0.0;
    double batt_rate_ = 0.0;
    std::vector<double> pem_, draw_, b_in_, b_pem_, b_grid_;
    // Incumbent caches for incremental evaluation (entry state, running
    // cost, previous feed and on-state before each hour).
    std::vector<PlantState> state_cache_;
    std::vector<double> cost_cache_;
    std::vector<double> feed_cache_;
    std::vector<bool> on_cache_;
};

}  // namespace detail

inline ScheduleResult schedule_heuristic(const PlantDesign& design, const Scenario& scenario,
                                         const ScheduleOptions& options,
                                         const PlantParams& params, const EconParams& econ) {
    detail::HeuristicBuilder builder(design, scenario, options, params, econ);
    return builder.run();
}

// ---------------------------------------------------------- design search

struct DesignSearchOptions {
    DesignBounds bounds;
    std::optional<Topology> topology;  // nullopt = enumerate all (mode permitting)
    int multistart_count = 3;
    double pattern_step_init = 0.25;
    double pattern_shrink = 0.5;
    double pattern_step_min = 0.02;
    int max_evals = 60;
    unsigned seed = 0;
    ScheduleOptions sched;
    double kappa_init = 1.0;  // EUR/kg, refreshed once from the incumbent
    // Designs probed before the regular starts, e.g. winners from related
    // runs (another ramp limit of the same topology). Entries whose
    // topology differs are ignored.
    std::vector<PlantDesign> warm_starts;
};

struct EvalLogEntry {
    int eval = 0;
    double c_meoh = kInf;  // objective of this candidate (inf when infeasible)
    PlantDesign design;
};

struct OptimizationResult {
    bool feasible = false;
    std::string reason;
    Topology topology = Topology::None;
    PlantDesign design;
    Schedule schedule;
    Trajectory trajectory;
    CostReport cost_report;
    double objective = kInf;  // c_meoh of the incumbent
    int evals_used = 0;
    std::vector<double> best_objective_history;  // incumbent after each evaluation
    std::vector<EvalLogEntry> eval_log;
};

namespace detail {

struct DesignEval {
    double c_meoh = kInf;
    ScheduleResult sched;
    CostReport report;
    PlantDesign design;
};

// Scores one design: heuristic schedule, cost report, one kappa refresh.
inline DesignEval evaluate_design(const PlantDesign& design, const Scenario& scenario,
                                  const DesignSearchOptions& search, const FlexPolicy& flex,
                                  const PlantParams& params, const EconParams& econ) {
    DesignEval out;
    out.design = design;
    if (!validate_design(design, params, search.bounds).empty()) return out;

    ScheduleOptions opts = search.sched;
    opts.flex = flex;
    opts.objective.kappa = search.kappa_init;

    auto score = [&](const ScheduleOptions& o) -> std::optional<std::pair<double, std::pair<ScheduleResult, CostReport>>> {
        ScheduleResult r = schedule_heuristic(design, scenario, o, params, econ);
        if (!r.feasible) return std::nullopt;
        CostReport rep = build_cost_report(design, r.trajectory, scenario, params, econ);
        return std::make_pair(rep.c_meoh, std::make_pair(std::move(r), std::move(rep)));
    };

    auto first = score(opts);
    if (!first) return out;
    double best_c = first->first;
    out.sched = std::move(first->second.first);
    out.report = std::move(first->second.second);

    opts.objective.kappa = best_c;
    auto second = score(opts);
    if (second && second->first < best_c) {
        best_c = second->first;
        out.sched = std::move(second->second.first);
        out.report = std::move(second->second.second);
    }
    out.c_meoh = best_c;
    return out;
}

struct Box {
    std::vector<double> lo, hi;
    double decode(std::size_t i, double x) const { return lo[i] + x * (hi[i] - lo[i]); }
};

inline Box design_box(Topology topo, const DesignBounds& b) {
    Box box;
    auto add = [&box](double lo, double hi) {
        box.lo.push_back(lo);
        box.hi.push_back(hi);
    };
    add(b.n_mod_min, b.n_mod_max);  // index 0, continuous-relaxed module count
    add(b.p_pem_min, b.p_pem_max);
    add(b.beta_min, b.beta_max);
    if (has_battery(topo)) add(b.e_batt_min, b.e_batt_max);
    if (has_vessel(topo)) {
        add(b.volume_min, b.volume_max);
        add(b.h2_nom_min, b.h2_nom_max);
    }
    return box;
}

inline PlantDesign decode_design(Topology topo, const Box& box, const std::vector<double>& x,
                                 int n_mod, const PlantParams& params) {
    std::size_t i = 0;
    ++i;  // the module count arrives pre-rounded
    const double p_pem = box.decode(i, x[i]);
    ++i;
    const double beta = box.decode(i, x[i]);
    ++i;
    double e_batt = 0.0, volume = 0.0, h2_nom = 0.0;
    if (has_battery(topo)) {
        e_batt = box.decode(i, x[i]);
        ++i;
    }
    if (has_vessel(topo)) {
        volume = box.decode(i, x[i]);
        ++i;
        h2_nom = box.decode(i, x[i]);
        ++i;
    }
    return make_design(topo, e_batt, n_mod, p_pem, beta, volume, h2_nom, params.pem);
}

inline std::vector<double> encode_design(const PlantDesign& d, const Box& box) {
    std::vector<double> raw = {static_cast<double>(d.n_mod), d.p_pem, d.beta_max};
    if (has_battery(d.topology)) raw.push_back(d.battery_capacity());
    if (has_vessel(d.topology)) {
        raw.push_back(d.vessel_volume());
        raw.push_back(d.h2_meoh_nom);
    }
    std::vector<double> x(raw.size(), 0.5);
    for (std::size_t i = 0; i < raw.size(); ++i)
        if (box.hi[i] > box.lo[i])
            x[i] = std::clamp((raw[i] - box.lo[i]) / (box.hi[i] - box.lo[i]), 0.0, 1.0);
    return x;
}

}  // namespace detail

// Multi-start compass/pattern search over the design box. The first start is
// the box midpoint (seed-independent); further starts are seeded. Integer
// module counts are handled by evaluating the floor and ceiling of the
// continuous proposal and keeping the better one.
inline OptimizationResult optimize_design(const Scenario& scenario,
                                          const DesignSearchOptions& search,
                                          const FlexPolicy& flex, const EconParams& econ,
                                          const PlantParams& params = {});

// Re-homes a design into another topology, filling absent storage sizes
// with the smallest admissible ones. Useful for donating winners between
// related searches; the result may still fail validation (e.g. an
// unusable vessel pressure window) and is then simply an unproductive probe.
inline PlantDesign lift_design(const PlantDesign& src, Topology topo, const PlantParams& params,
                               const DesignBounds& b = {}) {
    const double e_batt = src.e_batt_nom.value_or(b.e_batt_min);
    const double volume = src.volume.value_or(b.volume_min);
    double h2_nom = std::clamp(src.h2_meoh_nom, b.h2_nom_min, b.h2_nom_max);
    return make_design(topo, e_batt, src.n_mod, src.p_pem, src.beta_max, volume, h2_nom,
                       params.pem);
}

inline std::vector<OptimizationResult> compare_topologies(const Scenario& scenario,
                                                          const DesignSearchOptions& search,
                                                          const FlexPolicy& flex,
                                                          const EconParams& econ,
                                                          const PlantParams& params = {}) {
    std::vector<Topology> topos;
    if (scenario.mode == Mode::StandAlone) {
        // Storage is essential off-grid; only the configuration with both
        // storage technologies is considered.
        topos = {Topology::Both};
    } else if (search.topology) {
        topos = {*search.topology};
    } else {
        topos = {Topology::None, Topology::BatteryOnly, Topology::VesselOnly, Topology::Both};
    }
    std::vector<OptimizationResult> out;
    for (Topology topo : topos) {
        DesignSearchOptions s = search;
        s.topology = topo;
        out.push_back(optimize_design(scenario, s, flex, econ, params));
    }
    return out;
}

inline OptimizationResult optimize_design(const Scenario& scenario,
                                          const DesignSearchOptions& search,
                                          const FlexPolicy& flex, const EconParams& econ,
                                          const PlantParams& params) {
    if (!search.topology) {
        auto all = compare_topologies(scenario, search, flex, econ, params);
        auto best = std::min_element(all.begin(), all.end(),
                                     [](const OptimizationResult& a, const OptimizationResult& b) {
                                         return a.objective < b.objective;
                                     });
        return *best;
    }
    const Topology topo = *search.topology;
    if (scenario.mode == Mode::StandAlone && topo != Topology::Both)
        throw std::invalid_argument(
            "optimize_design: stand-alone case studies require both storage units");

    OptimizationResult res;
    res.topology = topo;
    const detail::Box box = detail::design_box(topo, search.bounds);
    const std::size_t dims = box.lo.size();

    detail::DesignEval incumbent;
    auto note_eval = [&res, &incumbent](const detail::DesignEval& e) {
        res.eval_log.push_back({res.evals_used, e.c_meoh, e.design});
        ++res.evals_used;
        if (e.c_meoh < incumbent.c_meoh) incumbent = e;
        res.best_objective_history.push_back(incumbent.c_meoh);
    };

    // One scored evaluation of a continuous point: round the module count
    // both ways and keep the better design.
    auto eval_point = [&](const std::vector<double>& x) -> double {
        const double n_cont = box.decode(0, x[0]);
        const int n_lo = std::clamp(static_cast<int>(std::floor(n_cont)), search.bounds.n_mod_min,
                                    search.bounds.n_mod_max);
        const int n_hi = std::clamp(static_cast<int>(std::ceil(n_cont)), search.bounds.n_mod_min,
                                    search.bounds.n_mod_max);
        double best = kInf;
        for (int n : {n_lo, n_hi}) {
            const PlantDesign d = detail::decode_design(topo, box, x, n, params);
            const auto e = detail::evaluate_design(d, scenario, search, flex, params, econ);
            note_eval(e);
            best = std::min(best, e.c_meoh);
            if (n_lo == n_hi) break;
        }
        return best;
    };

    auto pattern_from = [&](std::vector<double> x, double fx, int eval_cap) {
        double step = search.pattern_step_init;
        while (res.evals_used < eval_cap && step >= search.pattern_step_min) {
            double best_f = fx;
            std::vector<double> best_x = x;
            for (std::size_t i = 0; i < dims && res.evals_used < eval_cap; ++i) {
                for (double sgn : {+1.0, -1.0}) {
                    std::vector<double> y = x;
                    y[i] = std::clamp(y[i] + sgn * step, 0.0, 1.0);
                    if (y[i] == x[i]) continue;
                    const double fy = eval_point(y);
                    if (fy < best_f) {
                        best_f = fy;
                        best_x = y;
                    }
                    if (res.evals_used >= eval_cap) break;
                }
            }
            if (best_f < fx - 1e-12) {
                fx = best_f;
                x = best_x;
            } else {
                step *= search.pattern_shrink;
            }
        }
    };

    // The most forgiving corner of the box: smallest electrolyzer fleet,
    // highest operating pressure, largest storage, smallest nominal feed.
    // Always competes as an opening candidate; it is the feasible basin for
    // stand-alone scenarios with weak opening hours and for downsized
    // storage-heavy plants that the midpoint cannot see.
    auto forgiving_corner = [&] {
        std::vector<double> corner(dims, 0.5);
        std::size_t i = 0;
        corner[i++] = 0.0;  // module count
        corner[i++] = 1.0;  // operating pressure
        corner[i++] = 1.0;  // pressure ratio
        if (has_battery(topo)) corner[i++] = 1.0;
        if (has_vessel(topo)) {
            corner[i++] = 1.0;  // volume
            corner[i++] = 0.0;  // nominal feed
        }
        return corner;
    };

    // Warm starts from related runs come first; the best of them competes
    // with the midpoint as the opening pattern-search point.
    std::optional<std::pair<std::vector<double>, double>> warm_best;
    for (const PlantDesign& w : search.warm_starts) {
        if (w.topology != topo || res.evals_used >= search.max_evals) continue;
        std::vector<double> x = detail::encode_design(w, box);
        const double fx = eval_point(x);
        if (!warm_best || fx < warm_best->second) warm_best = {std::move(x), fx};
    }

    // Start plan: the first start descends from the midpoint or the best
    // donated design; the second from the forgiving corner (its basin holds
    // the downsized storage-heavy optima that opening-value comparisons
    // miss); the rest are seeded random points. The evaluation budget is
    // sliced evenly across the planned starts, with leftovers going to the
    // last one. A single-start search still falls back to the corner when
    // its opening is infeasible.
    std::mt19937 rng(search.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const int n_starts = std::max(1, search.multistart_count);
    const int per_start = std::max(3, search.max_evals / n_starts);
    bool corner_started = false;
    for (int start = 0; start < n_starts; ++start) {
        int eval_cap = start + 1 == n_starts
                           ? search.max_evals
                           : std::min(search.max_evals, (start + 1) * per_start);
        std::vector<double> x(dims, 0.5);
        double fx = kInf;
        if (start == 0) {
            fx = eval_point(x);
            if (warm_best && warm_best->second < fx) {
                x = warm_best->first;
                fx = warm_best->second;
            }
            if (fx == kInf && res.evals_used < eval_cap) {
                std::vector<double> corner = forgiving_corner();
                const double fc = eval_point(corner);
                if (fc < fx) {
                    x = std::move(corner);
                    fx = fc;
                    corner_started = true;
                    // Every regular opening was infeasible: the corner
                    // basin is likely the only one, so spend the whole
                    // budget descending it.
                    eval_cap = search.max_evals;
                }
            }
        } else if (start == 1 && !corner_started) {
            x = forgiving_corner();
            fx = eval_point(x);
            corner_started = true;
        } else {
            for (auto& xi : x) xi = u01(rng);
            fx = eval_point(x);
        }
        pattern_from(std::move(x), fx, eval_cap);
        if (res.evals_used >= search.max_evals) break;
    }

    if (incumbent.c_meoh == kInf) {
        res.reason = "no feasible design found in the search box";
        return res;
    }
    res.feasible = true;
    res.design = incumbent.design;
    res.schedule = incumbent.sched.schedule;
    res.trajectory = incumbent.sched.trajectory;
    res.cost_report = incumbent.report;
    res.objective = incumbent.c_meoh;
    return res;
}

}  // namespace p2m
