#include <catch2/catch.hpp>

#include <random>

#include "p2m/economics.hpp"

using namespace p2m;

namespace {
const PlantParams kParams;
const EconParams kEcon;
}  // namespace

TEST_CASE("capex_battery") {
    CHECK(capex_battery(0.0, kEcon) == 0.0);
    CHECK(capex_battery(100.0, kEcon) == Approx(26.35));
    CHECK(capex_battery(115.0, kEcon) == Approx(30.3025));
    CHECK_THROWS(capex_battery(-1.0, kEcon));
}

TEST_CASE("capex_electrolyzer") {
    SECTION("constant specific cost, 40 modules") {
        const auto c = capex_electrolyzer(40, kParams.pem, kEcon);
        CHECK(c.initial == Approx(140.0));      // 80 MW * 1000 EUR/kW * 1.75
        CHECK(c.replacement == Approx(80.0));   // stack purchase, no install factor
    }
    SECTION("zero cost function") {
        EconParams e = kEcon;
        e.pem_specific_cost_fn = [](double) { return 0.0; };
        CHECK(capex_electrolyzer(40, kParams.pem, e).initial == 0.0);
    }
    SECTION("linearity under a constant specific cost") {
        const auto c10 = capex_electrolyzer(10, kParams.pem, kEcon);
        const auto c40 = capex_electrolyzer(40, kParams.pem, kEcon);
        CHECK(c40.initial == Approx(4.0 * c10.initial));
    }
    SECTION("pluggable correlation receives the nominal power") {
        EconParams e = kEcon;
        e.pem_specific_cost_fn = [](double p_nom_mw) { return 10.0 * p_nom_mw; };
        const auto c = capex_electrolyzer(10, kParams.pem, e);
        // 20 MW * 1000 kW/MW * 200 EUR/kW * 1.75 / 1e6
        CHECK(c.initial == Approx(7.0));
    }
}

TEST_CASE("capex_vessel") {
    CHECK(capex_vessel(0.0, kEcon) == 0.0);
    CHECK(capex_vessel(1000.0, kEcon) == Approx(6.63));
    CHECK(capex_vessel(4730.0, kEcon) == Approx(31.3599));
}

TEST_CASE("capex_meoh six-tenths scaling") {
    CHECK(capex_meoh_from_capacity(80000.0, kEcon) == 27.8);
    CHECK(capex_meoh_from_capacity(40000.0, kEcon) == Approx(18.34).epsilon(1e-3));
    CHECK(capex_meoh_from_capacity(160000.0, kEcon) == Approx(42.15).epsilon(1e-3));
    // The t/h entry point uses 48 weeks of operation per year.
    CHECK(capex_meoh(80000.0 / 8064.0, kEcon) == Approx(27.8));
    CHECK_THROWS(capex_meoh_from_capacity(0.0, kEcon));
}

TEST_CASE("capex_compressor power law") {
    CHECK(capex_compressor(0.0, 3.5, 40.0, kParams.comp, kEcon) == 0.0);
    SECTION("doubling the flow doubles the power, scaling cost by 2^c1") {
        const double c1 = capex_compressor(1.0, 3.0, 40.0, kParams.comp, kEcon);
        const double c2 = capex_compressor(2.0, 3.0, 40.0, kParams.comp, kEcon);
        CHECK(c2 / c1 == Approx(std::pow(2.0, 0.7)).epsilon(1e-12));
    }
    SECTION("degenerate exponent c1 = 1 is proportional") {
        EconParams e = kEcon;
        e.comp_cost_c1 = 1.0;
        const double c1 = capex_compressor(1.0, 3.0, 40.0, kParams.comp, e);
        const double c2 = capex_compressor(3.0, 3.0, 40.0, kParams.comp, e);
        CHECK(c2 / c1 == Approx(3.0).epsilon(1e-12));
    }
}

namespace {

Trajectory one_hour_trajectory(double drawn, double sold = 0.0, double cooling = 0.0,
                               double co2 = 0.0, double meoh = 0.0) {
    Trajectory t;
    HourRecord h;
    h.elec_drawn = drawn;
    h.elec_sold = sold;
    h.pem_cooling = cooling;
    h.co2_rate = co2;
    h.meoh_rate = meoh;
    t.hours.push_back(h);
    return t;
}

Scenario one_hour_scenario(Mode mode, double value) {
    Scenario s;
    s.mode = mode;
    s.values = {value};
    return s;
}

}  // namespace

TEST_CASE("opex_period") {
    SECTION("100 MW for one hour at 100 EUR/MWh") {
        const auto traj = one_hour_trajectory(100.0);
        const auto o = opex_period(traj, one_hour_scenario(Mode::GridConnected, 100.0), kEcon);
        CHECK(o.electricity_buy == Approx(10000.0));
        CHECK(o.electricity_sell == 0.0);
    }
    SECTION("zero price leaves only cooling and CO2 terms") {
        const auto traj = one_hour_trajectory(100.0, 0.0, 30.0, 5.0, 3.0);
        const auto o = opex_period(traj, one_hour_scenario(Mode::GridConnected, 0.0), kEcon);
        CHECK(o.electricity_buy == 0.0);
        CHECK(o.cooling == Approx(30.0));
        CHECK(o.co2 == Approx(250.0));
    }
    SECTION("stand-alone electricity is free") {
        const auto traj = one_hour_trajectory(100.0, 0.0, 30.0, 5.0, 3.0);
        const auto o = opex_period(traj, one_hour_scenario(Mode::StandAlone, 100.0), kEcon);
        CHECK(o.electricity_buy == 0.0);
        CHECK(o.electricity_sell == 0.0);
        CHECK(o.cooling > 0.0);
        CHECK(o.co2 > 0.0);
    }
    SECTION("infeasible trajectories rejected") {
        auto traj = one_hour_trajectory(100.0);
        traj.hours[0].violations.push_back({0, ViolationType::PemWindow, 0.0, 0.0});
        traj.violation_count = 1;
        CHECK_THROWS(opex_period(traj, one_hour_scenario(Mode::GridConnected, 10.0), kEcon));
    }
}

TEST_CASE("annualization") {
    CHECK(annualize_factor(1440.0, kEcon) == 5.6);  // 8064 / 1440 exactly
    CHECK(annualize_factor(8064.0, kEcon) == 1.0);
    CHECK_THROWS(annualize_factor(0.0, kEcon));
    SECTION("zero production stays zero") {
        OpexBreakdown o;
        CHECK(annualize(o, 0.0, 1440.0, kEcon).meoh_t == 0.0);
    }
    SECTION("scales linearly") {
        OpexBreakdown o;
        o.electricity_buy = 1e6;
        const auto a = annualize(o, 1000.0, 4032.0, kEcon);
        CHECK(a.opex_buy == Approx(2.0));
        CHECK(a.meoh_t == Approx(2000.0));
    }
}

TEST_CASE("annuity factor") {
    CHECK(annuity_factor(0.05, 20) == Approx(12.4622).margin(1e-4));
    CHECK(annuity_factor(0.0, 7) == Approx(7.0));
}

TEST_CASE("c_meoh") {
    SECTION("degenerate annuity: i = 0, one year, no replacement") {
        EconParams e = kEcon;
        e.discount_rate = 0.0;
        e.lifetime_years = 1;
        // (10 + 5) MEUR over 2 kt -> 7.5 EUR/kg
        CHECK(c_meoh(10.0, 0.0, 2.0, 3.0, 2000.0, e) == Approx(7.5));
    }
    SECTION("frozen hand-computed example") {
        // (133 + 52.65 * 12.4622) / (80.3 * 12.4622)
        CHECK(c_meoh(133.0, 0.0, 0.0, 52.65, 80300.0, kEcon) == Approx(0.78857).margin(2e-4));
    }
    SECTION("homogeneity: doubling costs and production cancels") {
        const double a = c_meoh(100.0, 20.0, 5.0, 30.0, 50000.0, kEcon);
        const double b = c_meoh(200.0, 40.0, 10.0, 60.0, 100000.0, kEcon);
        CHECK(a == Approx(b).epsilon(1e-12));
    }
    SECTION("monotonicity") {
        std::mt19937 rng(71);
        std::uniform_real_distribution<double> u(0.5, 2.0);
        for (int rep = 0; rep < 30; ++rep) {
            const double capex = 100.0 * u(rng);
            const double opex = 30.0 * u(rng);
            const double meoh = 50000.0 * u(rng);
            const double base = c_meoh(capex, 0.0, 5.0, opex, meoh, kEcon);
            CHECK(c_meoh(capex * 1.1, 0.0, 5.0, opex, meoh, kEcon) > base);
            CHECK(c_meoh(capex, 0.0, 5.0, opex * 1.1, meoh, kEcon) > base);
            CHECK(c_meoh(capex, 0.0, 5.0, opex, meoh * 1.1, kEcon) < base);
        }
    }
    SECTION("zero production rejected") {
        CHECK_THROWS(c_meoh(10.0, 0.0, 1.0, 1.0, 0.0, kEcon));
    }
}

TEST_CASE("build_cost_report ties the pieces together") {
    const auto design =
        make_design(Topology::None, 0.0, 40, 40.0, 1.88, 0.0, 0.0, kParams.pem);
    Scenario scen;
    scen.mode = Mode::GridConnected;
    scen.values.assign(168, 50.0);
    Schedule sched;
    ScheduleDecision u;
    u.x_pem_on = true;
    u.p_grid_to_pem = 100.0;
    u.h2_to_meoh = design.h2_meoh_nom;
    sched.decisions.assign(168, u);
    const auto traj = simulate(design, scen, sched, FlexPolicy::none(), kParams);
    REQUIRE(feasible(traj));
    const auto r = build_cost_report(design, traj, scen, kParams, kEcon);

    CHECK(r.capex0 == Approx(r.capex_battery + r.capex_pem + r.capex_vessel + r.capex_meoh +
                             r.capex_comp));
    CHECK(r.capex_battery == 0.0);
    CHECK(r.capex_vessel == 0.0);
    CHECK(r.capex_pem == Approx(140.0));
    CHECK(r.om_y == Approx(0.05 * r.capex0));
    CHECK(r.opex_y == Approx(r.opex_buy_y - r.opex_sell_y + r.cooling_y + r.co2_y));
    CHECK(r.meoh_y_kt == Approx(9.93245 * 8064.0 / 1000.0).epsilon(1e-3));
    CHECK(r.c_meoh > 0.0);
    // Annualizing a k-fold replication of the same week changes nothing.
    Scenario scen2 = scen;
    Schedule sched2 = sched;
    for (int k = 0; k < 2; ++k) {
        scen2.values.insert(scen2.values.end(), scen.values.begin(), scen.values.end());
        sched2.decisions.insert(sched2.decisions.end(), sched.decisions.begin(),
                                sched.decisions.end());
    }
    const auto traj2 = simulate(design, scen2, sched2, FlexPolicy::none(), kParams);
    const auto r2 = build_cost_report(design, traj2, scen2, kParams, kEcon);
    CHECK(r2.c_meoh == Approx(r.c_meoh).epsilon(1e-9));
    CHECK(r2.meoh_y_kt == Approx(r.meoh_y_kt).epsilon(1e-9));
}
