#pragma once

// Hourly electricity-price and renewable-availability profiles: CSV load and
// save, synthetic generators for tests and experiments, and the hourly
// variation statistic used to characterize a profile.

#include <array>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "p2m/csv.hpp"

namespace p2m {

enum class Mode { GridConnected, StandAlone };

inline const char* to_string(Mode m) {
    return m == Mode::GridConnected ? "grid" : "standalone";
}

// One scheduling scenario with fixed hourly resolution. The value series is
// an electricity price in EUR/MWh (grid-connected) or an available renewable
// power in MW (stand-alone); exactly one interpretation is active per mode.
// Prices may be negative; available power may not.
struct Scenario {
    Mode mode = Mode::GridConnected;
    std::vector<double> values;
    double dt = 1.0;  // h
    std::string label;

    int steps() const { return static_cast<int>(values.size()); }
    double price(int t) const { return values[static_cast<std::size_t>(t)]; }
    double available_power(int t) const { return values[static_cast<std::size_t>(t)]; }
};

namespace detail {
inline void check_series(const Scenario& s) {
    if (s.mode == Mode::StandAlone) {
        for (std::size_t i = 0; i < s.values.size(); ++i)
            if (s.values[i] < 0.0)
                throw std::runtime_error("negative available power at hour " + std::to_string(i));
    }
}
}  // namespace detail

// Reads a `hour,value` CSV. Hours must be contiguous from 0; every value
// must parse as a decimal number.
inline Scenario load_scenario(const std::string& path, Mode mode) {
    auto lines = csv::read_lines(path);
    if (lines.empty()) throw std::runtime_error("empty scenario file: " + path);
    if (csv::trim(lines[0]) != "hour,value")
        throw std::runtime_error("bad header in " + path + " (expected 'hour,value')");

    Scenario s;
    s.mode = mode;
    s.label = path;
    long expected = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (csv::trim(lines[i]).empty()) continue;
        auto fields = csv::split(lines[i]);
        if (fields.size() != 2)
            throw std::runtime_error("bad row " + std::to_string(i) + " in " + path);
        long hour = csv::parse_int(fields[0], path + ":" + std::to_string(i));
        if (hour != expected)
            throw std::runtime_error("non-contiguous hours in " + path + " (got " +
                                     std::to_string(hour) + ", expected " +
                                     std::to_string(expected) + ")");
        s.values.push_back(csv::parse_number(fields[1], path + ":" + std::to_string(i)));
        ++expected;
    }
    if (s.values.empty()) throw std::runtime_error("no data rows in " + path);
    detail::check_series(s);
    return s;
}

inline std::string serialize_scenario(const Scenario& s) {
    std::string out = "hour,value\n";
    for (int t = 0; t < s.steps(); ++t) {
        out += std::to_string(t);
        out += ',';
        out += csv::format_exact(s.values[static_cast<std::size_t>(t)]);
        out += '\n';
    }
    return out;
}

inline void save_scenario(const Scenario& s, const std::string& path) {
    csv::write_file(path, serialize_scenario(s));
}

// Square wave alternating low/high every period_h/2 hours, optionally with
// seeded uniform jitter. Deterministic for fixed (args, seed).
inline Scenario synth_price_scenario(int steps, double low, double high, int period_h,
                                     unsigned seed, double jitter = 0.0) {
    if (steps < 1) throw std::invalid_argument("synth_price_scenario: steps < 1");
    if (period_h < 2) throw std::invalid_argument("synth_price_scenario: period_h < 2");
    if (low > high) throw std::invalid_argument("synth_price_scenario: low > high");
    if (jitter < 0.0) throw std::invalid_argument("synth_price_scenario: negative jitter");

    Scenario s;
    s.mode = Mode::GridConnected;
    s.label = "synth-price";
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> noise(-jitter, jitter);
    for (int t = 0; t < steps; ++t) {
        double base = (t % period_h) < period_h / 2.0 ? low : high;
        s.values.push_back(jitter > 0.0 ? base + noise(rng) : base);
    }
    return s;
}

// Daily half-sinusoid PV profile (zero between hours 18 and 6) plus a wind
// term in [0, wind_base]. Seed 0 selects a constant wind at wind_base, which
// gives a deterministic flat floor useful for tests.
inline Scenario synth_renewable_scenario(int steps, double pv_peak, double wind_base,
                                         unsigned seed) {
    if (steps < 24) throw std::invalid_argument("synth_renewable_scenario: steps < 24");
    if (pv_peak < 0.0 || wind_base < 0.0)
        throw std::invalid_argument("synth_renewable_scenario: negative scale");

    constexpr double pi = 3.14159265358979323846;
    Scenario s;
    s.mode = Mode::StandAlone;
    s.label = "synth-renewable";
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < steps; ++t) {
        int h = t % 24;
        double pv = (h > 6 && h < 18) ? pv_peak * std::sin(pi * (h - 6) / 12.0) : 0.0;
        double wind = (seed == 0) ? wind_base : wind_base * u(rng);
        s.values.push_back(pv + wind);
    }
    return s;
}

// Fractions of consecutive-hour variations, relative to the series mean,
// that fall at or below each threshold.
struct VariationStats {
    double frac_le_5pct = 0.0;
    double frac_le_10pct = 0.0;
    double frac_le_25pct = 0.0;
    double mean = 0.0;
};

inline VariationStats hourly_variation_stats(const Scenario& s,
                                             std::array<double, 3> thresholds = {0.05, 0.10,
                                                                                 0.25}) {
    if (s.steps() < 2) throw std::invalid_argument("hourly_variation_stats: need >= 2 steps");
    double mean = 0.0;
    for (double v : s.values) mean += v;
    mean /= s.steps();
    if (mean == 0.0) throw std::invalid_argument("hourly_variation_stats: zero-mean series");

    const int pairs = s.steps() - 1;
    std::array<int, 3> counts{0, 0, 0};
    for (int t = 1; t < s.steps(); ++t) {
        double rel = std::abs(s.values[static_cast<std::size_t>(t)] -
                              s.values[static_cast<std::size_t>(t - 1)]) /
                     std::abs(mean);
        for (int k = 0; k < 3; ++k)
            if (rel <= thresholds[static_cast<std::size_t>(k)]) ++counts[static_cast<std::size_t>(k)];
    }
    VariationStats out;
    out.frac_le_5pct = static_cast<double>(counts[0]) / pairs;
    out.frac_le_10pct = static_cast<double>(counts[1]) / pairs;
    out.frac_le_25pct = static_cast<double>(counts[2]) / pairs;
    out.mean = mean;
    return out;
}

}  // namespace p2m
