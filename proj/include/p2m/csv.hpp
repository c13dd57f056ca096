#pragma once

// Minimal CSV and number-formatting helpers shared by the loaders and the
// result writers. Parsing is strict and locale-independent: decimal point
// only, no thousands separators, the full field must be consumed.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace p2m::csv {

inline std::string trim(const std::string& s) {
    const char* ws = " \t\r\n";
    auto a = s.find_first_not_of(ws);
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(ws);
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

inline double parse_number(const std::string& field, const std::string& context) {
    const std::string s = trim(field);
    if (s.empty())
        throw std::runtime_error("empty numeric field (" + context + ")");
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw std::runtime_error("non-numeric value '" + s + "' (" + context + ")");
    return v;
}

inline long parse_int(const std::string& field, const std::string& context) {
    const std::string s = trim(field);
    long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw std::runtime_error("non-integer value '" + s + "' (" + context + ")");
    return v;
}

// Fixed formatting keeps repeated runs byte-identical.
inline std::string format(double v, const char* fmt = "%.10g") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

// Exact round-trip formatting (17 significant digits) for data files that
// must reproduce the stored doubles bit-for-bit when reloaded.
inline std::string format_exact(double v) { return format(v, "%.17g"); }

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

}  // namespace p2m::csv
