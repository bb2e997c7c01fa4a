// SPDX-License-Identifier: Apache-2.0
//
// fdacov: near-field FDA covert-region simulation and optimization
// Copyright (C) 2026 The fdacov authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#ifndef FDACOV_CONFIG_HPP
#define FDACOV_CONFIG_HPP

#include "channel.hpp"
#include "covertness.hpp"
#include "ellipse.hpp"
#include "fieldmap.hpp"
#include "geometry.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace fdacov {

inline constexpr std::string_view version = "1.0.0";

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// All experiment inputs. Units live in the key names; angles are degrees
// here and radians everywhere else. Defaults reproduce the reference
// scenario except for the 0.05 m grid step.
struct ExperimentConfig {
    // [geometry]
    std::size_t n_antennas = 64;
    double carrier_hz = 3e9;
    std::string spacing_mode = "half_wavelength"; // or "custom"
    double spacing_m = 0.0;                       // used when spacing_mode = custom

    // [plan]
    std::string scheme = "all"; // a scheme name or "all"
    double f_delta_hz = 1e6;
    std::uint64_t seed = 1;     // random_fda plan for single-plan outputs
    std::optional<double> box_half_width_hz; // unset: f_delta_hz / 2

    // [bob]
    double bob_r_m = 7.0711;
    double bob_theta_deg = 45.0;

    // [budget]
    double p_t_dbm = 20.0;
    double sigma_b_dbm = -60.0;
    double sigma_w_dbm = -60.0;
    double epsilon = 1.0;
    std::uint64_t blocklength = 100;
    double delta_fep = 1e-5;

    // [grid]
    GridSpec grid;

    // [threshold]
    ThresholdMode threshold_mode = ThresholdMode::fraction;
    double threshold_value = 0.1; // fraction of Bob's beampattern; ignored in kl mode

    // [sweep]
    std::vector<std::uint64_t> n_values{16, 32, 64};
    std::vector<double> f_delta_values_hz{0.25e6, 0.5e6, 1e6, 2e6};
    std::vector<Scheme> schemes{all_schemes.begin(), all_schemes.end()};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

    // [mc]
    std::uint64_t mc_samples = 100'000;
    std::uint64_t mc_seed = 7;

    // [solver]
    SolverConfig solver;
};

namespace detail {

inline std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const auto piece = trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (!piece.empty())
            out.push_back(piece);
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}

inline double parse_double(std::string_view s)
{
    const auto t = trim(s);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
        throw ConfigError("expected a finite number, got '" + t + "'");
    return v;
}

inline std::uint64_t parse_uint(std::string_view s)
{
    const auto t = trim(s);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
        throw ConfigError("expected a non-negative integer, got '" + t + "'");
    return v;
}

inline bool parse_bool(std::string_view s)
{
    const auto t = trim(s);
    if (t == "true" || t == "1" || t == "yes")
        return true;
    if (t == "false" || t == "0" || t == "no")
        return false;
    throw ConfigError("expected true or false, got '" + t + "'");
}

} // namespace detail

// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

struct ConfigKey {
    std::string name; // section.key
    std::function<void(ExperimentConfig&, std::string_view)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

inline const std::vector<ConfigKey>& config_keys()
{
    using C = ExperimentConfig;
    using detail::parse_double;
    using detail::parse_uint;
    auto num = [](double C::*m) {
        return std::pair{std::function<void(C&, std::string_view)>([m](C& c, std::string_view v) { c.*m = parse_double(v); }),
                         std::function<std::string(const C&)>([m](const C& c) { return format_double(c.*m); })};
    };
    auto uint = [](std::uint64_t C::*m) {
        return std::pair{std::function<void(C&, std::string_view)>([m](C& c, std::string_view v) { c.*m = parse_uint(v); }),
                         std::function<std::string(const C&)>([m](const C& c) { return std::to_string(c.*m); })};
    };
    auto grid = [](double GridSpec::*m) {
        return std::pair{std::function<void(C&, std::string_view)>([m](C& c, std::string_view v) { c.grid.*m = parse_double(v); }),
                         std::function<std::string(const C&)>([m](const C& c) { return format_double(c.grid.*m); })};
    };
    auto key = [](std::string name, auto accessors) {
        return ConfigKey{std::move(name), std::move(accessors.first), std::move(accessors.second)};
    };
    auto join = [](const auto& xs, auto fmt) {
        std::string out;
        for (const auto& x : xs) {
            if (!out.empty())
                out += ",";
            out += fmt(x);
        }
        return out;
    };

    static const std::vector<ConfigKey> keys = [&] {
        std::vector<ConfigKey> k;
        k.push_back({"geometry.n_antennas",
                     [](C& c, std::string_view v) { c.n_antennas = static_cast<std::size_t>(parse_uint(v)); },
                     [](const C& c) { return std::to_string(c.n_antennas); }});
        k.push_back(key("geometry.carrier_hz", num(&C::carrier_hz)));
        k.push_back({"geometry.spacing_mode",
                     [](C& c, std::string_view v) {
                         auto t = detail::trim(v);
                         if (t != "half_wavelength" && t != "custom")
                             throw ConfigError("expected half_wavelength or custom, got '" + t + "'");
                         c.spacing_mode = t;
                     },
                     [](const C& c) { return c.spacing_mode; }});
        k.push_back(key("geometry.spacing_m", num(&C::spacing_m)));
        k.push_back({"plan.scheme",
                     [](C& c, std::string_view v) {
                         auto t = detail::trim(v);
                         if (t != "all" && !parse_scheme(t))
                             throw ConfigError("unknown scheme '" + t + "'");
                         c.scheme = t;
                     },
                     [](const C& c) { return c.scheme; }});
        k.push_back(key("plan.f_delta_hz", num(&C::f_delta_hz)));
        k.push_back(key("plan.seed", uint(&C::seed)));
        k.push_back({"plan.box_half_width_hz",
                     [](C& c, std::string_view v) {
                         auto t = detail::trim(v);
                         if (t.empty() || t == "auto")
                             c.box_half_width_hz.reset();
                         else
                             c.box_half_width_hz = parse_double(t);
                     },
                     [](const C& c) { return c.box_half_width_hz ? format_double(*c.box_half_width_hz) : std::string("auto"); }});
        k.push_back(key("bob.r_m", num(&C::bob_r_m)));
        k.push_back(key("bob.theta_deg", num(&C::bob_theta_deg)));
        k.push_back(key("budget.p_t_dbm", num(&C::p_t_dbm)));
        k.push_back(key("budget.sigma_b_dbm", num(&C::sigma_b_dbm)));
        k.push_back(key("budget.sigma_w_dbm", num(&C::sigma_w_dbm)));
        k.push_back(key("budget.epsilon", num(&C::epsilon)));
        k.push_back(key("budget.blocklength", uint(&C::blocklength)));
        k.push_back(key("budget.delta_fep", num(&C::delta_fep)));
        k.push_back(key("grid.x_min_m", grid(&GridSpec::x_min)));
        k.push_back(key("grid.x_max_m", grid(&GridSpec::x_max)));
        k.push_back(key("grid.y_min_m", grid(&GridSpec::y_min)));
        k.push_back(key("grid.y_max_m", grid(&GridSpec::y_max)));
        k.push_back(key("grid.step_m", grid(&GridSpec::step)));
        k.push_back({"grid.max_points",
                     [](C& c, std::string_view v) { c.grid.max_points = static_cast<std::size_t>(parse_uint(v)); },
                     [](const C& c) { return std::to_string(c.grid.max_points); }});
        k.push_back({"threshold.mode",
                     [](C& c, std::string_view v) {
                         auto t = detail::trim(v);
                         if (t == "fraction")
                             c.threshold_mode = ThresholdMode::fraction;
                         else if (t == "kl")
                             c.threshold_mode = ThresholdMode::kl;
                         else
                             throw ConfigError("expected fraction or kl, got '" + t + "'");
                     },
                     [](const C& c) { return std::string(c.threshold_mode == ThresholdMode::fraction ? "fraction" : "kl"); }});
        k.push_back(key("threshold.value", num(&C::threshold_value)));
        k.push_back({"sweep.n_values",
                     [](C& c, std::string_view v) {
                         c.n_values.clear();
                         for (const auto& s : detail::split_list(v))
                             c.n_values.push_back(parse_uint(s));
                     },
                     [join](const C& c) { return join(c.n_values, [](auto x) { return std::to_string(x); }); }});
        k.push_back({"sweep.f_delta_values_hz",
                     [](C& c, std::string_view v) {
                         c.f_delta_values_hz.clear();
                         for (const auto& s : detail::split_list(v))
                             c.f_delta_values_hz.push_back(parse_double(s));
                     },
                     [join](const C& c) { return join(c.f_delta_values_hz, [](double x) { return format_double(x); }); }});
        k.push_back({"sweep.schemes",
                     [](C& c, std::string_view v) {
                         c.schemes.clear();
                         for (const auto& s : detail::split_list(v)) {
                             const auto sc = parse_scheme(s);
                             if (!sc)
                                 throw ConfigError("unknown scheme '" + s + "'");
                             c.schemes.push_back(*sc);
                         }
                     },
                     [join](const C& c) { return join(c.schemes, [](Scheme s) { return std::string(to_string(s)); }); }});
        k.push_back({"sweep.seeds",
                     [](C& c, std::string_view v) {
                         c.seeds.clear();
                         for (const auto& s : detail::split_list(v))
                             c.seeds.push_back(parse_uint(s));
                     },
                     [join](const C& c) { return join(c.seeds, [](auto x) { return std::to_string(x); }); }});
        k.push_back(key("mc.n_samples", uint(&C::mc_samples)));
        k.push_back(key("mc.seed", uint(&C::mc_seed)));
        k.push_back({"solver.max_iterations",
                     [](C& c, std::string_view v) { c.solver.max_iterations = static_cast<std::size_t>(parse_uint(v)); },
                     [](const C& c) { return std::to_string(c.solver.max_iterations); }});
        k.push_back({"solver.tolerance", [](C& c, std::string_view v) { c.solver.tolerance = parse_double(v); },
                     [](const C& c) { return format_double(c.solver.tolerance); }});
        k.push_back({"solver.random_starts",
                     [](C& c, std::string_view v) { c.solver.random_starts = static_cast<std::size_t>(parse_uint(v)); },
                     [](const C& c) { return std::to_string(c.solver.random_starts); }});
        k.push_back({"solver.seed", [](C& c, std::string_view v) { c.solver.seed = parse_uint(v); },
                     [](const C& c) { return std::to_string(c.solver.seed); }});
        k.push_back({"solver.vertex_polish", [](C& c, std::string_view v) { c.solver.vertex_polish = detail::parse_bool(v); },
                     [](const C& c) { return std::string(c.solver.vertex_polish ? "true" : "false"); }});
        return k;
    }();
    return keys;
}

// Where each key was last set, for error messages.
using KeyOrigins = std::map<std::string, std::string>;

inline void set_config_value(ExperimentConfig& cfg, const std::string& name, std::string_view value,
                             const std::string& origin, KeyOrigins* origins = nullptr)
{
    for (const auto& k : config_keys()) {
        if (k.name != name)
            continue;
        try {
            k.set(cfg, value);
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ": " + name + ": " + e.what());
        }
        if (origins)
            (*origins)[name] = origin;
        return;
    }
    throw ConfigError(origin + ": unknown key '" + name + "'");
}

// Flat INI: [section] headers, key = value lines, '#' or ';' comments.
inline void apply_config_text(ExperimentConfig& cfg, std::istream& in, const std::string& source,
                              KeyOrigins* origins = nullptr)
{
    std::string line;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = source + ":" + std::to_string(lineno);
        auto hash = line.find_first_of("#;");
        const auto text = detail::trim(std::string_view(line).substr(0, hash));
        if (text.empty())
            continue;
        if (text.front() == '[') {
            if (text.back() != ']')
                throw ConfigError(where + ": malformed section header '" + text + "'");
            section = detail::trim(std::string_view(text).substr(1, text.size() - 2));
            if (section.empty())
                throw ConfigError(where + ": empty section name");
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected 'key = value', got '" + text + "'");
        const auto key = detail::trim(std::string_view(text).substr(0, eq));
        const auto value = std::string_view(text).substr(eq + 1);
        if (section.empty())
            throw ConfigError(where + ": key '" + key + "' outside any [section]");
        set_config_value(cfg, section + "." + key, value, where, origins);
    }
}

inline ExperimentConfig load_config_file(const std::string& path, KeyOrigins* origins = nullptr)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path + ": cannot open config file");
    ExperimentConfig cfg;
    apply_config_text(cfg, in, path, origins);
    return cfg;
}

// "section.key=value"
inline void apply_override(ExperimentConfig& cfg, std::string_view assignment, KeyOrigins* origins = nullptr)
{
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos)
        throw ConfigError("override '" + std::string(assignment) + "': expected section.key=value");
    set_config_value(cfg, detail::trim(assignment.substr(0, eq)), assignment.substr(eq + 1),
                     "override '" + std::string(assignment) + "'", origins);
}

// Canonical "section.key = value" listing in registry order.
inline std::vector<std::string> canonical_lines(const ExperimentConfig& cfg)
{
    std::vector<std::string> out;
    for (const auto& k : config_keys())
        out.push_back(k.name + " = " + k.get(cfg));
    return out;
}

inline std::uint64_t fnv1a64(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string config_hash(const ExperimentConfig& cfg)
{
    std::string text;
    for (const auto& l : canonical_lines(cfg))
        text += l + "\n";
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << fnv1a64(text);
    return os.str();
}

// Rebuilds a configuration from the "# cfg " lines of an emitted file.
inline ExperimentConfig config_from_metadata(std::istream& in, const std::string& source)
{
    ExperimentConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    bool any = false;
    while (std::getline(in, line)) {
        ++lineno;
        static constexpr std::string_view tag = "# cfg ";
        if (line.rfind(tag, 0) != 0)
            continue;
        const auto body = std::string_view(line).substr(tag.size());
        const auto eq = body.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(source + ":" + std::to_string(lineno) + ": malformed metadata line");
        set_config_value(cfg, detail::trim(body.substr(0, eq)), body.substr(eq + 1),
                         source + ":" + std::to_string(lineno));
        any = true;
    }
    if (!any)
        throw ConfigError(source + ": no embedded configuration found");
    return cfg;
}

inline ArrayGeometry make_geometry(const ExperimentConfig& c)
{
    return ArrayGeometry(c.n_antennas, c.carrier_hz, c.spacing_mode == "custom" ? c.spacing_m : 0.0);
}

inline PolarPoint bob_location(const ExperimentConfig& c) { return {c.bob_r_m, degrees_to_radians(c.bob_theta_deg)}; }

inline LinkBudget link_budget(const ExperimentConfig& c)
{
    return {dbm_to_watts(c.p_t_dbm), dbm_to_watts(c.sigma_b_dbm), dbm_to_watts(c.sigma_w_dbm), c.blocklength, c.delta_fep};
}

inline CovertnessBudget covertness_budget(const ExperimentConfig& c)
{
    return {c.epsilon, c.blocklength, dbm_to_watts(c.sigma_w_dbm), dbm_to_watts(c.p_t_dbm)};
}

inline Threshold threshold(const ExperimentConfig& c)
{
    if (c.threshold_mode == ThresholdMode::kl)
        return {ThresholdMode::kl, detection_threshold(covertness_budget(c))};
    return {ThresholdMode::fraction, c.threshold_value};
}

inline Scenario scenario(const ExperimentConfig& c)
{
    Scenario s;
    s.n_antennas = c.n_antennas;
    s.carrier_hz = c.carrier_hz;
    s.spacing_m = c.spacing_mode == "custom" ? c.spacing_m : 0.0;
    s.f_delta_hz = c.f_delta_hz;
    s.bob = bob_location(c);
    s.grid = c.grid;
    s.threshold = threshold(c);
    s.box_half_width_hz = c.box_half_width_hz;
    s.solver = c.solver;
    return s;
}

inline std::vector<Scheme> selected_schemes(const ExperimentConfig& c)
{
    if (c.scheme == "all")
        return {all_schemes.begin(), all_schemes.end()};
    return {*parse_scheme(c.scheme)};
}

// Checks every value against the library preconditions before any
// computation; messages cite where the offending key was set.
inline void validate_config(const ExperimentConfig& c, const KeyOrigins& origins = {})
{
    auto fail = [&](const std::string& key, const std::string& why) {
        const auto it = origins.find(key);
        const std::string where = it != origins.end() ? it->second + ": " : std::string("default value: ");
        throw ConfigError(where + key + ": " + why);
    };
    auto wrap = [&](const std::string& key, auto&& check) {
        try {
            check();
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            fail(key, e.what());
        }
    };
    if (c.n_antennas < 2)
        fail("geometry.n_antennas", "need at least 2 antennas");
    if (!(c.carrier_hz > 0.0))
        fail("geometry.carrier_hz", "must be > 0");
    if (c.spacing_mode == "custom" && !(c.spacing_m > 0.0))
        fail("geometry.spacing_m", "custom spacing must be > 0");
    if (!(c.f_delta_hz >= 0.0))
        fail("plan.f_delta_hz", "must be >= 0");
    if (c.box_half_width_hz && !(*c.box_half_width_hz > 0.0))
        fail("plan.box_half_width_hz", "must be > 0");
    wrap("bob.r_m", [&] { validate(bob_location(c)); });
    if (std::abs(std::cos(degrees_to_radians(c.bob_theta_deg))) < 1e-12)
        fail("bob.theta_deg", "Bob at endfire is not supported");
    if (!(c.epsilon > 0.0))
        fail("budget.epsilon", "must be > 0");
    if (c.blocklength < 1)
        fail("budget.blocklength", "must be >= 1");
    if (!(c.delta_fep > 0.0 && c.delta_fep < 1.0))
        fail("budget.delta_fep", "must lie in (0, 1)");
    wrap("grid.step_m", [&] { validate(c.grid); });
    if (c.threshold_mode == ThresholdMode::fraction && !(c.threshold_value > 0.0 && c.threshold_value <= 1.0))
        fail("threshold.value", "fractional threshold must lie in (0, 1]");
    if (c.n_values.size() < 2)
        fail("sweep.n_values", "need at least two values");
    for (auto n : c.n_values)
        if (n < 2)
            fail("sweep.n_values", "antenna counts must be >= 2");
    if (c.f_delta_values_hz.size() < 2)
        fail("sweep.f_delta_values_hz", "need at least two values");
    for (double f : c.f_delta_values_hz)
        if (!(f > 0.0))
            fail("sweep.f_delta_values_hz", "increments must be > 0");
    if (c.schemes.empty())
        fail("sweep.schemes", "need at least one scheme");
    if (c.seeds.empty())
        fail("sweep.seeds", "need at least one seed");
    if (c.mc_samples < 1)
        fail("mc.n_samples", "must be >= 1");
    if (c.solver.max_iterations < 1)
        fail("solver.max_iterations", "must be >= 1");
    if (!(c.solver.tolerance > 0.0))
        fail("solver.tolerance", "must be > 0");
    const bool optimized = c.scheme == "all" || c.scheme == "optimized_fda";
    if (optimized && !(c.f_delta_hz > 0.0) && !c.box_half_width_hz)
        fail("plan.f_delta_hz", "optimized_fda needs f_delta_hz > 0 or an explicit box_half_width_hz");
}

} // namespace fdacov

#endif
