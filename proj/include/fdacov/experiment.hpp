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


#ifndef FDACOV_EXPERIMENT_HPP
#define FDACOV_EXPERIMENT_HPP

#include "channel.hpp"
#include "config.hpp"
#include "covertness.hpp"
#include "csv.hpp"
#include "ellipse.hpp"
#include "fieldmap.hpp"
#include "schemes.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace fdacov {

enum class Subcommand { heatmap, region, sweep_n, sweep_fdelta, rate, optimize, selftest };

inline std::optional<Subcommand> parse_subcommand(std::string_view s)
{
    if (s == "heatmap") return Subcommand::heatmap;
    if (s == "region") return Subcommand::region;
    if (s == "sweep-n") return Subcommand::sweep_n;
    if (s == "sweep-fdelta") return Subcommand::sweep_fdelta;
    if (s == "rate") return Subcommand::rate;
    if (s == "optimize") return Subcommand::optimize;
    if (s == "selftest") return Subcommand::selftest;
    return std::nullopt;
}

inline std::string_view to_string(Subcommand s)
{
    switch (s) {
    case Subcommand::heatmap: return "heatmap";
    case Subcommand::region: return "region";
    case Subcommand::sweep_n: return "sweep-n";
    case Subcommand::sweep_fdelta: return "sweep-fdelta";
    case Subcommand::rate: return "rate";
    case Subcommand::optimize: return "optimize";
    case Subcommand::selftest: return "selftest";
    }
    return "unknown";
}

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config_error = 1;
inline constexpr int runtime_error = 2;
inline constexpr int selftest_failure = 3;
} // namespace exit_code

struct RunOptions {
    std::filesystem::path out_dir = ".";
    unsigned threads = 0;
    std::optional<std::filesystem::path> plan_file; // offsets for optimized_fda, from `optimize`
    std::ostream* log = nullptr;
};

inline std::vector<std::string> run_metadata(const ExperimentConfig& cfg, Subcommand sub,
                                             const std::vector<std::string>& extra = {})
{
    std::vector<std::string> m{"fdacov " + std::string(version), "subcommand: " + std::string(to_string(sub)),
                               "config_hash: " + config_hash(cfg), "seed: " + std::to_string(cfg.seed)};
    m.insert(m.end(), extra.begin(), extra.end());
    for (const auto& l : canonical_lines(cfg))
        m.push_back("cfg " + l);
    return m;
}

inline std::vector<double> load_plan_offsets(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path.string() + ": cannot open plan file");
    nlohmann::json j;
    try {
        in >> j;
        return j.at("offsets_hz").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

inline FrequencyPlan resolve_plan(const ExperimentConfig& cfg, Scheme scheme, const RunOptions& opts)
{
    const auto s = scenario(cfg);
    if (scheme == Scheme::optimized_fda && opts.plan_file) {
        auto offsets = load_plan_offsets(*opts.plan_file);
        if (offsets.size() != cfg.n_antennas)
            throw ConfigError(opts.plan_file->string() + ": plan has " + std::to_string(offsets.size()) +
                              " offsets, configuration has " + std::to_string(cfg.n_antennas) + " antennas");
        return {std::move(offsets), cfg.f_delta_hz, Scheme::optimized_fda, std::nullopt};
    }
    return make_plan(s, scheme, cfg.seed);
}

inline void note(const RunOptions& opts, const std::string& msg)
{
    if (opts.log)
        *opts.log << msg << '\n';
}

inline void warn_plan(const ExperimentConfig& cfg, const FrequencyPlan& plan, const RunOptions& opts)
{
    if (exceeds_narrowband(make_geometry(cfg), plan))
        note(opts, "warning: " + std::string(to_string(plan.scheme)) + " offsets exceed f_c/100");
}

inline void warn_map(const FieldMap& map, const RunOptions& opts)
{
    if (map.rayleigh_violation)
        note(opts, "warning: grid extends beyond the Rayleigh distance; near-field model applied anyway");
    if (!map.focus_index)
        note(opts, "warning: Bob lies outside the grid");
}

inline double q_tilde_for(const ExperimentConfig& cfg)
{
    if (cfg.threshold_mode == ThresholdMode::fraction)
        return q_tilde_from_fraction(cfg.threshold_value);
    return q_tilde_from_gain_threshold(make_geometry(cfg), detection_threshold(covertness_budget(cfg)), cfg.bob_r_m);
}

inline void run_heatmap(const ExperimentConfig& cfg, const RunOptions& opts)
{
    const auto g = make_geometry(cfg);
    for (Scheme scheme : selected_schemes(cfg)) {
        const auto plan = resolve_plan(cfg, scheme, opts);
        warn_plan(cfg, plan, opts);
        const auto map = evaluate_grid(g, plan, bob_location(cfg), cfg.grid, opts.threads);
        warn_map(map, opts);
        const auto path = opts.out_dir / ("field_" + std::string(to_string(scheme)) + ".csv");
        const auto meta = run_metadata(cfg, Subcommand::heatmap, {"scheme: " + std::string(to_string(scheme))});
        write_atomic(path, [&](std::ostream& out) { emit_field_csv(out, map, meta); });
        note(opts, "wrote " + path.string());
    }
}

inline void run_region(const ExperimentConfig& cfg, const RunOptions& opts)
{
    const auto g = make_geometry(cfg);
    const auto bob = bob_location(cfg);
    const auto thr = threshold(cfg);
    CsvTable summary;
    summary.metadata = run_metadata(cfg, Subcommand::region);
    summary.header = {"scheme", "threshold_mode", "threshold_normalized", "noncovert_cells", "area_m2", "area_fraction",
                      "ellipse_objective", "ellipse_area_m_rad"};
    for (Scheme scheme : selected_schemes(cfg)) {
        const auto plan = resolve_plan(cfg, scheme, opts);
        warn_plan(cfg, plan, opts);
        const auto map = evaluate_grid(g, plan, bob, cfg.grid, opts.threads);
        warn_map(map, opts);
        const auto region = extract_noncovert(map, thr);
        const auto path = opts.out_dir / ("mask_" + std::string(to_string(scheme)) + ".csv");
        const auto meta = run_metadata(cfg, Subcommand::region, {"scheme: " + std::string(to_string(scheme))});
        write_atomic(path, [&](std::ostream& out) { emit_mask_csv(out, map, region, meta); });
        note(opts, "wrote " + path.string());

        const auto model = build_ellipse_model(g, plan, bob, q_tilde_for(cfg));
        const double objective = objective_and_gradient(g, bob, plan.offsets_hz).value;
        summary.rows.push_back({std::string(to_string(scheme)),
                                cfg.threshold_mode == ThresholdMode::fraction ? "fraction" : "kl",
                                format_double(region.threshold_normalized), std::to_string(region.cells),
                                format_double(region.area_m2), format_double(region.area_fraction),
                                format_double(objective),
                                model.degenerate ? "nan" : format_double(model.area)});
    }
    emit_csv(opts.out_dir / "region_summary.csv", summary);
    note(opts, "wrote " + (opts.out_dir / "region_summary.csv").string());
}

inline void run_sweep(const ExperimentConfig& cfg, SweepParameter parameter, const RunOptions& opts)
{
    const auto s = scenario(cfg);
    std::vector<double> values;
    if (parameter == SweepParameter::n_antennas)
        for (auto n : cfg.n_values)
            values.push_back(static_cast<double>(n));
    else
        values = cfg.f_delta_values_hz;
    const auto rows = sweep(s, parameter, values, cfg.schemes, cfg.seeds, opts.threads);

    const auto sub = parameter == SweepParameter::n_antennas ? Subcommand::sweep_n : Subcommand::sweep_fdelta;
    CsvTable t;
    t.metadata = run_metadata(cfg, sub);
    t.header = {std::string(to_string(parameter)), "scheme", "mean_area_fraction", "std_area_fraction", "mean_area_m2",
                "seeds"};
    for (const auto& r : rows)
        t.rows.push_back({format_double(r.value), std::string(to_string(r.scheme)), format_double(r.mean_fraction),
                          format_double(r.std_fraction), format_double(r.mean_area_m2), std::to_string(r.samples)});
    const auto path =
        opts.out_dir / (parameter == SweepParameter::n_antennas ? "sweep_n.csv" : "sweep_fdelta.csv");
    emit_csv(path, t);
    note(opts, "wrote " + path.string());
}

// Covert rate against N and against F; random_fda averages over the seed list.
inline void run_rate(const ExperimentConfig& cfg, const RunOptions& opts)
{
    const auto base = scenario(cfg);
    const auto budget = link_budget(cfg);
    CsvTable t;
    t.metadata = run_metadata(cfg, Subcommand::rate);
    t.header = {"parameter", "value", "scheme", "snr_bob", "rate_bob", "mean_area_fraction", "mc_mean_rate",
                "mc_std_error", "mc_samples", "seeds"};

    auto emit_rows = [&](SweepParameter p, const std::vector<double>& values) {
        for (double v : values) {
            const Scenario s = with_parameter(base, p, v);
            const auto g = s.geometry();
            for (Scheme scheme : cfg.schemes) {
                const std::size_t runs = scheme == Scheme::random_fda ? cfg.seeds.size() : 1;
                double snr = 0.0, rate = 0.0, frac = 0.0, mean = 0.0, var = 0.0;
                for (std::size_t r = 0; r < runs; ++r) {
                    const auto plan = make_plan(s, scheme, cfg.seeds[r]);
                    const auto map = evaluate_grid(g, plan, s.bob, s.grid, opts.threads);
                    const auto region = extract_noncovert(map, s.threshold);
                    const auto mc = monte_carlo_rate(map, region, budget, cfg.mc_samples, cfg.mc_seed);
                    snr += mc.snr_bob;
                    rate += mc.rate_outside;
                    frac += mc.area_fraction;
                    mean += mc.mean_rate;
                    var += mc.std_error * mc.std_error;
                }
                const double n = static_cast<double>(runs);
                t.rows.push_back({std::string(to_string(p)), format_double(v), std::string(to_string(scheme)),
                                  format_double(snr / n), format_double(rate / n), format_double(frac / n),
                                  format_double(mean / n), format_double(std::sqrt(var) / n),
                                  std::to_string(cfg.mc_samples), std::to_string(runs)});
            }
        }
    };
    std::vector<double> ns;
    for (auto n : cfg.n_values)
        ns.push_back(static_cast<double>(n));
    emit_rows(SweepParameter::n_antennas, ns);
    emit_rows(SweepParameter::f_delta, cfg.f_delta_values_hz);
    emit_csv(opts.out_dir / "rate.csv", t);
    note(opts, "wrote " + (opts.out_dir / "rate.csv").string());
}

inline void run_optimize(const ExperimentConfig& cfg, const RunOptions& opts)
{
    const auto g = make_geometry(cfg);
    const auto bob = bob_location(cfg);
    const double h = cfg.box_half_width_hz.value_or(cfg.f_delta_hz / 2.0);
    const auto sol = optimize_offsets(g, bob, h, cfg.f_delta_hz, cfg.solver);
    if (!sol.converged)
        note(opts, "warning: optimizer hit the iteration cap; reporting the best iterate");
    const FrequencyPlan plan{sol.offsets_hz, cfg.f_delta_hz, Scheme::optimized_fda, std::nullopt};
    const auto model = build_ellipse_model(g, plan, bob, q_tilde_for(cfg));

    nlohmann::ordered_json j;
    j["metadata"] = run_metadata(cfg, Subcommand::optimize);
    j["n_antennas"] = cfg.n_antennas;
    j["box_half_width_hz"] = h;
    j["objective"] = sol.objective;
    j["zero_plan_objective"] = sol.start_objectives.at(0);
    j["clipped_linear_objective"] = sol.start_objectives.at(1);
    j["start_objectives"] = sol.start_objectives;
    j["best_start"] = sol.best_start;
    j["iterations"] = sol.iterations;
    j["converged"] = sol.converged;
    j["g1"] = model.coeffs.g1;
    j["g2"] = model.coeffs.g2;
    j["g3"] = model.coeffs.g3;
    j["q_tilde"] = model.q_tilde;
    j["ellipse_area_m_rad"] = model.degenerate ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(model.area);
    j["offsets_hz"] = sol.offsets_hz;
    const auto path = opts.out_dir / "optimize.json";
    write_atomic(path, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
    note(opts, "wrote " + path.string());
}

struct SelftestCase {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Quick invariant checks on small instances; full coverage lives in the
// unit and acceptance suites.
inline std::vector<SelftestCase> selftest(const ExperimentConfig& cfg)
{
    std::vector<SelftestCase> out;
    auto add = [&](std::string name, bool ok, std::string detail) {
        out.push_back({std::move(name), ok, std::move(detail)});
    };
    const auto g = make_geometry(cfg);
    const auto bob = bob_location(cfg);

    {
        double worst = 0.0;
        for (double th : {-1.2, -0.3, 0.0, 0.7, 1.5})
            for (double r : {0.5, 3.0, 40.0})
                worst = std::max(worst, std::abs(fresnel_element_distance(g, 0, {r, th}) - r));
        add("fresnel_origin_element", worst == 0.0, "max |r_0 - r| = " + format_double(worst));
    }
    {
        double worst = 0.0;
        for (int i = 0; i <= 40; ++i) {
            const double y = std::pow(10.0, -8.0 + 9.0 * i / 40.0);
            worst = std::max(worst, std::abs(xi(xi_inv(y)) - y));
        }
        add("xi_roundtrip", worst <= 1e-10, "max error " + format_double(worst));
    }
    {
        const double snr = 1.98;
        const double r = covert_rate(snr, 100, 0.5).rate;
        add("rate_at_half_error_probability", r == std::log2(1.0 + snr), "rate " + format_double(r));
    }
    {
        const auto plan = linear_fda_plan(g, cfg.f_delta_hz > 0 ? cfg.f_delta_hz : 1e6);
        double s = 0.0;
        for (double f : plan.offsets_hz)
            s += f;
        add("linear_plan_zero_sum", std::abs(s) <= 1e-9 * plan.base_increment_hz * static_cast<double>(g.size()),
            "sum " + format_double(s));
    }
    {
        const auto plan = random_fda_plan(g, 1e6, 3);
        const auto c = g_coefficients(g, plan, bob);
        const auto psi = psi_vector(g, plan.offsets_hz, bob.r);
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t n = 0; n < psi.size(); ++n)
            for (std::size_t m = 0; m < psi.size(); ++m) {
                s1 += (psi[n] - psi[m]) * (psi[n] - psi[m]);
                s2 += (psi[n] - psi[m]) * (static_cast<double>(n) - static_cast<double>(m));
            }
        const double base = 4.0 * pi * pi / (speed_of_light * speed_of_light);
        const double fdc = g.carrier_hz() * g.spacing_m() * std::cos(bob.theta);
        const double e1 = std::abs(c.g1 - base * s1) / (base * s1);
        const double e2 = std::abs(c.g2 - base * fdc * s2) / std::abs(base * fdc * s2);
        add("g_coefficients_reduction", std::max(e1, e2) <= 1e-10, "rel error " + format_double(std::max(e1, e2)));
    }
    {
        const auto plan = random_fda_plan(g, 1e6, 5);
        const auto h_b = channel_vector(g, plan, bob);
        const auto w = mrt_weights(h_b);
        const double rel = std::abs(beam_gain(h_b, w) - h_b.squared_norm()) / h_b.squared_norm();
        add("mrt_focus_gain", rel <= 1e-12, "rel error " + format_double(rel));
    }
    {
        const auto plan = random_fda_plan(g, 1e6, 9);
        const auto hb = channel_vector(g, plan, bob, PhaseReference::absolute);
        const auto w = mrt_weights(hb);
        const double beta_b = path_gain(g, bob.r);
        UniformSource rng(11);
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const PolarPoint p{rng.open(1.0, 40.0), rng.open(-1.4, 1.4)};
            const double direct = beampattern_at(g, plan, bob, p);
            const double route = static_cast<double>(g.size()) * beta_b * beta_b *
                                 beam_gain(channel_vector(g, plan, p, PhaseReference::absolute), w);
            worst = std::max(worst, std::abs(direct - route) / direct);
        }
        add("beampattern_inner_product", worst <= 1e-12, "max rel error " + format_double(worst));
    }
    return out;
}

inline int run_selftest(const ExperimentConfig& cfg, const RunOptions& opts)
{
    const auto cases = selftest(cfg);
    std::ostringstream report;
    bool ok = true;
    for (const auto& c : cases) {
        report << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        ok = ok && c.passed;
    }
    const auto path = opts.out_dir / "selftest.txt";
    write_atomic(path, [&](std::ostream& out) {
        write_metadata(out, run_metadata(cfg, Subcommand::selftest));
        out << report.str();
    });
    std::cout << report.str();
    return ok ? exit_code::ok : exit_code::selftest_failure;
}

// Runs one subcommand; throws ConfigError for invalid input and other
// std::exception types for runtime failures.
inline int run(Subcommand sub, const ExperimentConfig& cfg, const RunOptions& opts)
{
    std::filesystem::create_directories(opts.out_dir);
    switch (sub) {
    case Subcommand::heatmap: run_heatmap(cfg, opts); break;
    case Subcommand::region: run_region(cfg, opts); break;
    case Subcommand::sweep_n: run_sweep(cfg, SweepParameter::n_antennas, opts); break;
    case Subcommand::sweep_fdelta: run_sweep(cfg, SweepParameter::f_delta, opts); break;
    case Subcommand::rate: run_rate(cfg, opts); break;
    case Subcommand::optimize: run_optimize(cfg, opts); break;
    case Subcommand::selftest: return run_selftest(cfg, opts);
    }
    return exit_code::ok;
}

} // namespace fdacov

#endif
