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


#ifndef FDACOV_FIELDMAP_HPP
#define FDACOV_FIELDMAP_HPP

#include "channel.hpp"
#include "covertness.hpp"
#include "ellipse.hpp"
#include "geometry.hpp"
#include "random.hpp"
#include "schemes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace fdacov {

// Receiver grid. Point (i, j) sits at (x_min + i step, y_min + j step) and
// stands for the step x step cell centred on it, so [0, 40] m at 0.05 m is
// 801 x 801 cells.
struct GridSpec {
    double x_min = 0.0;
    double x_max = 40.0;
    double y_min = 0.0;
    double y_max = 40.0;
    double step = 0.05;
    std::size_t max_points = 10'000'000;

    std::size_t nx() const { return static_cast<std::size_t>(std::llround((x_max - x_min) / step)) + 1; }
    std::size_t ny() const { return static_cast<std::size_t>(std::llround((y_max - y_min) / step)) + 1; }
    double x(std::size_t i) const { return x_min + static_cast<double>(i) * step; }
    double y(std::size_t j) const { return y_min + static_cast<double>(j) * step; }
};

inline void validate(const GridSpec& s)
{
    for (double v : {s.x_min, s.x_max, s.y_min, s.y_max, s.step})
        if (!std::isfinite(v))
            throw std::invalid_argument("grid: non-finite bound or step");
    if (!(s.x_max > s.x_min) || !(s.y_max > s.y_min))
        throw std::invalid_argument("grid: max must exceed min on both axes");
    if (!(s.step > 0.0))
        throw std::invalid_argument("grid: step must be > 0");
    const double points = (std::round((s.x_max - s.x_min) / s.step) + 1.0) * (std::round((s.y_max - s.y_min) / s.step) + 1.0);
    if (points > static_cast<double>(s.max_points))
        throw std::length_error("grid: " + std::to_string(static_cast<long long>(points)) +
                                " points exceed the cap of " + std::to_string(s.max_points));
}

inline unsigned default_thread_count()
{
    if (const char* env = std::getenv("FDACOV_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0)
            return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// Distance-angle beampattern of the MRT beam focused on Bob, observed at p:
//   B = | beta(r) beta(r_b) / N  sum_k exp(j 2 pi f_k / c [r_k(p) - r_k(bob)]) |^2
// with Fresnel element distances r_k.
inline double beampattern_at(const ArrayGeometry& g, const FrequencyPlan& plan, const PolarPoint& bob,
                             const PolarPoint& p)
{
    validate(g, plan);
    validate(bob);
    validate(p);
    const long double dr = static_cast<long double>(p.r) - bob.r;
    const long double dinv = 1.0L / p.r - 1.0L / bob.r;
    const long double dsin = std::sin(static_cast<long double>(p.theta)) - std::sin(static_cast<long double>(bob.theta));
    cplx acc{0.0, 0.0};
    for (std::size_t k = 0; k < g.size(); ++k) {
        const long double kd = static_cast<long double>(k) * g.spacing_m();
        const long double path = dr + kd * kd / 2.0L * dinv - kd * dsin;
        const double phase = detail::reduced_phase(static_cast<long double>(plan.frequency_hz(g, k)) / speed_of_light, path);
        acc += std::polar(1.0, phase);
    }
    const double amp = path_gain(g, p.r) * path_gain(g, bob.r) / static_cast<double>(g.size());
    return amp * amp * std::norm(acc);
}

// Converts a normalized beampattern value B / B(bob) into Willie's beam gain
// |h_w^H w|^2 = B / (N beta(r_b)^2).
inline double gain_from_normalized(const ArrayGeometry& g, const PolarPoint& bob, double normalized)
{
    const double beta = path_gain(g, bob.r);
    return normalized * beta * beta / static_cast<double>(g.size());
}

struct FieldMap {
    GridSpec spec;
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::vector<double> values;       // B / B(bob), row-major with y outer; NaN where invalid
    std::vector<std::uint8_t> valid;  // 0 at the array origin and behind the array (x < 0)
    std::size_t valid_count = 0;
    std::optional<std::size_t> focus_index; // cell containing Bob, sampled at Bob itself
    bool rayleigh_violation = false;  // some valid cell lies beyond the Rayleigh distance
    ArrayGeometry geometry{2, 1.0};
    FrequencyPlan plan;
    PolarPoint bob;

    std::size_t index(std::size_t i, std::size_t j) const { return j * nx + i; }
    double cell_area() const { return spec.step * spec.step; }
};

namespace detail {

struct PatternKernel {
    std::vector<double> a; // 2 pi f_k / c
    std::vector<double> b; // a_k (k d)^2 / 2
    std::vector<double> c; // -a_k k d
    double r_b = 1.0;
    double sin_b = 0.0;
    double inv_n2 = 1.0;

    PatternKernel(const ArrayGeometry& g, const FrequencyPlan& plan, const PolarPoint& bob)
        : a(g.size()), b(g.size()), c(g.size()), r_b(bob.r), sin_b(std::sin(bob.theta))
    {
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double kd = static_cast<double>(k) * g.spacing_m();
            a[k] = 2.0 * pi * plan.frequency_hz(g, k) / speed_of_light;
            b[k] = a[k] * kd * kd / 2.0;
            c[k] = -a[k] * kd;
        }
        const double n = static_cast<double>(g.size());
        inv_n2 = 1.0 / (n * n);
    }

    // B / B(bob) at (r, sin theta)
    double normalized(double r, double sin_theta) const
    {
        const double A = r - r_b;
        const double B = 1.0 / r - 1.0 / r_b;
        const double C = sin_theta - sin_b;
        double re = 0.0;
        double im = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            const double phase = a[k] * A + b[k] * B + c[k] * C;
            re += std::cos(phase);
            im += std::sin(phase);
        }
        const double ratio = r_b / r;
        return ratio * ratio * (re * re + im * im) * inv_n2;
    }
};

} // namespace detail

// Normalized beampattern on every cell. Rows are distributed over threads;
// each cell is written by exactly one thread and depends only on its own
// coordinates, so the result does not depend on the thread count.
inline FieldMap evaluate_grid(const ArrayGeometry& g, const FrequencyPlan& plan, const PolarPoint& bob,
                              const GridSpec& spec, unsigned threads = 0)
{
    validate(spec);
    validate(g, plan);
    validate(bob);

    FieldMap map;
    map.spec = spec;
    map.nx = spec.nx();
    map.ny = spec.ny();
    map.geometry = g;
    map.plan = plan;
    map.bob = bob;
    map.values.assign(map.nx * map.ny, std::numeric_limits<double>::quiet_NaN());
    map.valid.assign(map.nx * map.ny, 0);

    const CartesianPoint bc = polar_to_cartesian(bob);
    const auto fi = std::llround((bc.x - spec.x_min) / spec.step);
    const auto fj = std::llround((bc.y - spec.y_min) / spec.step);
    if (fi >= 0 && fj >= 0 && static_cast<std::size_t>(fi) < map.nx && static_cast<std::size_t>(fj) < map.ny)
        map.focus_index = map.index(static_cast<std::size_t>(fi), static_cast<std::size_t>(fj));

    const detail::PatternKernel kernel(g, plan, bob);
    const double rayleigh = rayleigh_distance(g);

    auto run_rows = [&](std::size_t first, std::size_t stride, bool& violation) {
        for (std::size_t j = first; j < map.ny; j += stride) {
            const double y = spec.y(j);
            for (std::size_t i = 0; i < map.nx; ++i) {
                const double x = spec.x(i);
                const std::size_t idx = map.index(i, j);
                const double r = std::hypot(x, y);
                if (x < 0.0 || r == 0.0)
                    continue;
                map.valid[idx] = 1;
                if (r >= rayleigh)
                    violation = true;
                map.values[idx] = kernel.normalized(r, y / r);
            }
        }
    };

    unsigned n_threads = threads == 0 ? default_thread_count() : threads;
    n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, map.ny));
    std::vector<char> violations(n_threads, 0);
    if (n_threads <= 1) {
        bool v = false;
        run_rows(0, 1, v);
        violations[0] = v;
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t)
            pool.emplace_back([&, t] {
                bool v = false;
                run_rows(t, n_threads, v);
                violations[t] = v;
            });
        for (auto& th : pool)
            th.join();
    }
    map.rayleigh_violation = std::any_of(violations.begin(), violations.end(), [](char v) { return v != 0; });

    if (map.focus_index && map.valid[*map.focus_index])
        map.values[*map.focus_index] = 1.0;
    map.valid_count = static_cast<std::size_t>(std::count(map.valid.begin(), map.valid.end(), std::uint8_t{1}));
    return map;
}

enum class ThresholdMode {
    fraction, // value is a fraction of Bob's beampattern
    kl        // value is the beam-gain bound q from the KL covertness budget
};

struct Threshold {
    ThresholdMode mode = ThresholdMode::fraction;
    double value = 0.1;
};

inline double normalized_threshold(const FieldMap& map, const Threshold& t)
{
    if (t.mode == ThresholdMode::fraction) {
        if (!(t.value > 0.0) || !std::isfinite(t.value))
            throw std::invalid_argument("fractional threshold must be finite and > 0");
        return t.value;
    }
    if (!(t.value > 0.0) || !std::isfinite(t.value))
        throw std::invalid_argument("gain threshold q must be finite and > 0");
    const double beta = path_gain(map.geometry, map.bob.r);
    return t.value * static_cast<double>(map.geometry.size()) / (beta * beta);
}

struct NoncovertRegion {
    std::vector<std::uint8_t> mask; // 1 = non-covert
    std::size_t cells = 0;
    double area_m2 = 0.0;
    double area_fraction = 0.0;     // of the valid grid area
    double threshold_normalized = 0.0;
};

// A cell is non-covert when its value reaches the threshold. Every cell above
// threshold counts, including islands disconnected from Bob.
inline NoncovertRegion extract_noncovert(const FieldMap& map, const Threshold& t)
{
    NoncovertRegion out;
    out.threshold_normalized = normalized_threshold(map, t);
    out.mask.assign(map.values.size(), 0);
    for (std::size_t i = 0; i < map.values.size(); ++i)
        if (map.valid[i] && map.values[i] >= out.threshold_normalized) {
            out.mask[i] = 1;
            ++out.cells;
        }
    out.area_m2 = static_cast<double>(out.cells) * map.cell_area();
    out.area_fraction = map.valid_count ? static_cast<double>(out.cells) / static_cast<double>(map.valid_count) : 0.0;
    return out;
}

// Everything needed to build one plan and one map.
struct Scenario {
    std::size_t n_antennas = 64;
    double carrier_hz = 3e9;
    double spacing_m = 0.0; // <= 0: half wavelength
    double f_delta_hz = 1e6;
    PolarPoint bob{7.0711, pi / 4};
    GridSpec grid;
    Threshold threshold;
    std::optional<double> box_half_width_hz;
    SolverConfig solver;

    ArrayGeometry geometry() const { return ArrayGeometry(n_antennas, carrier_hz, spacing_m); }
};

inline FrequencyPlan make_plan(const Scenario& s, Scheme scheme, std::uint64_t seed = 0)
{
    const auto g = s.geometry();
    switch (scheme) {
    case Scheme::lpa: return lpa_plan(g);
    case Scheme::linear_fda: return linear_fda_plan(g, s.f_delta_hz);
    case Scheme::random_fda: return random_fda_plan(g, s.f_delta_hz, seed);
    case Scheme::optimized_fda: return optimized_fda_plan(g, s.bob, s.f_delta_hz, s.solver, s.box_half_width_hz).plan;
    }
    throw std::invalid_argument("make_plan: unknown scheme");
}

enum class SweepParameter { n_antennas, f_delta };

inline std::string_view to_string(SweepParameter p)
{
    return p == SweepParameter::n_antennas ? "n_antennas" : "f_delta_hz";
}

inline Scenario with_parameter(Scenario s, SweepParameter p, double value)
{
    if (p == SweepParameter::n_antennas) {
        if (!(value >= 2.0) || value != std::floor(value))
            throw std::invalid_argument("sweep: antenna count must be an integer >= 2");
        s.n_antennas = static_cast<std::size_t>(value);
    } else {
        s.f_delta_hz = value;
    }
    return s;
}

struct SweepRow {
    SweepParameter parameter = SweepParameter::n_antennas;
    double value = 0.0;
    Scheme scheme = Scheme::lpa;
    double mean_fraction = 0.0;
    double std_fraction = 0.0;
    double mean_area_m2 = 0.0;
    std::size_t samples = 0; // seeds averaged (1 for deterministic schemes)
};

inline std::pair<double, double> mean_and_std(std::span<const double> xs)
{
    if (xs.empty())
        return {0.0, 0.0};
    double mean = 0.0;
    for (double x : xs)
        mean += x;
    mean /= static_cast<double>(xs.size());
    if (xs.size() < 2)
        return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs)
        ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

// Non-covert area fraction per (value, scheme); random_fda is averaged over
// the seed list.
inline std::vector<SweepRow> sweep(const Scenario& base, SweepParameter parameter, std::span<const double> values,
                                   std::span<const Scheme> schemes, std::span<const std::uint64_t> seeds,
                                   unsigned threads = 0)
{
    if (values.size() < 2)
        throw std::invalid_argument("sweep: need at least two parameter values");
    if (seeds.empty())
        throw std::invalid_argument("sweep: need at least one seed");
    std::vector<SweepRow> rows;
    for (double v : values) {
        const Scenario s = with_parameter(base, parameter, v);
        const auto g = s.geometry();
        for (Scheme scheme : schemes) {
            std::vector<double> fractions;
            std::vector<double> areas;
            const std::size_t runs = scheme == Scheme::random_fda ? seeds.size() : 1;
            for (std::size_t r = 0; r < runs; ++r) {
                const auto plan = make_plan(s, scheme, seeds[r]);
                const auto map = evaluate_grid(g, plan, s.bob, s.grid, threads);
                const auto region = extract_noncovert(map, s.threshold);
                fractions.push_back(region.area_fraction);
                areas.push_back(region.area_m2);
            }
            const auto [mean, sd] = mean_and_std(fractions);
            rows.push_back({parameter, v, scheme, mean, sd, mean_and_std(areas).first, runs});
        }
    }
    return rows;
}

struct McRate {
    double mean_rate = 0.0;     // bits per channel use
    double std_error = 0.0;
    double rate_outside = 0.0;  // finite-blocklength rate at Bob, paid when Willie is covert
    double snr_bob = 0.0;
    double area_fraction = 0.0;
    std::size_t samples = 0;
};

// Willie is drawn uniformly over the grid rectangle (cells included in full);
// the sample's rate is 0 when its cell is non-covert and the Bob rate
// otherwise. Draws landing in invalid cells are redrawn.
inline McRate monte_carlo_rate(const FieldMap& map, const NoncovertRegion& region, const LinkBudget& budget,
                               std::size_t n_samples, std::uint64_t seed)
{
    if (n_samples < 1)
        throw std::invalid_argument("monte_carlo_rate: need at least one sample");
    if (map.valid_count == 0)
        throw std::invalid_argument("monte_carlo_rate: grid has no valid cell");
    validate(budget);
    const auto h_b = channel_vector(map.geometry, map.plan, map.bob);
    const auto w = mrt_weights(h_b);
    McRate out;
    out.snr_bob = snr_bob(budget, h_b, w);
    out.rate_outside = covert_rate(out.snr_bob, budget.blocklength, budget.frame_error_prob).rate;
    out.area_fraction = region.area_fraction;
    out.samples = n_samples;

    UniformSource rng(seed);
    const double x0 = map.spec.x_min - map.spec.step / 2.0;
    const double y0 = map.spec.y_min - map.spec.step / 2.0;
    const double width = static_cast<double>(map.nx) * map.spec.step;
    const double height = static_cast<double>(map.ny) * map.spec.step;
    std::size_t outside = 0;
    for (std::size_t s = 0; s < n_samples; ++s) {
        for (;;) {
            const double x = x0 + rng.half_open01() * width;
            const double y = y0 + rng.half_open01() * height;
            const auto i = std::min(map.nx - 1, static_cast<std::size_t>((x - x0) / map.spec.step));
            const auto j = std::min(map.ny - 1, static_cast<std::size_t>((y - y0) / map.spec.step));
            const std::size_t idx = map.index(i, j);
            if (!map.valid[idx])
                continue;
            if (!region.mask[idx])
                ++outside;
            break;
        }
    }
    const double n = static_cast<double>(n_samples);
    const double p = static_cast<double>(outside) / n;
    out.mean_rate = out.rate_outside * p;
    // per-sample rates are rate_outside * Bernoulli(p)
    out.std_error = n_samples > 1 ? out.rate_outside * std::sqrt(p * (1.0 - p) * n / (n - 1.0) / n) : 0.0;
    return out;
}

inline McRate monte_carlo_rate(const ArrayGeometry& g, const FrequencyPlan& plan, const PolarPoint& bob,
                               const LinkBudget& budget, const GridSpec& spec, const Threshold& threshold,
                               std::size_t n_samples, std::uint64_t seed, unsigned threads = 0)
{
    const auto map = evaluate_grid(g, plan, bob, spec, threads);
    const auto region = extract_noncovert(map, threshold);
    return monte_carlo_rate(map, region, budget, n_samples, seed);
}

} // namespace fdacov

#endif
