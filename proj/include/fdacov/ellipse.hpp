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


#ifndef FDACOV_ELLIPSE_HPP
#define FDACOV_ELLIPSE_HPP

#include "channel.hpp"
#include "geometry.hpp"
#include "random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdacov {

// Quadratic-form model of the non-covert boundary around Bob. In the local
// coordinates (dr, dtheta) = (r - r_b, theta - theta_b) the boundary is
//
//   g1 dr^2 + 2 g2 dr dtheta + g3 dtheta^2 = 2 N^2 (1 - q_tilde),
//
// i.e. [[g1, g2], [g2, g3]] is minus the Hessian of |sum_k exp(j z_k)|^2 at
// Bob. The enclosed area is 2 pi N^2 (1 - q_tilde) / sqrt(g1 g3 - g2^2), in
// metre-radian units.

class DegenerateGeometry : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct GCoefficients {
    double g1 = 0.0; // rad^2 / m^2
    double g2 = 0.0; // rad^2 / (m rad)
    double g3 = 0.0; // rad^2 / rad^2

    double discriminant() const noexcept { return g1 * g3 - g2 * g2; }
};

// psi_k = f_c d^2 k^2 / (2 r_b^2) - f_offset_k, element index k = 0 .. N-1.
inline std::vector<double> psi_vector(const ArrayGeometry& g, std::span<const double> offsets_hz, double r_b)
{
    if (offsets_hz.size() != g.size())
        throw std::invalid_argument("psi_vector: offset count does not match the array");
    if (!(r_b > 0.0))
        throw std::domain_error("psi_vector: r_b must be > 0");
    const double curvature = g.carrier_hz() * g.spacing_m() * g.spacing_m() / (2.0 * r_b * r_b);
    std::vector<double> psi(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double kk = static_cast<double>(k);
        psi[k] = curvature * kk * kk - offsets_hz[k];
    }
    return psi;
}

// sum_{n,m} (n - m)^2 = N^2 (N^2 - 1) / 6
inline double index_pair_sum(std::size_t n)
{
    const double N = static_cast<double>(n);
    return N * N * (N * N - 1.0) / 6.0;
}

namespace detail {

struct PsiMoments {
    double centered_sq = 0.0;   // sum (psi - mean)^2
    double cross = 0.0;         // sum (psi - mean)(k - kbar)
    double index_sq = 0.0;      // sum (k - kbar)^2
    double residual_sq = 0.0;   // sum of squared residuals of psi regressed on k
    std::vector<double> residual;
};

inline PsiMoments psi_moments(std::span<const double> psi)
{
    const std::size_t n = psi.size();
    const double N = static_cast<double>(n);
    double mean = 0.0;
    for (double p : psi)
        mean += p;
    mean /= N;
    const double kbar = (N - 1.0) / 2.0;

    PsiMoments m;
    for (std::size_t k = 0; k < n; ++k) {
        const double pc = psi[k] - mean;
        const double kc = static_cast<double>(k) - kbar;
        m.centered_sq += pc * pc;
        m.cross += pc * kc;
        m.index_sq += kc * kc;
    }
    const double slope = m.cross / m.index_sq;
    m.residual.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double res = (psi[k] - mean) - slope * (static_cast<double>(k) - kbar);
        m.residual[k] = res;
        m.residual_sq += res * res;
    }
    return m;
}

inline void check_not_endfire(double theta_b)
{
    if (std::abs(std::cos(theta_b)) < 1e-12)
        throw DegenerateGeometry("ellipse model: Bob at endfire (theta = +-pi/2) has no angular curvature");
}

} // namespace detail

// O(N) evaluation through the identities
//   sum_{n,m} (psi_n - psi_m)^2        = 2N sum (psi - mean)^2
//   sum_{n,m} (psi_n - psi_m)(n - m)   = 2N sum (psi - mean)(k - kbar)
inline GCoefficients g_coefficients(const ArrayGeometry& g, std::span<const double> offsets_hz, const PolarPoint& bob)
{
    validate(bob);
    detail::check_not_endfire(bob.theta);
    const auto psi = psi_vector(g, offsets_hz, bob.r);
    const auto m = detail::psi_moments(psi);
    const double N = static_cast<double>(g.size());
    const double base = 4.0 * pi * pi / (speed_of_light * speed_of_light);
    const double fdc = g.carrier_hz() * g.spacing_m() * std::cos(bob.theta);
    return {base * 2.0 * N * m.centered_sq, base * fdc * 2.0 * N * m.cross,
            base * fdc * fdc * index_pair_sum(g.size())};
}

inline GCoefficients g_coefficients(const ArrayGeometry& g, const FrequencyPlan& plan, const PolarPoint& bob)
{
    validate(g, plan);
    return g_coefficients(g, plan.offsets_hz, bob);
}

// g1 g3 - g2^2 below this fraction of g1 g3 is treated as singular
inline constexpr double singular_tolerance = 1e-12;

struct AreaResult {
    double area = 0.0;  // m * rad
    bool empty = false; // q_tilde >= 1: the threshold is at or above the peak
};

inline AreaResult ellipse_area(const GCoefficients& c, std::size_t n_antennas, double q_tilde)
{
    if (!(q_tilde > 0.0))
        throw std::invalid_argument("ellipse_area: q_tilde must be > 0");
    if (q_tilde >= 1.0)
        return {0.0, true};
    const double disc = c.discriminant();
    if (!(disc > singular_tolerance * c.g1 * c.g3))
        throw DegenerateGeometry("ellipse_area: g1 g3 - g2^2 = " + std::to_string(disc) + " is not positive");
    const double N = static_cast<double>(n_antennas);
    return {2.0 * pi * N * N * (1.0 - q_tilde) / std::sqrt(disc), false};
}

// Threshold helpers. beta(r_w) is approximated by beta(r_b) on the boundary.
// A fractional threshold tau of Bob's beampattern gives q_tilde = tau; a beam
// gain bound q (on |h_w^H w|^2) gives q_tilde = q N / beta(r_b)^2.
inline double q_tilde_from_fraction(double tau) { return tau; }

inline double q_tilde_from_gain_threshold(const ArrayGeometry& g, double q, double r_b)
{
    const double beta = path_gain(g, r_b);
    return q * static_cast<double>(g.size()) / (beta * beta);
}

struct EllipseModel {
    GCoefficients coeffs;
    double q_tilde = 0.0;
    double area = 0.0;
    bool empty = false;
    bool degenerate = false;
    std::vector<double> psi;
};

inline EllipseModel build_ellipse_model(const ArrayGeometry& g, const FrequencyPlan& plan, const PolarPoint& bob,
                                        double q_tilde)
{
    EllipseModel m;
    m.coeffs = g_coefficients(g, plan, bob);
    m.q_tilde = q_tilde;
    m.psi = psi_vector(g, plan.offsets_hz, bob.r);
    if (!(m.coeffs.discriminant() > singular_tolerance * m.coeffs.g1 * m.coeffs.g3)) {
        m.degenerate = true;
        return m;
    }
    const auto a = ellipse_area(m.coeffs, g.size(), q_tilde);
    m.area = a.area;
    m.empty = a.empty;
    return m;
}

struct HessianSteps {
    double dr_m = 1e-4;
    double dtheta_rad = 1e-6;
};

struct HessianCheck {
    GCoefficients model;
    double fd_rr = 0.0; // finite-difference second derivatives of |sum exp(j z)|^2
    double fd_rt = 0.0;
    double fd_tt = 0.0;
    double dev_g1 = 0.0;
    double dev_g2 = 0.0;
    double dev_g3 = 0.0;
    double max_deviation = 0.0;
};

namespace detail {

// |sum_k exp(j z_k)|^2 - N^2 = -4 sum_{n<m} sin^2((z_n - z_m) / 2), with z_k
// the exact (frequency f_c + offset_k) phase change of element k between Bob
// and Bob + (dr, dtheta).
inline double correlation_deficit(const ArrayGeometry& g, std::span<const double> offsets_hz, const PolarPoint& bob,
                                  double dr, double dtheta)
{
    const std::size_t n = g.size();
    const double d = g.spacing_m();
    const double inv_r_diff = -dr / (bob.r * (bob.r + dr));
    const double sin_diff = 2.0 * std::cos(bob.theta + dtheta / 2.0) * std::sin(dtheta / 2.0);
    std::vector<double> z(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double kd = static_cast<double>(k) * d;
        const double path = dr + kd * kd / 2.0 * inv_r_diff - kd * sin_diff;
        z[k] = 2.0 * pi * (g.carrier_hz() + offsets_hz[k]) / speed_of_light * path;
    }
    double acc = 0.0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
            const double s = std::sin((z[a] - z[b]) / 2.0);
            acc += s * s;
        }
    return -4.0 * acc;
}

inline double relative_deviation(double fd, double model, double scale)
{
    const double denom = std::abs(model) > 1e-12 * scale ? std::abs(model) : scale;
    return std::abs(fd + model) / denom;
}

} // namespace detail

// Compares the g-coefficients against central finite differences of the true
// (untruncated) correlation |sum exp(j z_k)|^2 around Bob.
inline HessianCheck hessian_consistency(const ArrayGeometry& g, const FrequencyPlan& plan, const PolarPoint& bob,
                                        HessianSteps steps = {})
{
    HessianCheck h;
    h.model = g_coefficients(g, plan, bob);
    const auto& off = plan.offsets_hz;
    const double hr = steps.dr_m;
    const double ht = steps.dtheta_rad;
    auto D = [&](double dr, double dt) { return detail::correlation_deficit(g, off, bob, dr, dt); };

    h.fd_rr = (D(hr, 0.0) + D(-hr, 0.0)) / (hr * hr);
    h.fd_tt = (D(0.0, ht) + D(0.0, -ht)) / (ht * ht);
    h.fd_rt = (D(hr, ht) - D(hr, -ht) - D(-hr, ht) + D(-hr, -ht)) / (4.0 * hr * ht);

    const double scale = std::sqrt(std::abs(h.model.g1 * h.model.g3));
    h.dev_g1 = detail::relative_deviation(h.fd_rr, h.model.g1, scale);
    h.dev_g2 = detail::relative_deviation(h.fd_rt, h.model.g2, scale);
    h.dev_g3 = detail::relative_deviation(h.fd_tt, h.model.g3, scale);
    h.max_deviation = std::max({h.dev_g1, h.dev_g2, h.dev_g3});
    return h;
}

struct ObjectiveValue {
    double value = 0.0;
    std::vector<double> gradient; // d value / d offset_k
};

// J = g1 g3 - g2^2. With kc = k - kbar and res the residual of psi regressed
// on k, J = K * 4 N^2 * sum(kc^2) * sum(res^2) where
// K = (4 pi^2 / c^2)^2 (f_c d cos theta_b)^2. The residual form is free of the
// cancellation in g1 g3 - g2^2 and gives dJ/d offset_k = -2 K 4N^2 sum(kc^2) res_k.
inline ObjectiveValue objective_and_gradient(const ArrayGeometry& g, const PolarPoint& bob,
                                             std::span<const double> offsets_hz)
{
    validate(bob);
    detail::check_not_endfire(bob.theta);
    const auto psi = psi_vector(g, offsets_hz, bob.r);
    const auto m = detail::psi_moments(psi);
    const double N = static_cast<double>(g.size());
    const double base = 4.0 * pi * pi / (speed_of_light * speed_of_light);
    const double fdc = g.carrier_hz() * g.spacing_m() * std::cos(bob.theta);
    const double scale = base * base * fdc * fdc * 4.0 * N * N * m.index_sq;

    ObjectiveValue out;
    out.value = scale * m.residual_sq;
    out.gradient.resize(g.size());
    for (std::size_t k = 0; k < g.size(); ++k)
        out.gradient[k] = -2.0 * scale * m.residual[k];
    return out;
}

struct SolverConfig {
    std::size_t max_iterations = 2000; // per start
    double tolerance = 1e-12;          // relative, on steps and objective gains
    std::size_t random_starts = 8;
    std::uint64_t seed = 0x5eed;
    bool vertex_polish = true;         // single-coordinate bound flips after convergence
};

struct OptimizationResult {
    std::vector<double> offsets_hz;
    double objective = 0.0;
    std::size_t best_start = 0;
    std::size_t iterations = 0; // summed over all starts
    bool converged = false;     // best start finished below the iteration cap
    std::vector<double> start_objectives; // J at each start point, before ascent
};

namespace detail {

inline void project(std::vector<double>& x, double h)
{
    for (double& v : x)
        v = std::clamp(v, -h, h);
}

struct AscentResult {
    std::vector<double> x;
    double value = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

inline AscentResult projected_ascent(const ArrayGeometry& g, const PolarPoint& bob, std::vector<double> x, double h,
                                     const SolverConfig& cfg)
{
    AscentResult out;
    project(x, h);
    auto cur = objective_and_gradient(g, bob, x);
    double gmax = 0.0;
    for (double v : cur.gradient)
        gmax = std::max(gmax, std::abs(v));
    double t = gmax > 0.0 ? h / gmax : 0.0;

    std::size_t it = 0;
    bool done = gmax == 0.0;
    while (!done && it < cfg.max_iterations) {
        ++it;
        bool accepted = false;
        std::vector<double> trial(x.size());
        for (int bt = 0; bt < 80; ++bt) {
            for (std::size_t k = 0; k < x.size(); ++k)
                trial[k] = x[k] + t * cur.gradient[k];
            project(trial, h);
            double dir = 0.0;
            double step_inf = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k) {
                dir += cur.gradient[k] * (trial[k] - x[k]);
                step_inf = std::max(step_inf, std::abs(trial[k] - x[k]));
            }
            if (step_inf <= cfg.tolerance * h) {
                done = true; // projected gradient vanishes
                break;
            }
            const auto next = objective_and_gradient(g, bob, trial);
            if (next.value >= cur.value + 1e-4 * dir) {
                const double gain = next.value - cur.value;
                x = trial;
                cur = next;
                accepted = true;
                if (gain <= cfg.tolerance * std::abs(cur.value))
                    done = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted)
            done = true;
        else
            t *= 2.0;
    }
    out.x = std::move(x);
    out.value = cur.value;
    out.iterations = it;
    out.converged = done;
    return out;
}

// Best-improvement single-coordinate moves to the opposite bound.
inline bool polish_vertices(const ArrayGeometry& g, const PolarPoint& bob, std::vector<double>& x, double& value,
                            double h)
{
    bool improved_any = false;
    for (;;) {
        double best = value;
        std::size_t best_k = x.size();
        double best_v = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            for (double cand : {-h, h}) {
                if (cand == x[k])
                    continue;
                const double saved = x[k];
                x[k] = cand;
                const double v = objective_and_gradient(g, bob, x).value;
                x[k] = saved;
                if (v > best * (1.0 + 1e-14)) {
                    best = v;
                    best_k = k;
                    best_v = cand;
                }
            }
        }
        if (best_k == x.size())
            return improved_any;
        x[best_k] = best_v;
        value = best;
        improved_any = true;
    }
}

} // namespace detail

// Start points in order: zero plan, linear plan clipped to the box, the box
// vertex aligned with the curvature residual, then cfg.random_starts uniform
// points in the box.
inline std::vector<std::vector<double>> optimizer_starts(const ArrayGeometry& g, const PolarPoint& bob,
                                                         double half_width_hz, double linear_increment_hz,
                                                         const SolverConfig& cfg)
{
    const std::size_t n = g.size();
    std::vector<std::vector<double>> starts;
    starts.emplace_back(n, 0.0);

    std::vector<double> lin(n);
    for (std::size_t k = 0; k < n; ++k)
        lin[k] = (static_cast<double>(k) - (static_cast<double>(n) - 1.0) / 2.0) * linear_increment_hz;
    detail::project(lin, half_width_hz);
    starts.push_back(std::move(lin));

    const auto m = detail::psi_moments(psi_vector(g, std::vector<double>(n, 0.0), bob.r));
    std::vector<double> aligned(n);
    for (std::size_t k = 0; k < n; ++k)
        aligned[k] = m.residual[k] >= 0.0 ? -half_width_hz : half_width_hz;
    starts.push_back(std::move(aligned));

    UniformSource rng(cfg.seed);
    for (std::size_t s = 0; s < cfg.random_starts; ++s) {
        std::vector<double> x(n);
        for (double& v : x)
            v = rng.open(-half_width_hz, half_width_hz);
        starts.push_back(std::move(x));
    }
    return starts;
}

// Maximizes J = g1 g3 - g2^2 over the box |offset_k| <= half_width_hz by
// multi-start projected-gradient ascent with backtracking. J is a convex
// quadratic in the offsets, so ascent ends on box vertices; the vertex polish
// then escapes vertices that a single flip improves. Never throws on
// non-convergence; see OptimizationResult::converged.
inline OptimizationResult optimize_offsets(const ArrayGeometry& g, const PolarPoint& bob, double half_width_hz,
                                           double linear_increment_hz, const SolverConfig& cfg = {})
{
    if (!(half_width_hz > 0.0) || !std::isfinite(half_width_hz))
        throw std::invalid_argument("optimize_offsets: box half-width must be finite and > 0");
    validate(bob);
    detail::check_not_endfire(bob.theta);

    OptimizationResult best;
    best.objective = -std::numeric_limits<double>::infinity();
    const auto starts = optimizer_starts(g, bob, half_width_hz, linear_increment_hz, cfg);
    for (std::size_t s = 0; s < starts.size(); ++s) {
        best.start_objectives.push_back(objective_and_gradient(g, bob, starts[s]).value);
        auto run = detail::projected_ascent(g, bob, starts[s], half_width_hz, cfg);
        std::size_t iterations = run.iterations;
        bool converged = run.converged;
        if (cfg.vertex_polish) {
            while (detail::polish_vertices(g, bob, run.x, run.value, half_width_hz)) {
                auto again = detail::projected_ascent(g, bob, run.x, half_width_hz, cfg);
                iterations += again.iterations;
                converged = again.converged;
                if (!(again.value > run.value))
                    break;
                run.x = std::move(again.x);
                run.value = again.value;
            }
        }
        best.iterations += iterations;
        if (run.value > best.objective) {
            best.objective = run.value;
            best.offsets_hz = run.x;
            best.best_start = s;
            best.converged = converged;
        }
    }
    return best;
}

} // namespace fdacov

#endif
