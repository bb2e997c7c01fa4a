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

#ifndef FDACOV_CHANNEL_HPP
#define FDACOV_CHANNEL_HPP

#include "geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fdacov {

using cplx = std::complex<double>;

enum class Scheme { lpa, linear_fda, random_fda, optimized_fda };

inline constexpr std::array<Scheme, 4> all_schemes{Scheme::lpa, Scheme::linear_fda, Scheme::random_fda,
                                                   Scheme::optimized_fda};

inline std::string_view to_string(Scheme s)
{
    switch (s) {
    case Scheme::lpa: return "lpa";
    case Scheme::linear_fda: return "linear_fda";
    case Scheme::random_fda: return "random_fda";
    case Scheme::optimized_fda: return "optimized_fda";
    }
    return "unknown";
}

inline std::optional<Scheme> parse_scheme(std::string_view name)
{
    for (Scheme s : all_schemes)
        if (to_string(s) == name)
            return s;
    return std::nullopt;
}

// Per-antenna frequency offsets; element k transmits at f_c + offsets_hz[k].
struct FrequencyPlan {
    std::vector<double> offsets_hz;
    double base_increment_hz = 0.0;
    Scheme scheme = Scheme::lpa;
    std::optional<std::uint64_t> seed; // random_fda only

    double frequency_hz(const ArrayGeometry& g, std::size_t k) const { return g.carrier_hz() + offsets_hz.at(k); }
};

inline void validate(const ArrayGeometry& g, const FrequencyPlan& plan)
{
    if (plan.offsets_hz.size() != g.size())
        throw std::invalid_argument("frequency plan has " + std::to_string(plan.offsets_hz.size()) +
                                    " offsets, geometry has " + std::to_string(g.size()) + " antennas");
    for (double f : plan.offsets_hz)
        if (!std::isfinite(f))
            throw std::invalid_argument("frequency plan: non-finite offset");
    if (plan.scheme == Scheme::lpa &&
        std::any_of(plan.offsets_hz.begin(), plan.offsets_hz.end(), [](double f) { return f != 0.0; }))
        throw std::invalid_argument("frequency plan: LPA plan with non-zero offsets");
}

// True when some |offset| exceeds f_c / 100, outside the narrowband regime the
// model assumes. Callers warn; the plan is still usable.
inline bool exceeds_narrowband(const ArrayGeometry& g, const FrequencyPlan& plan)
{
    return std::any_of(plan.offsets_hz.begin(), plan.offsets_hz.end(),
                       [&](double f) { return std::abs(f) > g.carrier_hz() / 100.0; });
}

// Free-space amplitude gain lambda_c / (4 pi r).
inline double path_gain(const ArrayGeometry& g, double r)
{
    if (!(r > 0.0))
        throw std::domain_error("path_gain: r must be > 0");
    return g.wavelength_m() / (4.0 * pi * r);
}

// element_relative: the phase is taken relative to the origin distance r,
//   h_k = beta(r) exp(-j 2 pi f_k / c (r_k - r)).
// absolute: the full propagation phase exp(-j 2 pi f_k r_k / c). Under a
// frequency diverse plan the two differ by the element-dependent factor
// exp(-j 2 pi f_k r / c), so only the absolute form reproduces the
// distance-angle beampattern through an inner product.
enum class PhaseReference { element_relative, absolute };

namespace detail {

// Propagation phases reach ~1e4 rad on a 40 m cell at GHz carriers; form the
// argument in extended precision and reduce it before the double sin/cos.
inline double reduced_phase(long double cycles_per_m, long double path_m)
{
    const long double turns = cycles_per_m * path_m;
    const long double frac = turns - std::nearbyint(turns);
    return static_cast<double>(2.0L * std::numbers::pi_v<long double> * frac);
}

inline long double fresnel_distance_ld(long double kd, const PolarPoint& p)
{
    const long double r = p.r;
    return r + kd * kd / (2.0L * r) - kd * std::sin(static_cast<long double>(p.theta));
}

} // namespace detail

inline cplx element_channel(const ArrayGeometry& g, std::size_t k, double f_hz, const PolarPoint& p,
                            PhaseReference ref = PhaseReference::element_relative)
{
    validate(p);
    g.check_index(k);
    const long double kd = static_cast<long double>(k) * g.spacing_m();
    long double path = detail::fresnel_distance_ld(kd, p);
    if (ref == PhaseReference::element_relative)
        path -= p.r;
    const double phase = -detail::reduced_phase(static_cast<long double>(f_hz) / speed_of_light, path);
    return std::polar(path_gain(g, p.r), phase);
}

struct ChannelVector {
    std::vector<cplx> entries; // already carries the 1/N factor
    double gain_amplitude = 0.0; // beta(r)
    PolarPoint location;

    std::size_t size() const noexcept { return entries.size(); }

    double squared_norm() const noexcept
    {
        double s = 0.0;
        for (const cplx& h : entries)
            s += std::norm(h);
        return s;
    }
};

inline ChannelVector channel_vector(const ArrayGeometry& g, const FrequencyPlan& plan, const PolarPoint& p,
                                    PhaseReference ref = PhaseReference::element_relative)
{
    validate(g, plan);
    validate(p);
    ChannelVector h;
    h.gain_amplitude = path_gain(g, p.r);
    h.location = p;
    h.entries.reserve(g.size());
    const double inv_n = 1.0 / static_cast<double>(g.size());
    for (std::size_t k = 0; k < g.size(); ++k)
        h.entries.push_back(inv_n * element_channel(g, k, plan.frequency_hz(g, k), p, ref));
    return h;
}

// Maximum ratio transmission: w = h / ||h||.
inline std::vector<cplx> mrt_weights(const ChannelVector& h)
{
    const double norm = std::sqrt(h.squared_norm());
    if (!(norm > 0.0) || !std::isfinite(norm))
        throw std::domain_error("mrt_weights: channel vector has zero norm");
    std::vector<cplx> w(h.entries.begin(), h.entries.end());
    for (cplx& x : w)
        x /= norm;
    return w;
}

// |h^H w|^2
inline double beam_gain(const ChannelVector& h, std::span<const cplx> w)
{
    if (w.size() != h.size())
        throw std::invalid_argument("beam_gain: weight length does not match channel length");
    cplx acc{0.0, 0.0};
    for (std::size_t k = 0; k < w.size(); ++k)
        acc += std::conj(h.entries[k]) * w[k];
    return std::norm(acc);
}

struct LinkBudget {
    double transmit_power_w = 0.1;
    double noise_bob_w = 1e-9;
    double noise_willie_w = 1e-9;
    std::uint64_t blocklength = 100;
    double frame_error_prob = 1e-5;
};

inline void validate(const LinkBudget& b)
{
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(b.transmit_power_w) || !positive(b.noise_bob_w) || !positive(b.noise_willie_w))
        throw std::invalid_argument("link budget: powers must be finite and > 0");
    if (b.blocklength < 1)
        throw std::invalid_argument("link budget: blocklength must be >= 1");
    if (!(b.frame_error_prob > 0.0 && b.frame_error_prob < 1.0))
        throw std::invalid_argument("link budget: frame error probability must lie in (0, 1)");
}

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

inline double snr_bob(const LinkBudget& budget, const ChannelVector& h_b, std::span<const cplx> w)
{
    validate(budget);
    return budget.transmit_power_w * beam_gain(h_b, w) / budget.noise_bob_w;
}

// Inverse of the Gaussian tail Q(x) = P(Z > x). Rational initial guess
// (Acklam) refined by two Halley steps on erfc.
inline double inverse_q(double p)
{
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("inverse_q: probability must lie in (0, 1)");
    if (p == 0.5)
        return 0.0;
    if (p > 0.5)
        return -inverse_q(1.0 - p);

    // lower-tail quantile of p, then negate: Q^{-1}(p) = -Phi^{-1}(p)
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    double x;
    if (p < 0.02425) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    for (int it = 0; it < 2; ++it) {
        const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
        const double u = e * std::sqrt(2.0 * pi) * std::exp(x * x / 2.0);
        x -= u / (1.0 + x * u / 2.0);
    }
    return -x;
}

struct RateResult {
    double rate = 0.0;      // bits per channel use, clamped at 0
    double unclamped = 0.0; // raw normal-approximation value
};

// Finite-blocklength normal approximation
//   log2(1+g) - sqrt(g(g+2) / (L (g+1)^2)) Q^{-1}(delta) / ln 2.
inline RateResult covert_rate(double snr, std::uint64_t blocklength, double delta)
{
    if (!(snr >= 0.0) || !std::isfinite(snr))
        throw std::domain_error("covert_rate: snr must be finite and >= 0");
    if (blocklength < 1)
        throw std::domain_error("covert_rate: blocklength must be >= 1");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::domain_error("covert_rate: frame error probability must lie in (0, 1)");
    const double L = static_cast<double>(blocklength);
    const double dispersion = snr * (snr + 2.0) / (L * (snr + 1.0) * (snr + 1.0));
    const double raw = std::log2(1.0 + snr) - std::sqrt(dispersion) * inverse_q(delta) / std::numbers::ln2;
    return {std::max(raw, 0.0), raw};
}

} // namespace fdacov

#endif
