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

#ifndef FDACOV_COVERTNESS_HPP
#define FDACOV_COVERTNESS_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

namespace fdacov {

// xi(v) = v - ln(1 + v), the per-sample KL divergence between the noise-only
// and signal-plus-noise Gaussian observations at Willie (v = received SNR).
inline double xi(double v)
{
    if (!(v >= 0.0))
        throw std::domain_error("xi: argument must be >= 0");
    if (v < 0.1) {
        // alternating series sum_{k>=2} (-1)^k v^k / k avoids the cancellation
        double term = v * v;
        double sum = 0.0;
        for (int k = 2; k < 60; ++k) {
            const double t = term / k;
            sum += (k % 2 == 0) ? t : -t;
            if (t < 1e-18 * sum)
                break;
            term *= v;
        }
        return sum;
    }
    return v - std::log1p(v);
}

// Unique v >= 0 with xi(v) = y. xi(v) <= v^2 / 2 gives the lower bracket
// sqrt(2y); xi(2y + 2) >= y gives the upper one. Newton steps stay inside the
// bracket, bisection otherwise.
inline double xi_inv(double y)
{
    if (!(y >= 0.0) || !std::isfinite(y))
        throw std::domain_error("xi_inv: argument must be finite and >= 0");
    if (y == 0.0)
        return 0.0;
    double lo = std::sqrt(2.0 * y);
    double hi = 2.0 * y + 2.0;
    double v = lo;
    for (int it = 0; it < 200; ++it) {
        const double f = xi(v) - y;
        if (f == 0.0)
            return v;
        if (f < 0.0)
            lo = v;
        else
            hi = v;
        const double slope = v / (1.0 + v);
        double next = v - f / slope;
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        if (std::abs(next - v) <= 1e-16 * std::max(1.0, v) || hi - lo <= 1e-15 * std::max(1.0, v))
            return next;
        v = next;
    }
    return v;
}

// D(P0 || P1) = L xi(v) over L channel uses.
inline double kl_divergence(double v, std::uint64_t blocklength)
{
    return static_cast<double>(blocklength) * xi(v);
}

struct CovertnessBudget {
    double epsilon = 1.0;
    std::uint64_t blocklength = 100;
    double noise_willie_w = 1e-9;
    double transmit_power_w = 0.1;
};

inline void validate(const CovertnessBudget& b)
{
    if (!(b.epsilon >= 0.0) || !std::isfinite(b.epsilon))
        throw std::invalid_argument("covertness budget: epsilon must be finite and >= 0");
    if (b.blocklength < 1)
        throw std::invalid_argument("covertness budget: blocklength must be >= 1");
    if (!(b.noise_willie_w > 0.0) || !(b.transmit_power_w > 0.0))
        throw std::invalid_argument("covertness budget: powers must be > 0");
}

// Largest beam gain |h_w^H w|^2 Willie may see while D(P0||P1) <= 2 eps^2:
// q = (sigma_w^2 / P_t) xi^{-1}(2 eps^2 / L).
inline double detection_threshold(const CovertnessBudget& b)
{
    validate(b);
    const double y = 2.0 * b.epsilon * b.epsilon / static_cast<double>(b.blocklength);
    return b.noise_willie_w / b.transmit_power_w * xi_inv(y);
}

// Gains at or above q are non-covert, so the non-covert region is closed.
inline bool is_covert_point(double gain, double q)
{
    if (!(gain >= 0.0))
        throw std::domain_error("is_covert_point: gain must be >= 0");
    return gain < q;
}

} // namespace fdacov

#endif
