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

#ifndef FDACOV_GEOMETRY_HPP
#define FDACOV_GEOMETRY_HPP

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fdacov {

inline constexpr double speed_of_light = 299'792'458.0; // m/s
inline constexpr double pi = std::numbers::pi;

// Angle convention: theta = 0 is broadside (the +x axis, perpendicular to the
// array), positive theta rotates towards +y, i.e. along the array. The array
// lies on the y-axis with its first element at the origin.
struct PolarPoint {
    double r = 1.0;     // m
    double theta = 0.0; // rad
};

struct CartesianPoint {
    double x = 0.0; // m
    double y = 0.0; // m
};

// Accepts the closed half-plane theta in [-pi/2, pi/2]; points on the array
// axis (x = 0) are legal receiver positions on the experiment grid.
inline void validate(const PolarPoint& p)
{
    if (!std::isfinite(p.r) || !(p.r > 0.0))
        throw std::domain_error("polar point: r must be finite and > 0, got " + std::to_string(p.r));
    if (!std::isfinite(p.theta) || std::abs(p.theta) > pi / 2)
        throw std::domain_error("polar point: theta must lie in [-pi/2, pi/2], got " + std::to_string(p.theta));
}

inline CartesianPoint polar_to_cartesian(const PolarPoint& p)
{
    if (!std::isfinite(p.r) || !std::isfinite(p.theta))
        throw std::domain_error("polar_to_cartesian: non-finite input");
    return {p.r * std::cos(p.theta), p.r * std::sin(p.theta)};
}

inline PolarPoint cartesian_to_polar(const CartesianPoint& c)
{
    if (!std::isfinite(c.x) || !std::isfinite(c.y))
        throw std::domain_error("cartesian_to_polar: non-finite input");
    if (c.x == 0.0 && c.y == 0.0)
        throw std::domain_error("cartesian_to_polar: the origin has no direction");
    return {std::hypot(c.x, c.y), std::atan2(c.y, c.x)};
}

// Transmitter layout: N isotropic elements on the y-axis at y_k = k * d,
// k = 0 .. N-1.
class ArrayGeometry {
public:
    // spacing_m <= 0 selects half-wavelength spacing.
    ArrayGeometry(std::size_t n_antennas, double carrier_hz, double spacing_m = 0.0)
        : n_(n_antennas), carrier_hz_(carrier_hz)
    {
        if (n_antennas < 2)
            throw std::invalid_argument("array geometry: need at least 2 antennas");
        if (!std::isfinite(carrier_hz) || !(carrier_hz > 0.0))
            throw std::invalid_argument("array geometry: carrier frequency must be > 0");
        if (!std::isfinite(spacing_m))
            throw std::invalid_argument("array geometry: spacing must be finite");
        wavelength_m_ = speed_of_light / carrier_hz;
        spacing_m_ = spacing_m > 0.0 ? spacing_m : wavelength_m_ / 2;
    }

    std::size_t size() const noexcept { return n_; }
    double carrier_hz() const noexcept { return carrier_hz_; }
    double wavelength_m() const noexcept { return wavelength_m_; }
    double spacing_m() const noexcept { return spacing_m_; }
    double aperture_m() const noexcept { return static_cast<double>(n_ - 1) * spacing_m_; }

    double element_y(std::size_t k) const
    {
        check_index(k);
        return static_cast<double>(k) * spacing_m_;
    }

    void check_index(std::size_t k) const
    {
        if (k >= n_)
            throw std::out_of_range("antenna index " + std::to_string(k) + " out of range for N=" + std::to_string(n_));
    }

private:
    std::size_t n_;
    double carrier_hz_;
    double wavelength_m_;
    double spacing_m_;
};

// Euclidean distance from element k (0-based) to p.
inline double exact_element_distance(const ArrayGeometry& g, std::size_t k, const PolarPoint& p)
{
    const double yk = g.element_y(k);
    const CartesianPoint c = polar_to_cartesian(p);
    return std::hypot(c.x, c.y - yk);
}

// Second-order (Fresnel) expansion r + k^2 d^2 / (2r) - k d sin(theta).
// Element k = 0 sits at the origin and reproduces r exactly.
inline double fresnel_element_distance(const ArrayGeometry& g, std::size_t k, const PolarPoint& p)
{
    g.check_index(k);
    if (!(p.r > 0.0))
        throw std::domain_error("fresnel_element_distance: r must be > 0");
    const double kd = static_cast<double>(k) * g.spacing_m();
    return p.r + kd * kd / (2.0 * p.r) - kd * std::sin(p.theta);
}

inline double rayleigh_distance(const ArrayGeometry& g)
{
    const double D = g.aperture_m();
    return 2.0 * D * D / g.wavelength_m();
}

inline bool in_near_field(const ArrayGeometry& g, const PolarPoint& p)
{
    return p.r < rayleigh_distance(g);
}

inline double degrees_to_radians(double deg) { return deg * pi / 180.0; }
inline double radians_to_degrees(double rad) { return rad * 180.0 / pi; }

} // namespace fdacov

#endif
