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


#ifndef FDACOV_SCHEMES_HPP
#define FDACOV_SCHEMES_HPP

#include "channel.hpp"
#include "ellipse.hpp"
#include "geometry.hpp"
#include "random.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fdacov {

// Conventional phased array: every element on the carrier.
inline FrequencyPlan lpa_plan(const ArrayGeometry& g)
{
    return {std::vector<double>(g.size(), 0.0), 0.0, Scheme::lpa, std::nullopt};
}

// offset_k = (k - (N-1)/2) F, centred on the array midpoint.
inline FrequencyPlan linear_fda_plan(const ArrayGeometry& g, double increment_hz)
{
    if (!(increment_hz >= 0.0) || !std::isfinite(increment_hz))
        throw std::invalid_argument("linear_fda_plan: increment must be finite and >= 0");
    FrequencyPlan plan{std::vector<double>(g.size()), increment_hz, Scheme::linear_fda, std::nullopt};
    const double centre = (static_cast<double>(g.size()) - 1.0) / 2.0;
    for (std::size_t k = 0; k < g.size(); ++k)
        plan.offsets_hz[k] = (static_cast<double>(k) - centre) * increment_hz;
    return plan;
}

// offset_k = u_k F with u_k i.i.d. continuous uniform on (-N/2, N/2), drawn in
// element order from UniformSource(seed).
inline FrequencyPlan random_fda_plan(const ArrayGeometry& g, double increment_hz, std::uint64_t seed)
{
    if (!(increment_hz >= 0.0) || !std::isfinite(increment_hz))
        throw std::invalid_argument("random_fda_plan: increment must be finite and >= 0");
    FrequencyPlan plan{std::vector<double>(g.size()), increment_hz, Scheme::random_fda, seed};
    const double half = static_cast<double>(g.size()) / 2.0;
    UniformSource rng(seed);
    for (double& f : plan.offsets_hz)
        f = rng.open(-half, half) * increment_hz;
    return plan;
}

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, OptimizationResult best)
        : std::runtime_error(what), best_(std::move(best))
    {
    }
    const OptimizationResult& best() const noexcept { return best_; }

private:
    OptimizationResult best_;
};

struct OptimizedPlan {
    FrequencyPlan plan;
    OptimizationResult solution;
};

// Offsets maximizing g1 g3 - g2^2 in the box [-h, h], h = F / 2 unless
// box_half_width_hz overrides it.
inline OptimizedPlan optimized_fda_plan(const ArrayGeometry& g, const PolarPoint& bob, double increment_hz,
                                        const SolverConfig& cfg = {},
                                        std::optional<double> box_half_width_hz = std::nullopt)
{
    if (!(increment_hz > 0.0) && !box_half_width_hz)
        throw std::invalid_argument("optimized_fda_plan: increment must be > 0");
    const double h = box_half_width_hz.value_or(increment_hz / 2.0);
    auto sol = optimize_offsets(g, bob, h, increment_hz, cfg);
    if (!sol.converged)
        throw SolverError("optimized_fda_plan: iteration cap reached before convergence", std::move(sol));
    FrequencyPlan plan{sol.offsets_hz, increment_hz, Scheme::optimized_fda, std::nullopt};
    return {std::move(plan), std::move(sol)};
}

} // namespace fdacov

#endif
