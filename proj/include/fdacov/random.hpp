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


#ifndef FDACOV_RANDOM_HPP
#define FDACOV_RANDOM_HPP

#include <cstdint>
#include <random>

namespace fdacov {

// Portable uniform source. std::mt19937_64 is bit-specified by the standard;
// the uniform mapping below replaces std::uniform_real_distribution, whose
// output differs between standard libraries.
class UniformSource {
public:
    explicit UniformSource(std::uint64_t seed) : engine_(seed) {}

    // Strictly inside (0, 1): the 53 high bits plus one half ulp.
    double open01() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    // [0, 1)
    double half_open01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // (lo, hi)
    double open(double lo, double hi) { return lo + (hi - lo) * open01(); }

private:
    std::mt19937_64 engine_;
};

} // namespace fdacov

#endif
