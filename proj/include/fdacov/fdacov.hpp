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


#ifndef FDACOV_FDACOV_HPP
#define FDACOV_FDACOV_HPP

#include "channel.hpp"
#include "config.hpp"
#include "covertness.hpp"
#include "csv.hpp"
#include "ellipse.hpp"
#include "experiment.hpp"
#include "fieldmap.hpp"
#include "geometry.hpp"
#include "random.hpp"
#include "schemes.hpp"

#endif
