// SPDX-License-Identifier: Apache-2.0
//
// adloc: angle-delay fingerprint localization for massive MIMO-OFDM
// Copyright (C) 2026 The adloc authors
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

#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace adloc::harness {

struct GradCase {
    std::string layer;
    int seeds = 0;
    double max_rel_error = 0.0;
    double tolerance = 0.0;
    std::string worst;
    bool passed() const { return max_rel_error <= tolerance; }
};

/// Central-difference checks of every layer type and of a miniature 3D CNN in
/// double precision, each over `seeds` random draws.
std::vector<GradCase> gradient_suite(int seeds);

nlohmann::json to_json(const std::vector<GradCase>& cases);

} // namespace adloc::harness
