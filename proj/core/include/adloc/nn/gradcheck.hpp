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

#include <cstdint>
#include <string>

#include "adloc/nn/layers.hpp"

namespace adloc::nn {

struct GradCheckOptions {
    double step = 1e-6;
    int coords_per_block = 24;     // 0 checks every coordinate
    std::uint64_t seed = 0;
    double floor_fraction = 1e-3;  // of the block's largest analytic gradient
};

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::string worst;             // block and coordinate of the largest error
    std::size_t checked = 0;
};

/// Compares analytic input and parameter gradients of L = sum(r * layer(x)),
/// r a seeded random probe, with central differences. Per coordinate the error
/// is |a - n| / max(|a|, |n|, floor).
GradCheckReport finite_diff_check(Layer<double>& layer, const Batch<double>& input,
                                  const GradCheckOptions& options = {});

} // namespace adloc::nn
