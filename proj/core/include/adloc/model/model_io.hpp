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
#include <filesystem>

#include "adloc/model/network.hpp"

namespace adloc::model {

/// Writes `manifest` (JSON) and a sibling `.bin` blob holding every parameter
/// and running-statistic block as little-endian float32, in manifest order.
/// Returns the combined size in bytes.
std::uintmax_t save_network(Network& net, const std::filesystem::path& manifest);

Network load_network(const std::filesystem::path& manifest);

} // namespace adloc::model
