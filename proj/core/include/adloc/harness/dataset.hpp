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

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adloc/harness/config.hpp"
#include "adloc/wknn.hpp"

namespace adloc::harness {

struct Sample {
    Fingerprint fingerprint;
    Vec3 position{};
};

struct Dataset {
    std::string split;       // "train" or "test"
    std::vector<Sample> samples;
    std::string config_hash;
    std::uint64_t seed = 0;
    FingerprintKind kind = FingerprintKind::ADCPM;
    std::optional<double> snr_db;

    std::size_t size() const { return samples.size(); }
};

/// Reference points on every plane: a regular grid including both area edges.
std::vector<Vec3> rp_grid(const ExperimentConfig& c);

/// Uniform points on uniformly chosen planes. Deterministic in the config seed.
std::vector<Vec3> test_positions(const ExperimentConfig& c);

Scene build_scene(const ExperimentConfig& c);

/// Closed-form (noiseless) fingerprints on the reference grid.
Dataset make_train_set(const ExperimentConfig& c, const Scene& scene, FingerprintKind kind);

/// Sample-average fingerprints at the test positions. The random stream of
/// sample i depends only on (seed, i), so sets that differ in kind or SNR share
/// gain draws and unit noise draws.
Dataset make_test_set(const ExperimentConfig& c, const Scene& scene, FingerprintKind kind,
                      std::optional<double> snr_db);

/// Train and test sets for the configured fingerprint kind and SNR.
std::pair<Dataset, Dataset> generate_dataset(const ExperimentConfig& c);

/// Zero entries below alpha * max in every fingerprint of the set.
Dataset denoised(const Dataset& d, double alpha);

/// Binary dataset file (fingerprint database layout) plus a JSON sidecar.
void save_dataset(const Dataset& d, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

FingerprintDatabase to_database(const Dataset& d);

} // namespace adloc::harness
