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
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adloc/channel_model.hpp"
#include "adloc/fingerprint.hpp"
#include "adloc/model/network.hpp"
#include "adloc/model/train.hpp"

namespace adloc::harness {

enum class Method { Cnn3d, Cnn2d, Wknn };

const char* to_string(Method m);
Method method_from_string(const std::string& s);

struct SceneConfig {
    Vec3 bs_position{-100.0, 0.0, 25.0};
    int scatterers = 50;
    double pathloss_exponent = 2.0;
    SceneOptions options;
    std::uint64_t seed = 7;
};

struct SweepConfig {
    std::vector<double> snr_db{4.0, 8.0, 12.0, 16.0, 20.0};
    double denoise_alpha = 0.02; // applied to angle-delay inputs only
    std::vector<Method> methods{Method::Wknn, Method::Cnn3d};
    std::vector<FingerprintKind> fingerprints{FingerprintKind::SFCPM, FingerprintKind::ADCPM};
};

/// Every knob of an experiment. Missing JSON keys keep these defaults, which
/// describe the desk-scale setup (10 x 10 m planes, 4 x 8 array, 32 delay taps).
struct ExperimentConfig {
    SceneConfig scene;
    ArrayGeometry geometry = ArrayGeometry::half_wavelength(4, 8, 2e9);
    OfdmConfig ofdm;
    Box area{{-5.0, -5.0, 0.0}, {5.0, 5.0, 9.0}};
    std::vector<double> planes{1.5, 4.5, 7.5};
    double grid_spacing = 1.0;
    int test_points = 200;
    FingerprintKind fingerprint = FingerprintKind::ADCPM;
    int realizations = 100;
    std::optional<double> snr_db; // unset = noiseless test fingerprints
    Method method = Method::Cnn3d;
    std::vector<Method> methods{Method::Wknn, Method::Cnn3d};
    int wknn_k = 4;
    model::NetworkSpec network;
    model::TrainConfig training;
    SweepConfig sweep;
    int latency_queries = 100;
    std::uint64_t seed = 1;

    void validate() const;
    /// True when the array or delay axis exceeds the desk-scale defaults by a
    /// wide margin; such runs are accepted but take long on a CPU.
    bool is_slow() const;
    /// Network spec with input dims and architecture filled in for `m`. The
    /// delay axis holds Ng taps for angle-delay input and Nc subcarriers for
    /// space-frequency input.
    model::NetworkSpec network_for(Method m, FingerprintKind kind = FingerprintKind::ADCPM) const;
};

nlohmann::json to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// 16 hex digits of FNV-1a over the canonical JSON of the resolved config.
std::string config_hash(const ExperimentConfig& c);

} // namespace adloc::harness
