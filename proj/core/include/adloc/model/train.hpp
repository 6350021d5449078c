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
#include <functional>
#include <vector>

#include <nlohmann/json.hpp>

#include "adloc/model/network.hpp"

namespace adloc::model {

struct TrainConfig {
    int epochs = 100;
    int batch_size = 32;
    nn::AdamConfig adam;
    bool cosine_decay = true;        // anneal the learning rate to 0 over the run
    bool standardize_targets = true; // regress per-axis z-scores of the positions
    std::uint64_t seed = 1;
};

nlohmann::json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j);

struct EpochLog {
    int epoch = 0;          // 1-based
    double loss = 0.0;      // sample-weighted mean of the total loss
    double data_loss = 0.0;
    double learning_rate = 0.0;
    double seconds = 0.0;
};

struct TrainLog {
    std::vector<EpochLog> epochs;
    double seconds = 0.0;
};

nlohmann::json to_json(const TrainLog& log);

/// Mini-batch Adam on mean squared position error plus an L2 penalty on weights.
/// Deterministic for a given seed. Throws NumericalError naming the epoch and
/// batch when the loss or a gradient stops being finite.
TrainLog train(Network& net, const nn::Batch<float>& inputs, const std::vector<Vec3>& targets,
               const TrainConfig& config, const std::function<void(const EpochLog&)>& on_epoch = {});

} // namespace adloc::model
