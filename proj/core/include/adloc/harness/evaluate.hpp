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
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adloc/harness/dataset.hpp"

namespace adloc::harness {

struct CdfPoint {
    double error_m = 0.0;
    double cdf = 0.0;
};

/// Empirical CDF of the sorted errors: step i (1-based) reaches i / n.
std::vector<CdfPoint> empirical_cdf(std::vector<double> errors);

/// Linear interpolation between order statistics, q in [0, 1].
double percentile(std::vector<double> errors, double q);

struct EvalReport {
    Method method = Method::Wknn;
    FingerprintKind kind = FingerprintKind::ADCPM;
    std::optional<double> snr_db;
    std::vector<Vec3> predictions;
    std::vector<double> errors;     // Euclidean, meters, in test-set order
    std::vector<CdfPoint> cdf;
    double p50 = 0.0;
    double p90 = 0.0;
    double mean = 0.0;
    double latency_ms = 0.0;        // median single-query wall time
    std::uintmax_t artifact_bytes = 0;
    std::optional<model::TrainLog> training;

    nlohmann::json summary() const;
};

/// Fills errors, CDF and summary statistics from predictions.
void finalize_report(EvalReport& r, const Dataset& test);

struct RunOptions {
    std::filesystem::path workdir;  // receives the persisted model or database
    double denoise_alpha = 0.0;     // > 0 thresholds angle-delay inputs
    std::function<void(const model::EpochLog&)> on_epoch;
};

/// A built localizer: either a fingerprint database or a trained network.
class Localizer {
public:
    static Localizer build(const ExperimentConfig& c, Method method, const Dataset& train,
                           const RunOptions& options);

    Method method() const { return method_; }
    Vec3 locate(const Fingerprint& fp);
    std::vector<Vec3> locate_all(const Dataset& test);
    /// Median wall time of `queries` single locate calls after one warm-up pass.
    double latency_ms(const Dataset& test, int queries);
    std::uintmax_t artifact_bytes() const { return artifact_bytes_; }
    const std::optional<model::TrainLog>& training() const { return training_; }

private:
    Fingerprint preprocess(const Fingerprint& fp) const;

    Method method_ = Method::Wknn;
    int k_ = 4;
    double alpha_ = 0.0;
    std::optional<FingerprintDatabase> db_;
    std::shared_ptr<model::Network> net_;
    std::uintmax_t artifact_bytes_ = 0;
    std::optional<model::TrainLog> training_;
};

/// Builds the method on `train`, evaluates it on `test`.
EvalReport run_method(const ExperimentConfig& c, Method method, const Dataset& train, const Dataset& test,
                      const RunOptions& options);

EvalReport evaluate(Localizer& loc, const ExperimentConfig& c, const Dataset& test);

} // namespace adloc::harness
