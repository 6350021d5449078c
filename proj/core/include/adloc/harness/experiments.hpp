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
#include <functional>
#include <string>
#include <vector>

#include "adloc/harness/evaluate.hpp"

namespace adloc::harness {

using Progress = std::function<void(const std::string&)>;

/// `root/<command>-<config hash>`, created if needed, with the resolved
/// config written to config.json inside it.
std::filesystem::path make_run_dir(const std::filesystem::path& root, const std::string& command,
                                   const ExperimentConfig& c);

/// Header `error_m,cdf`.
void write_cdf_csv(const std::filesystem::path& path, const std::vector<CdfPoint>& cdf);

struct SweepRow {
    Method method = Method::Wknn;
    FingerprintKind kind = FingerprintKind::ADCPM;
    double snr_db = 0.0;
    double mean_error_m = 0.0;
};

/// Header `method,fingerprint,snr_db,mean_error_m`.
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

/// Every configured method on one shared train/test pair. Writes
/// `<method>/cdf.csv` and `<method>/report.json` per method plus summary.json.
std::vector<EvalReport> compare(const ExperimentConfig& c, const std::filesystem::path& run_dir,
                                const Progress& progress = {});

/// The method x fingerprint grid at every SNR. Each method is built once per
/// fingerprint kind on noiseless reference fingerprints; test sets share seeds
/// across kinds and SNRs. Angle-delay inputs are thresholded by the configured
/// denoise fraction. Writes sweep.csv when `run_dir` is non-empty.
std::vector<SweepRow> snr_sweep(const ExperimentConfig& c, const std::vector<double>& snr_list,
                                const std::filesystem::path& run_dir, const Progress& progress = {});

} // namespace adloc::harness
