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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adloc/harness/config.hpp"

namespace adloc::harness {

/// max |V^H V - I| for the phase-shifted M-point DFT.
double unitarity_residual(int M);

/// max |F^H F - I| for the Nc x Ng truncated DFT.
double truncated_dft_residual(int Nc, int Ng);

/// True when angle bin (m_bar, n_bar) of a half-wavelength M x N array is hit by
/// some real direction, i.e. u^2 + v^2 <= 1 for the normalized bin offsets.
bool bin_reachable(int M, int N, int m_bar, int n_bar);

/// A path whose array phases land exactly on angle bin (m_bar, n_bar) of a
/// half-wavelength M x N array.
PathParam on_grid_path(int M, int N, int m_bar, int n_bar, double r, double sigma2 = 1.0);

struct OneHotResult {
    double peak = 0.0;          // magnitude at the predicted bin
    double max_leakage = 0.0;   // largest magnitude elsewhere
};

/// Angle-domain image of the steering vector toward bin (m_bar, n_bar).
OneHotResult one_hot_check(int M, int N, int m_bar, int n_bar);

/// Three well-separated paths between angle bins, with fractional delays.
PathSet reference_offgrid_paths();

struct ConcentrationPoint {
    int M = 0, N = 0, Nc = 0, Ng = 0;
    double fraction = 0.0;
};

/// Window concentration of the closed-form fingerprint of `paths` at each
/// (M, N, Nc) with a fixed delay window of Ng taps.
std::vector<ConcentrationPoint> concentration_sequence(const PathSet& paths,
                                                       const std::vector<std::array<int, 3>>& sizes,
                                                       int Ng, int window);

/// |sum(ADCPM) - sum(SFCPM) / (M N Nc)| / sum(ADCPM) between closed forms.
double parseval_residual(const PathSet& paths, const ArrayGeometry& geom, const OfdmConfig& ofdm);

struct ParsevalMc {
    double adcpm_sum = 0.0, adcpm_se = 0.0;
    double sfcpm_scaled = 0.0, sfcpm_se = 0.0;
    double z = 0.0; // difference in combined standard errors
};

/// Sample-average versions of both totals on independent streams.
ParsevalMc parseval_mc(const PathSet& paths, const ArrayGeometry& geom, const OfdmConfig& ofdm, int n,
                       std::uint64_t seed);

/// |mc - exact|_F / |exact|_F for the angle-delay power matrix.
double oracle_relative_error(const PathSet& paths, const ArrayGeometry& geom, const OfdmConfig& ofdm,
                             int n, std::uint64_t seed);

struct TheoryCheck {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct TheoryReport {
    std::vector<TheoryCheck> checks;
    bool passed() const;
    nlohmann::json to_json() const;
};

struct TheoryOptions {
    int mc_samples = 10000;
    double mc_tolerance = 0.05;
};

/// Transform unitarity, exact one-hot images, Parseval scaling, sample-average
/// agreement and concentration growth with array size.
TheoryReport verify_theory(const ExperimentConfig& c, const TheoryOptions& options = {});

} // namespace adloc::harness
