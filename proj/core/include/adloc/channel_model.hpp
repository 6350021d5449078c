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
#include <vector>

#include <nlohmann/json.hpp>

#include "adloc/types.hpp"

namespace adloc {

/// Uniform planar array: M antennas per column (vertical), N per row (horizontal).
struct ArrayGeometry {
    int M = 4;
    int N = 8;
    double d_v = 0.0; // vertical spacing [m]
    double d_h = 0.0; // horizontal spacing [m]
    double lambda_c = 0.0;

    /// Half-wavelength spacing for the given carrier frequency.
    static ArrayGeometry half_wavelength(int M, int N, double carrier_hz);

    void validate() const;
    int antennas() const { return M * N; }
};

struct OfdmConfig {
    int Nc = 128;
    int Ng = 32;
    double Ts = 50e-9; // sample interval [s]

    void validate() const;
};

/// One propagation path. `r` is the delay in samples and stays real-valued.
struct PathParam {
    double theta = 0.0; // elevation, measured from the array's vertical axis
    double phi = 0.0;   // azimuth, measured from the array's horizontal axis
    double r = 0.0;
    double sigma2 = 1.0;
};

struct PathSet {
    std::vector<PathParam> paths;
    Vec3 position{0.0, 0.0, 0.0};

    double total_power() const;
    void validate() const;
};

struct Box {
    Vec3 lo{0.0, 0.0, 0.0};
    Vec3 hi{0.0, 0.0, 0.0};

    bool empty() const { return !(lo[0] < hi[0] && lo[1] < hi[1] && lo[2] <= hi[2]); }
    bool contains(const Vec3& p, double tol = 1e-9) const;
};

struct Scatterer {
    Vec3 pos{0.0, 0.0, 0.0};
    double gain_db = 0.0;
};

struct Scene {
    Vec3 bs_position{-100.0, 0.0, 25.0};
    std::vector<Scatterer> scatterers;
    Box bounds;
    double pathloss_exponent = 2.0;
    std::uint64_t seed = 0;
};

/// Scatterer placement statistics for generate_scene.
struct SceneOptions {
    double margin_xy = 20.0;   // region extends this far beyond bounds in x and y
    double margin_z = 20.0;    // and this far above bounds
    double gain_sigma_db = 6.0; // lognormal spread of scatterer gains
};

std::vector<cdouble> steering_vertical(const ArrayGeometry& geom, double theta);
std::vector<cdouble> steering_horizontal(const ArrayGeometry& geom, double theta, double phi);

/// Kronecker product e_v(theta) (x) e_h(theta, phi), index m*N + n.
CVector steering(const ArrayGeometry& geom, double theta, double phi);

/// Independent CN(0, sigma2_p) gains, one per path.
std::vector<cdouble> sample_gains(const PathSet& paths, Rng& rng);

/// Space-frequency channel response H (MN x Nc); column l sums
/// a_p * steering_p * exp(-j 2 pi l r_p / Nc).
CMatrix sfcrm(const PathSet& paths, const std::vector<cdouble>& gains,
              const ArrayGeometry& geom, const OfdmConfig& ofdm);

Scene generate_scene(const Box& bounds, const Vec3& bs_position, int n_scatterers,
                     double pathloss_exponent, std::uint64_t seed,
                     const SceneOptions& options = {});

/// Single-bounce paths from every scatterer to the terminal at `position`.
/// Angles depend only on BS->scatterer geometry; delays and powers on the full
/// bounce length. Powers are normalized to unit sum after dropping paths whose
/// delay does not fit inside the guard interval.
PathSet paths_for_position(const Scene& scene, const Vec3& position, const OfdmConfig& ofdm,
                           bool snap_delays = false);

nlohmann::json scene_to_json(const Scene& scene);
Scene scene_from_json(const nlohmann::json& j);

} // namespace adloc
