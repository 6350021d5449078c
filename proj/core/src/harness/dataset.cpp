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

#include "adloc/harness/dataset.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

namespace adloc::harness {

using nlohmann::json;

namespace {

constexpr std::uint64_t kTestPositionStream = 0x905;
constexpr std::uint64_t kTestSampleStream = 0x7e57;

int grid_count(double lo, double hi, double spacing) {
    return static_cast<int>(std::floor((hi - lo) / spacing + 1e-9)) + 1;
}

} // namespace

std::vector<Vec3> rp_grid(const ExperimentConfig& c) {
    c.validate();
    const int nx = grid_count(c.area.lo[0], c.area.hi[0], c.grid_spacing);
    const int ny = grid_count(c.area.lo[1], c.area.hi[1], c.grid_spacing);
    std::vector<Vec3> out;
    out.reserve(static_cast<std::size_t>(nx) * ny * c.planes.size());
    for (double z : c.planes)
        for (int i = 0; i < nx; ++i)
            for (int k = 0; k < ny; ++k)
                out.push_back({c.area.lo[0] + i * c.grid_spacing, c.area.lo[1] + k * c.grid_spacing, z});
    return out;
}

std::vector<Vec3> test_positions(const ExperimentConfig& c) {
    Rng rng = make_rng(c.seed, kTestPositionStream);
    std::uniform_real_distribution<double> ux(c.area.lo[0], c.area.hi[0]);
    std::uniform_real_distribution<double> uy(c.area.lo[1], c.area.hi[1]);
    std::uniform_int_distribution<std::size_t> plane(0, c.planes.size() - 1);
    std::vector<Vec3> out;
    out.reserve(static_cast<std::size_t>(c.test_points));
    for (int i = 0; i < c.test_points; ++i) {
        const double x = ux(rng);
        const double y = uy(rng);
        out.push_back({x, y, c.planes[plane(rng)]});
    }
    return out;
}

Scene build_scene(const ExperimentConfig& c) {
    return generate_scene(c.area, c.scene.bs_position, c.scene.scatterers, c.scene.pathloss_exponent,
                          c.scene.seed, c.scene.options);
}

Dataset make_train_set(const ExperimentConfig& c, const Scene& scene, FingerprintKind kind) {
    Dataset d;
    d.split = "train";
    d.config_hash = config_hash(c);
    d.seed = c.seed;
    d.kind = kind;
    for (const Vec3& p : rp_grid(c)) {
        const PathSet paths = paths_for_position(scene, p, c.ofdm);
        d.samples.push_back({exact_fingerprint(kind, paths, c.geometry, c.ofdm), p});
    }
    return d;
}

Dataset make_test_set(const ExperimentConfig& c, const Scene& scene, FingerprintKind kind,
                      std::optional<double> snr_db) {
    Dataset d;
    d.split = "test";
    d.config_hash = config_hash(c);
    d.seed = c.seed;
    d.kind = kind;
    d.snr_db = snr_db;
    const auto positions = test_positions(c);
    const std::uint64_t base = derive_seed(c.seed, kTestSampleStream);
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const PathSet paths = paths_for_position(scene, positions[i], c.ofdm);
        Rng rng = make_rng(base, i);
        d.samples.push_back(
            {fingerprint_mc(paths, c.geometry, c.ofdm, kind, c.realizations, rng, NoiseModel{snr_db}),
             positions[i]});
    }
    return d;
}

std::pair<Dataset, Dataset> generate_dataset(const ExperimentConfig& c) {
    c.validate();
    const Scene scene = build_scene(c);
    return {make_train_set(c, scene, c.fingerprint), make_test_set(c, scene, c.fingerprint, c.snr_db)};
}

Dataset denoised(const Dataset& d, double alpha) {
    Dataset out = d;
    for (auto& s : out.samples)
        s.fingerprint = denoise(s.fingerprint, alpha);
    return out;
}

FingerprintDatabase to_database(const Dataset& d) {
    if (d.samples.empty())
        throw std::invalid_argument("dataset '" + d.split + "' is empty");
    const Fingerprint& f0 = d.samples.front().fingerprint;
    FingerprintDatabase db(f0.M, f0.N, f0.columns(), f0.kind);
    for (const auto& s : d.samples)
        db.add(s.fingerprint, s.position);
    return db;
}

void save_dataset(const Dataset& d, const std::filesystem::path& path) {
    to_database(d).save(path.string());
    json meta{{"split", d.split},
              {"samples", d.samples.size()},
              {"config_hash", d.config_hash},
              {"seed", d.seed},
              {"fingerprint", to_string(d.kind)},
              {"snr_db", d.snr_db ? json(*d.snr_db) : json(nullptr)}};
    std::ofstream os(path.string() + ".json", std::ios::trunc);
    if (!os)
        throw std::runtime_error("cannot write " + path.string() + ".json");
    os << meta.dump(2) << '\n';
}

Dataset load_dataset(const std::filesystem::path& path) {
    const FingerprintDatabase db = FingerprintDatabase::load(path.string());
    Dataset d;
    std::ifstream is(path.string() + ".json");
    if (is) {
        const json meta = json::parse(is);
        d.split = meta.value("split", std::string());
        d.config_hash = meta.value("config_hash", std::string());
        d.seed = meta.value("seed", std::uint64_t{0});
        if (meta.contains("snr_db") && !meta.at("snr_db").is_null())
            d.snr_db = meta.at("snr_db").get<double>();
    }
    d.kind = db.kind();
    for (std::size_t i = 0; i < db.size(); ++i) {
        Fingerprint fp;
        fp.omega = db.entry(i).omega;
        fp.M = db.M();
        fp.N = db.N();
        fp.kind = db.kind();
        d.samples.push_back({std::move(fp), db.entry(i).position});
    }
    return d;
}

} // namespace adloc::harness
