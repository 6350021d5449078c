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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "adloc/harness/config.hpp"
#include "adloc/harness/dataset.hpp"
#include "adloc/harness/evaluate.hpp"
#include "adloc/harness/experiments.hpp"
#include "adloc/harness/theory.hpp"

namespace adloc::harness {
namespace {

namespace fs = std::filesystem;

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.test_points = 20;
    c.realizations = 10;
    c.methods = {Method::Wknn};
    return c;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("adloc_harness_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TEST(Grid, DeskAndFullCounts) {
    ExperimentConfig desk;
    EXPECT_EQ(rp_grid(desk).size(), 363u);
    ExperimentConfig full;
    full.area = Box{{-15, -15, 0}, {15, 15, 9}};
    EXPECT_EQ(rp_grid(full).size(), 2883u);
    ExperimentConfig bad;
    bad.grid_spacing = 20.0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = ExperimentConfig{};
    bad.planes = {1.5, 12.0};
    EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(TestPoints, CountPlanesAndDeterminism) {
    ExperimentConfig c;
    c.test_points = 1000;
    const auto a = test_positions(c);
    ASSERT_EQ(a.size(), 1000u);
    for (const auto& p : a) {
        EXPECT_TRUE(c.area.contains(p));
        EXPECT_TRUE(p[2] == 1.5 || p[2] == 4.5 || p[2] == 7.5);
    }
    EXPECT_EQ(test_positions(c), a);
    c.seed = 2;
    EXPECT_NE(test_positions(c), a);
}

TEST(Datasets, ShapesProvenanceAndSharedStreams) {
    const ExperimentConfig c = small_config();
    const auto [train, test] = generate_dataset(c);
    EXPECT_EQ(train.size(), 363u);
    EXPECT_EQ(test.size(), 20u);
    EXPECT_EQ(train.split, "train");
    EXPECT_EQ(test.split, "test");
    EXPECT_EQ(train.config_hash, config_hash(c));
    for (const auto& s : train.samples) {
        EXPECT_EQ(s.fingerprint.omega.rows(), 32);
        EXPECT_EQ(s.fingerprint.omega.cols(), 32);
        EXPECT_TRUE(c.area.contains(s.position));
    }
    // Same seed -> same fingerprints; noise-free sets of both kinds share positions.
    const auto again = generate_dataset(c).second;
    EXPECT_EQ(again.samples[3].fingerprint.omega, test.samples[3].fingerprint.omega);
    const Scene scene = build_scene(c);
    const auto sf = make_test_set(c, scene, FingerprintKind::SFCPM, 10.0);
    EXPECT_EQ(sf.samples[5].position, test.samples[5].position);
    EXPECT_EQ(sf.samples[5].fingerprint.omega.cols(), c.ofdm.Nc);
}

TEST(Datasets, SaveLoadRoundTrip) {
    const ExperimentConfig c = small_config();
    const auto test = generate_dataset(c).second;
    const fs::path dir = scratch("dataset");
    save_dataset(test, dir / "test.adb");
    const Dataset back = load_dataset(dir / "test.adb");
    EXPECT_EQ(back.split, "test");
    EXPECT_EQ(back.config_hash, test.config_hash);
    ASSERT_EQ(back.size(), test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
        EXPECT_EQ(back.samples[i].position, test.samples[i].position);
        EXPECT_EQ(back.samples[i].fingerprint.omega, test.samples[i].fingerprint.omega);
    }
    fs::remove_all(dir);
}

TEST(Cdf, MonotoneAndComplete) {
    const std::vector<double> e{0.5, 0.1, 2.0, 0.1, 1.2};
    const auto cdf = empirical_cdf(e);
    ASSERT_EQ(cdf.size(), 5u);
    for (std::size_t i = 1; i < cdf.size(); ++i) {
        EXPECT_GE(cdf[i].error_m, cdf[i - 1].error_m);
        EXPECT_GE(cdf[i].cdf, cdf[i - 1].cdf);
    }
    EXPECT_DOUBLE_EQ(cdf.back().cdf, 1.0);
    EXPECT_DOUBLE_EQ(cdf.front().cdf, 0.2);
}

TEST(Percentile, InterpolatesOrderStatistics) {
    const std::vector<double> e{4.0, 1.0, 3.0, 2.0, 5.0};
    EXPECT_DOUBLE_EQ(percentile(e, 0.5), 3.0);
    EXPECT_DOUBLE_EQ(percentile(e, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(percentile(e, 1.0), 5.0);
    EXPECT_DOUBLE_EQ(percentile(e, 0.9), 4.6);
    EXPECT_DOUBLE_EQ(percentile({2.0, 4.0}, 0.5), 3.0);
    EXPECT_THROW(percentile({}, 0.5), std::invalid_argument);
    EXPECT_THROW(percentile(e, 1.5), std::invalid_argument);
}

TEST(Evaluate, WknnOnReferencePointsIsExact) {
    ExperimentConfig c = small_config();
    c.wknn_k = 1;
    const auto [train, test] = generate_dataset(c);
    Dataset on_rp = train;
    on_rp.split = "test";
    on_rp.samples.resize(30);
    const fs::path dir = scratch("wknn");
    const EvalReport r = run_method(c, Method::Wknn, train, on_rp, RunOptions{dir, 0.0, {}});
    for (double e : r.errors)
        EXPECT_EQ(e, 0.0);
    EXPECT_EQ(r.p90, 0.0);
    EXPECT_GT(r.artifact_bytes, 0u);
    EXPECT_DOUBLE_EQ(r.cdf.back().cdf, 1.0);
    const auto summary = r.summary();
    for (const char* key : {"p50_error_m", "p90_error_m", "mean_error_m", "latency_ms", "artifact_bytes"})
        EXPECT_TRUE(summary.contains(key)) << key;
    fs::remove_all(dir);
}

TEST(Evaluate, DimensionMismatchIsRejected) {
    const ExperimentConfig c = small_config();
    const Scene scene = build_scene(c);
    const Dataset train = make_train_set(c, scene, FingerprintKind::ADCPM);
    const Dataset test = make_test_set(c, scene, FingerprintKind::SFCPM, std::nullopt);
    const fs::path dir = scratch("mismatch");
    EXPECT_THROW(run_method(c, Method::Wknn, train, test, RunOptions{dir, 0.0, {}}), std::invalid_argument);
    fs::remove_all(dir);
}

TEST(Compare, WritesReportsAndIsReproducible) {
    ExperimentConfig c = small_config();
    c.methods = {Method::Wknn, Method::Cnn3d};
    c.network.inception.base = 2;
    c.training.epochs = 1;
    const fs::path root = scratch("compare");
    const fs::path a = make_run_dir(root / "a", "compare", c);
    const fs::path b = make_run_dir(root / "b", "compare", c);
    EXPECT_NE(a.filename().string().find(config_hash(c)), std::string::npos);
    const auto ra = compare(c, a);
    compare(c, b);
    ASSERT_EQ(ra.size(), 2u);
    for (const char* m : {"wknn", "cnn3d"}) {
        const auto csv = slurp(a / m / "cdf.csv");
        EXPECT_EQ(csv.rfind("error_m,cdf\n", 0), 0u);
        EXPECT_EQ(csv, slurp(b / m / "cdf.csv")) << m;
        EXPECT_TRUE(fs::exists(a / m / "report.json"));
    }
    EXPECT_TRUE(fs::exists(a / "summary.json"));
    EXPECT_TRUE(fs::exists(a / "config.json"));
    fs::remove_all(root);
}

TEST(Sweep, CsvSchema) {
    const fs::path dir = scratch("sweep");
    write_sweep_csv(dir / "sweep.csv", {SweepRow{Method::Wknn, FingerprintKind::ADCPM, 4.0, 1.25}});
    EXPECT_EQ(slurp(dir / "sweep.csv"), "method,fingerprint,snr_db,mean_error_m\nwknn,adcpm,4,1.25\n");
    fs::remove_all(dir);
}

TEST(Config, JsonRoundTripAndErrors) {
    ExperimentConfig c;
    c.test_points = 17;
    c.snr_db = 12.0;
    c.methods = {Method::Cnn2d};
    c.sweep.snr_db = {4, 20};
    c.training.epochs = 7;
    const auto j = to_json(c);
    const ExperimentConfig back = config_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(to_json(back), j);
    EXPECT_EQ(config_hash(back), config_hash(c));
    EXPECT_NE(config_hash(ExperimentConfig{}), config_hash(c));

    EXPECT_THROW(config_from_json({{"no_such_key", 1}}), std::invalid_argument);
    EXPECT_THROW(config_from_json({{"ofdm", {{"Ng", 0}}}}), std::invalid_argument);
    EXPECT_THROW(config_from_json({{"training", {{"epochz", 3}}}}), std::invalid_argument);
    EXPECT_THROW(config_from_json({{"method", "svm"}}), std::invalid_argument);
    EXPECT_THROW(config_from_json(nlohmann::json::array()), std::invalid_argument);
    EXPECT_THROW(load_config("/nonexistent/config.json"), std::runtime_error);
}

TEST(Config, NetworkInputFollowsFingerprintKind) {
    const ExperimentConfig c;
    EXPECT_EQ(c.network_for(Method::Cnn3d).input_shape(), (nn::Shape4{4, 8, 32, 1}));
    EXPECT_EQ(c.network_for(Method::Cnn3d, FingerprintKind::SFCPM).input_shape(), (nn::Shape4{4, 8, 128, 1}));
    EXPECT_EQ(c.network_for(Method::Cnn2d).input_shape(), (nn::Shape4{32, 32, 1, 1}));
    EXPECT_FALSE(c.is_slow());
    ExperimentConfig full;
    full.geometry = ArrayGeometry::half_wavelength(8, 16, 2e9);
    full.ofdm.Nc = 512;
    full.ofdm.Ng = 128;
    EXPECT_TRUE(full.is_slow());
}

TEST(Theory, DefaultSuitePasses) {
    TheoryOptions o;
    o.mc_samples = 2000;
    o.mc_tolerance = 0.1;
    const TheoryReport r = verify_theory(ExperimentConfig{}, o);
    for (const auto& chk : r.checks)
        EXPECT_TRUE(chk.passed) << chk.name << " value " << chk.value << " threshold " << chk.threshold;
    EXPECT_TRUE(r.passed());
}

} // namespace
} // namespace adloc::harness
