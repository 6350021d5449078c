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

#include <cmath>
#include <numeric>

#include "adloc/channel_model.hpp"

namespace adloc {
namespace {

ArrayGeometry half_lambda(int M, int N) { return ArrayGeometry::half_wavelength(M, N, 2e9); }

TEST(Steering, VerticalBroadsideIsAllOnes) {
    for (int M : {1, 3, 8}) {
        const auto v = steering_vertical(half_lambda(M, 2), kPi / 2);
        ASSERT_EQ(static_cast<int>(v.size()), M);
        for (const auto& e : v)
            EXPECT_NEAR(std::abs(e - cdouble(1.0, 0.0)), 0.0, 1e-12);
    }
}

TEST(Steering, SingleAntenna) {
    const auto v = steering_vertical(half_lambda(1, 1), 0.3);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0], cdouble(1.0, 0.0));
}

TEST(Steering, VerticalPhaseProgression) {
    const auto g = half_lambda(8, 2);
    const double theta = 0.7;
    const auto v = steering_vertical(g, theta);
    EXPECT_EQ(v[0], cdouble(1.0, 0.0));
    for (int m = 0; m < 8; ++m) {
        const cdouble want = std::polar(1.0, -2 * kPi * m * (g.d_v / g.lambda_c) * std::cos(theta));
        EXPECT_NEAR(std::abs(v[m] - want), 0.0, 1e-12);
    }
}

TEST(Steering, HorizontalDegenerateAngles) {
    const auto g = half_lambda(2, 16);
    for (const auto& v : {steering_horizontal(g, 0.4, kPi / 2), steering_horizontal(g, 0.0, 1.1)})
        for (const auto& e : v)
            EXPECT_NEAR(std::abs(e - cdouble(1.0, 0.0)), 0.0, 1e-12);
}

TEST(Steering, KroneckerOrder) {
    const auto g = half_lambda(4, 8);
    const double theta = 1.1, phi = 0.6;
    const auto v = steering_vertical(g, theta);
    const auto h = steering_horizontal(g, theta, phi);
    const CVector e = steering(g, theta, phi);
    ASSERT_EQ(e.size(), 32);
    Rng rng(5);
    std::uniform_int_distribution<int> pm(0, 3), pn(0, 7);
    for (int t = 0; t < 20; ++t) {
        const int m = pm(rng), n = pn(rng);
        EXPECT_NEAR(std::abs(e(m * 8 + n) - v[m] * h[n]), 0.0, 1e-14);
    }
    for (int i = 0; i < e.size(); ++i)
        EXPECT_NEAR(std::abs(e(i)), 1.0, 1e-12);
}

TEST(Steering, TrivialSizes) {
    EXPECT_EQ(steering(half_lambda(1, 1), 0.2, 0.3).size(), 1);
    const CVector e = steering(half_lambda(3, 5), kPi / 2, kPi / 2);
    for (int i = 0; i < e.size(); ++i)
        EXPECT_NEAR(std::abs(e(i) - cdouble(1.0, 0.0)), 0.0, 1e-12);
}

TEST(Gains, CircularGaussianMoments) {
    PathSet ps;
    ps.paths.assign(1, PathParam{1.0, 1.0, 0.0, 1.0});
    Rng rng(11);
    const int n = 100000;
    double sum_sq = 0, sum_re2 = 0, sum_im2 = 0;
    cdouble sum{};
    for (int i = 0; i < n; ++i) {
        const cdouble a = sample_gains(ps, rng)[0];
        sum += a;
        sum_sq += std::norm(a);
        sum_re2 += a.real() * a.real();
        sum_im2 += a.imag() * a.imag();
    }
    EXPECT_NEAR(sum_sq / n, 1.0, 0.02);
    EXPECT_LE(std::abs(sum / double(n)), 0.01);
    EXPECT_NEAR(sum_re2 / n, 0.5, 0.5 * 0.02);
    EXPECT_NEAR(sum_im2 / n, 0.5, 0.5 * 0.02);
}

TEST(Gains, PerPathVariance) {
    PathSet ps;
    ps.paths = {PathParam{1.0, 1.0, 0.0, 0.25}, PathParam{1.0, 1.0, 0.0, 4.0}};
    Rng rng(12);
    double s0 = 0, s1 = 0;
    const int n = 50000;
    for (int i = 0; i < n; ++i) {
        const auto a = sample_gains(ps, rng);
        s0 += std::norm(a[0]);
        s1 += std::norm(a[1]);
    }
    EXPECT_NEAR(s0 / n, 0.25, 0.25 * 0.03);
    EXPECT_NEAR(s1 / n, 4.0, 4.0 * 0.03);
}

TEST(Sfcrm, DelayFreeChannelIsFlat) {
    const auto g = half_lambda(4, 4);
    const OfdmConfig ofdm{64, 16, 50e-9};
    PathSet ps;
    ps.paths = {PathParam{0.9, 0.4, 0.0, 1.0}};
    const CMatrix H = sfcrm(ps, {cdouble(0.3, -1.2)}, g, ofdm);
    ASSERT_EQ(H.rows(), 16);
    ASSERT_EQ(H.cols(), 64);
    for (int l = 1; l < 64; ++l)
        EXPECT_LT((H.col(l) - H.col(0)).norm(), 1e-12);
}

TEST(Sfcrm, UnitMagnitudeAtBroadside) {
    const auto g = half_lambda(4, 4);
    const OfdmConfig ofdm{32, 8, 50e-9};
    PathSet ps;
    ps.paths = {PathParam{kPi / 2, kPi / 2, 3.7, 1.0}};
    const CMatrix H = sfcrm(ps, {cdouble(1.0, 0.0)}, g, ofdm);
    EXPECT_LT((H.cwiseAbs().array() - 1.0).abs().maxCoeff(), 1e-12);
}

TEST(Sfcrm, LinearInPathsAndGains) {
    const auto g = half_lambda(4, 8);
    const OfdmConfig ofdm{64, 16, 50e-9};
    PathSet both, first, second;
    const PathParam p1{0.7, 1.9, 2.3, 0.6}, p2{2.2, 0.4, 9.8, 0.4};
    both.paths = {p1, p2};
    first.paths = {p1};
    second.paths = {p2};
    const cdouble a1(0.5, 0.1), a2(-0.2, 0.9);
    const CMatrix sum = sfcrm(first, {a1}, g, ofdm) + sfcrm(second, {a2}, g, ofdm);
    EXPECT_LT((sfcrm(both, {a1, a2}, g, ofdm) - sum).norm(), 1e-12);

    const cdouble b1(1.3, -0.4), b2(0.0, 0.7);
    const CMatrix lhs = sfcrm(both, {a1 + b1, a2 + b2}, g, ofdm);
    const CMatrix rhs = sfcrm(both, {a1, a2}, g, ofdm) + sfcrm(both, {b1, b2}, g, ofdm);
    EXPECT_LT((lhs - rhs).norm(), 1e-12);
}

TEST(Sfcrm, GainCountMismatchThrows) {
    PathSet ps;
    ps.paths = {PathParam{1.0, 1.0, 0.0, 1.0}};
    EXPECT_THROW(sfcrm(ps, {}, half_lambda(2, 2), OfdmConfig{}), DimensionError);
}

Box full_area() { return Box{{-15.0, -15.0, 0.0}, {15.0, 15.0, 9.0}}; }

TEST(Scene, DeterministicAndSized) {
    const Scene a = generate_scene(full_area(), {-100, 0, 25}, 50, 2.0, 42);
    const Scene b = generate_scene(full_area(), {-100, 0, 25}, 50, 2.0, 42);
    ASSERT_EQ(a.scatterers.size(), 50u);
    for (std::size_t i = 0; i < 50; ++i) {
        EXPECT_EQ(a.scatterers[i].pos, b.scatterers[i].pos);
        EXPECT_EQ(a.scatterers[i].gain_db, b.scatterers[i].gain_db);
    }
    const Scene c = generate_scene(full_area(), {-100, 0, 25}, 50, 2.0, 43);
    EXPECT_NE(a.scatterers[0].pos, c.scatterers[0].pos);
}

TEST(Scene, ScatterersInsideEnclosingRegion) {
    const SceneOptions opt;
    const Scene s = generate_scene(full_area(), {-100, 0, 25}, 500, 2.0, 3, opt);
    const Box region{{-15 - opt.margin_xy, -15 - opt.margin_xy, 0.0},
                     {15 + opt.margin_xy, 15 + opt.margin_xy, 9 + opt.margin_z}};
    for (const auto& sc : s.scatterers)
        EXPECT_TRUE(region.contains(sc.pos));
}

TEST(Scene, LognormalGains) {
    // Gains in dB should be N(0, sigma^2): check mean, spread, skewness, kurtosis.
    const SceneOptions opt;
    std::vector<double> g;
    for (std::uint64_t seed = 0; seed < 10000; ++seed)
        g.push_back(generate_scene(full_area(), {-100, 0, 25}, 1, 2.0, seed, opt).scatterers[0].gain_db);
    const double n = static_cast<double>(g.size());
    const double mean = std::accumulate(g.begin(), g.end(), 0.0) / n;
    double m2 = 0, m3 = 0, m4 = 0;
    for (double x : g) {
        const double d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    EXPECT_NEAR(mean, 0.0, 4 * opt.gain_sigma_db / std::sqrt(n));
    EXPECT_NEAR(std::sqrt(m2), opt.gain_sigma_db, 0.03 * opt.gain_sigma_db);
    EXPECT_NEAR(m3 / std::pow(m2, 1.5), 0.0, 0.1);
    EXPECT_NEAR(m4 / (m2 * m2), 3.0, 0.2);
}

TEST(Scene, InvalidArgumentsThrow) {
    EXPECT_THROW(generate_scene(Box{{0, 0, 0}, {0, 1, 1}}, {-100, 0, 25}, 5, 2.0, 1), std::invalid_argument);
    EXPECT_THROW(generate_scene(full_area(), {-100, 0, 25}, 0, 2.0, 1), std::invalid_argument);
}

TEST(Scene, JsonRoundTrip) {
    const Scene a = generate_scene(full_area(), {-100, 0, 25}, 7, 2.5, 9);
    const Scene b = scene_from_json(nlohmann::json::parse(scene_to_json(a).dump()));
    ASSERT_EQ(b.scatterers.size(), 7u);
    EXPECT_EQ(b.bs_position, a.bs_position);
    EXPECT_EQ(b.pathloss_exponent, 2.5);
    EXPECT_EQ(b.seed, 9u);
    EXPECT_EQ(b.bounds.lo, a.bounds.lo);
    for (std::size_t i = 0; i < 7; ++i) {
        EXPECT_EQ(b.scatterers[i].pos, a.scatterers[i].pos);
        EXPECT_EQ(b.scatterers[i].gain_db, a.scatterers[i].gain_db);
    }
}

TEST(Paths, SpatialConsistency) {
    const OfdmConfig ofdm{128, 32, 50e-9};
    const Scene s = generate_scene(full_area(), {-100, 0, 25}, 50, 2.0, 4);
    const Vec3 p1{1.0, 2.0, 1.5}, p2{1.0, 2.1, 1.5};
    const PathSet a = paths_for_position(s, p1, ofdm);
    const PathSet b = paths_for_position(s, p2, ofdm);
    ASSERT_EQ(a.paths.size(), b.paths.size());
    const double bound = 2 * 0.1 / (kSpeedOfLight * ofdm.Ts);
    for (std::size_t i = 0; i < a.paths.size(); ++i) {
        EXPECT_EQ(a.paths[i].theta, b.paths[i].theta);
        EXPECT_EQ(a.paths[i].phi, b.paths[i].phi);
        EXPECT_LE(std::abs(a.paths[i].r - b.paths[i].r), bound);
    }
}

TEST(Paths, DeterministicAndNormalized) {
    const OfdmConfig ofdm{128, 32, 50e-9};
    const Scene s = generate_scene(full_area(), {-100, 0, 25}, 50, 2.0, 4);
    const Vec3 p{-3.0, 7.5, 4.5};
    const PathSet a = paths_for_position(s, p, ofdm);
    const PathSet b = paths_for_position(s, p, ofdm);
    ASSERT_EQ(a.paths.size(), b.paths.size());
    for (std::size_t i = 0; i < a.paths.size(); ++i) {
        EXPECT_EQ(a.paths[i].r, b.paths[i].r);
        EXPECT_EQ(a.paths[i].sigma2, b.paths[i].sigma2);
        EXPECT_LT(a.paths[i].r, ofdm.Ng);
    }
    EXPECT_NEAR(a.total_power(), 1.0, 1e-12);
}

TEST(Paths, SnappedDelaysAreIntegers) {
    const OfdmConfig ofdm{128, 32, 50e-9};
    const Scene s = generate_scene(full_area(), {-100, 0, 25}, 20, 2.0, 4);
    for (const auto& p : paths_for_position(s, {0, 0, 1}, ofdm, true).paths)
        EXPECT_EQ(p.r, std::round(p.r));
}

TEST(Paths, UndersizedGuardThrows) {
    const Scene s = generate_scene(full_area(), {-100, 0, 25}, 10, 2.0, 4);
    EXPECT_THROW(paths_for_position(s, {0, 0, 1}, OfdmConfig{128, 2, 50e-9}), std::runtime_error);
    EXPECT_THROW(paths_for_position(s, {100, 0, 1}, OfdmConfig{}), std::invalid_argument);
}

TEST(Config, Validation) {
    ArrayGeometry g = half_lambda(4, 4);
    EXPECT_NO_THROW(g.validate());
    EXPECT_DOUBLE_EQ(g.d_v, g.lambda_c / 2);
    g.M = 0;
    EXPECT_THROW(g.validate(), std::invalid_argument);
    EXPECT_THROW((OfdmConfig{16, 32, 50e-9}).validate(), std::invalid_argument);
    EXPECT_THROW((OfdmConfig{16, 0, 50e-9}).validate(), std::invalid_argument);
    EXPECT_THROW((OfdmConfig{16, 8, 0.0}).validate(), std::invalid_argument);
    PathSet empty;
    EXPECT_THROW(empty.validate(), std::invalid_argument);
}

} // namespace
} // namespace adloc
