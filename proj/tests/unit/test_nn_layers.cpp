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

#include "adloc/harness/gradsuite.hpp"
#include "adloc/nn/gradcheck.hpp"
#include "adloc/nn/layers.hpp"

namespace adloc::nn {
namespace {

Batch<double> random_batch(int n, Shape4 s, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Batch<double> b;
    for (int i = 0; i < n; ++i) {
        Tensor4<double> t(s);
        for (auto& v : t.data)
            v = u(rng);
        b.push_back(std::move(t));
    }
    return b;
}

GradCheckOptions opts(double step, std::uint64_t seed) {
    GradCheckOptions o;
    o.step = step;
    o.seed = seed;
    o.coords_per_block = 0;
    return o;
}

TEST(GradCheck, LinearIsExact) {
    Linear<double> layer("head", 24, 3);
    Rng rng(1);
    layer.initialize(rng);
    const auto r = finite_diff_check(layer, random_batch(2, {2, 3, 4, 1}, 2), opts(1e-4, 3));
    EXPECT_GT(r.checked, 0u);
    EXPECT_LE(r.max_rel_error, 1e-8) << r.worst;
}

TEST(GradCheck, Conv3d) {
    Conv3d<double> layer("conv", {3, 3, 3}, 2, 3);
    Rng rng(4);
    layer.initialize(rng);
    const auto r = finite_diff_check(layer, random_batch(1, {4, 4, 4, 2}, 5), opts(1e-5, 6));
    EXPECT_LE(r.max_rel_error, 1e-5) << r.worst;
}

TEST(GradCheck, BatchNormTrain) {
    BatchNorm<double> layer("bn", 3);
    const auto r = finite_diff_check(layer, random_batch(3, {2, 3, 4, 3}, 7), opts(1e-5, 8));
    EXPECT_LE(r.max_rel_error, 1e-4) << r.worst;
}

TEST(GradCheck, SuiteCoversEveryLayerType) {
    const auto cases = harness::gradient_suite(2);
    std::vector<std::string> names;
    for (const auto& c : cases) {
        names.push_back(c.layer);
        EXPECT_EQ(c.seeds, 2);
        EXPECT_TRUE(c.passed()) << c.layer << " " << c.max_rel_error << " at " << c.worst;
    }
    for (const char* want : {"conv3d", "batchnorm", "relu", "maxpool", "avgpool", "global_avg_pool", "linear",
                             "concat", "cna", "cnn3d_miniature"})
        EXPECT_NE(std::find(names.begin(), names.end(), want), names.end()) << want;
}

TEST(Layers, ShapeErrorsNameTheLayer) {
    Sequential<float> seq("body");
    add_cna(seq, "stem", {3, 3, 3}, 2, 4);
    seq.add<Linear<float>>("head", 10, 3);
    try {
        seq.output_shape({4, 4, 4, 2});
        FAIL() << "expected ShapeError";
    } catch (const ShapeError& e) {
        EXPECT_NE(std::string(e.what()).find("head"), std::string::npos) << e.what();
    }
    Conv3d<float> conv("c1", {3, 3, 3}, 3, 4);
    try {
        conv.output_shape({4, 4, 4, 2});
        FAIL() << "expected ShapeError";
    } catch (const ShapeError& e) {
        EXPECT_NE(std::string(e.what()).find("c1"), std::string::npos);
    }
    MaxPool<float> pool("p", PoolSpec{{3, 1, 1}, {1, 1, 1}, Padding::Valid});
    EXPECT_THROW(pool.output_shape({2, 4, 4, 1}), ShapeError);
}

TEST(Layers, ParallelConcatShapesAndParams) {
    ParallelConcat<float> pc("mix");
    add_cna(pc.add_branch("a"), "a", {1, 1, 1}, 3, 2);
    add_cna(pc.add_branch("b"), "b", {3, 3, 3}, 3, 5);
    EXPECT_EQ(pc.output_shape({4, 4, 8, 3}), (Shape4{4, 4, 8, 7}));
    // conv weights + gamma + beta per branch.
    EXPECT_EQ(pc.parameter_count(), std::size_t(3 * 2 + 2 * 2 + 27 * 3 * 5 + 2 * 5));
    std::vector<ParamRef<float>> ps;
    pc.collect_params(ps);
    int regularized = 0;
    for (const auto& p : ps)
        regularized += p.regularized;
    EXPECT_EQ(regularized, 2);
    std::vector<BufferRef<float>> bufs;
    pc.collect_buffers(bufs);
    EXPECT_EQ(bufs.size(), 4u);
}

TEST(Layers, InitializationIsSeeded) {
    auto make = [](std::uint64_t seed) {
        Sequential<float> s("s");
        add_cna(s, "c", {3, 3, 3}, 2, 3);
        s.add<GlobalAvgPool<float>>("gap");
        s.add<Linear<float>>("fc", 3, 3);
        Rng rng(seed);
        s.initialize(rng);
        std::vector<ParamRef<float>> ps;
        s.collect_params(ps);
        std::vector<float> flat;
        for (const auto& p : ps)
            flat.insert(flat.end(), p.value->begin(), p.value->end());
        return flat;
    };
    EXPECT_EQ(make(3), make(3));
    EXPECT_NE(make(3), make(4));
}

TEST(Layers, TinyOverfitLossNonIncreasing) {
    // 8 samples, full-batch steps, small learning rate: the loss must not rise
    // over the first 50 updates.
    Sequential<double> net("net");
    add_cna(net, "c1", {3, 3, 3}, 1, 4);
    net.add<GlobalAvgPool<double>>("gap");
    net.add<Linear<double>>("fc", 4, 3);
    Rng rng(9);
    net.initialize(rng);
    const auto x = random_batch(8, {3, 3, 4, 1}, 10);
    std::vector<std::array<double, 3>> y;
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 8; ++i)
        y.push_back({u(rng), u(rng), u(rng)});
    std::vector<ParamRef<double>> ps;
    net.collect_params(ps);
    OptimizerState<double> st;
    st.config.learning_rate = 1e-3;
    double prev = 1e300;
    for (int step = 0; step < 50; ++step) {
        net.zero_grad();
        const auto out = net.forward(x, Mode::Train);
        std::vector<std::array<double, 3>> pred;
        for (const auto& t : out)
            pred.push_back({t.data[0], t.data[1], t.data[2]});
        const auto loss = mse_l2_loss<double>(pred, y, 0.0, 0.0);
        EXPECT_LE(loss.total, prev + 1e-12) << "step " << step;
        prev = loss.total;
        Batch<double> g;
        for (const auto& gp : loss.grad_predictions) {
            Tensor4<double> t({1, 1, 1, 3});
            t.data = {gp[0], gp[1], gp[2]};
            g.push_back(t);
        }
        net.backward(g);
        adam_step<double>(ps, st);
    }
}

} // namespace
} // namespace adloc::nn
