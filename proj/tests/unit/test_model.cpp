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
#include <filesystem>

#include "adloc/harness/config.hpp"
#include "adloc/harness/dataset.hpp"
#include "adloc/model/model_io.hpp"
#include "adloc/model/network.hpp"
#include "adloc/model/train.hpp"

namespace adloc::model {
namespace {

NetworkSpec desk_spec() {
    NetworkSpec s;
    s.M = 4;
    s.N = 8;
    s.Ng = 32;
    return s;
}

nn::Batch<float> random_inputs(int n, nn::Shape4 shape, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    nn::Batch<float> b;
    for (int i = 0; i < n; ++i) {
        nn::Tensor4<float> t(shape);
        for (auto& v : t.data)
            v = u(rng);
        b.push_back(std::move(t));
    }
    return b;
}

TEST(Refinement, DeskShapesChain) {
    const NetworkSpec s = desk_spec();
    nn::Sequential<float> seq("r");
    build_refinement(seq, s, "refine");
    const auto out = seq.output_shape(s.input_shape());
    EXPECT_EQ(out.c, s.refinement.merge_channels);
    EXPECT_GT(out.voxels(), 0u);
}

TEST(Refinement, KernelsMustFavourDelayAndFitInput) {
    NetworkSpec s = desk_spec();
    s.refinement.left_kernel = {1, 3, 3};
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s = desk_spec();
    s.refinement.right_kernel = {3, 3, 7}; // spans the wrong angle axis
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s = desk_spec();
    s.refinement.left_kernel = {1, 4, 7};
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s = desk_spec();
    s.refinement.right_kernel = {5, 1, 7}; // taller than M = 4
    nn::Sequential<float> seq("r");
    EXPECT_THROW(build_refinement(seq, s, "refine"), nn::ShapeError);
}

TEST(Inception, WidthsAndSpatialDims) {
    for (int n : {1, 2, 4}) {
        auto block = build_inception<float>("inc", n, 16, 8, {3, 3, 3});
        const nn::Shape4 in{2, 4, 8, 16};
        const auto out = block->output_shape(in);
        EXPECT_EQ(out.c, 4 * 8 * n);
        EXPECT_EQ(out.h, 2);
        EXPECT_EQ(out.w, 4);
        EXPECT_EQ(out.l, 8);
    }
}

TEST(Cnn3d, DeskAndFullScaleBuild) {
    const NetworkSpec desk = desk_spec();
    Network net(desk);
    EXPECT_LT(net.parameter_count(), 2'000'000u);
    EXPECT_EQ(net.body().output_shape(desk.input_shape()), (nn::Shape4{1, 1, 1, 3}));
    Network again(desk);
    EXPECT_EQ(again.parameter_count(), net.parameter_count());

    NetworkSpec full = desk;
    full.M = 8;
    full.N = 16;
    full.Ng = 128;
    auto body = build_network<float>(full);
    EXPECT_EQ(body->output_shape(full.input_shape()), (nn::Shape4{1, 1, 1, 3}));
}

TEST(Cnn3d, ZeroInputGivesHeadBias) {
    Network net(desk_spec());
    auto& head = dynamic_cast<nn::Linear<float>&>(net.body().at(net.body().size() - 1));
    head.params().b = {0.25f, -0.5f, 1.0f};
    const nn::Batch<float> zero{nn::Tensor4<float>(net.input_shape())};
    const auto out = net.forward(zero, nn::Mode::Infer);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_FLOAT_EQ(out[0].data[0], 0.25f);
    EXPECT_FLOAT_EQ(out[0].data[1], -0.5f);
    EXPECT_FLOAT_EQ(out[0].data[2], 1.0f);
}

TEST(Cnn3d, FirstFailingLayerIsNamed) {
    NetworkSpec s = desk_spec();
    s.Ng = 4; // too short for the delay pools
    try {
        build_network<float>(s);
        FAIL() << "expected ShapeError";
    } catch (const nn::ShapeError& e) {
        EXPECT_NE(std::string(e.what()).find("layer '"), std::string::npos) << e.what();
    } catch (const std::invalid_argument&) {
        // Caught by spec validation before building; also acceptable.
    }
}

TEST(Cnn2d, FullScaleFollowsLayerTable) {
    NetworkSpec s = desk_spec();
    s.arch = Architecture::Cnn2d;
    s.M = 8;
    s.N = 16;
    s.Ng = 128;
    const Table2dLayout layout = table2d_layout(s);
    EXPECT_DOUBLE_EQ(layout.kernel_scale, 1.0);
    EXPECT_EQ(layout.conv_kernels, (std::array<int, 3>{15, 7, 5}));
    EXPECT_EQ(layout.conv_channels, (std::array<int, 3>{32, 64, 128}));
    EXPECT_EQ(s.input_shape(), (nn::Shape4{128, 128, 1, 1}));
    auto body = build_network<float>(s);
    EXPECT_EQ(body->output_shape(s.input_shape()), (nn::Shape4{1, 1, 1, 3}));
    const auto desc = body->describe().dump();
    EXPECT_NE(desc.find("\"kernel\":[15,15,1]"), std::string::npos);
    // The head consumes 16 * base channels: 1024 at full scale.
    auto& head = dynamic_cast<nn::Linear<float>&>(body->at(body->size() - 1));
    EXPECT_EQ(head.params().in, 1024);
    EXPECT_EQ(head.params().out, 3);
}

TEST(Cnn2d, DeskScaleShrinksTable) {
    NetworkSpec s = desk_spec();
    s.arch = Architecture::Cnn2d;
    const Table2dLayout layout = table2d_layout(s);
    EXPECT_LT(layout.kernel_scale, 1.0);
    for (int k : layout.conv_kernels) {
        EXPECT_EQ(k % 2, 1);
        EXPECT_GE(k, 3);
    }
    Network net(s);
    const auto out = net.predict(random_inputs(1, net.input_shape(), 1)[0]);
    for (double v : out)
        EXPECT_TRUE(std::isfinite(v));
}

TEST(Predict, RepeatableAndBatchIndependent) {
    Network net(desk_spec());
    const auto xs = random_inputs(5, net.input_shape(), 2);
    const Vec3 a = net.predict(xs[2]);
    EXPECT_EQ(net.predict(xs[2]), a);
    const auto all = net.predict(xs);
    EXPECT_EQ(all[2], a);
    const nn::Batch<float> mixed{xs[4], xs[2], xs[0]};
    EXPECT_EQ(net.predict(mixed)[1], a);
    EXPECT_THROW(net.predict(nn::Tensor4<float>({4, 8, 16, 1})), std::invalid_argument);
}

TEST(Prepare, UnitMeanThenCompress) {
    NetworkSpec s = desk_spec();
    s.input_transform = InputTransform::None;
    Network net(s);
    RMatrix omega = RMatrix::Constant(32, 32, 7.0);
    omega(3, 4) = 0.0;
    const auto x = net.prepare(omega);
    double sum = 0;
    for (float v : x.data)
        sum += v;
    EXPECT_NEAR(sum / x.size(), 1.0, 1e-5);
    // (m, n, j) -> omega(m*N + n, j), same memory order.
    EXPECT_EQ(x.at(0, 3, 4, 0), 0.0f);

    s.input_transform = InputTransform::Log1p;
    Network logn(s);
    const auto y = logn.prepare(omega);
    EXPECT_NEAR(y.data[0], std::log1p(x.data[0]), 1e-6);
    EXPECT_THROW(net.prepare(RMatrix::Constant(16, 32, 1.0)), DimensionError);
}

std::vector<Vec3> random_targets(int n, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    std::vector<Vec3> t;
    for (int i = 0; i < n; ++i)
        t.push_back({u(rng), u(rng), u(rng) + 5.0});
    return t;
}

TEST(Train, DeterministicLogs) {
    NetworkSpec s = desk_spec();
    s.refinement.branch_channels = 2;
    s.refinement.merge_channels = 4;
    s.inception.base = 2;
    const auto xs = random_inputs(12, s.input_shape(), 3);
    const auto ys = random_targets(12, 4);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.batch_size = 5;
    auto run = [&] {
        Network net(s);
        return to_json(train(net, xs, ys, cfg)).at("epochs");
    };
    const auto a = run();
    auto b = run();
    for (auto& e : b)
        e.erase("seconds");
    auto a2 = a;
    for (auto& e : a2)
        e.erase("seconds");
    EXPECT_EQ(a2, b);
}

TEST(Train, RegularizationRaisesInitialLoss) {
    NetworkSpec s = desk_spec();
    s.inception.base = 2;
    const auto xs = random_inputs(8, s.input_shape(), 5);
    const auto ys = random_targets(8, 6);
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.batch_size = 8;
    cfg.adam.learning_rate = 1e-12;
    s.lambda = 0.0;
    Network plain(s);
    const double l0 = train(plain, xs, ys, cfg).epochs.at(0).loss;
    s.lambda = 1e-2;
    Network reg(s);
    const double l1 = train(reg, xs, ys, cfg).epochs.at(0).loss;
    EXPECT_GT(l1, l0);
}

TEST(Train, NonFiniteTargetIsReported) {
    NetworkSpec s = desk_spec();
    s.inception.base = 2;
    auto xs = random_inputs(4, s.input_shape(), 7);
    auto ys = random_targets(4, 8);
    xs[1].data[5] = std::numeric_limits<float>::quiet_NaN();
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.batch_size = 4;
    cfg.standardize_targets = false;
    Network net(s);
    try {
        train(net, xs, ys, cfg);
        FAIL() << "expected NumericalError";
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("epoch 1"), std::string::npos) << e.what();
    }
}

TEST(Train, EightSampleOverfit) {
    harness::ExperimentConfig c;
    const Scene scene = harness::build_scene(c);
    const auto train_set = harness::make_train_set(c, scene, FingerprintKind::ADCPM);
    Network net(c.network_for(harness::Method::Cnn3d));
    nn::Batch<float> xs;
    std::vector<Vec3> ys;
    for (std::size_t i = 0; i < 8; ++i) {
        const auto& smp = train_set.samples[i * (train_set.size() / 8)];
        xs.push_back(net.prepare(smp.fingerprint));
        ys.push_back(smp.position);
    }
    TrainConfig cfg;
    cfg.epochs = 500;
    cfg.batch_size = 8;
    train(net, xs, ys, cfg);
    const auto pred = net.predict(xs);
    double mean_err = 0;
    for (std::size_t i = 0; i < 8; ++i)
        mean_err += distance(pred[i], ys[i]) / 8;
    EXPECT_LE(mean_err, 0.1);
}

TEST(ModelIo, RoundTripIsBitIdentical) {
    NetworkSpec s = desk_spec();
    s.inception.base = 4;
    Network net(s);
    const auto xs = random_inputs(6, s.input_shape(), 9);
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.batch_size = 3;
    train(net, xs, random_targets(6, 10), cfg);
    const auto dir = std::filesystem::temp_directory_path() / "adloc_model_io_test";
    std::filesystem::create_directories(dir);
    const auto bytes = save_network(net, dir / "net.json");
    EXPECT_GT(bytes, 4 * net.parameter_count());
    Network back = load_network(dir / "net.json");
    EXPECT_EQ(back.parameter_count(), net.parameter_count());
    const auto a = net.predict(xs);
    const auto b = back.predict(xs);
    for (std::size_t i = 0; i < a.size(); ++i)
        EXPECT_EQ(a[i], b[i]);

    // Truncated blob is rejected.
    std::filesystem::resize_file(dir / "net.bin", std::filesystem::file_size(dir / "net.bin") - 4);
    EXPECT_THROW(load_network(dir / "net.json"), std::runtime_error);
    std::filesystem::remove_all(dir);
}

TEST(Spec, JsonRoundTrip) {
    NetworkSpec s = desk_spec();
    s.inception.factors = {1, 3};
    s.inception.pools = {std::nullopt, nn::PoolSpec{{1, 1, 2}, {1, 1, 2}, nn::Padding::Same}};
    s.lambda = 3e-4;
    s.input_transform = InputTransform::Sqrt;
    const NetworkSpec b = network_spec_from_json(nlohmann::json::parse(to_json(s).dump()));
    EXPECT_EQ(to_json(b), to_json(s));
    EXPECT_THROW(network_spec_from_json({{"inception", {{"factors", {1, 0}}}}}), std::invalid_argument);
    EXPECT_THROW(network_spec_from_json({{"bogus", 1}}), std::invalid_argument);
}

} // namespace
} // namespace adloc::model
