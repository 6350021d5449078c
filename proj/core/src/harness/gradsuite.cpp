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

#include "adloc/harness/gradsuite.hpp"

#include <functional>
#include <memory>
#include <random>

#include "adloc/model/network.hpp"
#include "adloc/nn/gradcheck.hpp"

namespace adloc::harness {

namespace {

using nn::Batch;
using nn::Shape4;
using nn::Tensor4;

Batch<double> random_batch(std::size_t count, const Shape4& s, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Batch<double> b;
    for (std::size_t i = 0; i < count; ++i) {
        Tensor4<double> t(s);
        for (auto& v : t.data)
            v = normal(rng);
        b.push_back(std::move(t));
    }
    return b;
}

/// Perturbs BN affine parameters away from (1, 0) so their gradients are exercised.
void jitter_params(nn::Layer<double>& layer, Rng& rng) {
    std::vector<nn::ParamRef<double>> ps;
    layer.collect_params(ps);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (auto& p : ps)
        if (!p.regularized)
            for (auto& v : *p.value)
                v += u(rng);
}

struct Spec {
    std::string name;
    double tolerance;
    double step;
    std::size_t batch;
    Shape4 input;
    std::function<std::unique_ptr<nn::Layer<double>>()> make;
};

model::NetworkSpec miniature_spec() {
    model::NetworkSpec s;
    s.M = 4;
    s.N = 4;
    s.Ng = 8;
    s.refinement.left_kernel = {1, 3, 5};
    s.refinement.right_kernel = {3, 1, 5};
    s.refinement.branch_channels = 2;
    s.refinement.left_pool = {{1, 2, 2}, {2, 2, 2}, nn::Padding::Valid};
    s.refinement.right_pool = {{2, 1, 2}, {2, 2, 2}, nn::Padding::Valid};
    s.refinement.merge_kernel = {3, 3, 3};
    s.refinement.merge_channels = 4;
    s.refinement.merge_pool = {{1, 1, 2}, {1, 1, 2}, nn::Padding::Valid};
    s.inception.base = 2;
    s.inception.factors = {1};
    s.inception.pools = {};
    return s;
}

} // namespace

std::vector<GradCase> gradient_suite(int seeds) {
    if (seeds < 1)
        throw std::invalid_argument("gradient_suite: need at least one seed");
    const std::vector<Spec> specs{
        {"conv3d", 1e-5, 1e-5, 2, {4, 4, 4, 2},
         [] { return std::make_unique<nn::Conv3d<double>>("conv", std::array<int, 3>{3, 3, 3}, 2, 3); }},
        {"batchnorm", 1e-4, 1e-5, 3, {3, 3, 3, 2},
         [] { return std::make_unique<nn::BatchNorm<double>>("bn", 2); }},
        {"relu", 1e-5, 1e-5, 2, {3, 3, 3, 2}, [] { return std::make_unique<nn::ReLU<double>>("relu"); }},
        {"maxpool", 1e-5, 1e-5, 2, {4, 5, 6, 2},
         [] {
             return std::make_unique<nn::MaxPool<double>>("pool",
                                                          nn::PoolSpec{{2, 2, 3}, {2, 2, 2}, nn::Padding::Valid});
         }},
        {"maxpool_same", 1e-5, 1e-5, 2, {5, 5, 1, 2},
         [] {
             return std::make_unique<nn::MaxPool<double>>("pool",
                                                          nn::PoolSpec{{3, 3, 1}, {2, 2, 1}, nn::Padding::Same});
         }},
        {"avgpool", 1e-5, 1e-5, 2, {3, 4, 5, 2},
         [] {
             return std::make_unique<nn::AvgPool<double>>("avg",
                                                          nn::PoolSpec{{3, 3, 3}, {1, 1, 1}, nn::Padding::Same});
         }},
        {"global_avg_pool", 1e-5, 1e-5, 2, {3, 3, 3, 4},
         [] { return std::make_unique<nn::GlobalAvgPool<double>>("gap"); }},
        {"linear", 1e-5, 1e-4, 2, {1, 1, 1, 6},
         [] { return std::make_unique<nn::Linear<double>>("fc", 6, 3); }},
        {"concat", 1e-5, 1e-5, 2, {3, 3, 3, 2},
         [] {
             auto p = std::make_unique<nn::ParallelConcat<double>>("cat");
             p->add_branch("a").add<nn::Conv3d<double>>("a.conv", std::array<int, 3>{1, 1, 1}, 2, 2);
             p->add_branch("b").add<nn::Conv3d<double>>("b.conv", std::array<int, 3>{3, 3, 3}, 2, 3);
             return p;
         }},
        {"cna", 1e-4, 1e-6, 3, {3, 3, 4, 2},
         [] {
             auto s = std::make_unique<nn::Sequential<double>>("cna");
             nn::add_cna(*s, "cna", {3, 3, 3}, 2, 3);
             return s;
         }},
        {"cnn3d_miniature", 1e-4, 1e-6, 4, miniature_spec().input_shape(),
         [] { return model::build_network<double>(miniature_spec()); }},
    };

    std::vector<GradCase> out;
    for (const auto& spec : specs) {
        GradCase gc;
        gc.layer = spec.name;
        gc.tolerance = spec.tolerance;
        for (int s = 0; s < seeds; ++s) {
            Rng rng = make_rng(static_cast<std::uint64_t>(s), 0x6c);
            auto layer = spec.make();
            layer->initialize(rng);
            jitter_params(*layer, rng);
            const Batch<double> x = random_batch(spec.batch, spec.input, rng);
            nn::GradCheckOptions opt;
            opt.step = spec.step;
            opt.seed = static_cast<std::uint64_t>(s);
            const auto r = nn::finite_diff_check(*layer, x, opt);
            if (r.max_rel_error > gc.max_rel_error || gc.worst.empty()) {
                gc.max_rel_error = std::max(gc.max_rel_error, r.max_rel_error);
                gc.worst = "seed " + std::to_string(s) + ": " + r.worst;
            }
            ++gc.seeds;
        }
        out.push_back(gc);
    }
    return out;
}

nlohmann::json to_json(const std::vector<GradCase>& cases) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : cases)
        arr.push_back({{"layer", c.layer},
                       {"seeds", c.seeds},
                       {"max_rel_error", c.max_rel_error},
                       {"tolerance", c.tolerance},
                       {"worst", c.worst},
                       {"passed", c.passed()}});
    return arr;
}

} // namespace adloc::harness
