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

#include <benchmark/benchmark.h>

#include "adloc/fingerprint.hpp"
#include "adloc/harness/config.hpp"
#include "adloc/harness/dataset.hpp"
#include "adloc/harness/theory.hpp"
#include "adloc/model/network.hpp"
#include "adloc/nn/ops.hpp"
#include "adloc/wknn.hpp"

using namespace adloc;

namespace {

nn::Tensor4<float> random_tensor(nn::Shape4 s, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    nn::Tensor4<float> t(s);
    for (auto& v : t.data)
        v = u(rng);
    return t;
}

// Args: channels in, channels out. Desk-scale refinement-sized activation.
void BM_Conv3dForward(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0)), q = static_cast<int>(state.range(1));
    const auto x = random_tensor({4, 8, 32, p}, 1);
    nn::ConvKernel<float> k({3, 3, 3}, p, q);
    Rng rng(2);
    std::uniform_real_distribution<float> u(-0.1f, 0.1f);
    for (auto& w : k.w)
        w = u(rng);
    for (auto _ : state)
        benchmark::DoNotOptimize(nn::conv3d_forward(x, k));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(x.shape.voxels()) * 27 * p * q);
}
BENCHMARK(BM_Conv3dForward)->Args({1, 8})->Args({8, 8})->Args({16, 32});

void BM_Conv3dBackward(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0)), q = static_cast<int>(state.range(1));
    const auto x = random_tensor({4, 8, 32, p}, 3);
    const auto g = random_tensor({4, 8, 32, q}, 4);
    nn::ConvKernel<float> k({3, 3, 3}, p, q);
    for (auto _ : state)
        benchmark::DoNotOptimize(nn::conv3d_backward(x, k, g));
}
BENCHMARK(BM_Conv3dBackward)->Args({8, 8})->Args({16, 32});

void BM_AngleDelayTransform(benchmark::State& state) {
    const int M = static_cast<int>(state.range(0)), N = static_cast<int>(state.range(1));
    const ArrayGeometry g = ArrayGeometry::half_wavelength(M, N, 2e9);
    const OfdmConfig ofdm{128, 32, 50e-9};
    const AngleDelayTransform t(g, ofdm);
    const PathSet ps = harness::reference_offgrid_paths();
    Rng rng(5);
    const CMatrix H = sfcrm(ps, sample_gains(ps, rng), g, ofdm);
    for (auto _ : state)
        benchmark::DoNotOptimize(t.apply(H));
}
BENCHMARK(BM_AngleDelayTransform)->Args({4, 8})->Args({8, 16});

void BM_AdcpmSampleAverage(benchmark::State& state) {
    const harness::ExperimentConfig c;
    const PathSet ps = harness::reference_offgrid_paths();
    Rng rng(6);
    for (auto _ : state)
        benchmark::DoNotOptimize(adcpm_mc(ps, c.geometry, c.ofdm, 100, rng));
}
BENCHMARK(BM_AdcpmSampleAverage)->Unit(benchmark::kMillisecond);

void BM_WknnQuery(benchmark::State& state) {
    const harness::ExperimentConfig c;
    const auto train = harness::make_train_set(c, harness::build_scene(c), FingerprintKind::ADCPM);
    const FingerprintDatabase db = harness::to_database(train);
    const RMatrix q = train.samples[17].fingerprint.omega;
    for (auto _ : state)
        benchmark::DoNotOptimize(query(db, q, 4));
    state.counters["entries"] = static_cast<double>(db.size());
}
BENCHMARK(BM_WknnQuery)->Unit(benchmark::kMicrosecond);

void BM_Cnn3dPredict(benchmark::State& state) {
    const harness::ExperimentConfig c;
    model::Network net(c.network_for(harness::Method::Cnn3d));
    const auto x = random_tensor(net.input_shape(), 7);
    for (auto _ : state)
        benchmark::DoNotOptimize(net.predict(x));
}
BENCHMARK(BM_Cnn3dPredict)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
