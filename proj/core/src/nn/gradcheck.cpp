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

#include "adloc/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace adloc::nn {

namespace {

double probe_objective(Layer<double>& layer, const Batch<double>& input, const Batch<double>& probe) {
    const Batch<double> y = layer.forward(input, Mode::Train);
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i)
        for (std::size_t k = 0; k < y[i].size(); ++k)
            acc += probe[i].data[k] * y[i].data[k];
    return acc;
}

std::vector<std::size_t> sample_coords(std::size_t n, int per_block, Rng& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (per_block > 0 && n > static_cast<std::size_t>(per_block)) {
        std::shuffle(idx.begin(), idx.end(), rng);
        idx.resize(per_block);
    }
    return idx;
}

struct Tracker {
    GradCheckReport report;
    double floor_fraction;

    void block(const std::string& name, const std::vector<double>& analytic,
               const std::vector<std::size_t>& coords, const std::vector<double>& numeric) {
        double scale = 0.0;
        for (double a : analytic)
            scale = std::max(scale, std::abs(a));
        const double floor = std::max(floor_fraction * scale, 1e-12);
        for (std::size_t k = 0; k < coords.size(); ++k) {
            const double a = analytic[coords[k]];
            const double n = numeric[k];
            const double err = std::abs(a - n) / std::max({std::abs(a), std::abs(n), floor});
            ++report.checked;
            if (report.worst.empty() || err > report.max_rel_error) {
                report.max_rel_error = err;
                report.worst = name + "[" + std::to_string(coords[k]) + "]";
            }
        }
    }
};

} // namespace

GradCheckReport finite_diff_check(Layer<double>& layer, const Batch<double>& input,
                                  const GradCheckOptions& options) {
    if (input.empty())
        throw std::invalid_argument("finite_diff_check: empty input batch");
    if (!(options.step > 0.0))
        throw std::invalid_argument("finite_diff_check: step must be positive");

    Rng rng = make_rng(options.seed, 0x9c);
    std::normal_distribution<double> normal(0.0, 1.0);

    Batch<double> x = input;
    const Batch<double> y0 = layer.forward(x, Mode::Train);
    Batch<double> probe;
    for (const auto& t : y0) {
        Tensor4<double> r(t.shape);
        for (auto& v : r.data)
            v = normal(rng);
        probe.push_back(std::move(r));
    }

    layer.zero_grad();
    layer.forward(x, Mode::Train);
    const Batch<double> gin = layer.backward(probe);

    std::vector<ParamRef<double>> params;
    layer.collect_params(params);
    // Snapshot analytic parameter gradients before perturbation passes.
    std::vector<std::vector<double>> analytic_params;
    for (const auto& p : params)
        analytic_params.push_back(*p.grad);

    Tracker tracker{{}, options.floor_fraction};
    const double h = options.step;

    std::vector<double> flat_in, flat_gin;
    std::vector<std::pair<std::size_t, std::size_t>> loc;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t k = 0; k < x[i].size(); ++k) {
            flat_gin.push_back(gin[i].data[k]);
            loc.emplace_back(i, k);
        }
    {
        const auto coords = sample_coords(flat_gin.size(), options.coords_per_block, rng);
        std::vector<double> numeric;
        for (std::size_t c : coords) {
            auto [i, k] = loc[c];
            const double orig = x[i].data[k];
            x[i].data[k] = orig + h;
            const double fp = probe_objective(layer, x, probe);
            x[i].data[k] = orig - h;
            const double fm = probe_objective(layer, x, probe);
            x[i].data[k] = orig;
            numeric.push_back((fp - fm) / (2.0 * h));
        }
        tracker.block("input", flat_gin, coords, numeric);
    }

    for (std::size_t b = 0; b < params.size(); ++b) {
        auto& value = *params[b].value;
        const auto coords = sample_coords(value.size(), options.coords_per_block, rng);
        std::vector<double> numeric;
        for (std::size_t c : coords) {
            const double orig = value[c];
            value[c] = orig + h;
            const double fp = probe_objective(layer, x, probe);
            value[c] = orig - h;
            const double fm = probe_objective(layer, x, probe);
            value[c] = orig;
            numeric.push_back((fp - fm) / (2.0 * h));
        }
        tracker.block(params[b].name, analytic_params[b], coords, numeric);
    }
    return tracker.report;
}

} // namespace adloc::nn
