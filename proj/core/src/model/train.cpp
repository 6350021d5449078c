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

#include "adloc/model/train.hpp"

#include "json_keys.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace adloc::model {

using nlohmann::json;

json to_json(const TrainConfig& c) {
    return {{"epochs", c.epochs},
            {"batch_size", c.batch_size},
            {"learning_rate", c.adam.learning_rate},
            {"beta1", c.adam.beta1},
            {"beta2", c.adam.beta2},
            {"adam_epsilon", c.adam.epsilon},
            {"cosine_decay", c.cosine_decay},
            {"standardize_targets", c.standardize_targets},
            {"seed", c.seed}};
}

TrainConfig train_config_from_json(const json& j) {
    detail::reject_unknown_keys(j, {"epochs", "batch_size", "learning_rate", "beta1", "beta2", "adam_epsilon",
                                    "cosine_decay", "standardize_targets", "seed"},
                                "training config");
    TrainConfig c;
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.adam.learning_rate = j.value("learning_rate", c.adam.learning_rate);
    c.adam.beta1 = j.value("beta1", c.adam.beta1);
    c.adam.beta2 = j.value("beta2", c.adam.beta2);
    c.adam.epsilon = j.value("adam_epsilon", c.adam.epsilon);
    c.cosine_decay = j.value("cosine_decay", c.cosine_decay);
    c.standardize_targets = j.value("standardize_targets", c.standardize_targets);
    c.seed = j.value("seed", c.seed);
    if (c.epochs < 0 || c.batch_size < 1 || !(c.adam.learning_rate > 0.0))
        throw std::invalid_argument("training config: epochs >= 0, batch_size >= 1, learning_rate > 0");
    return c;
}

json to_json(const TrainLog& log) {
    json epochs = json::array();
    for (const auto& e : log.epochs)
        epochs.push_back({{"epoch", e.epoch},
                          {"loss", e.loss},
                          {"data_loss", e.data_loss},
                          {"learning_rate", e.learning_rate}});
    return {{"epochs", epochs}, {"seconds", log.seconds}};
}

namespace {

TargetScaling fit_scaling(const std::vector<Vec3>& targets, bool standardize) {
    TargetScaling s;
    if (!standardize)
        return s;
    const double n = static_cast<double>(targets.size());
    for (int d = 0; d < 3; ++d) {
        double mean = 0.0;
        for (const auto& t : targets)
            mean += t[d];
        mean /= n;
        double var = 0.0;
        for (const auto& t : targets)
            var += (t[d] - mean) * (t[d] - mean);
        var /= n;
        s.mean[d] = mean;
        s.scale[d] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    return s;
}

} // namespace

TrainLog train(Network& net, const nn::Batch<float>& inputs, const std::vector<Vec3>& targets,
               const TrainConfig& config, const std::function<void(const EpochLog&)>& on_epoch) {
    using clock = std::chrono::steady_clock;
    if (inputs.empty())
        throw std::invalid_argument("train: empty dataset");
    if (inputs.size() != targets.size())
        throw DimensionError("train: input and target counts differ");
    if (config.batch_size < 1 || config.epochs < 0)
        throw std::invalid_argument("train: batch_size must be >= 1 and epochs >= 0");
    for (const auto& x : inputs)
        if (x.shape != net.input_shape())
            throw DimensionError("train: input " + x.shape.str() + " does not match network input " +
                                 net.input_shape().str());

    net.target_scaling() = fit_scaling(targets, config.standardize_targets);
    const TargetScaling sc = net.target_scaling();
    std::vector<std::array<float, 3>> z(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i)
        for (int d = 0; d < 3; ++d)
            z[i][d] = static_cast<float>((targets[i][d] - sc.mean[d]) / sc.scale[d]);

    std::vector<nn::ParamRef<float>> params;
    net.body().collect_params(params);
    nn::OptimizerState<float> opt;
    opt.config = config.adam;
    const float lambda = static_cast<float>(net.spec().lambda);

    Rng shuffle_rng = make_rng(config.seed, 0x5f1e);
    std::vector<std::size_t> order(inputs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainLog log;
    const auto t_start = clock::now();
    const std::size_t B = static_cast<std::size_t>(config.batch_size);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const auto t_epoch = clock::now();
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        const double lr = config.cosine_decay
                              ? config.adam.learning_rate * 0.5 *
                                    (1.0 + std::cos(kPi * epoch / static_cast<double>(config.epochs)))
                              : config.adam.learning_rate;
        opt.config.learning_rate = lr;

        double loss_sum = 0.0, data_sum = 0.0;
        int batch_index = 0;
        for (std::size_t start = 0; start < order.size(); start += B, ++batch_index) {
            const std::size_t stop = std::min(order.size(), start + B);
            nn::Batch<float> xb;
            std::vector<std::array<float, 3>> zb;
            for (std::size_t k = start; k < stop; ++k) {
                xb.push_back(inputs[order[k]]);
                zb.push_back(z[order[k]]);
            }
            const auto where = [&] {
                return "epoch " + std::to_string(epoch + 1) + ", batch " + std::to_string(batch_index + 1);
            };

            net.body().zero_grad();
            const nn::Batch<float> yb = net.forward(xb, nn::Mode::Train);
            std::vector<std::array<float, 3>> preds(yb.size());
            for (std::size_t i = 0; i < yb.size(); ++i)
                for (int d = 0; d < 3; ++d)
                    preds[i][d] = yb[i].data[d];

            double sq = 0.0;
            for (const auto& p : params)
                if (p.regularized)
                    for (float v : *p.value)
                        sq += static_cast<double>(v) * v;
            const auto loss = nn::mse_l2_loss(std::span<const std::array<float, 3>>(preds),
                                              std::span<const std::array<float, 3>>(zb),
                                              static_cast<float>(sq), lambda);
            if (!std::isfinite(loss.total))
                throw NumericalError("training loss is not finite at " + where());

            nn::Batch<float> gout;
            for (const auto& g : loss.grad_predictions) {
                nn::Tensor4<float> t(nn::Shape4{1, 1, 1, 3});
                std::copy(g.begin(), g.end(), t.data.begin());
                gout.push_back(std::move(t));
            }
            net.body().backward(gout);
            if (lambda > 0.0f)
                for (auto& p : params)
                    if (p.regularized)
                        for (std::size_t i = 0; i < p.value->size(); ++i)
                            (*p.grad)[i] += lambda * (*p.value)[i];
            try {
                nn::adam_step(std::span<const nn::ParamRef<float>>(params), opt);
            } catch (const NumericalError& e) {
                throw NumericalError(std::string(e.what()) + " at " + where());
            }
            const double n = static_cast<double>(stop - start);
            loss_sum += loss.total * n;
            data_sum += loss.data * n;
        }

        EpochLog e;
        e.epoch = epoch + 1;
        e.loss = loss_sum / static_cast<double>(order.size());
        e.data_loss = data_sum / static_cast<double>(order.size());
        e.learning_rate = lr;
        e.seconds = std::chrono::duration<double>(clock::now() - t_epoch).count();
        log.epochs.push_back(e);
        if (on_epoch)
            on_epoch(e);
    }
    log.seconds = std::chrono::duration<double>(clock::now() - t_start).count();
    net.metadata()["training"] = to_json(config);
    net.metadata()["training"]["samples"] = inputs.size();
    if (!log.epochs.empty())
        net.metadata()["training"]["final_loss"] = log.epochs.back().loss;
    return log;
}

} // namespace adloc::model
