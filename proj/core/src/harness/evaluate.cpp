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

#include "adloc/harness/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "adloc/model/model_io.hpp"

namespace adloc::harness {

using nlohmann::json;

std::vector<CdfPoint> empirical_cdf(std::vector<double> errors) {
    std::sort(errors.begin(), errors.end());
    std::vector<CdfPoint> out;
    out.reserve(errors.size());
    const double n = static_cast<double>(errors.size());
    for (std::size_t i = 0; i < errors.size(); ++i)
        out.push_back({errors[i], static_cast<double>(i + 1) / n});
    return out;
}

double percentile(std::vector<double> errors, double q) {
    if (errors.empty())
        throw std::invalid_argument("percentile: no errors");
    if (q < 0.0 || q > 1.0)
        throw std::invalid_argument("percentile: q must lie in [0, 1]");
    std::sort(errors.begin(), errors.end());
    const double pos = q * static_cast<double>(errors.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, errors.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return errors[lo] + frac * (errors[hi] - errors[lo]);
}

json EvalReport::summary() const {
    json j{{"method", to_string(method)},
           {"fingerprint", to_string(kind)},
           {"snr_db", snr_db ? json(*snr_db) : json(nullptr)},
           {"test_points", errors.size()},
           {"p50_error_m", p50},
           {"p90_error_m", p90},
           {"mean_error_m", mean},
           {"latency_ms", latency_ms},
           {"artifact_bytes", artifact_bytes}};
    if (training) {
        j["training_seconds"] = training->seconds;
        if (!training->epochs.empty())
            j["final_loss"] = training->epochs.back().loss;
    }
    return j;
}

void finalize_report(EvalReport& r, const Dataset& test) {
    if (r.predictions.size() != test.size())
        throw DimensionError("finalize_report: prediction count does not match the test set");
    r.errors.clear();
    for (std::size_t i = 0; i < test.size(); ++i)
        r.errors.push_back(distance(r.predictions[i], test.samples[i].position));
    r.cdf = empirical_cdf(r.errors);
    r.p50 = percentile(r.errors, 0.5);
    r.p90 = percentile(r.errors, 0.9);
    double sum = 0.0;
    for (double e : r.errors)
        sum += e;
    r.mean = sum / static_cast<double>(r.errors.size());
    r.kind = test.kind;
    r.snr_db = test.snr_db;
}

Localizer Localizer::build(const ExperimentConfig& c, Method method, const Dataset& train,
                           const RunOptions& options) {
    if (train.samples.empty())
        throw std::invalid_argument("cannot build a localizer from an empty training set");
    if (options.workdir.empty())
        throw std::invalid_argument("Localizer::build: a work directory is required");
    std::filesystem::create_directories(options.workdir);

    Localizer loc;
    loc.method_ = method;
    loc.k_ = c.wknn_k;
    loc.alpha_ = options.denoise_alpha;
    const std::string stem = std::string(to_string(method)) + "-" + to_string(train.kind);

    if (method == Method::Wknn) {
        if (loc.alpha_ > 0.0 && train.kind == FingerprintKind::ADCPM)
            loc.db_ = to_database(denoised(train, loc.alpha_));
        else
            loc.db_ = to_database(train);
        if (static_cast<std::size_t>(loc.k_) > loc.db_->size())
            throw std::invalid_argument("wknn K exceeds the number of reference points");
        const auto path = options.workdir / (stem + ".adb");
        loc.db_->save(path.string());
        loc.artifact_bytes_ = std::filesystem::file_size(path);
        return loc;
    }

    loc.net_ = std::make_shared<model::Network>(c.network_for(method, train.kind));
    nn::Batch<float> inputs;
    std::vector<Vec3> targets;
    inputs.reserve(train.size());
    for (const auto& s : train.samples) {
        inputs.push_back(loc.net_->prepare(loc.preprocess(s.fingerprint)));
        targets.push_back(s.position);
    }
    loc.training_ = model::train(*loc.net_, inputs, targets, c.training, options.on_epoch);
    loc.net_->metadata()["fingerprint"] = to_string(train.kind);
    loc.net_->metadata()["config_hash"] = train.config_hash;
    loc.artifact_bytes_ = model::save_network(*loc.net_, options.workdir / (stem + ".json"));
    return loc;
}

Fingerprint Localizer::preprocess(const Fingerprint& fp) const {
    if (alpha_ > 0.0 && fp.kind == FingerprintKind::ADCPM)
        return denoise(fp, alpha_);
    return fp;
}

Vec3 Localizer::locate(const Fingerprint& fp) {
    if (method_ == Method::Wknn)
        return query(*db_, preprocess(fp).omega, k_);
    return net_->predict(net_->prepare(preprocess(fp)));
}

std::vector<Vec3> Localizer::locate_all(const Dataset& test) {
    std::vector<Vec3> out;
    out.reserve(test.size());
    if (method_ == Method::Wknn) {
        for (const auto& s : test.samples)
            out.push_back(locate(s.fingerprint));
        return out;
    }
    nn::Batch<float> xs;
    xs.reserve(test.size());
    for (const auto& s : test.samples)
        xs.push_back(net_->prepare(preprocess(s.fingerprint)));
    return net_->predict(xs);
}

double Localizer::latency_ms(const Dataset& test, int queries) {
    using clock = std::chrono::steady_clock;
    if (test.samples.empty() || queries < 1)
        throw std::invalid_argument("latency_ms: need test samples and a positive query count");
    const std::size_t n = test.size();
    for (std::size_t i = 0; i < std::min<std::size_t>(n, static_cast<std::size_t>(queries)); ++i)
        locate(test.samples[i].fingerprint);
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(queries));
    for (int q = 0; q < queries; ++q) {
        const auto t0 = clock::now();
        const Vec3 p = locate(test.samples[static_cast<std::size_t>(q) % n].fingerprint);
        const auto t1 = clock::now();
        if (!std::isfinite(p[0] + p[1] + p[2]))
            throw NumericalError("latency_ms: non-finite prediction");
        times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return percentile(times, 0.5);
}

EvalReport evaluate(Localizer& loc, const ExperimentConfig& c, const Dataset& test) {
    EvalReport r;
    r.method = loc.method();
    r.predictions = loc.locate_all(test);
    finalize_report(r, test);
    r.latency_ms = loc.latency_ms(test, c.latency_queries);
    r.artifact_bytes = loc.artifact_bytes();
    r.training = loc.training();
    return r;
}

EvalReport run_method(const ExperimentConfig& c, Method method, const Dataset& train, const Dataset& test,
                      const RunOptions& options) {
    if (!train.samples.empty() && !test.samples.empty()) {
        const auto& a = train.samples.front().fingerprint;
        const auto& b = test.samples.front().fingerprint;
        if (a.kind != b.kind || a.omega.rows() != b.omega.rows() || a.omega.cols() != b.omega.cols())
            throw DimensionError("train and test fingerprints differ in kind or dimensions");
    }
    Localizer loc = Localizer::build(c, method, train, options);
    return evaluate(loc, c, test);
}

} // namespace adloc::harness
