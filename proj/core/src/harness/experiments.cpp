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

#include "adloc/harness/experiments.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

namespace adloc::harness {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw std::runtime_error("cannot write " + path.string());
    return os;
}

void write_json(const std::filesystem::path& path, const json& j) {
    auto os = open_out(path);
    os << j.dump(2) << '\n';
}

void note(const Progress& p, const std::string& msg) {
    if (p)
        p(msg);
}

} // namespace

std::filesystem::path make_run_dir(const std::filesystem::path& root, const std::string& command,
                                   const ExperimentConfig& c) {
    const auto dir = root / (command + "-" + config_hash(c));
    std::filesystem::create_directories(dir);
    json j = to_json(c);
    j["config_hash"] = config_hash(c);
    write_json(dir / "config.json", j);
    return dir;
}

void write_cdf_csv(const std::filesystem::path& path, const std::vector<CdfPoint>& cdf) {
    auto os = open_out(path);
    os << "error_m,cdf\n";
    for (const auto& p : cdf)
        os << fmt(p.error_m) << ',' << fmt(p.cdf) << '\n';
    if (!os)
        throw std::runtime_error("write failed: " + path.string());
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
    auto os = open_out(path);
    os << "method,fingerprint,snr_db,mean_error_m\n";
    for (const auto& r : rows)
        os << to_string(r.method) << ',' << to_string(r.kind) << ',' << fmt(r.snr_db) << ','
           << fmt(r.mean_error_m) << '\n';
    if (!os)
        throw std::runtime_error("write failed: " + path.string());
}

std::vector<EvalReport> compare(const ExperimentConfig& c, const std::filesystem::path& run_dir,
                                const Progress& progress) {
    c.validate();
    note(progress, "generating datasets");
    const auto [train, test] = generate_dataset(c);
    note(progress, std::to_string(train.size()) + " reference points, " + std::to_string(test.size()) +
                       " test points");

    std::vector<EvalReport> reports;
    json summary = json::array();
    for (Method m : c.methods) {
        const auto dir = run_dir / to_string(m);
        std::filesystem::create_directories(dir);
        RunOptions opts;
        opts.workdir = dir;
        opts.on_epoch = [&](const model::EpochLog& e) {
            if (e.epoch % 10 == 0)
                note(progress, std::string(to_string(m)) + " epoch " + std::to_string(e.epoch) +
                                   " loss " + fmt(e.loss));
        };
        note(progress, std::string("running ") + to_string(m));
        EvalReport r = run_method(c, m, train, test, opts);
        write_cdf_csv(dir / "cdf.csv", r.cdf);
        json rep = r.summary();
        if (r.training)
            rep["training_log"] = model::to_json(*r.training);
        write_json(dir / "report.json", rep);
        summary.push_back(r.summary());
        note(progress, std::string(to_string(m)) + ": median " + fmt(r.p50) + " m, p90 " + fmt(r.p90) +
                           " m, mean " + fmt(r.mean) + " m");
        reports.push_back(std::move(r));
    }
    write_json(run_dir / "summary.json", {{"config_hash", config_hash(c)}, {"methods", summary}});
    return reports;
}

std::vector<SweepRow> snr_sweep(const ExperimentConfig& c, const std::vector<double>& snr_list,
                                const std::filesystem::path& run_dir, const Progress& progress) {
    c.validate();
    if (snr_list.empty())
        throw std::invalid_argument("snr_sweep: SNR list is empty");
    const Scene scene = build_scene(c);
    const std::filesystem::path work = run_dir.empty() ? std::filesystem::temp_directory_path() / "adloc-sweep"
                                                       : run_dir / "artifacts";

    std::vector<SweepRow> rows;
    for (FingerprintKind kind : c.sweep.fingerprints) {
        note(progress, std::string("reference fingerprints: ") + to_string(kind));
        const Dataset train = make_train_set(c, scene, kind);
        std::map<double, Dataset> tests;
        for (double snr : snr_list)
            tests.emplace(snr, make_test_set(c, scene, kind, snr));
        for (Method m : c.sweep.methods) {
            RunOptions opts;
            opts.workdir = work;
            opts.denoise_alpha = c.sweep.denoise_alpha;
            note(progress, std::string("building ") + to_string(m) + " on " + to_string(kind));
            Localizer loc = Localizer::build(c, m, train, opts);
            for (double snr : snr_list) {
                const Dataset& test = tests.at(snr);
                EvalReport r;
                r.method = m;
                r.predictions = loc.locate_all(test);
                finalize_report(r, test);
                rows.push_back({m, kind, snr, r.mean});
                note(progress, std::string(to_string(m)) + "/" + to_string(kind) + " @ " + fmt(snr) +
                                   " dB: mean " + fmt(r.mean) + " m");
            }
        }
    }
    if (!run_dir.empty())
        write_sweep_csv(run_dir / "sweep.csv", rows);
    return rows;
}

} // namespace adloc::harness
