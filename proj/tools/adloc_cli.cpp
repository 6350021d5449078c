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

// adloc command-line front end. Every subcommand reads one JSON config (all
// keys optional), applies `--set key.path=value` overrides and writes its
// outputs under `<out>/<command>-<config hash>/`.
//
// Exit codes: 0 success, 1 usage or input error, 2 verification failure,
// 3 numerical failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "adloc/harness/config.hpp"
#include "adloc/harness/dataset.hpp"
#include "adloc/harness/evaluate.hpp"
#include "adloc/harness/experiments.hpp"
#include "adloc/harness/gradsuite.hpp"
#include "adloc/harness/theory.hpp"
#include "adloc/model/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace adloc;
using namespace adloc::harness;

namespace {

enum Exit { kOk = 0, kUsage = 1, kVerify = 2, kNumeric = 3 };

struct Common {
    std::string config;
    std::vector<std::string> overrides;
    std::string out = "runs";
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("-c,--config", c.config, "JSON experiment config (defaults when omitted)");
    cmd->add_option("-s,--set", c.overrides, "override a config key, e.g. training.epochs=50")
        ->take_all();
    cmd->add_option("-o,--out", c.out, "root directory for run outputs")->capture_default_str();
}

void apply_override(json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw std::invalid_argument("override '" + assignment + "' is not of the form key.path=value");
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }
    json* node = &j;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty())
            throw std::invalid_argument("override '" + assignment + "' has an empty key");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            break;
        }
        if (!node->contains(key) || !(*node)[key].is_object())
            (*node)[key] = json::object();
        node = &(*node)[key];
        start = dot + 1;
    }
}

ExperimentConfig resolve(const Common& c) {
    json j = json::object();
    if (!c.config.empty()) {
        std::ifstream is(c.config);
        if (!is)
            throw std::invalid_argument("cannot open config file '" + c.config + "'");
        try {
            j = json::parse(is);
        } catch (const json::parse_error& e) {
            throw std::invalid_argument("config file '" + c.config + "' is not valid JSON: " + e.what());
        }
    }
    for (const auto& o : c.overrides)
        apply_override(j, o);
    return config_from_json(j);
}

void say(const std::string& msg) { std::cerr << "[adloc] " << msg << '\n'; }

void write_json(const fs::path& p, const json& j) {
    std::ofstream os(p, std::ios::trunc);
    if (!os)
        throw std::runtime_error("cannot write " + p.string());
    os << j.dump(2) << '\n';
}

fs::path prepare_run(const Common& common, const std::string& command, ExperimentConfig& cfg) {
    cfg = resolve(common);
    if (cfg.is_slow())
        say("warning: array or delay dimensions far above desk scale; expect long CPU run times");
    const fs::path dir = make_run_dir(common.out, command, cfg);
    say("run directory " + dir.string());
    return dir;
}

model::TrainLog train_log_or_empty(const std::optional<model::TrainLog>& t) {
    return t ? *t : model::TrainLog{};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"adloc: angle-delay fingerprint localization experiments"};
    app.require_subcommand(1);

    Common common;
    std::string method_name;
    std::vector<double> snr_list;
    int seeds = 20;
    int mc_samples = 10000;

    auto* scene = app.add_subcommand("scene", "scene utilities");
    scene->require_subcommand(1);
    auto* scene_gen = scene->add_subcommand("gen", "generate the scatterer scene");
    add_common(scene_gen, common);

    auto* dataset = app.add_subcommand("dataset", "dataset utilities");
    dataset->require_subcommand(1);
    auto* dataset_gen = dataset->add_subcommand("gen", "generate reference and test fingerprints");
    add_common(dataset_gen, common);

    auto* train = app.add_subcommand("train", "train or build one localizer");
    add_common(train, common);
    train->add_option("-m,--method", method_name, "cnn3d, cnn2d or wknn (default: config method)");

    auto* eval = app.add_subcommand("eval", "train one method and evaluate it on the test set");
    add_common(eval, common);
    eval->add_option("-m,--method", method_name, "cnn3d, cnn2d or wknn (default: config method)");

    auto* cmp = app.add_subcommand("compare", "evaluate every configured method on shared datasets");
    add_common(cmp, common);

    auto* sweep = app.add_subcommand("sweep-snr", "mean error versus SNR for each method and fingerprint");
    add_common(sweep, common);
    sweep->add_option("--snr", snr_list, "SNR values in dB (default: config sweep list)")->take_all();

    auto* theory = app.add_subcommand("verify-theory", "numerical checks of the angle-delay transform");
    add_common(theory, common);
    theory->add_option("--mc-samples", mc_samples, "sample count for the sample-average check")
        ->capture_default_str();

    auto* grad = app.add_subcommand("gradcheck", "finite-difference check of every layer");
    add_common(grad, common);
    grad->add_option("--seeds", seeds, "random draws per layer")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        ExperimentConfig cfg;
        if (scene_gen->parsed()) {
            const fs::path dir = prepare_run(common, "scene", cfg);
            write_json(dir / "scene.json", scene_to_json(build_scene(cfg)));
            return kOk;
        }
        if (dataset_gen->parsed()) {
            const fs::path dir = prepare_run(common, "dataset", cfg);
            const auto [tr, te] = generate_dataset(cfg);
            save_dataset(tr, dir / "train.adb");
            save_dataset(te, dir / "test.adb");
            say(std::to_string(tr.size()) + " reference points, " + std::to_string(te.size()) + " test points");
            return kOk;
        }
        if (train->parsed() || eval->parsed()) {
            const bool evaluating = eval->parsed();
            const fs::path dir = prepare_run(common, evaluating ? "eval" : "train", cfg);
            const Method m = method_name.empty() ? cfg.method : method_from_string(method_name);
            const auto [tr, te] = generate_dataset(cfg);
            RunOptions opts;
            opts.workdir = dir;
            opts.on_epoch = [](const model::EpochLog& e) {
                if (e.epoch % 10 == 0)
                    say("epoch " + std::to_string(e.epoch) + " loss " + std::to_string(e.loss));
            };
            Localizer loc = Localizer::build(cfg, m, tr, opts);
            write_json(dir / "training_log.json", model::to_json(train_log_or_empty(loc.training())));
            if (evaluating) {
                const EvalReport r = evaluate(loc, cfg, te);
                write_cdf_csv(dir / "cdf.csv", r.cdf);
                write_json(dir / "report.json", r.summary());
                say("median " + std::to_string(r.p50) + " m, p90 " + std::to_string(r.p90) + " m");
            }
            return kOk;
        }
        if (cmp->parsed()) {
            const fs::path dir = prepare_run(common, "compare", cfg);
            compare(cfg, dir, say);
            return kOk;
        }
        if (sweep->parsed()) {
            const fs::path dir = prepare_run(common, "sweep", cfg);
            snr_sweep(cfg, snr_list.empty() ? cfg.sweep.snr_db : snr_list, dir, say);
            return kOk;
        }
        if (theory->parsed()) {
            const fs::path dir = prepare_run(common, "theory", cfg);
            TheoryOptions opts;
            opts.mc_samples = mc_samples;
            const TheoryReport rep = verify_theory(cfg, opts);
            write_json(dir / "theory.json", rep.to_json());
            for (const auto& c : rep.checks)
                std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " value=" << c.value
                          << " threshold=" << c.threshold << (c.detail.empty() ? "" : " (" + c.detail + ")")
                          << '\n';
            return rep.passed() ? kOk : kVerify;
        }
        if (grad->parsed()) {
            const fs::path dir = prepare_run(common, "gradcheck", cfg);
            const auto cases = gradient_suite(seeds);
            write_json(dir / "gradcheck.json", to_json(cases));
            bool ok = true;
            for (const auto& c : cases) {
                std::cout << (c.passed() ? "PASS " : "FAIL ") << c.layer << " max_rel_error=" << c.max_rel_error
                          << " tolerance=" << c.tolerance << " seeds=" << c.seeds << '\n';
                ok = ok && c.passed();
            }
            return ok ? kOk : kVerify;
        }
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n' << app.help() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    std::cerr << app.help() << '\n';
    return kUsage;
}
