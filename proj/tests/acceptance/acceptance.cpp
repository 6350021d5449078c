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

// Acceptance runner: one PASS/FAIL line per criterion, thresholds pinned below.
// Usage: adloc_acceptance [--workdir DIR] [--only 1,2,...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adloc/fingerprint.hpp"
#include "adloc/harness/config.hpp"
#include "adloc/harness/dataset.hpp"
#include "adloc/harness/evaluate.hpp"
#include "adloc/harness/experiments.hpp"
#include "adloc/harness/gradsuite.hpp"
#include "adloc/harness/theory.hpp"
#include "adloc/model/train.hpp"
#include "adloc/wknn.hpp"

namespace fs = std::filesystem;
using namespace adloc;
using namespace adloc::harness;

namespace {

// --- pinned thresholds ---------------------------------------------------------
constexpr double kTransformTol = 1e-10;
constexpr double kTransformSeconds = 1.0;
constexpr double kOneHotTol = 1e-9;
constexpr double kOneHotSeconds = 1.0;
constexpr double kConcentrationFinal = 0.9;
constexpr double kConcentrationSeconds = 30.0;
constexpr double kParsevalTol = 1e-9;
constexpr double kParsevalZ = 3.0;
constexpr double kOracleTol1e4 = 0.05;
constexpr double kOracleTol1e5 = 0.017;
constexpr double kOracleRatioSlack = 2.0; // e(1e4)/e(1e5) within [sqrt(10)/2, 2 sqrt(10)]
constexpr double kOracleSeconds = 60.0;
constexpr int kGradSeeds = 20;
constexpr double kGradSeconds = 300.0;
constexpr double kCnnMedianMax = 1.5;
constexpr double kCnnOverWknnMax = 1.5;
constexpr double kOverfitMax = 0.1;
constexpr double kEndToEndSeconds = 1800.0;
constexpr double kRobustnessSeconds = 1800.0;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void log(const std::string& msg) { std::cerr << "  .. " << msg << std::endl; }

// 1 -----------------------------------------------------------------------------
Outcome transforms() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst_v = 0, worst_f = 0;
    for (int M = 1; M <= 32; ++M)
        worst_v = std::max(worst_v, unitarity_residual(M));
    for (auto [Nc, Ng] : {std::pair{64, 16}, {128, 32}, {256, 64}, {512, 128}, {32, 32}})
        worst_f = std::max(worst_f, truncated_dft_residual(Nc, Ng));
    const double t = seconds_since(t0);
    return {worst_v <= kTransformTol && worst_f <= kTransformTol && t < kTransformSeconds,
            "phase-shifted DFT residual " + fmt("%.2e", worst_v) + " (M=1..32), truncated DFT " +
                fmt("%.2e", worst_f) + ", " + fmt("%.3f", t) + " s"};
}

// 2 -----------------------------------------------------------------------------
Outcome one_hot() {
    const auto t0 = std::chrono::steady_clock::now();
    double leak = 0, peak_dev = 0;
    int bins = 0;
    for (int m = 0; m < 8; ++m)
        for (int n = 0; n < 16; ++n) {
            if (!bin_reachable(8, 16, m, n))
                continue; // no real direction lands on this bin
            ++bins;
            const auto r = one_hot_check(8, 16, m, n);
            leak = std::max(leak, r.max_leakage);
            peak_dev = std::max(peak_dev, std::abs(r.peak - 1.0));
        }
    const double t = seconds_since(t0);
    return {leak <= kOneHotTol && peak_dev <= kOneHotTol && t < kOneHotSeconds,
            "max off-support magnitude " + fmt("%.2e", leak) + " over " + std::to_string(bins) + " reachable bins (M=8, N=16), " +
                fmt("%.3f", t) + " s"};
}

// 3 -----------------------------------------------------------------------------
Outcome concentration() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<std::array<int, 3>> sizes{{4, 4, 64}, {8, 8, 128}, {16, 16, 256}, {32, 32, 512}};
    const auto seq = concentration_sequence(reference_offgrid_paths(), sizes, 16, 1);
    bool mono = true;
    std::string values;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (i && seq[i].fraction < seq[i - 1].fraction)
            mono = false;
        values += (i ? " -> " : "") + fmt("%.5f", seq[i].fraction);
    }
    const double t = seconds_since(t0);
    return {mono && seq.back().fraction >= kConcentrationFinal && t < kConcentrationSeconds,
            "window-1 fractions " + values + (mono ? " (non-decreasing)" : " (NOT monotone)") + ", " +
                fmt("%.2f", t) + " s"};
}

// 4 -----------------------------------------------------------------------------
Outcome parseval() {
    const ExperimentConfig c;
    // Off-grid angles, integer delays below Ng.
    PathSet ps;
    ps.paths = {PathParam{1.1, 0.7, 3.0, 0.5}, PathParam{2.0, 1.9, 9.0, 0.3}, PathParam{0.6, 2.4, 21.0, 0.2}};
    const double closed = parseval_residual(ps, c.geometry, c.ofdm);
    const auto mc = parseval_mc(ps, c.geometry, c.ofdm, 2000, 11);
    return {closed <= kParsevalTol && std::abs(mc.z) <= kParsevalZ,
            "closed-form relative gap " + fmt("%.2e", closed) + ", sample averages differ by " +
                fmt("%.2f", std::abs(mc.z)) + " standard errors (2000 samples)"};
}

// 5 -----------------------------------------------------------------------------
Outcome oracle() {
    const ExperimentConfig c;
    const auto t0 = std::chrono::steady_clock::now();
    const PathSet ps = reference_offgrid_paths();
    const double e4 = oracle_relative_error(ps, c.geometry, c.ofdm, 10000, 5);
    const double e5 = oracle_relative_error(ps, c.geometry, c.ofdm, 100000, 6);
    const double t = seconds_since(t0);
    const double ratio = e4 / e5;
    const double ideal = std::sqrt(10.0);
    const bool scaling = ratio >= ideal / kOracleRatioSlack && ratio <= ideal * kOracleRatioSlack;
    return {e4 <= kOracleTol1e4 && e5 <= kOracleTol1e5 && scaling && t < kOracleSeconds,
            "relative Frobenius error " + fmt("%.4f", e4) + " at 1e4, " + fmt("%.4f", e5) + " at 1e5, ratio " +
                fmt("%.2f", ratio) + " (sqrt(10) = 3.16), " + fmt("%.1f", t) + " s"};
}

// 6 -----------------------------------------------------------------------------
Outcome gradients() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto cases = gradient_suite(kGradSeeds);
    bool ok = true;
    std::string worst_name;
    double worst_ratio = 0;
    for (const auto& g : cases) {
        const bool strict = g.layer == "conv3d" || g.layer == "linear";
        const double tol = std::min(g.tolerance, strict ? 1e-5 : 1e-4);
        const bool pass = g.max_rel_error <= tol && g.seeds >= kGradSeeds;
        ok = ok && pass;
        if (!pass)
            log("gradient case " + g.layer + " failed: " + fmt("%.3e", g.max_rel_error) + " at " + g.worst);
        if (g.max_rel_error / tol > worst_ratio) {
            worst_ratio = g.max_rel_error / tol;
            worst_name = g.layer + " " + fmt("%.2e", g.max_rel_error) + " vs " + fmt("%.0e", tol);
        }
    }
    const double t = seconds_since(t0);
    return {ok && t < kGradSeconds, std::to_string(cases.size()) + " cases x " + std::to_string(kGradSeeds) +
                                        " seeds, tightest margin " + worst_name + ", " + fmt("%.1f", t) + " s"};
}

// 7 -----------------------------------------------------------------------------
Outcome wknn_exact() {
    const ExperimentConfig c;
    const Dataset train = make_train_set(c, build_scene(c), FingerprintKind::ADCPM);
    const FingerprintDatabase db = to_database(train);
    double worst = 0;
    for (std::size_t i = 0; i < db.size(); ++i)
        worst = std::max(worst, distance(query(db, db.entry(i).omega, 1), db.entry(i).position));
    double sim_dev = 0;
    for (std::size_t i = 0; i < db.size(); i += 7)
        for (double s : {0.1, 1.0, 10.0})
            sim_dev = std::max(sim_dev, std::abs(similarity(db.entry(i).omega, s * db.entry(i).omega) - 1.0));
    return {worst == 0.0 && sim_dev <= 1e-12,
            "K=1 self-query max error " + fmt("%.1f", worst) + " m over " + std::to_string(db.size()) +
                " entries, |similarity(A, cA) - 1| <= " + fmt("%.1e", sim_dev)};
}

// 8 -----------------------------------------------------------------------------
double overfit_error() {
    const ExperimentConfig c;
    const Dataset train = make_train_set(c, build_scene(c), FingerprintKind::ADCPM);
    model::Network net(c.network_for(Method::Cnn3d));
    nn::Batch<float> xs;
    std::vector<Vec3> ys;
    for (std::size_t i = 0; i < 8; ++i) {
        const auto& s = train.samples[i * (train.size() / 8)];
        xs.push_back(net.prepare(s.fingerprint));
        ys.push_back(s.position);
    }
    model::TrainConfig cfg;
    cfg.epochs = 500;
    cfg.batch_size = 8;
    model::train(net, xs, ys, cfg);
    const auto pred = net.predict(xs);
    double mean = 0;
    for (std::size_t i = 0; i < 8; ++i)
        mean += distance(pred[i], ys[i]) / 8;
    return mean;
}

ExperimentConfig desk_compare_config() {
    ExperimentConfig c; // 10 x 10 m planes at 1.5/4.5/7.5 m, 1 m grid, 200 test points, 4 x 8 array, Ng = 32
    c.methods = {Method::Wknn, Method::Cnn3d};
    c.wknn_k = 4;
    return c;
}

Outcome end_to_end(const fs::path& work) {
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentConfig c = desk_compare_config();
    const fs::path dir = make_run_dir(work / "run_a", "compare", c);
    const auto reports = compare(c, dir, [](const std::string& m) { log(m); });
    double wknn = std::nan(""), cnn = std::nan("");
    for (const auto& r : reports)
        (r.method == Method::Wknn ? wknn : cnn) = r.p50;
    const double overfit = overfit_error();
    const double t = seconds_since(t0);
    const bool ok = rp_grid(c).size() == 363 && cnn <= kCnnMedianMax && cnn <= kCnnOverWknnMax * wknn &&
                    overfit <= kOverfitMax && t < kEndToEndSeconds;
    return {ok, "3D CNN median " + fmt("%.3f", cnn) + " m, WKNN median " + fmt("%.3f", wknn) + " m (ratio " +
                    fmt("%.2f", cnn / wknn) + "), 8-sample overfit " + fmt("%.4f", overfit) + " m, " +
                    fmt("%.0f", t) + " s"};
}

// 9 -----------------------------------------------------------------------------
Outcome robustness(const fs::path& work) {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig c;
    c.sweep.methods = {Method::Wknn, Method::Cnn3d};
    c.sweep.fingerprints = {FingerprintKind::SFCPM, FingerprintKind::ADCPM};
    const std::vector<double> snrs{4.0, 10.0, 20.0};
    const fs::path dir = make_run_dir(work, "sweep-snr", c);
    const auto rows = snr_sweep(c, snrs, dir, [](const std::string& m) { log(m); });
    auto mean_at = [&](Method m, FingerprintKind k, double snr) {
        for (const auto& r : rows)
            if (r.method == m && r.kind == k && r.snr_db == snr)
                return r.mean_error_m;
        return std::nan("");
    };
    const double ad10 = mean_at(Method::Wknn, FingerprintKind::ADCPM, 10.0);
    const double sf10 = mean_at(Method::Wknn, FingerprintKind::SFCPM, 10.0);
    bool ok = ad10 <= sf10;
    std::string detail = "WKNN at 10 dB: ADCPM " + fmt("%.3f", ad10) + " m vs SFCPM " + fmt("%.3f", sf10) + " m;";
    for (Method m : c.sweep.methods)
        for (FingerprintKind k : c.sweep.fingerprints) {
            const double lo = mean_at(m, k, 4.0), hi = mean_at(m, k, 20.0);
            ok = ok && hi <= lo;
            detail += std::string(" ") + to_string(m) + "/" + to_string(k) + " " + fmt("%.3f", lo) + "->" +
                      fmt("%.3f", hi);
        }
    const double t = seconds_since(t0);
    ok = ok && t < kRobustnessSeconds;
    return {ok, detail + " (4->20 dB), " + fmt("%.0f", t) + " s"};
}

// 10 ----------------------------------------------------------------------------
Outcome reproducibility(const fs::path& work) {
    const ExperimentConfig c = desk_compare_config();
    const fs::path a = make_run_dir(work / "run_a", "compare", c);
    if (!fs::exists(a / "summary.json"))
        compare(c, a, [](const std::string& m) { log(m); });
    const fs::path b = make_run_dir(work / "run_b", "compare", c);
    compare(c, b, [](const std::string& m) { log(m); });
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    int files = 0, same = 0;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (e.path().extension() != ".csv")
            continue;
        ++files;
        const fs::path other = b / fs::relative(e.path(), a);
        const std::string x = slurp(e.path());
        same += fs::exists(other) && !x.empty() && x == slurp(other);
    }
    return {files > 0 && same == files,
            std::to_string(same) + " of " + std::to_string(files) + " CSV files byte-identical across two runs"};
}

} // namespace

int main(int argc, char** argv) {
    fs::path work = fs::temp_directory_path() / "adloc_acceptance";
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--workdir" && i + 1 < argc) {
            work = argv[++i];
        } else if (arg == "--only" && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            std::string tok;
            while (std::getline(ss, tok, ','))
                only.insert(std::stoi(tok));
        } else {
            std::cerr << "usage: adloc_acceptance [--workdir DIR] [--only 1,2,...]\n";
            return 1;
        }
    }
    fs::remove_all(work);
    fs::create_directories(work);

    struct Criterion {
        int id;
        const char* title;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "transform correctness", transforms},
        {2, "exact single-path angle image", one_hot},
        {3, "concentration grows with array size", concentration},
        {4, "energy scaling between fingerprints", parseval},
        {5, "sample-average fingerprint matches closed form", oracle},
        {6, "gradient suite", gradients},
        {7, "WKNN exactness and scale invariance", wknn_exact},
        {8, "desk-scale end-to-end accuracy", [&] { return end_to_end(work); }},
        {9, "robustness ordering under noise", [&] { return robustness(work); }},
        {10, "reproducible reports", [&] { return reproducibility(work); }},
    };

    int failed = 0;
    nlohmann::json summary = nlohmann::json::array();
    for (const auto& cr : criteria) {
        if (!only.empty() && !only.count(cr.id))
            continue;
        Outcome o;
        try {
            o = cr.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s criterion %2d (%s): %s\n", o.pass ? "PASS" : "FAIL", cr.id, cr.title, o.detail.c_str());
        std::fflush(stdout);
        summary.push_back({{"criterion", cr.id}, {"title", cr.title}, {"pass", o.pass}, {"detail", o.detail}});
    }
    std::ofstream(work / "acceptance.json") << summary.dump(2) << '\n';
    std::printf("%d criteria failed\n", failed);
    return failed ? 1 : 0;
}
