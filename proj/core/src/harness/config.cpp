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

#include "adloc/harness/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace adloc::harness {

using nlohmann::json;

const char* to_string(Method m) {
    switch (m) {
    case Method::Cnn3d: return "cnn3d";
    case Method::Cnn2d: return "cnn2d";
    case Method::Wknn: return "wknn";
    }
    return "wknn";
}

Method method_from_string(const std::string& s) {
    if (s == "cnn3d")
        return Method::Cnn3d;
    if (s == "cnn2d")
        return Method::Cnn2d;
    if (s == "wknn")
        return Method::Wknn;
    throw std::invalid_argument("unknown method '" + s + "' (expected cnn3d, cnn2d or wknn)");
}

void ExperimentConfig::validate() const {
    geometry.validate();
    ofdm.validate();
    if (area.empty())
        throw std::invalid_argument("config: area box is empty");
    if (!(grid_spacing > 0.0))
        throw std::invalid_argument("config: grid spacing must be positive");
    if (grid_spacing > area.hi[0] - area.lo[0] || grid_spacing > area.hi[1] - area.lo[1])
        throw std::invalid_argument("config: grid spacing is larger than the area");
    if (planes.empty())
        throw std::invalid_argument("config: at least one plane height is required");
    for (double z : planes)
        if (z < area.lo[2] || z > area.hi[2])
            throw std::invalid_argument("config: plane height " + std::to_string(z) + " lies outside the area");
    if (test_points < 1)
        throw std::invalid_argument("config: test point count must be positive");
    if (realizations < 1)
        throw std::invalid_argument("config: realization count must be positive");
    if (wknn_k < 1)
        throw std::invalid_argument("config: wknn K must be positive");
    if (latency_queries < 1)
        throw std::invalid_argument("config: latency query count must be positive");
    if (scene.scatterers < 1)
        throw std::invalid_argument("config: at least one scatterer is required");
    if (methods.empty())
        throw std::invalid_argument("config: methods list is empty");
    if (sweep.denoise_alpha < 0.0 || sweep.denoise_alpha > 1.0)
        throw std::invalid_argument("config: denoise alpha must lie in [0, 1]");
    network_for(Method::Cnn3d).validate();
}

bool ExperimentConfig::is_slow() const {
    return geometry.M * geometry.N > 64 || ofdm.Ng > 64;
}

model::NetworkSpec ExperimentConfig::network_for(Method m, FingerprintKind kind) const {
    model::NetworkSpec s = network;
    s.M = geometry.M;
    s.N = geometry.N;
    s.Ng = kind == FingerprintKind::ADCPM ? ofdm.Ng : ofdm.Nc;
    s.arch = m == Method::Cnn2d ? model::Architecture::Cnn2d : model::Architecture::Cnn3d;
    return s;
}

json to_json(const ExperimentConfig& c) {
    json methods = json::array();
    for (auto m : c.methods)
        methods.push_back(to_string(m));
    json sweep_methods = json::array();
    for (auto m : c.sweep.methods)
        sweep_methods.push_back(to_string(m));
    json sweep_kinds = json::array();
    for (auto k : c.sweep.fingerprints)
        sweep_kinds.push_back(to_string(k));
    json net = model::to_json(c.network);
    for (const char* k : {"M", "N", "Ng", "arch"})
        net.erase(k);
    return {
        {"scene",
         {{"bs_position", c.scene.bs_position},
          {"scatterers", c.scene.scatterers},
          {"pathloss_exponent", c.scene.pathloss_exponent},
          {"margin_xy", c.scene.options.margin_xy},
          {"margin_z", c.scene.options.margin_z},
          {"gain_sigma_db", c.scene.options.gain_sigma_db},
          {"seed", c.scene.seed}}},
        {"geometry",
         {{"M", c.geometry.M},
          {"N", c.geometry.N},
          {"d_v", c.geometry.d_v},
          {"d_h", c.geometry.d_h},
          {"lambda_c", c.geometry.lambda_c}}},
        {"ofdm", {{"Nc", c.ofdm.Nc}, {"Ng", c.ofdm.Ng}, {"Ts", c.ofdm.Ts}}},
        {"area", {{"lo", c.area.lo}, {"hi", c.area.hi}}},
        {"planes", c.planes},
        {"grid_spacing", c.grid_spacing},
        {"test_points", c.test_points},
        {"fingerprint", to_string(c.fingerprint)},
        {"realizations", c.realizations},
        {"snr_db", c.snr_db ? json(*c.snr_db) : json(nullptr)},
        {"method", to_string(c.method)},
        {"methods", methods},
        {"wknn_k", c.wknn_k},
        {"network", net},
        {"training", model::to_json(c.training)},
        {"sweep",
         {{"snr_db", c.sweep.snr_db},
          {"denoise_alpha", c.sweep.denoise_alpha},
          {"methods", sweep_methods},
          {"fingerprints", sweep_kinds}}},
        {"latency_queries", c.latency_queries},
        {"seed", c.seed},
    };
}

namespace {

const std::vector<std::string> kTopKeys{
    "scene",  "geometry", "ofdm",     "area",     "planes",  "grid_spacing", "test_points",
    "fingerprint", "realizations", "snr_db", "method", "methods", "wknn_k", "network",
    "training", "sweep", "latency_queries", "seed"};

void reject_unknown(const json& j, const std::vector<std::string>& allowed, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw std::invalid_argument("config: unknown key '" + where + it.key() + "'");
}

// Nested parsers label their own section; this marks the error as a config error.
template <class Parse>
auto parse_section(const json& j, Parse parse) {
    try {
        return parse(j);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
}

} // namespace

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object())
        throw std::invalid_argument("config: top level must be a JSON object");
    reject_unknown(j, kTopKeys, "");
    ExperimentConfig c;
    if (j.contains("scene")) {
        const json& s = j.at("scene");
        reject_unknown(s, {"bs_position", "scatterers", "pathloss_exponent", "margin_xy", "margin_z",
                           "gain_sigma_db", "seed"},
                       "scene.");
        c.scene.bs_position = s.value("bs_position", c.scene.bs_position);
        c.scene.scatterers = s.value("scatterers", c.scene.scatterers);
        c.scene.pathloss_exponent = s.value("pathloss_exponent", c.scene.pathloss_exponent);
        c.scene.options.margin_xy = s.value("margin_xy", c.scene.options.margin_xy);
        c.scene.options.margin_z = s.value("margin_z", c.scene.options.margin_z);
        c.scene.options.gain_sigma_db = s.value("gain_sigma_db", c.scene.options.gain_sigma_db);
        c.scene.seed = s.value("seed", c.scene.seed);
    }
    if (j.contains("geometry")) {
        const json& g = j.at("geometry");
        reject_unknown(g, {"M", "N", "carrier_hz", "d_v", "d_h", "lambda_c"}, "geometry.");
        const int M = g.value("M", c.geometry.M);
        const int N = g.value("N", c.geometry.N);
        c.geometry = ArrayGeometry::half_wavelength(M, N, g.value("carrier_hz", 2e9));
        c.geometry.lambda_c = g.value("lambda_c", c.geometry.lambda_c);
        if (g.contains("lambda_c") && !g.contains("d_v"))
            c.geometry.d_v = c.geometry.lambda_c / 2.0;
        if (g.contains("lambda_c") && !g.contains("d_h"))
            c.geometry.d_h = c.geometry.lambda_c / 2.0;
        c.geometry.d_v = g.value("d_v", c.geometry.d_v);
        c.geometry.d_h = g.value("d_h", c.geometry.d_h);
    }
    if (j.contains("ofdm")) {
        const json& o = j.at("ofdm");
        reject_unknown(o, {"Nc", "Ng", "Ts"}, "ofdm.");
        c.ofdm.Nc = o.value("Nc", c.ofdm.Nc);
        c.ofdm.Ng = o.value("Ng", c.ofdm.Ng);
        c.ofdm.Ts = o.value("Ts", c.ofdm.Ts);
    }
    if (j.contains("area")) {
        c.area.lo = j.at("area").value("lo", c.area.lo);
        c.area.hi = j.at("area").value("hi", c.area.hi);
    }
    c.planes = j.value("planes", c.planes);
    c.grid_spacing = j.value("grid_spacing", c.grid_spacing);
    c.test_points = j.value("test_points", c.test_points);
    if (j.contains("fingerprint"))
        c.fingerprint = fingerprint_kind_from_string(j.at("fingerprint").get<std::string>());
    c.realizations = j.value("realizations", c.realizations);
    if (j.contains("snr_db") && !j.at("snr_db").is_null())
        c.snr_db = j.at("snr_db").get<double>();
    if (j.contains("method"))
        c.method = method_from_string(j.at("method").get<std::string>());
    if (j.contains("methods")) {
        c.methods.clear();
        for (const auto& m : j.at("methods"))
            c.methods.push_back(method_from_string(m.get<std::string>()));
    }
    c.wknn_k = j.value("wknn_k", c.wknn_k);
    if (j.contains("network")) {
        json net = j.at("network");
        net["M"] = c.geometry.M;
        net["N"] = c.geometry.N;
        net["Ng"] = c.ofdm.Ng;
        c.network = parse_section(net, model::network_spec_from_json);
    }
    if (j.contains("training"))
        c.training = parse_section(j.at("training"), model::train_config_from_json);
    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        reject_unknown(s, {"snr_db", "denoise_alpha", "methods", "fingerprints"}, "sweep.");
        c.sweep.snr_db = s.value("snr_db", c.sweep.snr_db);
        c.sweep.denoise_alpha = s.value("denoise_alpha", c.sweep.denoise_alpha);
        if (s.contains("methods")) {
            c.sweep.methods.clear();
            for (const auto& m : s.at("methods"))
                c.sweep.methods.push_back(method_from_string(m.get<std::string>()));
        }
        if (s.contains("fingerprints")) {
            c.sweep.fingerprints.clear();
            for (const auto& k : s.at("fingerprints"))
                c.sweep.fingerprints.push_back(fingerprint_kind_from_string(k.get<std::string>()));
        }
    }
    c.latency_queries = j.value("latency_queries", c.latency_queries);
    c.seed = j.value("seed", c.seed);
    c.network.M = c.geometry.M;
    c.network.N = c.geometry.N;
    c.network.Ng = c.ofdm.Ng;
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

std::string config_hash(const ExperimentConfig& c) {
    const std::string text = to_json(c).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace adloc::harness
