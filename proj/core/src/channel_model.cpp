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

#include "adloc/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace adloc {

ArrayGeometry ArrayGeometry::half_wavelength(int M, int N, double carrier_hz) {
    ArrayGeometry g;
    g.M = M;
    g.N = N;
    g.lambda_c = kSpeedOfLight / carrier_hz;
    g.d_v = g.lambda_c / 2.0;
    g.d_h = g.lambda_c / 2.0;
    g.validate();
    return g;
}

void ArrayGeometry::validate() const {
    if (M < 1 || N < 1)
        throw std::invalid_argument("ArrayGeometry: M and N must be >= 1");
    if (!(d_v > 0.0) || !(d_h > 0.0) || !(lambda_c > 0.0))
        throw std::invalid_argument("ArrayGeometry: spacings and wavelength must be positive");
}

void OfdmConfig::validate() const {
    if (Nc < 1 || Ng < 1 || Ng > Nc)
        throw std::invalid_argument("OfdmConfig: require 0 < Ng <= Nc");
    if (!(Ts > 0.0))
        throw std::invalid_argument("OfdmConfig: Ts must be positive");
}

double PathSet::total_power() const {
    double s = 0.0;
    for (const auto& p : paths)
        s += p.sigma2;
    return s;
}

void PathSet::validate() const {
    if (paths.empty())
        throw std::invalid_argument("PathSet: no paths");
    for (const auto& p : paths) {
        if (!(p.sigma2 > 0.0) || !std::isfinite(p.sigma2))
            throw std::invalid_argument("PathSet: path power must be positive");
        if (!(p.r >= 0.0))
            throw std::invalid_argument("PathSet: negative delay");
    }
}

bool Box::contains(const Vec3& p, double tol) const {
    for (int i = 0; i < 3; ++i)
        if (p[i] < lo[i] - tol || p[i] > hi[i] + tol)
            return false;
    return true;
}

std::vector<cdouble> steering_vertical(const ArrayGeometry& geom, double theta) {
    const double u = geom.d_v / geom.lambda_c * std::cos(theta);
    std::vector<cdouble> e(static_cast<std::size_t>(geom.M));
    for (int m = 0; m < geom.M; ++m)
        e[m] = std::polar(1.0, -2.0 * kPi * m * u);
    return e;
}

std::vector<cdouble> steering_horizontal(const ArrayGeometry& geom, double theta, double phi) {
    const double u = geom.d_h / geom.lambda_c * std::sin(theta) * std::cos(phi);
    std::vector<cdouble> e(static_cast<std::size_t>(geom.N));
    for (int n = 0; n < geom.N; ++n)
        e[n] = std::polar(1.0, -2.0 * kPi * n * u);
    return e;
}

CVector steering(const ArrayGeometry& geom, double theta, double phi) {
    const auto ev = steering_vertical(geom, theta);
    const auto eh = steering_horizontal(geom, theta, phi);
    CVector e(geom.antennas());
    for (int m = 0; m < geom.M; ++m)
        for (int n = 0; n < geom.N; ++n)
            e(m * geom.N + n) = ev[m] * eh[n];
    return e;
}

std::vector<cdouble> sample_gains(const PathSet& paths, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<cdouble> a;
    a.reserve(paths.paths.size());
    for (const auto& p : paths.paths) {
        const double s = std::sqrt(p.sigma2 / 2.0);
        const double re = normal(rng);
        const double im = normal(rng);
        a.emplace_back(s * re, s * im);
    }
    return a;
}

CMatrix sfcrm(const PathSet& paths, const std::vector<cdouble>& gains,
              const ArrayGeometry& geom, const OfdmConfig& ofdm) {
    if (gains.size() != paths.paths.size())
        throw DimensionError("sfcrm: gain count does not match path count");
    CMatrix H = CMatrix::Zero(geom.antennas(), ofdm.Nc);
    Eigen::Matrix<cdouble, 1, Eigen::Dynamic> ramp(ofdm.Nc);
    for (std::size_t p = 0; p < gains.size(); ++p) {
        const auto& path = paths.paths[p];
        const CVector e = steering(geom, path.theta, path.phi) * gains[p];
        for (int l = 0; l < ofdm.Nc; ++l)
            ramp(l) = std::polar(1.0, -2.0 * kPi * l * path.r / ofdm.Nc);
        H.noalias() += e * ramp;
    }
    return H;
}

Scene generate_scene(const Box& bounds, const Vec3& bs_position, int n_scatterers,
                     double pathloss_exponent, std::uint64_t seed, const SceneOptions& options) {
    if (bounds.empty())
        throw std::invalid_argument("generate_scene: empty bounds");
    if (n_scatterers < 1)
        throw std::invalid_argument("generate_scene: need at least one scatterer");

    Scene scene;
    scene.bs_position = bs_position;
    scene.bounds = bounds;
    scene.pathloss_exponent = pathloss_exponent;
    scene.seed = seed;

    const Vec3 lo{bounds.lo[0] - options.margin_xy, bounds.lo[1] - options.margin_xy, bounds.lo[2]};
    const Vec3 hi{bounds.hi[0] + options.margin_xy, bounds.hi[1] + options.margin_xy,
                  bounds.hi[2] + options.margin_z};

    Rng rng = make_rng(seed, 0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    scene.scatterers.reserve(static_cast<std::size_t>(n_scatterers));
    for (int i = 0; i < n_scatterers; ++i) {
        Scatterer s;
        for (int k = 0; k < 3; ++k)
            s.pos[k] = lo[k] + (hi[k] - lo[k]) * unit(rng);
        s.gain_db = options.gain_sigma_db * normal(rng);
        scene.scatterers.push_back(s);
    }
    return scene;
}

PathSet paths_for_position(const Scene& scene, const Vec3& position, const OfdmConfig& ofdm,
                           bool snap_delays) {
    if (!scene.bounds.contains(position))
        throw std::invalid_argument("paths_for_position: position outside scene bounds");

    PathSet set;
    set.position = position;
    for (const auto& sc : scene.scatterers) {
        const Vec3 d{sc.pos[0] - scene.bs_position[0], sc.pos[1] - scene.bs_position[1],
                     sc.pos[2] - scene.bs_position[2]};
        const double bs_leg = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
        const double length = bs_leg + distance(position, sc.pos);
        double r = length / (kSpeedOfLight * ofdm.Ts);
        if (snap_delays)
            r = std::round(r);
        if (r >= ofdm.Ng)
            continue;

        PathParam p;
        p.theta = std::acos(std::clamp(d[2] / bs_leg, -1.0, 1.0));
        p.phi = std::atan2(d[0], d[1]);
        p.r = r;
        p.sigma2 = std::pow(10.0, sc.gain_db / 10.0) * std::pow(length, -scene.pathloss_exponent);
        set.paths.push_back(p);
    }
    if (set.paths.empty()) {
        std::ostringstream msg;
        msg << "paths_for_position: every path exceeds the guard interval (Ng=" << ofdm.Ng
            << "); increase Ng or Ts";
        throw std::runtime_error(msg.str());
    }
    const double total = set.total_power();
    for (auto& p : set.paths)
        p.sigma2 /= total;
    return set;
}

namespace {

nlohmann::json vec_json(const Vec3& v) { return nlohmann::json::array({v[0], v[1], v[2]}); }

Vec3 json_vec(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 3)
        throw std::invalid_argument("expected a 3-element array");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

} // namespace

nlohmann::json scene_to_json(const Scene& scene) {
    nlohmann::json j;
    j["bs_position"] = vec_json(scene.bs_position);
    auto& arr = j["scatterers"] = nlohmann::json::array();
    for (const auto& s : scene.scatterers)
        arr.push_back({{"pos", vec_json(s.pos)}, {"gain_db", s.gain_db}});
    j["bounds"] = {{"lo", vec_json(scene.bounds.lo)}, {"hi", vec_json(scene.bounds.hi)}};
    j["pathloss_exponent"] = scene.pathloss_exponent;
    j["seed"] = scene.seed;
    return j;
}

Scene scene_from_json(const nlohmann::json& j) {
    Scene s;
    s.bs_position = json_vec(j.at("bs_position"));
    for (const auto& e : j.at("scatterers"))
        s.scatterers.push_back({json_vec(e.at("pos")), e.at("gain_db").get<double>()});
    s.bounds.lo = json_vec(j.at("bounds").at("lo"));
    s.bounds.hi = json_vec(j.at("bounds").at("hi"));
    s.pathloss_exponent = j.at("pathloss_exponent").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
    if (s.scatterers.empty())
        throw std::invalid_argument("scene: no scatterers");
    return s;
}

} // namespace adloc
