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

#include "adloc/harness/theory.hpp"

#include <cmath>
#include <algorithm>
#include <cstdio>
#include <random>

namespace adloc::harness {

using nlohmann::json;

double unitarity_residual(int M) {
    const CMatrix V = dft_phase_shifted(M);
    const CMatrix G = V.adjoint() * V - CMatrix::Identity(M, M);
    return G.cwiseAbs().maxCoeff();
}

double truncated_dft_residual(int Nc, int Ng) {
    const CMatrix F = dft_truncated(Nc, Ng);
    const CMatrix G = F.adjoint() * F - CMatrix::Identity(Ng, Ng);
    return G.cwiseAbs().maxCoeff();
}

bool bin_reachable(int M, int N, int m_bar, int n_bar) {
    // Half-wavelength spacing: bin = size/2 + size * cos / 2.
    const double u = 2.0 * (m_bar - M / 2.0) / M;
    const double v = 2.0 * (n_bar - N / 2.0) / N;
    return u * u + v * v <= 1.0;
}

PathParam on_grid_path(int M, int N, int m_bar, int n_bar, double r, double sigma2) {
    const double u = 2.0 * (m_bar - M / 2.0) / M;
    const double v = 2.0 * (n_bar - N / 2.0) / N;
    if (!bin_reachable(M, N, m_bar, n_bar))
        throw std::invalid_argument("on_grid_path: bin (" + std::to_string(m_bar) + ", " +
                                    std::to_string(n_bar) + ") is not reachable by a real direction");
    PathParam p;
    p.theta = std::acos(u);
    const double s = std::sin(p.theta);
    p.phi = s > 0.0 ? std::acos(std::clamp(v / s, -1.0, 1.0)) : 0.0;
    p.r = r;
    p.sigma2 = sigma2;
    return p;
}

OneHotResult one_hot_check(int M, int N, int m_bar, int n_bar) {
    const ArrayGeometry geom = ArrayGeometry::half_wavelength(M, N, 2e9);
    const PathParam p = on_grid_path(M, N, m_bar, n_bar, 0.0);
    const CVector image = angle_domain_cir(steering(geom, p.theta, p.phi), geom);
    OneHotResult r;
    const Eigen::Index peak = static_cast<Eigen::Index>(m_bar) * N + n_bar;
    for (Eigen::Index i = 0; i < image.size(); ++i) {
        const double a = std::abs(image[i]);
        if (i == peak)
            r.peak = a;
        else
            r.max_leakage = std::max(r.max_leakage, a);
    }
    return r;
}

PathSet reference_offgrid_paths() {
    // (cos theta, sin theta cos phi, delay, power); chosen so the support cells
    // are distinct and the fraction grows monotonically from 4x4 to 32x32.
    const double table[3][4] = {{0.25, 0.25, 3.2, 0.5}, {-0.25, 0.75, 6.35, 0.3}, {0.75, -0.25, 10.1, 0.2}};
    PathSet ps;
    for (const auto& row : table) {
        PathParam p;
        p.theta = std::acos(row[0]);
        p.phi = std::acos(row[1] / std::sin(p.theta));
        p.r = row[2];
        p.sigma2 = row[3];
        ps.paths.push_back(p);
    }
    return ps;
}

std::vector<ConcentrationPoint> concentration_sequence(const PathSet& paths,
                                                       const std::vector<std::array<int, 3>>& sizes,
                                                       int Ng, int window) {
    std::vector<ConcentrationPoint> out;
    for (const auto& [M, N, Nc] : sizes) {
        const ArrayGeometry geom = ArrayGeometry::half_wavelength(M, N, 2e9);
        const OfdmConfig ofdm{Nc, Ng, 50e-9};
        const Fingerprint fp = adcpm_exact(paths, geom, ofdm);
        const auto supports = predict_supports(paths, geom, ofdm);
        out.push_back({M, N, Nc, Ng, concentration_fraction(fp, supports, window)});
    }
    return out;
}

double parseval_residual(const PathSet& paths, const ArrayGeometry& geom, const OfdmConfig& ofdm) {
    const double a = adcpm_exact(paths, geom, ofdm).omega.sum();
    const double s = sfcpm_exact(paths, geom, ofdm).omega.sum() /
                     (static_cast<double>(geom.M) * geom.N * ofdm.Nc);
    return std::abs(a - s) / a;
}

ParsevalMc parseval_mc(const PathSet& paths, const ArrayGeometry& geom, const OfdmConfig& ofdm, int n,
                       std::uint64_t seed) {
    if (n < 2)
        throw std::invalid_argument("parseval_mc: need at least two samples");
    const AngleDelayTransform transform(geom, ofdm);
    const double scale = 1.0 / (static_cast<double>(geom.M) * geom.N * ofdm.Nc);
    auto run = [&](std::uint64_t stream, bool angle_delay, double& mean, double& se) {
        Rng rng = make_rng(seed, stream);
        double s1 = 0.0, s2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const CMatrix H = sfcrm(paths, sample_gains(paths, rng), geom, ofdm);
            const double v = angle_delay ? transform.apply(H).squaredNorm() : H.squaredNorm() * scale;
            s1 += v;
            s2 += v * v;
        }
        mean = s1 / n;
        const double var = (s2 - n * mean * mean) / (n - 1);
        se = std::sqrt(std::max(var, 0.0) / n);
    };
    ParsevalMc r;
    run(1, true, r.adcpm_sum, r.adcpm_se);
    run(2, false, r.sfcpm_scaled, r.sfcpm_se);
    const double se = std::hypot(r.adcpm_se, r.sfcpm_se);
    r.z = se > 0.0 ? std::abs(r.adcpm_sum - r.sfcpm_scaled) / se : 0.0;
    return r;
}

double oracle_relative_error(const PathSet& paths, const ArrayGeometry& geom, const OfdmConfig& ofdm,
                             int n, std::uint64_t seed) {
    Rng rng = make_rng(seed, 3);
    const Fingerprint mc = adcpm_mc(paths, geom, ofdm, n, rng);
    const Fingerprint ex = adcpm_exact(paths, geom, ofdm);
    return (mc.omega - ex.omega).norm() / ex.omega.norm();
}

bool TheoryReport::passed() const {
    for (const auto& c : checks)
        if (!c.passed)
            return false;
    return !checks.empty();
}

json TheoryReport::to_json() const {
    json arr = json::array();
    for (const auto& c : checks)
        arr.push_back({{"name", c.name},
                       {"passed", c.passed},
                       {"value", c.value},
                       {"threshold", c.threshold},
                       {"detail", c.detail}});
    return {{"passed", passed()}, {"checks", arr}};
}

TheoryReport verify_theory(const ExperimentConfig& c, const TheoryOptions& options) {
    TheoryReport rep;
    auto add = [&](std::string name, bool ok, double value, double threshold, std::string detail = {}) {
        rep.checks.push_back({std::move(name), ok, value, threshold, std::move(detail)});
    };

    double worst = 0.0;
    for (int M = 1; M <= 32; ++M)
        worst = std::max(worst, unitarity_residual(M));
    add("dft_unitarity", worst <= 1e-10, worst, 1e-10, "M = 1..32");

    const double trunc = truncated_dft_residual(c.ofdm.Nc, c.ofdm.Ng);
    add("truncated_dft_orthonormality", trunc <= 1e-10, trunc, 1e-10);

    double leak = 0.0, peak_err = 0.0;
    for (int m = 0; m < 8; ++m)
        for (int n = 0; n < 16; ++n) {
            if (!bin_reachable(8, 16, m, n))
                continue;
            const auto r = one_hot_check(8, 16, m, n);
            leak = std::max(leak, r.max_leakage);
            peak_err = std::max(peak_err, std::abs(r.peak - 1.0));
        }
    add("one_hot_leakage", leak <= 1e-9, leak, 1e-9, "8 x 16 array, every reachable bin");
    add("one_hot_peak", peak_err <= 1e-9, peak_err, 1e-9);

    {
        const ArrayGeometry geom = ArrayGeometry::half_wavelength(8, 16, 2e9);
        const OfdmConfig ofdm{128, 32, 50e-9};
        PathSet on;
        on.paths = {on_grid_path(8, 16, 6, 3, 2.0, 0.6), on_grid_path(8, 16, 2, 9, 11.0, 0.4)};
        const Fingerprint fp = adcpm_exact(on, geom, ofdm);
        const auto sup = predict_supports(on, geom, ofdm);
        const double f0 = concentration_fraction(fp, sup, 0);
        add("on_grid_concentration", std::abs(f0 - 1.0) <= 1e-9, f0, 1.0, "window 0");

        const double pr = parseval_residual(on, geom, ofdm);
        add("parseval_closed_form", pr <= 1e-9, pr, 1e-9, "integer delays below the guard interval");
    }

    {
        const ArrayGeometry geom = c.geometry;
        const OfdmConfig ofdm = c.ofdm;
        PathSet ps;
        ps.paths = {PathParam{std::acos(0.1), 1.0, 1.0, 0.5},
                    PathParam{std::acos(0.3), 2.0, static_cast<double>(std::min(ofdm.Ng - 1, 5)), 0.5}};
        const auto mc = parseval_mc(ps, geom, ofdm, 2000, 11);
        add("parseval_sample_average", mc.z <= 3.0, mc.z, 3.0, "difference in standard errors");

        PathSet ref = reference_offgrid_paths();
        const double err = oracle_relative_error(ref, geom, ofdm, options.mc_samples, 5);
        add("oracle_equivalence", err <= options.mc_tolerance, err, options.mc_tolerance,
            std::to_string(options.mc_samples) + " samples");
    }

    {
        const std::vector<std::array<int, 3>> sizes{{4, 4, 64}, {8, 8, 128}, {16, 16, 256}, {32, 32, 512}};
        const auto seq = concentration_sequence(reference_offgrid_paths(), sizes, 16, 1);
        bool mono = true;
        std::string detail;
        for (std::size_t i = 0; i < seq.size(); ++i) {
            if (i > 0 && seq[i].fraction < seq[i - 1].fraction)
                mono = false;
            char buf[64];
            std::snprintf(buf, sizeof buf, "%s(%d,%d,%d)=%.5f", i ? " " : "", seq[i].M, seq[i].N, seq[i].Nc,
                          seq[i].fraction);
            detail += buf;
        }
        add("concentration_monotone", mono, mono ? 1.0 : 0.0, 1.0, detail);
        add("concentration_final", seq.back().fraction >= 0.9, seq.back().fraction, 0.9, "window 1");
    }
    return rep;
}

} // namespace adloc::harness
