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

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "adloc/channel_model.hpp"
#include "adloc/types.hpp"

namespace adloc {

// H is MN x Nc, G is MN x Ng; both keep the antenna index m*N + n on rows.
using SpatialFrequencyChannel = CMatrix;
using AngleDelayChannel = CMatrix;

enum class FingerprintKind : std::uint8_t { ADCPM = 0, SFCPM = 1 };

const char* to_string(FingerprintKind kind);
FingerprintKind fingerprint_kind_from_string(const std::string& s);

/// Dense M x N x L real tensor, index (m, n, j) -> (m*N + n)*L + j.
struct Tensor3 {
    std::array<int, 3> dims{0, 0, 0};
    std::vector<double> data;

    Tensor3() = default;
    Tensor3(int M, int N, int L) : dims{M, N, L}, data(static_cast<std::size_t>(M) * N * L, 0.0) {}

    double& at(int m, int n, int j) { return data[(static_cast<std::size_t>(m) * dims[1] + n) * dims[2] + j]; }
    double at(int m, int n, int j) const {
        return data[(static_cast<std::size_t>(m) * dims[1] + n) * dims[2] + j];
    }
    std::size_t size() const { return data.size(); }
};

/// Channel power matrix (ADCPM or SFCPM). omega has M*N rows.
struct Fingerprint {
    RMatrix omega;
    int M = 0;
    int N = 0;
    FingerprintKind kind = FingerprintKind::ADCPM;

    int columns() const { return static_cast<int>(omega.cols()); }
    Tensor3 tensor() const;
};

struct SupportPrediction {
    double m_bar = 0.0;
    double n_bar = 0.0;
    double r = 0.0;
    double sigma2 = 0.0;
};

/// [V]_{m,n} = exp(-j 2 pi m (n - M/2) / M) / sqrt(M). Unitary.
CMatrix dft_phase_shifted(int M);

/// First Ng columns of the unitary Nc-point DFT matrix.
CMatrix dft_truncated(int Nc, int Ng);

/// Angle-delay transform with the DFT factors precomputed; cheap to reuse
/// across many channels with the same geometry.
class AngleDelayTransform {
public:
    AngleDelayTransform(const ArrayGeometry& geom, const OfdmConfig& ofdm);

    /// G = (V_M^H (x) V_N^H) H conj(F) / sqrt(M N Nc), applied axis by axis.
    AngleDelayChannel apply(const SpatialFrequencyChannel& H) const;

    /// (V_M^H (x) V_N^H) q / sqrt(M N).
    CVector angle_domain(const CVector& q) const;

    int M() const { return M_; }
    int N() const { return N_; }
    int Nc() const { return Nc_; }
    int Ng() const { return Ng_; }

private:
    void angle_rows_inplace(cdouble* data, int cols) const;

    int M_, N_, Nc_, Ng_;
    CMatrix vmh_;    // V_M^H
    CMatrix vnh_;    // V_N^H
    CMatrix fconj_;  // conj(F_{Nc x Ng})
};

AngleDelayChannel to_angle_delay(const SpatialFrequencyChannel& H, const ArrayGeometry& geom,
                                 const OfdmConfig& ofdm);

/// Angle-domain CIR vector used for the single-path concentration checks.
CVector angle_domain_cir(const CVector& q, const ArrayGeometry& geom);

/// Optional noise model for Monte-Carlo fingerprints.
struct NoiseModel {
    std::optional<double> snr_db; // unset = noiseless
};

/// Sample-average of |G|^2 (ADCPM) or |H|^2 (SFCPM) over independent gain draws,
/// optionally with AWGN added to each H realization.
Fingerprint fingerprint_mc(const PathSet& paths, const ArrayGeometry& geom, const OfdmConfig& ofdm,
                           FingerprintKind kind, int n_samples, Rng& rng,
                           const NoiseModel& noise = {});

Fingerprint adcpm_mc(const PathSet& paths, const ArrayGeometry& geom, const OfdmConfig& ofdm,
                     int n_samples, Rng& rng);
Fingerprint sfcpm_mc(const PathSet& paths, const ArrayGeometry& geom, const OfdmConfig& ofdm,
                     int n_samples, Rng& rng);

/// Closed-form expectation: sum_p sigma2_p |T_p|^2, T_p the angle-delay image of
/// the unit-gain single-path channel. Gains are independent and zero-mean, so
/// cross terms vanish.
Fingerprint adcpm_exact(const PathSet& paths, const ArrayGeometry& geom, const OfdmConfig& ofdm);

/// Closed-form SFCPM. Every steering and subcarrier phase has unit modulus, so
/// each entry equals the total path power.
Fingerprint sfcpm_exact(const PathSet& paths, const ArrayGeometry& geom, const OfdmConfig& ofdm);

Fingerprint exact_fingerprint(FingerprintKind kind, const PathSet& paths, const ArrayGeometry& geom,
                              const OfdmConfig& ofdm);

/// [X]_{m,n,j} = [omega]_{m*N+n, j}.
Tensor3 reshape_fingerprint(const RMatrix& omega, int N);
RMatrix flatten_fingerprint(const Tensor3& x);

/// sin(M x) / (M sin x), with the removable points x = k*pi resolved to cos(M x)/cos(x).
double dirichlet(int M, double x);

SupportPrediction predict_support(const PathParam& path, const ArrayGeometry& geom,
                                  const OfdmConfig& ofdm);
std::vector<SupportPrediction> predict_supports(const PathSet& paths, const ArrayGeometry& geom,
                                                const OfdmConfig& ofdm);

/// Share of power inside the union of (2*window+1)^3 boxes around each rounded
/// support. Angle axes wrap (the angle DFT is circular); the delay axis is clipped.
double concentration_fraction(const Fingerprint& fp, std::span<const SupportPrediction> supports,
                              int window);

/// Zero every entry below alpha * max(x).
void denoise_inplace(std::span<double> x, double alpha);
Tensor3 denoise(const Tensor3& x, double alpha);
Fingerprint denoise(const Fingerprint& fp, double alpha);

/// Adds CN(0, mean(|H|^2) / 10^(snr_db/10)) noise per entry.
SpatialFrequencyChannel awgn_contaminate(const SpatialFrequencyChannel& H, double snr_db, Rng& rng);

} // namespace adloc
