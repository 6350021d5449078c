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

#include "adloc/fingerprint.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

namespace adloc {

const char* to_string(FingerprintKind kind) {
    return kind == FingerprintKind::ADCPM ? "adcpm" : "sfcpm";
}

FingerprintKind fingerprint_kind_from_string(const std::string& s) {
    if (s == "adcpm" || s == "ADCPM")
        return FingerprintKind::ADCPM;
    if (s == "sfcpm" || s == "SFCPM")
        return FingerprintKind::SFCPM;
    throw std::invalid_argument("unknown fingerprint kind: " + s);
}

Tensor3 Fingerprint::tensor() const { return reshape_fingerprint(omega, N); }

CMatrix dft_phase_shifted(int M) {
    if (M < 1)
        throw std::invalid_argument("dft_phase_shifted: M must be >= 1");
    CMatrix V(M, M);
    const double scale = 1.0 / std::sqrt(static_cast<double>(M));
    for (int m = 0; m < M; ++m)
        for (int n = 0; n < M; ++n)
            V(m, n) = std::polar(scale, -2.0 * kPi * m * (n - M / 2.0) / M);
    return V;
}

CMatrix dft_truncated(int Nc, int Ng) {
    if (Nc < 1 || Ng < 1)
        throw std::invalid_argument("dft_truncated: sizes must be positive");
    if (Ng > Nc)
        throw std::invalid_argument("dft_truncated: Ng exceeds Nc");
    CMatrix F(Nc, Ng);
    const double scale = 1.0 / std::sqrt(static_cast<double>(Nc));
    for (int i = 0; i < Nc; ++i)
        for (int j = 0; j < Ng; ++j) {
            // reduce i*j mod Nc before scaling to keep the phase argument small
            const long long k = (static_cast<long long>(i) * j) % Nc;
            F(i, j) = std::polar(scale, -2.0 * kPi * static_cast<double>(k) / Nc);
        }
    return F;
}

AngleDelayTransform::AngleDelayTransform(const ArrayGeometry& geom, const OfdmConfig& ofdm)
    : M_(geom.M), N_(geom.N), Nc_(ofdm.Nc), Ng_(ofdm.Ng) {
    geom.validate();
    ofdm.validate();
    vmh_ = dft_phase_shifted(M_).adjoint();
    vnh_ = dft_phase_shifted(N_).adjoint();
    fconj_ = dft_truncated(Nc_, Ng_).conjugate();
}

void AngleDelayTransform::angle_rows_inplace(cdouble* data, int cols) const {
    using RowMap = Eigen::Map<CMatrix>;
    // vertical axis: rows grouped as M blocks of N*cols
    RowMap outer(data, M_, static_cast<Eigen::Index>(N_) * cols);
    outer = (vmh_ * outer).eval();
    // horizontal axis: each block of N rows
    for (int m = 0; m < M_; ++m) {
        RowMap block(data + static_cast<std::size_t>(m) * N_ * cols, N_, cols);
        block = (vnh_ * block).eval();
    }
}

AngleDelayChannel AngleDelayTransform::apply(const SpatialFrequencyChannel& H) const {
    if (H.rows() != static_cast<Eigen::Index>(M_) * N_ || H.cols() != Nc_)
        throw DimensionError("to_angle_delay: H must be MN x Nc");
    AngleDelayChannel G = H * fconj_;
    angle_rows_inplace(G.data(), Ng_);
    G /= std::sqrt(static_cast<double>(M_) * N_ * Nc_);
    return G;
}

CVector AngleDelayTransform::angle_domain(const CVector& q) const {
    if (q.size() != static_cast<Eigen::Index>(M_) * N_)
        throw DimensionError("angle_domain_cir: vector length must be MN");
    CVector out = q;
    angle_rows_inplace(out.data(), 1);
    out /= std::sqrt(static_cast<double>(M_) * N_);
    return out;
}

AngleDelayChannel to_angle_delay(const SpatialFrequencyChannel& H, const ArrayGeometry& geom,
                                 const OfdmConfig& ofdm) {
    return AngleDelayTransform(geom, ofdm).apply(H);
}

CVector angle_domain_cir(const CVector& q, const ArrayGeometry& geom) {
    OfdmConfig dummy{1, 1, 1.0};
    return AngleDelayTransform(geom, dummy).angle_domain(q);
}

SpatialFrequencyChannel awgn_contaminate(const SpatialFrequencyChannel& H, double snr_db, Rng& rng) {
    if (!std::isfinite(snr_db))
        throw std::invalid_argument("awgn_contaminate: snr_db must be finite");
    const double signal = H.size() > 0 ? H.cwiseAbs2().mean() : 0.0;
    const double sd = std::sqrt(signal / std::pow(10.0, snr_db / 10.0) / 2.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    SpatialFrequencyChannel out = H;
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        out.data()[i] += cdouble(sd * re, sd * im);
    }
    return out;
}

Fingerprint fingerprint_mc(const PathSet& paths, const ArrayGeometry& geom, const OfdmConfig& ofdm,
                           FingerprintKind kind, int n_samples, Rng& rng, const NoiseModel& noise) {
    if (n_samples < 1)
        throw std::invalid_argument("fingerprint_mc: n_samples must be >= 1");
    paths.validate();
    const AngleDelayTransform transform(geom, ofdm);

    Fingerprint fp;
    fp.M = geom.M;
    fp.N = geom.N;
    fp.kind = kind;
    const int cols = kind == FingerprintKind::ADCPM ? ofdm.Ng : ofdm.Nc;
    fp.omega = RMatrix::Zero(geom.antennas(), cols);

    for (int s = 0; s < n_samples; ++s) {
        const auto gains = sample_gains(paths, rng);
        SpatialFrequencyChannel H = sfcrm(paths, gains, geom, ofdm);
        if (noise.snr_db)
            H = awgn_contaminate(H, *noise.snr_db, rng);
        if (kind == FingerprintKind::ADCPM)
            fp.omega += transform.apply(H).cwiseAbs2();
        else
            fp.omega += H.cwiseAbs2();
    }
    fp.omega /= static_cast<double>(n_samples);
    if (!fp.omega.allFinite())
        throw NumericalError("fingerprint_mc: non-finite fingerprint");
    return fp;
}

Fingerprint adcpm_mc(const PathSet& paths, const ArrayGeometry& geom, const OfdmConfig& ofdm,
                     int n_samples, Rng& rng) {
    return fingerprint_mc(paths, geom, ofdm, FingerprintKind::ADCPM, n_samples, rng);
}

Fingerprint sfcpm_mc(const PathSet& paths, const ArrayGeometry& geom, const OfdmConfig& ofdm,
                     int n_samples, Rng& rng) {
    return fingerprint_mc(paths, geom, ofdm, FingerprintKind::SFCPM, n_samples, rng);
}

Fingerprint adcpm_exact(const PathSet& paths, const ArrayGeometry& geom, const OfdmConfig& ofdm) {
    paths.validate();
    geom.validate();
    ofdm.validate();
    const int M = geom.M, N = geom.N, Ng = ofdm.Ng, Nc = ofdm.Nc;
    const CMatrix vmh = dft_phase_shifted(M).adjoint();
    const CMatrix vnh = dft_phase_shifted(N).adjoint();
    const CMatrix fconj = dft_truncated(Nc, Ng).conjugate();

    Fingerprint fp;
    fp.M = M;
    fp.N = N;
    fp.kind = FingerprintKind::ADCPM;
    fp.omega = RMatrix::Zero(M * N, Ng);

    // The single-path image is separable: (V_M^H e_v) (x) (V_N^H e_h) times the
    // delay profile conj(F)^T ramp.
    Eigen::Matrix<cdouble, 1, Eigen::Dynamic> ramp(Nc);
    const double scale = 1.0 / (static_cast<double>(M) * N * Nc);
    for (const auto& path : paths.paths) {
        const auto ev = steering_vertical(geom, path.theta);
        const auto eh = steering_horizontal(geom, path.theta, path.phi);
        const Eigen::VectorXd pv =
            (vmh * Eigen::Map<const CVector>(ev.data(), M)).cwiseAbs2();
        const Eigen::VectorXd ph =
            (vnh * Eigen::Map<const CVector>(eh.data(), N)).cwiseAbs2();
        for (int l = 0; l < Nc; ++l)
            ramp(l) = std::polar(1.0, -2.0 * kPi * l * path.r / Nc);
        const Eigen::RowVectorXd pd = (ramp * fconj).cwiseAbs2();
        for (int m = 0; m < M; ++m)
            for (int n = 0; n < N; ++n)
                fp.omega.row(m * N + n) += (path.sigma2 * scale * pv(m) * ph(n)) * pd;
    }
    return fp;
}

Fingerprint sfcpm_exact(const PathSet& paths, const ArrayGeometry& geom, const OfdmConfig& ofdm) {
    paths.validate();
    Fingerprint fp;
    fp.M = geom.M;
    fp.N = geom.N;
    fp.kind = FingerprintKind::SFCPM;
    fp.omega = RMatrix::Constant(geom.antennas(), ofdm.Nc, paths.total_power());
    return fp;
}

Fingerprint exact_fingerprint(FingerprintKind kind, const PathSet& paths, const ArrayGeometry& geom,
                              const OfdmConfig& ofdm) {
    return kind == FingerprintKind::ADCPM ? adcpm_exact(paths, geom, ofdm)
                                          : sfcpm_exact(paths, geom, ofdm);
}

Tensor3 reshape_fingerprint(const RMatrix& omega, int N) {
    if (N < 1 || omega.rows() % N != 0)
        throw DimensionError("reshape_fingerprint: row count not divisible by N");
    const int M = static_cast<int>(omega.rows() / N);
    const int L = static_cast<int>(omega.cols());
    Tensor3 x(M, N, L);
    // row-major omega already has the (m*N + n)*L + j layout
    std::copy(omega.data(), omega.data() + omega.size(), x.data.begin());
    return x;
}

RMatrix flatten_fingerprint(const Tensor3& x) {
    RMatrix omega(x.dims[0] * x.dims[1], x.dims[2]);
    std::copy(x.data.begin(), x.data.end(), omega.data());
    return omega;
}

double dirichlet(int M, double x) {
    if (M < 1)
        throw std::invalid_argument("dirichlet: M must be >= 1");
    const double s = std::sin(x);
    if (std::abs(s) < 1e-12)
        return std::cos(M * x) / std::cos(x);
    return std::sin(M * x) / (M * s);
}

SupportPrediction predict_support(const PathParam& path, const ArrayGeometry& geom,
                                  const OfdmConfig& ofdm) {
    (void)ofdm;
    SupportPrediction s;
    s.m_bar = geom.M / 2.0 + geom.M * geom.d_v / geom.lambda_c * std::cos(path.theta);
    s.n_bar = geom.N / 2.0 +
              geom.N * geom.d_h / geom.lambda_c * std::sin(path.theta) * std::cos(path.phi);
    s.r = path.r;
    s.sigma2 = path.sigma2;
    return s;
}

std::vector<SupportPrediction> predict_supports(const PathSet& paths, const ArrayGeometry& geom,
                                                const OfdmConfig& ofdm) {
    std::vector<SupportPrediction> out;
    out.reserve(paths.paths.size());
    for (const auto& p : paths.paths)
        out.push_back(predict_support(p, geom, ofdm));
    return out;
}

namespace {

int wrap(long long i, int n) {
    const long long r = i % n;
    return static_cast<int>(r < 0 ? r + n : r);
}

// Half-bin positions resolve upward even when trig round-off lands them a few
// ulps below the midpoint.
long long round_half_up(double x) { return static_cast<long long>(std::floor(x + 0.5 + 1e-9)); }

} // namespace

double concentration_fraction(const Fingerprint& fp, std::span<const SupportPrediction> supports,
                              int window) {
    if (supports.empty())
        throw std::invalid_argument("concentration_fraction: no supports");
    if (window < 0)
        throw std::invalid_argument("concentration_fraction: negative window");
    const int M = fp.M, N = fp.N, L = fp.columns();

    std::set<std::tuple<int, int, int>> cells;
    for (const auto& s : supports) {
        const long long mi = round_half_up(s.m_bar);
        const long long ni = round_half_up(s.n_bar);
        const long long ri = round_half_up(s.r);
        for (int a = -window; a <= window; ++a)
            for (int b = -window; b <= window; ++b)
                for (int c = -window; c <= window; ++c) {
                    const long long j = ri + c;
                    if (j < 0 || j >= L)
                        continue;
                    cells.emplace(wrap(mi + a, M), wrap(ni + b, N), static_cast<int>(j));
                }
    }
    double inside = 0.0;
    for (const auto& [m, n, j] : cells)
        inside += fp.omega(m * N + n, j);
    const double total = fp.omega.sum();
    if (!(total > 0.0))
        throw NumericalError("concentration_fraction: fingerprint has no power");
    return inside / total;
}

void denoise_inplace(std::span<double> x, double alpha) {
    if (alpha < 0.0 || alpha > 1.0)
        throw std::invalid_argument("denoise: alpha must lie in [0, 1]");
    if (x.empty())
        return;
    const double threshold = alpha * *std::max_element(x.begin(), x.end());
    for (auto& v : x)
        if (v < threshold)
            v = 0.0;
}

Tensor3 denoise(const Tensor3& x, double alpha) {
    Tensor3 out = x;
    denoise_inplace(out.data, alpha);
    return out;
}

Fingerprint denoise(const Fingerprint& fp, double alpha) {
    Fingerprint out = fp;
    denoise_inplace(std::span<double>(out.omega.data(), static_cast<std::size_t>(out.omega.size())),
                    alpha);
    return out;
}

} // namespace adloc
