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

#include "adloc/wknn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "adloc/fingerprint_io.hpp"

namespace adloc {

double similarity(const RMatrix& a, const RMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("similarity: dimension mismatch");
    const double na = a.norm();
    const double nb = b.norm();
    if (!(na > 0.0) || !(nb > 0.0))
        throw std::invalid_argument("similarity: zero-norm fingerprint");
    return a.cwiseProduct(b).sum() / (na * nb);
}

FingerprintDatabase::FingerprintDatabase(int M, int N, int columns, FingerprintKind kind)
    : M_(M), N_(N), columns_(columns), kind_(kind) {}

void FingerprintDatabase::add(const Fingerprint& fp, const Vec3& position) {
    if (fp.M != M_ || fp.N != N_ || fp.columns() != columns_ || fp.kind != kind_)
        throw DimensionError("FingerprintDatabase: fingerprint does not match database dims");
    const double norm = fp.omega.norm();
    if (!(norm > 0.0))
        throw std::invalid_argument("FingerprintDatabase: zero-norm fingerprint");
    entries_.push_back({fp.omega, position});
    norms_.push_back(norm);
}

std::vector<double> FingerprintDatabase::similarities(const RMatrix& omega) const {
    if (omega.rows() != static_cast<Eigen::Index>(M_) * N_ || omega.cols() != columns_)
        throw DimensionError("FingerprintDatabase: query dimension mismatch");
    const double nq = omega.norm();
    if (!(nq > 0.0))
        throw std::invalid_argument("FingerprintDatabase: zero-norm query");
    std::vector<double> s(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i)
        s[i] = entries_[i].omega.cwiseProduct(omega).sum() / (norms_[i] * nq);
    return s;
}

Vec3 query(const FingerprintDatabase& db, const RMatrix& omega, int K) {
    if (K < 1)
        throw std::invalid_argument("query: K must be >= 1");
    if (db.empty())
        throw std::invalid_argument("query: empty database");
    if (static_cast<std::size_t>(K) > db.size())
        throw std::invalid_argument("query: K exceeds database size");

    const auto s = db.similarities(omega);
    std::vector<std::size_t> idx(s.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::partial_sort(idx.begin(), idx.begin() + K, idx.end(), [&](std::size_t a, std::size_t b) {
        return s[a] > s[b] || (s[a] == s[b] && a < b);
    });

    double wsum = 0.0;
    for (int k = 0; k < K; ++k)
        wsum += s[idx[k]];

    Vec3 out{0.0, 0.0, 0.0};
    for (int k = 0; k < K; ++k) {
        const double w = wsum > 0.0 ? s[idx[k]] / wsum : 1.0 / K;
        const auto& p = db.entry(idx[k]).position;
        for (int d = 0; d < 3; ++d)
            out[d] += w * p[d];
    }
    return out;
}

namespace {
constexpr char kDbMagic[8] = {'A', 'D', 'L', 'O', 'C', 'D', 'B', '\0'};
constexpr std::uint32_t kDbVersion = 1;
} // namespace

// Layout: magic, u32 version, u32 reserved, u64 count, then per entry a
// fingerprint record followed by x, y, z as f64.
void FingerprintDatabase::write(std::ostream& os) const {
    os.write(kDbMagic, sizeof(kDbMagic));
    io::put_u32(os, kDbVersion);
    io::put_u32(os, 0);
    io::put_u64(os, entries_.size());
    for (const auto& e : entries_) {
        Fingerprint fp{e.omega, M_, N_, kind_};
        write_fingerprint(os, fp);
        for (double v : e.position)
            io::put_f64(os, v);
    }
}

FingerprintDatabase FingerprintDatabase::read(std::istream& is) {
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kDbMagic, sizeof(kDbMagic)) != 0)
        throw std::runtime_error("FingerprintDatabase: bad magic");
    if (io::get_u32(is) != kDbVersion)
        throw std::runtime_error("FingerprintDatabase: unsupported version");
    io::get_u32(is);
    const auto count = io::get_u64(is);
    FingerprintDatabase db;
    for (std::uint64_t i = 0; i < count; ++i) {
        Fingerprint fp = read_fingerprint(is);
        Vec3 pos{io::get_f64(is), io::get_f64(is), io::get_f64(is)};
        if (i == 0)
            db = FingerprintDatabase(fp.M, fp.N, fp.columns(), fp.kind);
        db.add(fp, pos);
    }
    return db;
}

void FingerprintDatabase::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open " + path);
    write(os);
}

FingerprintDatabase FingerprintDatabase::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("cannot open " + path);
    return read(is);
}

} // namespace adloc
