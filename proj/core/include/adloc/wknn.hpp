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

#include <iosfwd>
#include <string>
#include <vector>

#include "adloc/fingerprint.hpp"

namespace adloc {

/// Normalized trace similarity Tr(A^T B) / (|A|_F |B|_F).
double similarity(const RMatrix& a, const RMatrix& b);

/// Offline fingerprint/position table for the searching-based baseline.
/// Immutable once built; queries are read-only.
class FingerprintDatabase {
public:
    struct Entry {
        RMatrix omega;
        Vec3 position;
    };

    FingerprintDatabase() = default;
    FingerprintDatabase(int M, int N, int columns, FingerprintKind kind);

    /// Throws on dimension mismatch or a zero-norm fingerprint.
    void add(const Fingerprint& fp, const Vec3& position);

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const Entry& entry(std::size_t i) const { return entries_[i]; }
    int M() const { return M_; }
    int N() const { return N_; }
    int columns() const { return columns_; }
    FingerprintKind kind() const { return kind_; }

    /// Similarity of `omega` against every entry, in entry order.
    std::vector<double> similarities(const RMatrix& omega) const;

    void write(std::ostream& os) const;
    static FingerprintDatabase read(std::istream& is);
    void save(const std::string& path) const;
    static FingerprintDatabase load(const std::string& path);

private:
    int M_ = 0;
    int N_ = 0;
    int columns_ = 0;
    FingerprintKind kind_ = FingerprintKind::ADCPM;
    std::vector<Entry> entries_;
    std::vector<double> norms_;
};

/// Weighted K-nearest-neighbor estimate. Neighbors are the K most similar entries
/// (ties go to the lower index); weights are proportional to similarity, falling
/// back to a plain mean when every selected similarity is zero.
Vec3 query(const FingerprintDatabase& db, const RMatrix& omega, int K);

} // namespace adloc
