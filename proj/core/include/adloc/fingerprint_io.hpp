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

#include "adloc/fingerprint.hpp"

namespace adloc {

// Binary fingerprint layout, all little-endian:
//   bytes 0..7   magic "ADLOCFP\0"
//   bytes 8..11  u32 format version
//   bytes 12..15 u32 reserved (0)
//   u32 M, u32 N, u32 columns (Ng for ADCPM, Nc for SFCPM)
//   u8 kind (0 = ADCPM, 1 = SFCPM)
//   M*N*columns f64, row-major over (m*N + n, j)
inline constexpr std::uint32_t kFingerprintFormatVersion = 1;

void write_fingerprint(std::ostream& os, const Fingerprint& fp);
Fingerprint read_fingerprint(std::istream& is);

void save_fingerprint(const std::string& path, const Fingerprint& fp);
Fingerprint load_fingerprint(const std::string& path);

/// One line per angle index, one column per delay (or subcarrier) index.
void write_fingerprint_csv(std::ostream& os, const Fingerprint& fp);

namespace io {

void put_u32(std::ostream& os, std::uint32_t v);
void put_u64(std::ostream& os, std::uint64_t v);
void put_f64(std::ostream& os, double v);
void put_f32(std::ostream& os, float v);
std::uint32_t get_u32(std::istream& is);
std::uint64_t get_u64(std::istream& is);
double get_f64(std::istream& is);
float get_f32(std::istream& is);

} // namespace io

} // namespace adloc
