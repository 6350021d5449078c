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

#include "adloc/fingerprint_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>

namespace adloc {

namespace io {

namespace {

template <typename U>
void put_le(std::ostream& os, U v) {
    std::array<char, sizeof(U)> buf{};
    for (std::size_t i = 0; i < sizeof(U); ++i)
        buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    os.write(buf.data(), buf.size());
}

template <typename U>
U get_le(std::istream& is) {
    std::array<unsigned char, sizeof(U)> buf{};
    is.read(reinterpret_cast<char*>(buf.data()), buf.size());
    if (!is)
        throw std::runtime_error("unexpected end of binary stream");
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i)
        v |= static_cast<U>(buf[i]) << (8 * i);
    return v;
}

} // namespace

void put_u32(std::ostream& os, std::uint32_t v) { put_le(os, v); }
void put_u64(std::ostream& os, std::uint64_t v) { put_le(os, v); }
void put_f64(std::ostream& os, double v) { put_le(os, std::bit_cast<std::uint64_t>(v)); }
void put_f32(std::ostream& os, float v) { put_le(os, std::bit_cast<std::uint32_t>(v)); }
std::uint32_t get_u32(std::istream& is) { return get_le<std::uint32_t>(is); }
std::uint64_t get_u64(std::istream& is) { return get_le<std::uint64_t>(is); }
double get_f64(std::istream& is) { return std::bit_cast<double>(get_le<std::uint64_t>(is)); }
float get_f32(std::istream& is) { return std::bit_cast<float>(get_le<std::uint32_t>(is)); }

} // namespace io

namespace {
constexpr char kMagic[8] = {'A', 'D', 'L', 'O', 'C', 'F', 'P', '\0'};
}

void write_fingerprint(std::ostream& os, const Fingerprint& fp) {
    if (fp.omega.rows() != static_cast<Eigen::Index>(fp.M) * fp.N)
        throw DimensionError("write_fingerprint: omega rows != M*N");
    os.write(kMagic, sizeof(kMagic));
    io::put_u32(os, kFingerprintFormatVersion);
    io::put_u32(os, 0);
    io::put_u32(os, static_cast<std::uint32_t>(fp.M));
    io::put_u32(os, static_cast<std::uint32_t>(fp.N));
    io::put_u32(os, static_cast<std::uint32_t>(fp.columns()));
    const char kind = static_cast<char>(fp.kind);
    os.write(&kind, 1);
    for (Eigen::Index i = 0; i < fp.omega.size(); ++i)
        io::put_f64(os, fp.omega.data()[i]);
}

Fingerprint read_fingerprint(std::istream& is) {
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("read_fingerprint: bad magic");
    const auto version = io::get_u32(is);
    if (version != kFingerprintFormatVersion)
        throw std::runtime_error("read_fingerprint: unsupported version " + std::to_string(version));
    io::get_u32(is);
    Fingerprint fp;
    fp.M = static_cast<int>(io::get_u32(is));
    fp.N = static_cast<int>(io::get_u32(is));
    const auto cols = static_cast<int>(io::get_u32(is));
    char kind = 0;
    is.read(&kind, 1);
    if (!is || (kind != 0 && kind != 1))
        throw std::runtime_error("read_fingerprint: bad kind tag");
    fp.kind = static_cast<FingerprintKind>(kind);
    fp.omega.resize(static_cast<Eigen::Index>(fp.M) * fp.N, cols);
    for (Eigen::Index i = 0; i < fp.omega.size(); ++i)
        fp.omega.data()[i] = io::get_f64(is);
    return fp;
}

void save_fingerprint(const std::string& path, const Fingerprint& fp) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open " + path);
    write_fingerprint(os, fp);
}

Fingerprint load_fingerprint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("cannot open " + path);
    return read_fingerprint(is);
}

void write_fingerprint_csv(std::ostream& os, const Fingerprint& fp) {
    const auto old = os.precision(17);
    for (Eigen::Index i = 0; i < fp.omega.rows(); ++i) {
        for (Eigen::Index j = 0; j < fp.omega.cols(); ++j) {
            if (j)
                os << ',';
            os << fp.omega(i, j);
        }
        os << '\n';
    }
    os.precision(old);
}

} // namespace adloc
