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
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace adloc::nn {

/// (height, width, length, channels). Channels are the fastest-varying axis.
struct Shape4 {
    int h = 0;
    int w = 0;
    int l = 0;
    int c = 0;

    std::size_t voxels() const { return static_cast<std::size_t>(h) * w * l; }
    std::size_t size() const { return voxels() * static_cast<std::size_t>(c); }
    bool operator==(const Shape4&) const = default;
    std::string str() const;
};

template <typename T>
struct Tensor4 {
    Shape4 shape;
    std::vector<T> data;

    Tensor4() = default;
    explicit Tensor4(const Shape4& s, T fill = T(0)) : shape(s), data(s.size(), fill) {}

    std::size_t index(int h, int w, int l, int c) const {
        return ((static_cast<std::size_t>(h) * shape.w + w) * shape.l + l) * shape.c + c;
    }
    T& at(int h, int w, int l, int c) { return data[index(h, w, l, c)]; }
    const T& at(int h, int w, int l, int c) const { return data[index(h, w, l, c)]; }
    std::size_t size() const { return data.size(); }
};

template <typename T>
using Batch = std::vector<Tensor4<T>>;

/// Shapes that do not chain; the message names the offending layer.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Mode { Train, Infer };

} // namespace adloc::nn
