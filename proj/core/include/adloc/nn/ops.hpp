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
#include <span>
#include <string>
#include <vector>

#include "adloc/nn/tensor.hpp"

namespace adloc::nn {

/// 3D kernel, layout [k1][k2][k3][p][q]. Odd extents; padding is centered.
template <typename T>
struct ConvKernel {
    std::array<int, 3> k{1, 1, 1};
    int p = 1;
    int q = 1;
    std::vector<T> w;

    ConvKernel() = default;
    ConvKernel(std::array<int, 3> extent, int in_channels, int out_channels)
        : k(extent), p(in_channels), q(out_channels),
          w(static_cast<std::size_t>(extent[0]) * extent[1] * extent[2] * in_channels * out_channels,
            T(0)) {}

    std::size_t index(int a, int b, int c, int pi, int qi) const {
        return ((((static_cast<std::size_t>(a) * k[1] + b) * k[2] + c) * p + pi) * q) + qi;
    }
    T& at(int a, int b, int c, int pi, int qi) { return w[index(a, b, c, pi, qi)]; }
    const T& at(int a, int b, int c, int pi, int qi) const { return w[index(a, b, c, pi, qi)]; }
    void validate() const;
};

template <typename T>
struct ConvGrads {
    Tensor4<T> input;
    ConvKernel<T> kernel;
};

/// Stride-1 zero-padded cross-correlation: out[h,w,l,q] =
/// sum_{a,b,c,p} K[a,b,c,p,q] * in[h+a-pa, w+b-pb, l+c-pc, p].
template <typename T>
Tensor4<T> conv3d_forward(const Tensor4<T>& input, const ConvKernel<T>& kernel);

template <typename T>
ConvGrads<T> conv3d_backward(const Tensor4<T>& input, const ConvKernel<T>& kernel,
                             const Tensor4<T>& grad_out);

/// Same as conv3d_backward, but accumulates into caller-owned buffers.
template <typename T>
void conv3d_backward_accumulate(const Tensor4<T>& input, const ConvKernel<T>& kernel,
                                const Tensor4<T>& grad_out, Tensor4<T>* grad_input,
                                std::vector<T>& grad_kernel);

template <typename T>
struct BNState {
    std::vector<T> gamma;
    std::vector<T> beta;
    std::vector<T> running_mean;
    std::vector<T> running_var;
    T momentum = T(0.9);
    T epsilon = T(1e-5);
    Mode mode = Mode::Train;

    BNState() = default;
    explicit BNState(int channels)
        : gamma(channels, T(1)), beta(channels, T(0)), running_mean(channels, T(0)),
          running_var(channels, T(1)) {}
    int channels() const { return static_cast<int>(gamma.size()); }
};

/// Per-forward values that the backward pass needs.
template <typename T>
struct BNCache {
    Batch<T> normalized;
    std::vector<T> inv_std;
};

/// Train mode normalizes each channel by statistics over (batch, h, w, l) and
/// blends them into the running estimates: running = m * running + (1 - m) * batch.
/// Infer mode uses the running estimates only.
template <typename T>
Batch<T> bn_forward(const Batch<T>& input, BNState<T>& state, BNCache<T>* cache = nullptr);

template <typename T>
struct BNGrads {
    Batch<T> input;
    std::vector<T> gamma;
    std::vector<T> beta;
};

template <typename T>
BNGrads<T> bn_backward(const Batch<T>& grad_out, const BNCache<T>& cache, const BNState<T>& state);

template <typename T>
Tensor4<T> relu(const Tensor4<T>& input);

/// Gradient passes where the forward input was strictly positive.
template <typename T>
Tensor4<T> relu_backward(const Tensor4<T>& input, const Tensor4<T>& grad_out);

enum class Padding { Valid, Same };

struct PoolSpec {
    std::array<int, 3> size{2, 2, 2};
    std::array<int, 3> stride{2, 2, 2};
    Padding padding = Padding::Valid;

    /// Valid: floor((D - s) / t) + 1, tail truncated. Same: ceil(D / t), padded
    /// symmetrically with the extra cell at the end.
    Shape4 output_shape(const Shape4& in) const;
    void validate() const;
};

template <typename T>
struct MaxPoolResult {
    Tensor4<T> output;
    std::vector<std::uint32_t> argmax; // flat input index per output element
};

/// Ties keep the first index in (a, b, c) scan order.
template <typename T>
MaxPoolResult<T> maxpool3d(const Tensor4<T>& input, const PoolSpec& spec);

template <typename T>
Tensor4<T> maxpool3d_backward(const Tensor4<T>& grad_out, std::span<const std::uint32_t> argmax,
                              const Shape4& input_shape);

/// Window mean over in-bounds cells (padding cells are not counted).
template <typename T>
Tensor4<T> avgpool3d(const Tensor4<T>& input, const PoolSpec& spec);

template <typename T>
Tensor4<T> avgpool3d_backward(const Tensor4<T>& grad_out, const Shape4& input_shape,
                              const PoolSpec& spec);

/// Per-channel spatial mean, returned with shape (1, 1, 1, C).
template <typename T>
Tensor4<T> global_avg_pool(const Tensor4<T>& input);

template <typename T>
Tensor4<T> global_avg_pool_backward(const Tensor4<T>& grad_out, const Shape4& input_shape);

template <typename T>
Tensor4<T> concat_channels(std::span<const Tensor4<T>> inputs);

template <typename T>
std::vector<Tensor4<T>> split_channels(const Tensor4<T>& input, std::span<const int> channels);

/// Dense affine map y = W x + b with W stored row-major (out x in).
template <typename T>
struct LinearParams {
    int in = 0;
    int out = 0;
    std::vector<T> W;
    std::vector<T> b;

    LinearParams() = default;
    LinearParams(int in_features, int out_features)
        : in(in_features), out(out_features),
          W(static_cast<std::size_t>(in_features) * out_features, T(0)), b(out_features, T(0)) {}
};

template <typename T>
struct LinearGrads {
    std::vector<T> input;
    std::vector<T> W;
    std::vector<T> b;
};

template <typename T>
std::vector<T> linear(std::span<const T> x, const LinearParams<T>& params);

template <typename T>
LinearGrads<T> linear_backward(std::span<const T> x, const LinearParams<T>& params,
                               std::span<const T> grad_out);

template <typename T>
struct LossResult {
    T total = T(0);
    T data = T(0);
    T regularization = T(0);
    std::vector<std::array<T, 3>> grad_predictions;
};

/// (1/N) sum ||a_i - a_hat_i||^2 + (lambda / 2) theta^T theta. The gradient with
/// respect to theta is lambda * theta and is applied by the caller.
template <typename T>
LossResult<T> mse_l2_loss(std::span<const std::array<T, 3>> predictions,
                          std::span<const std::array<T, 3>> targets, T squared_param_norm,
                          T lambda);

/// A named parameter block with its gradient accumulator.
template <typename T>
struct ParamRef {
    std::string name;
    std::vector<T>* value = nullptr;
    std::vector<T>* grad = nullptr;
    bool regularized = false;
};

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

template <typename T>
struct OptimizerState {
    AdamConfig config;
    std::int64_t step = 0;
    std::vector<std::vector<T>> m;
    std::vector<std::vector<T>> v;
};

/// Bias-corrected adaptive-moment update. Throws NumericalError naming the first
/// block with a non-finite gradient; parameters are left untouched in that case.
template <typename T>
void adam_step(std::span<const ParamRef<T>> params, OptimizerState<T>& state);

} // namespace adloc::nn
