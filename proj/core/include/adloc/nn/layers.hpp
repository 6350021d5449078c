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

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "adloc/nn/ops.hpp"
#include "adloc/types.hpp"

namespace adloc::nn {

/// A named, non-trainable state vector (batch-norm running statistics).
template <typename T>
struct BufferRef {
    std::string name;
    std::vector<T>* value = nullptr;
};

/// Forward in Train mode caches what backward needs; backward accumulates
/// parameter gradients and returns the gradient with respect to the input.
template <typename T>
class Layer {
public:
    explicit Layer(std::string name) : name_(std::move(name)) {}
    virtual ~Layer() = default;
    Layer(const Layer&) = delete;
    Layer& operator=(const Layer&) = delete;

    const std::string& name() const { return name_; }
    virtual std::string kind() const = 0;

    /// Throws ShapeError naming this layer when the input cannot be consumed.
    virtual Shape4 output_shape(const Shape4& in) const = 0;

    virtual Batch<T> forward(const Batch<T>& input, Mode mode) = 0;
    virtual Batch<T> backward(const Batch<T>& grad_out) = 0;

    virtual void collect_params(std::vector<ParamRef<T>>&) {}
    virtual void collect_buffers(std::vector<BufferRef<T>>&) {}
    virtual void initialize(Rng&) {}
    virtual nlohmann::json describe() const;

    void zero_grad();
    std::size_t parameter_count();

protected:
    [[noreturn]] void shape_fail(const std::string& what) const;

private:
    std::string name_;
};

template <typename T>
class Conv3d final : public Layer<T> {
public:
    Conv3d(std::string name, std::array<int, 3> extent, int in_channels, int out_channels);
    std::string kind() const override { return "conv3d"; }
    Shape4 output_shape(const Shape4& in) const override;
    Batch<T> forward(const Batch<T>& input, Mode mode) override;
    Batch<T> backward(const Batch<T>& grad_out) override;
    void collect_params(std::vector<ParamRef<T>>& out) override;
    void initialize(Rng& rng) override;
    nlohmann::json describe() const override;

    ConvKernel<T>& kernel() { return kernel_; }
    const ConvKernel<T>& kernel() const { return kernel_; }

private:
    ConvKernel<T> kernel_;
    std::vector<T> grad_;
    Batch<T> input_;
};

template <typename T>
class BatchNorm final : public Layer<T> {
public:
    BatchNorm(std::string name, int channels);
    std::string kind() const override { return "batchnorm"; }
    Shape4 output_shape(const Shape4& in) const override;
    Batch<T> forward(const Batch<T>& input, Mode mode) override;
    Batch<T> backward(const Batch<T>& grad_out) override;
    void collect_params(std::vector<ParamRef<T>>& out) override;
    void collect_buffers(std::vector<BufferRef<T>>& out) override;
    nlohmann::json describe() const override;

    BNState<T>& state() { return state_; }

private:
    BNState<T> state_;
    BNCache<T> cache_;
    std::vector<T> grad_gamma_;
    std::vector<T> grad_beta_;
};

template <typename T>
class ReLU final : public Layer<T> {
public:
    explicit ReLU(std::string name) : Layer<T>(std::move(name)) {}
    std::string kind() const override { return "relu"; }
    Shape4 output_shape(const Shape4& in) const override { return in; }
    Batch<T> forward(const Batch<T>& input, Mode mode) override;
    Batch<T> backward(const Batch<T>& grad_out) override;

private:
    Batch<T> input_;
};

template <typename T>
class MaxPool final : public Layer<T> {
public:
    MaxPool(std::string name, PoolSpec spec);
    std::string kind() const override { return "maxpool"; }
    Shape4 output_shape(const Shape4& in) const override;
    Batch<T> forward(const Batch<T>& input, Mode mode) override;
    Batch<T> backward(const Batch<T>& grad_out) override;
    nlohmann::json describe() const override;

private:
    PoolSpec spec_;
    Shape4 in_shape_;
    std::vector<std::vector<std::uint32_t>> argmax_;
};

template <typename T>
class AvgPool final : public Layer<T> {
public:
    AvgPool(std::string name, PoolSpec spec);
    std::string kind() const override { return "avgpool"; }
    Shape4 output_shape(const Shape4& in) const override;
    Batch<T> forward(const Batch<T>& input, Mode mode) override;
    Batch<T> backward(const Batch<T>& grad_out) override;
    nlohmann::json describe() const override;

private:
    PoolSpec spec_;
    Shape4 in_shape_;
};

template <typename T>
class GlobalAvgPool final : public Layer<T> {
public:
    explicit GlobalAvgPool(std::string name) : Layer<T>(std::move(name)) {}
    std::string kind() const override { return "global_avg_pool"; }
    Shape4 output_shape(const Shape4& in) const override;
    Batch<T> forward(const Batch<T>& input, Mode mode) override;
    Batch<T> backward(const Batch<T>& grad_out) override;

private:
    Shape4 in_shape_;
};

/// Consumes the flattened input (the only implicit reshape in a network) and
/// emits a (1, 1, 1, out) tensor.
template <typename T>
class Linear final : public Layer<T> {
public:
    Linear(std::string name, int in_features, int out_features);
    std::string kind() const override { return "linear"; }
    Shape4 output_shape(const Shape4& in) const override;
    Batch<T> forward(const Batch<T>& input, Mode mode) override;
    Batch<T> backward(const Batch<T>& grad_out) override;
    void collect_params(std::vector<ParamRef<T>>& out) override;
    void initialize(Rng& rng) override;
    nlohmann::json describe() const override;

    LinearParams<T>& params() { return params_; }

private:
    LinearParams<T> params_;
    std::vector<T> grad_W_;
    std::vector<T> grad_b_;
    Batch<T> input_;
};

template <typename T>
class Sequential final : public Layer<T> {
public:
    explicit Sequential(std::string name) : Layer<T>(std::move(name)) {}
    std::string kind() const override { return "sequential"; }

    template <typename L, typename... Args>
    L& add(Args&&... args) {
        auto layer = std::make_unique<L>(std::forward<Args>(args)...);
        L& ref = *layer;
        layers_.push_back(std::move(layer));
        return ref;
    }
    void append(std::unique_ptr<Layer<T>> layer) { layers_.push_back(std::move(layer)); }

    Shape4 output_shape(const Shape4& in) const override;
    Batch<T> forward(const Batch<T>& input, Mode mode) override;
    Batch<T> backward(const Batch<T>& grad_out) override;
    void collect_params(std::vector<ParamRef<T>>& out) override;
    void collect_buffers(std::vector<BufferRef<T>>& out) override;
    void initialize(Rng& rng) override;
    nlohmann::json describe() const override;

    std::size_t size() const { return layers_.size(); }
    Layer<T>& at(std::size_t i) { return *layers_.at(i); }

private:
    std::vector<std::unique_ptr<Layer<T>>> layers_;
};

/// Runs every branch on the same input and concatenates outputs along channels.
template <typename T>
class ParallelConcat final : public Layer<T> {
public:
    explicit ParallelConcat(std::string name) : Layer<T>(std::move(name)) {}
    std::string kind() const override { return "parallel_concat"; }

    Sequential<T>& add_branch(const std::string& name);

    Shape4 output_shape(const Shape4& in) const override;
    Batch<T> forward(const Batch<T>& input, Mode mode) override;
    Batch<T> backward(const Batch<T>& grad_out) override;
    void collect_params(std::vector<ParamRef<T>>& out) override;
    void collect_buffers(std::vector<BufferRef<T>>& out) override;
    void initialize(Rng& rng) override;
    nlohmann::json describe() const override;

private:
    std::vector<std::unique_ptr<Sequential<T>>> branches_;
    std::vector<int> channels_;
};

/// Convolution, batch normalization and ReLU, appended to `seq`.
template <typename T>
void add_cna(Sequential<T>& seq, const std::string& name, std::array<int, 3> extent, int in_channels,
             int out_channels);

} // namespace adloc::nn
