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

#include "adloc/nn/layers.hpp"

#include <cmath>
#include <random>

namespace adloc::nn {

namespace {

nlohmann::json pool_json(const PoolSpec& s) {
    return {{"size", s.size},
            {"stride", s.stride},
            {"padding", s.padding == Padding::Same ? "same" : "valid"}};
}

template <typename T>
void require_batch(const Batch<T>& b, const std::string& who) {
    if (b.empty())
        throw std::invalid_argument(who + ": empty batch");
}

template <typename T>
void fill_uniform(std::vector<T>& v, double limit, Rng& rng) {
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (auto& x : v)
        x = static_cast<T>(dist(rng));
}

} // namespace

template <typename T>
nlohmann::json Layer<T>::describe() const {
    return {{"name", name_}, {"kind", kind()}};
}

template <typename T>
void Layer<T>::zero_grad() {
    std::vector<ParamRef<T>> ps;
    collect_params(ps);
    for (auto& p : ps)
        std::fill(p.grad->begin(), p.grad->end(), T(0));
}

template <typename T>
std::size_t Layer<T>::parameter_count() {
    std::vector<ParamRef<T>> ps;
    collect_params(ps);
    std::size_t n = 0;
    for (auto& p : ps)
        n += p.value->size();
    return n;
}

template <typename T>
void Layer<T>::shape_fail(const std::string& what) const {
    throw ShapeError("layer '" + name_ + "' (" + kind() + "): " + what);
}

// --- Conv3d ---------------------------------------------------------------

template <typename T>
Conv3d<T>::Conv3d(std::string name, std::array<int, 3> extent, int in_channels, int out_channels)
    : Layer<T>(std::move(name)), kernel_(extent, in_channels, out_channels) {
    kernel_.validate();
    grad_.assign(kernel_.w.size(), T(0));
}

template <typename T>
Shape4 Conv3d<T>::output_shape(const Shape4& in) const {
    if (in.c != kernel_.p)
        this->shape_fail("expects " + std::to_string(kernel_.p) + " channels, got " + in.str());
    return {in.h, in.w, in.l, kernel_.q};
}

template <typename T>
Batch<T> Conv3d<T>::forward(const Batch<T>& input, Mode mode) {
    require_batch(input, this->name());
    Batch<T> out;
    out.reserve(input.size());
    for (const auto& x : input) {
        output_shape(x.shape);
        out.push_back(conv3d_forward(x, kernel_));
    }
    if (mode == Mode::Train)
        input_ = input;
    return out;
}

template <typename T>
Batch<T> Conv3d<T>::backward(const Batch<T>& grad_out) {
    if (grad_out.size() != input_.size())
        throw DimensionError(this->name() + ": backward without matching forward");
    Batch<T> gin;
    gin.reserve(input_.size());
    for (std::size_t i = 0; i < input_.size(); ++i) {
        gin.emplace_back(input_[i].shape);
        conv3d_backward_accumulate(input_[i], kernel_, grad_out[i], &gin.back(), grad_);
    }
    return gin;
}

template <typename T>
void Conv3d<T>::collect_params(std::vector<ParamRef<T>>& out) {
    out.push_back({this->name() + ".weight", &kernel_.w, &grad_, true});
}

template <typename T>
void Conv3d<T>::initialize(Rng& rng) {
    const double fan_in = static_cast<double>(kernel_.k[0]) * kernel_.k[1] * kernel_.k[2] * kernel_.p;
    fill_uniform(kernel_.w, std::sqrt(6.0 / fan_in), rng);
}

template <typename T>
nlohmann::json Conv3d<T>::describe() const {
    auto j = Layer<T>::describe();
    j["kernel"] = kernel_.k;
    j["in_channels"] = kernel_.p;
    j["out_channels"] = kernel_.q;
    return j;
}

// --- BatchNorm ------------------------------------------------------------

template <typename T>
BatchNorm<T>::BatchNorm(std::string name, int channels)
    : Layer<T>(std::move(name)), state_(channels), grad_gamma_(channels, T(0)),
      grad_beta_(channels, T(0)) {
    if (channels < 1)
        throw std::invalid_argument("BatchNorm: channel count must be positive");
}

template <typename T>
Shape4 BatchNorm<T>::output_shape(const Shape4& in) const {
    if (in.c != state_.channels())
        this->shape_fail("expects " + std::to_string(state_.channels()) + " channels, got " + in.str());
    return in;
}

template <typename T>
Batch<T> BatchNorm<T>::forward(const Batch<T>& input, Mode mode) {
    require_batch(input, this->name());
    state_.mode = mode;
    return bn_forward(input, state_, mode == Mode::Train ? &cache_ : nullptr);
}

template <typename T>
Batch<T> BatchNorm<T>::backward(const Batch<T>& grad_out) {
    auto g = bn_backward(grad_out, cache_, state_);
    for (int c = 0; c < state_.channels(); ++c) {
        grad_gamma_[c] += g.gamma[c];
        grad_beta_[c] += g.beta[c];
    }
    return std::move(g.input);
}

template <typename T>
void BatchNorm<T>::collect_params(std::vector<ParamRef<T>>& out) {
    out.push_back({this->name() + ".gamma", &state_.gamma, &grad_gamma_, false});
    out.push_back({this->name() + ".beta", &state_.beta, &grad_beta_, false});
}

template <typename T>
void BatchNorm<T>::collect_buffers(std::vector<BufferRef<T>>& out) {
    out.push_back({this->name() + ".running_mean", &state_.running_mean});
    out.push_back({this->name() + ".running_var", &state_.running_var});
}

template <typename T>
nlohmann::json BatchNorm<T>::describe() const {
    auto j = Layer<T>::describe();
    j["channels"] = state_.channels();
    j["momentum"] = static_cast<double>(state_.momentum);
    j["epsilon"] = static_cast<double>(state_.epsilon);
    return j;
}

// --- ReLU -----------------------------------------------------------------

template <typename T>
Batch<T> ReLU<T>::forward(const Batch<T>& input, Mode mode) {
    Batch<T> out;
    out.reserve(input.size());
    for (const auto& x : input)
        out.push_back(relu(x));
    if (mode == Mode::Train)
        input_ = input;
    return out;
}

template <typename T>
Batch<T> ReLU<T>::backward(const Batch<T>& grad_out) {
    if (grad_out.size() != input_.size())
        throw DimensionError(this->name() + ": backward without matching forward");
    Batch<T> gin;
    gin.reserve(input_.size());
    for (std::size_t i = 0; i < input_.size(); ++i)
        gin.push_back(relu_backward(input_[i], grad_out[i]));
    return gin;
}

// --- Pooling --------------------------------------------------------------

template <typename T>
MaxPool<T>::MaxPool(std::string name, PoolSpec spec) : Layer<T>(std::move(name)), spec_(spec) {
    spec_.validate();
}

template <typename T>
Shape4 MaxPool<T>::output_shape(const Shape4& in) const {
    try {
        return spec_.output_shape(in);
    } catch (const ShapeError& e) {
        this->shape_fail(std::string(e.what()) + " (input " + in.str() + ")");
    }
}

template <typename T>
Batch<T> MaxPool<T>::forward(const Batch<T>& input, Mode mode) {
    require_batch(input, this->name());
    output_shape(input.front().shape);
    Batch<T> out;
    out.reserve(input.size());
    if (mode == Mode::Train) {
        argmax_.clear();
        in_shape_ = input.front().shape;
    }
    for (const auto& x : input) {
        auto r = maxpool3d(x, spec_);
        out.push_back(std::move(r.output));
        if (mode == Mode::Train)
            argmax_.push_back(std::move(r.argmax));
    }
    return out;
}

template <typename T>
Batch<T> MaxPool<T>::backward(const Batch<T>& grad_out) {
    if (grad_out.size() != argmax_.size())
        throw DimensionError(this->name() + ": backward without matching forward");
    Batch<T> gin;
    gin.reserve(grad_out.size());
    for (std::size_t i = 0; i < grad_out.size(); ++i)
        gin.push_back(maxpool3d_backward(grad_out[i], std::span<const std::uint32_t>(argmax_[i]), in_shape_));
    return gin;
}

template <typename T>
nlohmann::json MaxPool<T>::describe() const {
    auto j = Layer<T>::describe();
    j["pool"] = pool_json(spec_);
    return j;
}

template <typename T>
AvgPool<T>::AvgPool(std::string name, PoolSpec spec) : Layer<T>(std::move(name)), spec_(spec) {
    spec_.validate();
}

template <typename T>
Shape4 AvgPool<T>::output_shape(const Shape4& in) const {
    try {
        return spec_.output_shape(in);
    } catch (const ShapeError& e) {
        this->shape_fail(std::string(e.what()) + " (input " + in.str() + ")");
    }
}

template <typename T>
Batch<T> AvgPool<T>::forward(const Batch<T>& input, Mode mode) {
    require_batch(input, this->name());
    Batch<T> out;
    out.reserve(input.size());
    for (const auto& x : input)
        out.push_back(avgpool3d(x, spec_));
    if (mode == Mode::Train)
        in_shape_ = input.front().shape;
    return out;
}

template <typename T>
Batch<T> AvgPool<T>::backward(const Batch<T>& grad_out) {
    Batch<T> gin;
    gin.reserve(grad_out.size());
    for (const auto& g : grad_out)
        gin.push_back(avgpool3d_backward(g, in_shape_, spec_));
    return gin;
}

template <typename T>
nlohmann::json AvgPool<T>::describe() const {
    auto j = Layer<T>::describe();
    j["pool"] = pool_json(spec_);
    return j;
}

template <typename T>
Shape4 GlobalAvgPool<T>::output_shape(const Shape4& in) const {
    if (in.voxels() == 0 || in.c == 0)
        this->shape_fail("empty input " + in.str());
    return {1, 1, 1, in.c};
}

template <typename T>
Batch<T> GlobalAvgPool<T>::forward(const Batch<T>& input, Mode mode) {
    require_batch(input, this->name());
    Batch<T> out;
    out.reserve(input.size());
    for (const auto& x : input)
        out.push_back(global_avg_pool(x));
    if (mode == Mode::Train)
        in_shape_ = input.front().shape;
    return out;
}

template <typename T>
Batch<T> GlobalAvgPool<T>::backward(const Batch<T>& grad_out) {
    Batch<T> gin;
    gin.reserve(grad_out.size());
    for (const auto& g : grad_out)
        gin.push_back(global_avg_pool_backward(g, in_shape_));
    return gin;
}

// --- Linear ---------------------------------------------------------------

template <typename T>
Linear<T>::Linear(std::string name, int in_features, int out_features)
    : Layer<T>(std::move(name)), params_(in_features, out_features),
      grad_W_(params_.W.size(), T(0)), grad_b_(out_features, T(0)) {
    if (in_features < 1 || out_features < 1)
        throw std::invalid_argument("Linear: feature counts must be positive");
}

template <typename T>
Shape4 Linear<T>::output_shape(const Shape4& in) const {
    if (in.size() != static_cast<std::size_t>(params_.in))
        this->shape_fail("expects " + std::to_string(params_.in) + " features, got " + in.str());
    return {1, 1, 1, params_.out};
}

template <typename T>
Batch<T> Linear<T>::forward(const Batch<T>& input, Mode mode) {
    require_batch(input, this->name());
    Batch<T> out;
    out.reserve(input.size());
    for (const auto& x : input) {
        output_shape(x.shape);
        Tensor4<T> y(Shape4{1, 1, 1, params_.out});
        y.data = linear(std::span<const T>(x.data), params_);
        out.push_back(std::move(y));
    }
    if (mode == Mode::Train)
        input_ = input;
    return out;
}

template <typename T>
Batch<T> Linear<T>::backward(const Batch<T>& grad_out) {
    if (grad_out.size() != input_.size())
        throw DimensionError(this->name() + ": backward without matching forward");
    Batch<T> gin;
    gin.reserve(input_.size());
    for (std::size_t i = 0; i < input_.size(); ++i) {
        auto g = linear_backward(std::span<const T>(input_[i].data), params_,
                                 std::span<const T>(grad_out[i].data));
        for (std::size_t k = 0; k < grad_W_.size(); ++k)
            grad_W_[k] += g.W[k];
        for (std::size_t k = 0; k < grad_b_.size(); ++k)
            grad_b_[k] += g.b[k];
        Tensor4<T> t(input_[i].shape);
        t.data = std::move(g.input);
        gin.push_back(std::move(t));
    }
    return gin;
}

template <typename T>
void Linear<T>::collect_params(std::vector<ParamRef<T>>& out) {
    out.push_back({this->name() + ".weight", &params_.W, &grad_W_, true});
    out.push_back({this->name() + ".bias", &params_.b, &grad_b_, false});
}

template <typename T>
void Linear<T>::initialize(Rng& rng) {
    fill_uniform(params_.W, 1.0 / std::sqrt(static_cast<double>(params_.in)), rng);
    std::fill(params_.b.begin(), params_.b.end(), T(0));
}

template <typename T>
nlohmann::json Linear<T>::describe() const {
    auto j = Layer<T>::describe();
    j["in_features"] = params_.in;
    j["out_features"] = params_.out;
    return j;
}

// --- Containers -----------------------------------------------------------

template <typename T>
Shape4 Sequential<T>::output_shape(const Shape4& in) const {
    Shape4 s = in;
    for (const auto& l : layers_)
        s = l->output_shape(s);
    return s;
}

template <typename T>
Batch<T> Sequential<T>::forward(const Batch<T>& input, Mode mode) {
    if (layers_.empty())
        return input;
    Batch<T> x = layers_.front()->forward(input, mode);
    for (std::size_t i = 1; i < layers_.size(); ++i)
        x = layers_[i]->forward(x, mode);
    return x;
}

template <typename T>
Batch<T> Sequential<T>::backward(const Batch<T>& grad_out) {
    if (layers_.empty())
        return grad_out;
    Batch<T> g = layers_.back()->backward(grad_out);
    for (std::size_t i = layers_.size() - 1; i-- > 0;)
        g = layers_[i]->backward(g);
    return g;
}

template <typename T>
void Sequential<T>::collect_params(std::vector<ParamRef<T>>& out) {
    for (auto& l : layers_)
        l->collect_params(out);
}

template <typename T>
void Sequential<T>::collect_buffers(std::vector<BufferRef<T>>& out) {
    for (auto& l : layers_)
        l->collect_buffers(out);
}

template <typename T>
void Sequential<T>::initialize(Rng& rng) {
    for (auto& l : layers_)
        l->initialize(rng);
}

template <typename T>
nlohmann::json Sequential<T>::describe() const {
    auto j = Layer<T>::describe();
    j["layers"] = nlohmann::json::array();
    for (const auto& l : layers_)
        j["layers"].push_back(l->describe());
    return j;
}

template <typename T>
Sequential<T>& ParallelConcat<T>::add_branch(const std::string& name) {
    branches_.push_back(std::make_unique<Sequential<T>>(name));
    return *branches_.back();
}

template <typename T>
Shape4 ParallelConcat<T>::output_shape(const Shape4& in) const {
    if (branches_.empty())
        this->shape_fail("no branches");
    Shape4 out{};
    int channels = 0;
    for (std::size_t i = 0; i < branches_.size(); ++i) {
        const Shape4 s = branches_[i]->output_shape(in);
        if (i == 0)
            out = s;
        else if (s.h != out.h || s.w != out.w || s.l != out.l)
            this->shape_fail("branch '" + branches_[i]->name() + "' yields " + s.str() +
                             ", expected spatial dims of " + out.str());
        channels += s.c;
    }
    out.c = channels;
    return out;
}

template <typename T>
Batch<T> ParallelConcat<T>::forward(const Batch<T>& input, Mode mode) {
    require_batch(input, this->name());
    std::vector<Batch<T>> outs;
    outs.reserve(branches_.size());
    for (auto& b : branches_)
        outs.push_back(b->forward(input, mode));
    if (mode == Mode::Train) {
        channels_.clear();
        for (const auto& o : outs)
            channels_.push_back(o.front().shape.c);
    }
    Batch<T> out;
    out.reserve(input.size());
    std::vector<Tensor4<T>> parts(branches_.size());
    for (std::size_t i = 0; i < input.size(); ++i) {
        for (std::size_t k = 0; k < outs.size(); ++k)
            parts[k] = std::move(outs[k][i]);
        out.push_back(concat_channels(std::span<const Tensor4<T>>(parts)));
    }
    return out;
}

template <typename T>
Batch<T> ParallelConcat<T>::backward(const Batch<T>& grad_out) {
    if (channels_.size() != branches_.size())
        throw DimensionError(this->name() + ": backward without matching forward");
    std::vector<Batch<T>> per_branch(branches_.size());
    for (const auto& g : grad_out) {
        auto parts = split_channels(g, std::span<const int>(channels_));
        for (std::size_t k = 0; k < parts.size(); ++k)
            per_branch[k].push_back(std::move(parts[k]));
    }
    Batch<T> gin;
    for (std::size_t k = 0; k < branches_.size(); ++k) {
        Batch<T> g = branches_[k]->backward(per_branch[k]);
        if (k == 0) {
            gin = std::move(g);
            continue;
        }
        for (std::size_t i = 0; i < gin.size(); ++i)
            for (std::size_t e = 0; e < gin[i].size(); ++e)
                gin[i].data[e] += g[i].data[e];
    }
    return gin;
}

template <typename T>
void ParallelConcat<T>::collect_params(std::vector<ParamRef<T>>& out) {
    for (auto& b : branches_)
        b->collect_params(out);
}

template <typename T>
void ParallelConcat<T>::collect_buffers(std::vector<BufferRef<T>>& out) {
    for (auto& b : branches_)
        b->collect_buffers(out);
}

template <typename T>
void ParallelConcat<T>::initialize(Rng& rng) {
    for (auto& b : branches_)
        b->initialize(rng);
}

template <typename T>
nlohmann::json ParallelConcat<T>::describe() const {
    auto j = Layer<T>::describe();
    j["branches"] = nlohmann::json::array();
    for (const auto& b : branches_)
        j["branches"].push_back(b->describe());
    return j;
}

template <typename T>
void add_cna(Sequential<T>& seq, const std::string& name, std::array<int, 3> extent, int in_channels,
             int out_channels) {
    seq.template add<Conv3d<T>>(name + ".conv", extent, in_channels, out_channels);
    seq.template add<BatchNorm<T>>(name + ".bn", out_channels);
    seq.template add<ReLU<T>>(name + ".relu");
}

#define ADLOC_INSTANTIATE_LAYERS(T)                                                                \
    template class Layer<T>;                                                                       \
    template class Conv3d<T>;                                                                      \
    template class BatchNorm<T>;                                                                   \
    template class ReLU<T>;                                                                        \
    template class MaxPool<T>;                                                                     \
    template class AvgPool<T>;                                                                     \
    template class GlobalAvgPool<T>;                                                               \
    template class Linear<T>;                                                                      \
    template class Sequential<T>;                                                                  \
    template class ParallelConcat<T>;                                                              \
    template void add_cna(Sequential<T>&, const std::string&, std::array<int, 3>, int, int);

ADLOC_INSTANTIATE_LAYERS(float)
ADLOC_INSTANTIATE_LAYERS(double)

#undef ADLOC_INSTANTIATE_LAYERS

} // namespace adloc::nn
