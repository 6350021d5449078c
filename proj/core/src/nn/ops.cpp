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

#include "adloc/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adloc/types.hpp"

namespace adloc::nn {

template <typename T>
void ConvKernel<T>::validate() const {
    for (int e : k)
        if (e < 1 || e % 2 == 0)
            throw std::invalid_argument("ConvKernel: extents must be odd and positive");
    if (p < 1 || q < 1)
        throw std::invalid_argument("ConvKernel: channel counts must be positive");
    if (w.size() != static_cast<std::size_t>(k[0]) * k[1] * k[2] * p * q)
        throw DimensionError("ConvKernel: weight count does not match dims");
}

namespace {

struct Range {
    int lo, hi;
};

// Kernel taps a with 0 <= pos + a - pad < extent.
inline Range taps(int pos, int pad, int k, int extent) {
    return {std::max(0, pad - pos), std::min(k, extent + pad - pos)};
}

} // namespace

template <typename T>
Tensor4<T> conv3d_forward(const Tensor4<T>& input, const ConvKernel<T>& kernel) {
    kernel.validate();
    if (input.shape.c != kernel.p)
        throw DimensionError("conv3d: input has " + std::to_string(input.shape.c) +
                             " channels, kernel expects " + std::to_string(kernel.p));
    const Shape4 is = input.shape;
    Tensor4<T> out(Shape4{is.h, is.w, is.l, kernel.q});
    const int pa = (kernel.k[0] - 1) / 2, pb = (kernel.k[1] - 1) / 2, pc = (kernel.k[2] - 1) / 2;
    const int P = kernel.p, Q = kernel.q;

    for (int h = 0; h < is.h; ++h) {
        const Range ra = taps(h, pa, kernel.k[0], is.h);
        for (int w = 0; w < is.w; ++w) {
            const Range rb = taps(w, pb, kernel.k[1], is.w);
            for (int l = 0; l < is.l; ++l) {
                const Range rc = taps(l, pc, kernel.k[2], is.l);
                T* o = &out.data[out.index(h, w, l, 0)];
                for (int a = ra.lo; a < ra.hi; ++a)
                    for (int b = rb.lo; b < rb.hi; ++b)
                        for (int c = rc.lo; c < rc.hi; ++c) {
                            const T* x = &input.data[input.index(h + a - pa, w + b - pb, l + c - pc, 0)];
                            const T* wk = &kernel.w[kernel.index(a, b, c, 0, 0)];
                            for (int p = 0; p < P; ++p) {
                                const T xv = x[p];
                                if (xv == T(0))
                                    continue;
                                const T* wp = wk + static_cast<std::size_t>(p) * Q;
                                for (int q = 0; q < Q; ++q)
                                    o[q] += xv * wp[q];
                            }
                        }
            }
        }
    }
    return out;
}

template <typename T>
void conv3d_backward_accumulate(const Tensor4<T>& input, const ConvKernel<T>& kernel,
                                const Tensor4<T>& grad_out, Tensor4<T>* grad_input,
                                std::vector<T>& grad_kernel) {
    kernel.validate();
    const Shape4 is = input.shape;
    if (is.c != kernel.p || grad_out.shape != Shape4{is.h, is.w, is.l, kernel.q})
        throw DimensionError("conv3d_backward: shape mismatch");
    if (grad_kernel.size() != kernel.w.size())
        throw DimensionError("conv3d_backward: kernel gradient size mismatch");
    if (grad_input && grad_input->shape != is)
        throw DimensionError("conv3d_backward: input gradient shape mismatch");

    const int pa = (kernel.k[0] - 1) / 2, pb = (kernel.k[1] - 1) / 2, pc = (kernel.k[2] - 1) / 2;
    const int P = kernel.p, Q = kernel.q;

    for (int h = 0; h < is.h; ++h) {
        const Range ra = taps(h, pa, kernel.k[0], is.h);
        for (int w = 0; w < is.w; ++w) {
            const Range rb = taps(w, pb, kernel.k[1], is.w);
            for (int l = 0; l < is.l; ++l) {
                const Range rc = taps(l, pc, kernel.k[2], is.l);
                const T* g = &grad_out.data[grad_out.index(h, w, l, 0)];
                for (int a = ra.lo; a < ra.hi; ++a)
                    for (int b = rb.lo; b < rb.hi; ++b)
                        for (int c = rc.lo; c < rc.hi; ++c) {
                            const std::size_t xi = input.index(h + a - pa, w + b - pb, l + c - pc, 0);
                            const T* x = &input.data[xi];
                            T* gx = grad_input ? &grad_input->data[xi] : nullptr;
                            const std::size_t ki = kernel.index(a, b, c, 0, 0);
                            const T* wk = &kernel.w[ki];
                            T* gk = &grad_kernel[ki];
                            for (int p = 0; p < P; ++p) {
                                const T* wp = wk + static_cast<std::size_t>(p) * Q;
                                T* gkp = gk + static_cast<std::size_t>(p) * Q;
                                const T xv = x[p];
                                T acc = T(0);
                                for (int q = 0; q < Q; ++q) {
                                    acc += wp[q] * g[q];
                                    gkp[q] += xv * g[q];
                                }
                                if (gx)
                                    gx[p] += acc;
                            }
                        }
            }
        }
    }
}

template <typename T>
ConvGrads<T> conv3d_backward(const Tensor4<T>& input, const ConvKernel<T>& kernel,
                             const Tensor4<T>& grad_out) {
    ConvGrads<T> g;
    g.input = Tensor4<T>(input.shape);
    g.kernel = ConvKernel<T>(kernel.k, kernel.p, kernel.q);
    conv3d_backward_accumulate(input, kernel, grad_out, &g.input, g.kernel.w);
    return g;
}

template <typename T>
Batch<T> bn_forward(const Batch<T>& input, BNState<T>& state, BNCache<T>* cache) {
    if (input.empty())
        throw std::invalid_argument("bn_forward: empty batch");
    const Shape4 s = input.front().shape;
    const int C = state.channels();
    if (s.c != C)
        throw DimensionError("bn_forward: channel count mismatch");
    if (s.voxels() == 0)
        throw std::invalid_argument("bn_forward: zero-size spatial volume");
    for (const auto& t : input)
        if (t.shape != s)
            throw DimensionError("bn_forward: inconsistent shapes in batch");

    std::vector<T> mean(C), inv_std(C);
    if (state.mode == Mode::Train) {
        const double count = static_cast<double>(s.voxels()) * input.size();
        std::vector<double> sum(C, 0.0), sq(C, 0.0);
        for (const auto& t : input)
            for (std::size_t v = 0; v < s.voxels(); ++v)
                for (int c = 0; c < C; ++c)
                    sum[c] += t.data[v * C + c];
        for (int c = 0; c < C; ++c)
            sum[c] /= count;
        for (const auto& t : input)
            for (std::size_t v = 0; v < s.voxels(); ++v)
                for (int c = 0; c < C; ++c) {
                    const double d = t.data[v * C + c] - sum[c];
                    sq[c] += d * d;
                }
        for (int c = 0; c < C; ++c) {
            const double var = sq[c] / count;
            mean[c] = static_cast<T>(sum[c]);
            inv_std[c] = static_cast<T>(1.0 / std::sqrt(var + static_cast<double>(state.epsilon)));
            const double unbiased = count > 1.0 ? var * count / (count - 1.0) : var;
            state.running_mean[c] = static_cast<T>(state.momentum * state.running_mean[c] +
                                                   (1.0 - state.momentum) * sum[c]);
            state.running_var[c] = static_cast<T>(state.momentum * state.running_var[c] +
                                                  (1.0 - state.momentum) * unbiased);
        }
    } else {
        for (int c = 0; c < C; ++c) {
            mean[c] = state.running_mean[c];
            inv_std[c] = static_cast<T>(
                1.0 / std::sqrt(static_cast<double>(state.running_var[c]) + state.epsilon));
        }
    }

    Batch<T> out(input.size(), Tensor4<T>(s));
    if (cache) {
        cache->normalized.assign(input.size(), Tensor4<T>(s));
        cache->inv_std = inv_std;
    }
    for (std::size_t i = 0; i < input.size(); ++i)
        for (std::size_t v = 0; v < s.voxels(); ++v)
            for (int c = 0; c < C; ++c) {
                const std::size_t k = v * C + c;
                const T xhat = (input[i].data[k] - mean[c]) * inv_std[c];
                if (cache)
                    cache->normalized[i].data[k] = xhat;
                out[i].data[k] = state.gamma[c] * xhat + state.beta[c];
            }
    return out;
}

template <typename T>
BNGrads<T> bn_backward(const Batch<T>& grad_out, const BNCache<T>& cache, const BNState<T>& state) {
    if (state.mode != Mode::Train)
        throw std::logic_error("bn_backward: only defined in train mode");
    if (grad_out.size() != cache.normalized.size() || grad_out.empty())
        throw DimensionError("bn_backward: batch size mismatch");
    const Shape4 s = grad_out.front().shape;
    const int C = state.channels();
    const double count = static_cast<double>(s.voxels()) * grad_out.size();

    std::vector<double> dbeta(C, 0.0), dgamma(C, 0.0);
    for (std::size_t i = 0; i < grad_out.size(); ++i)
        for (std::size_t v = 0; v < s.voxels(); ++v)
            for (int c = 0; c < C; ++c) {
                const std::size_t k = v * C + c;
                dbeta[c] += grad_out[i].data[k];
                dgamma[c] += grad_out[i].data[k] * cache.normalized[i].data[k];
            }

    BNGrads<T> g;
    g.gamma.resize(C);
    g.beta.resize(C);
    std::vector<T> scale(C), mb(C), mg(C);
    for (int c = 0; c < C; ++c) {
        g.gamma[c] = static_cast<T>(dgamma[c]);
        g.beta[c] = static_cast<T>(dbeta[c]);
        scale[c] = state.gamma[c] * cache.inv_std[c];
        mb[c] = static_cast<T>(dbeta[c] / count);
        mg[c] = static_cast<T>(dgamma[c] / count);
    }
    g.input.assign(grad_out.size(), Tensor4<T>(s));
    for (std::size_t i = 0; i < grad_out.size(); ++i)
        for (std::size_t v = 0; v < s.voxels(); ++v)
            for (int c = 0; c < C; ++c) {
                const std::size_t k = v * C + c;
                g.input[i].data[k] =
                    scale[c] * (grad_out[i].data[k] - mb[c] - cache.normalized[i].data[k] * mg[c]);
            }
    return g;
}

template <typename T>
Tensor4<T> relu(const Tensor4<T>& input) {
    Tensor4<T> out(input.shape);
    for (std::size_t i = 0; i < input.size(); ++i)
        out.data[i] = input.data[i] > T(0) ? input.data[i] : T(0);
    return out;
}

template <typename T>
Tensor4<T> relu_backward(const Tensor4<T>& input, const Tensor4<T>& grad_out) {
    if (input.shape != grad_out.shape)
        throw DimensionError("relu_backward: shape mismatch");
    Tensor4<T> g(input.shape);
    for (std::size_t i = 0; i < input.size(); ++i)
        g.data[i] = input.data[i] > T(0) ? grad_out.data[i] : T(0);
    return g;
}

void PoolSpec::validate() const {
    for (int i = 0; i < 3; ++i)
        if (size[i] < 1 || stride[i] < 1)
            throw std::invalid_argument("PoolSpec: size and stride must be >= 1");
}

Shape4 PoolSpec::output_shape(const Shape4& in) const {
    validate();
    const std::array<int, 3> dims{in.h, in.w, in.l};
    std::array<int, 3> out{};
    for (int i = 0; i < 3; ++i) {
        if (padding == Padding::Same) {
            out[i] = (dims[i] + stride[i] - 1) / stride[i];
        } else {
            if (dims[i] < size[i])
                throw ShapeError("pool window " + std::to_string(size[i]) +
                                 " larger than input axis " + std::to_string(dims[i]));
            out[i] = (dims[i] - size[i]) / stride[i] + 1;
        }
    }
    return {out[0], out[1], out[2], in.c};
}

namespace {

struct Window {
    std::array<int, 3> pad_before{0, 0, 0};
};

Window pool_window(const Shape4& in, const Shape4& out, const PoolSpec& spec) {
    Window win;
    if (spec.padding == Padding::Same) {
        const std::array<int, 3> din{in.h, in.w, in.l}, dout{out.h, out.w, out.l};
        for (int i = 0; i < 3; ++i) {
            const int total = std::max((dout[i] - 1) * spec.stride[i] + spec.size[i] - din[i], 0);
            win.pad_before[i] = total / 2;
        }
    }
    return win;
}

} // namespace

template <typename T>
MaxPoolResult<T> maxpool3d(const Tensor4<T>& input, const PoolSpec& spec) {
    const Shape4 is = input.shape;
    const Shape4 os = spec.output_shape(is);
    const Window win = pool_window(is, os, spec);
    MaxPoolResult<T> res;
    res.output = Tensor4<T>(os);
    res.argmax.assign(os.size(), 0);
    const std::array<int, 3> din{is.h, is.w, is.l};

    for (int h = 0; h < os.h; ++h)
        for (int w = 0; w < os.w; ++w)
            for (int l = 0; l < os.l; ++l) {
                const std::array<int, 3> o{h, w, l};
                std::array<int, 3> lo{}, hi{};
                for (int i = 0; i < 3; ++i) {
                    const int start = o[i] * spec.stride[i] - win.pad_before[i];
                    lo[i] = std::max(start, 0);
                    hi[i] = std::min(start + spec.size[i], din[i]);
                }
                for (int c = 0; c < is.c; ++c) {
                    T best = -std::numeric_limits<T>::infinity();
                    std::size_t best_i = input.index(lo[0], lo[1], lo[2], c);
                    for (int a = lo[0]; a < hi[0]; ++a)
                        for (int b = lo[1]; b < hi[1]; ++b)
                            for (int d = lo[2]; d < hi[2]; ++d) {
                                const std::size_t k = input.index(a, b, d, c);
                                if (input.data[k] > best) {
                                    best = input.data[k];
                                    best_i = k;
                                }
                            }
                    const std::size_t oi = res.output.index(h, w, l, c);
                    res.output.data[oi] = best;
                    res.argmax[oi] = static_cast<std::uint32_t>(best_i);
                }
            }
    return res;
}

template <typename T>
Tensor4<T> maxpool3d_backward(const Tensor4<T>& grad_out, std::span<const std::uint32_t> argmax,
                              const Shape4& input_shape) {
    if (argmax.size() != grad_out.size())
        throw DimensionError("maxpool3d_backward: argmax size mismatch");
    Tensor4<T> g(input_shape);
    for (std::size_t i = 0; i < grad_out.size(); ++i)
        g.data[argmax[i]] += grad_out.data[i];
    return g;
}

namespace {

template <typename T, typename Fn>
void for_each_avg_window(const Shape4& is, const Shape4& os, const PoolSpec& spec, Fn&& fn) {
    const Window win = pool_window(is, os, spec);
    const std::array<int, 3> din{is.h, is.w, is.l};
    for (int h = 0; h < os.h; ++h)
        for (int w = 0; w < os.w; ++w)
            for (int l = 0; l < os.l; ++l) {
                const std::array<int, 3> o{h, w, l};
                std::array<int, 3> lo{}, hi{};
                for (int i = 0; i < 3; ++i) {
                    const int start = o[i] * spec.stride[i] - win.pad_before[i];
                    lo[i] = std::max(start, 0);
                    hi[i] = std::min(start + spec.size[i], din[i]);
                }
                fn(h, w, l, lo, hi);
            }
}

} // namespace

template <typename T>
Tensor4<T> avgpool3d(const Tensor4<T>& input, const PoolSpec& spec) {
    const Shape4 is = input.shape;
    const Shape4 os = spec.output_shape(is);
    if (is.size() == 0)
        throw std::invalid_argument("avgpool3d: empty input");
    Tensor4<T> out(os);
    const int C = is.c;
    for_each_avg_window<T>(is, os, spec, [&](int h, int w, int l, const auto& lo, const auto& hi) {
        T* o = &out.data[out.index(h, w, l, 0)];
        const int n = (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]);
        for (int a = lo[0]; a < hi[0]; ++a)
            for (int b = lo[1]; b < hi[1]; ++b)
                for (int d = lo[2]; d < hi[2]; ++d) {
                    const T* x = &input.data[input.index(a, b, d, 0)];
                    for (int c = 0; c < C; ++c)
                        o[c] += x[c];
                }
        const T inv = T(1) / static_cast<T>(n);
        for (int c = 0; c < C; ++c)
            o[c] *= inv;
    });
    return out;
}

template <typename T>
Tensor4<T> avgpool3d_backward(const Tensor4<T>& grad_out, const Shape4& input_shape,
                              const PoolSpec& spec) {
    const Shape4 os = spec.output_shape(input_shape);
    if (grad_out.shape != os)
        throw DimensionError("avgpool3d_backward: shape mismatch");
    Tensor4<T> g(input_shape);
    const int C = input_shape.c;
    for_each_avg_window<T>(input_shape, os, spec,
                           [&](int h, int w, int l, const auto& lo, const auto& hi) {
                               const T* go = &grad_out.data[grad_out.index(h, w, l, 0)];
                               const int n = (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]);
                               const T inv = T(1) / static_cast<T>(n);
                               for (int a = lo[0]; a < hi[0]; ++a)
                                   for (int b = lo[1]; b < hi[1]; ++b)
                                       for (int d = lo[2]; d < hi[2]; ++d) {
                                           T* x = &g.data[g.index(a, b, d, 0)];
                                           for (int c = 0; c < C; ++c)
                                               x[c] += go[c] * inv;
                                       }
                           });
    return g;
}

template <typename T>
Tensor4<T> global_avg_pool(const Tensor4<T>& input) {
    const Shape4 s = input.shape;
    if (s.voxels() == 0 || s.c == 0)
        throw std::invalid_argument("global_avg_pool: empty input");
    std::vector<double> acc(s.c, 0.0);
    for (std::size_t v = 0; v < s.voxels(); ++v)
        for (int c = 0; c < s.c; ++c)
            acc[c] += input.data[v * s.c + c];
    Tensor4<T> out(Shape4{1, 1, 1, s.c});
    for (int c = 0; c < s.c; ++c)
        out.data[c] = static_cast<T>(acc[c] / static_cast<double>(s.voxels()));
    return out;
}

template <typename T>
Tensor4<T> global_avg_pool_backward(const Tensor4<T>& grad_out, const Shape4& input_shape) {
    if (grad_out.size() != static_cast<std::size_t>(input_shape.c))
        throw DimensionError("global_avg_pool_backward: channel mismatch");
    Tensor4<T> g(input_shape);
    const T inv = T(1) / static_cast<T>(input_shape.voxels());
    for (std::size_t v = 0; v < input_shape.voxels(); ++v)
        for (int c = 0; c < input_shape.c; ++c)
            g.data[v * input_shape.c + c] = grad_out.data[c] * inv;
    return g;
}

template <typename T>
Tensor4<T> concat_channels(std::span<const Tensor4<T>> inputs) {
    if (inputs.empty())
        throw std::invalid_argument("concat_channels: no inputs");
    Shape4 s = inputs.front().shape;
    int total = 0;
    for (const auto& t : inputs) {
        if (t.shape.h != s.h || t.shape.w != s.w || t.shape.l != s.l)
            throw DimensionError("concat_channels: spatial mismatch " + t.shape.str() + " vs " +
                                 s.str());
        total += t.shape.c;
    }
    s.c = total;
    Tensor4<T> out(s);
    for (std::size_t v = 0; v < s.voxels(); ++v) {
        T* o = &out.data[v * total];
        for (const auto& t : inputs) {
            const T* x = &t.data[v * t.shape.c];
            o = std::copy(x, x + t.shape.c, o);
        }
    }
    return out;
}

template <typename T>
std::vector<Tensor4<T>> split_channels(const Tensor4<T>& input, std::span<const int> channels) {
    int total = 0;
    for (int c : channels)
        total += c;
    if (total != input.shape.c)
        throw DimensionError("split_channels: channel counts do not add up");
    std::vector<Tensor4<T>> out;
    out.reserve(channels.size());
    for (int c : channels) {
        Shape4 s = input.shape;
        s.c = c;
        out.emplace_back(s);
    }
    for (std::size_t v = 0; v < input.shape.voxels(); ++v) {
        const T* x = &input.data[v * input.shape.c];
        for (std::size_t k = 0; k < channels.size(); ++k) {
            std::copy(x, x + channels[k], &out[k].data[v * channels[k]]);
            x += channels[k];
        }
    }
    return out;
}

template <typename T>
std::vector<T> linear(std::span<const T> x, const LinearParams<T>& params) {
    if (static_cast<int>(x.size()) != params.in)
        throw DimensionError("linear: input has " + std::to_string(x.size()) + " features, expected " +
                             std::to_string(params.in));
    std::vector<T> y(params.b);
    for (int o = 0; o < params.out; ++o) {
        const T* row = &params.W[static_cast<std::size_t>(o) * params.in];
        T acc = T(0);
        for (int i = 0; i < params.in; ++i)
            acc += row[i] * x[i];
        y[o] += acc;
    }
    return y;
}

template <typename T>
LinearGrads<T> linear_backward(std::span<const T> x, const LinearParams<T>& params,
                               std::span<const T> grad_out) {
    if (static_cast<int>(x.size()) != params.in || static_cast<int>(grad_out.size()) != params.out)
        throw DimensionError("linear_backward: shape mismatch");
    LinearGrads<T> g;
    g.input.assign(params.in, T(0));
    g.W.assign(params.W.size(), T(0));
    g.b.assign(grad_out.begin(), grad_out.end());
    for (int o = 0; o < params.out; ++o) {
        const T* row = &params.W[static_cast<std::size_t>(o) * params.in];
        T* grow = &g.W[static_cast<std::size_t>(o) * params.in];
        for (int i = 0; i < params.in; ++i) {
            g.input[i] += row[i] * grad_out[o];
            grow[i] = grad_out[o] * x[i];
        }
    }
    return g;
}

template <typename T>
LossResult<T> mse_l2_loss(std::span<const std::array<T, 3>> predictions,
                          std::span<const std::array<T, 3>> targets, T squared_param_norm,
                          T lambda) {
    if (predictions.empty())
        throw std::invalid_argument("mse_l2_loss: empty batch");
    if (predictions.size() != targets.size())
        throw DimensionError("mse_l2_loss: prediction and target counts differ");
    const T n = static_cast<T>(predictions.size());
    LossResult<T> r;
    r.grad_predictions.resize(predictions.size());
    double data = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i)
        for (int d = 0; d < 3; ++d) {
            const T e = predictions[i][d] - targets[i][d];
            data += static_cast<double>(e) * e;
            r.grad_predictions[i][d] = T(2) * e / n;
        }
    r.data = static_cast<T>(data / static_cast<double>(predictions.size()));
    r.regularization = lambda / T(2) * squared_param_norm;
    r.total = r.data + r.regularization;
    return r;
}

template <typename T>
void adam_step(std::span<const ParamRef<T>> params, OptimizerState<T>& state) {
    for (const auto& p : params) {
        if (!p.value || !p.grad || p.value->size() != p.grad->size())
            throw DimensionError("adam_step: parameter/gradient shape mismatch in " + p.name);
        for (T g : *p.grad)
            if (!std::isfinite(static_cast<double>(g)))
                throw NumericalError("adam_step: non-finite gradient in parameter block '" + p.name + "'");
    }
    if (state.m.empty()) {
        for (const auto& p : params) {
            state.m.emplace_back(p.value->size(), T(0));
            state.v.emplace_back(p.value->size(), T(0));
        }
    }
    if (state.m.size() != params.size())
        throw DimensionError("adam_step: optimizer state does not match parameter list");
    for (std::size_t k = 0; k < params.size(); ++k)
        if (state.m[k].size() != params[k].value->size())
            throw DimensionError("adam_step: accumulator shape mismatch in " + params[k].name);

    ++state.step;
    const auto& cfg = state.config;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    const T b1 = static_cast<T>(cfg.beta1), b2 = static_cast<T>(cfg.beta2);
    const T lr = static_cast<T>(cfg.learning_rate);
    const T eps = static_cast<T>(cfg.epsilon);
    const T inv_bc1 = static_cast<T>(1.0 / bc1), inv_bc2 = static_cast<T>(1.0 / bc2);

    for (std::size_t k = 0; k < params.size(); ++k) {
        auto& value = *params[k].value;
        const auto& grad = *params[k].grad;
        auto& m = state.m[k];
        auto& v = state.v[k];
        for (std::size_t i = 0; i < value.size(); ++i) {
            m[i] = b1 * m[i] + (T(1) - b1) * grad[i];
            v[i] = b2 * v[i] + (T(1) - b2) * grad[i] * grad[i];
            const T mhat = m[i] * inv_bc1;
            const T vhat = v[i] * inv_bc2;
            value[i] -= lr * mhat / (std::sqrt(vhat) + eps);
        }
    }
}

#define ADLOC_INSTANTIATE_OPS(T)                                                                   \
    template struct ConvKernel<T>;                                                                 \
    template Tensor4<T> conv3d_forward(const Tensor4<T>&, const ConvKernel<T>&);                   \
    template ConvGrads<T> conv3d_backward(const Tensor4<T>&, const ConvKernel<T>&,                 \
                                          const Tensor4<T>&);                                      \
    template void conv3d_backward_accumulate(const Tensor4<T>&, const ConvKernel<T>&,              \
                                             const Tensor4<T>&, Tensor4<T>*, std::vector<T>&);     \
    template Batch<T> bn_forward(const Batch<T>&, BNState<T>&, BNCache<T>*);                       \
    template BNGrads<T> bn_backward(const Batch<T>&, const BNCache<T>&, const BNState<T>&);        \
    template Tensor4<T> relu(const Tensor4<T>&);                                                   \
    template Tensor4<T> relu_backward(const Tensor4<T>&, const Tensor4<T>&);                       \
    template MaxPoolResult<T> maxpool3d(const Tensor4<T>&, const PoolSpec&);                       \
    template Tensor4<T> maxpool3d_backward(const Tensor4<T>&, std::span<const std::uint32_t>,      \
                                           const Shape4&);                                         \
    template Tensor4<T> avgpool3d(const Tensor4<T>&, const PoolSpec&);                             \
    template Tensor4<T> avgpool3d_backward(const Tensor4<T>&, const Shape4&, const PoolSpec&);     \
    template Tensor4<T> global_avg_pool(const Tensor4<T>&);                                        \
    template Tensor4<T> global_avg_pool_backward(const Tensor4<T>&, const Shape4&);                \
    template Tensor4<T> concat_channels(std::span<const Tensor4<T>>);                              \
    template std::vector<Tensor4<T>> split_channels(const Tensor4<T>&, std::span<const int>);      \
    template std::vector<T> linear(std::span<const T>, const LinearParams<T>&);                    \
    template LinearGrads<T> linear_backward(std::span<const T>, const LinearParams<T>&,            \
                                            std::span<const T>);                                   \
    template LossResult<T> mse_l2_loss(std::span<const std::array<T, 3>>,                          \
                                       std::span<const std::array<T, 3>>, T, T);                   \
    template void adam_step(std::span<const ParamRef<T>>, OptimizerState<T>&);

ADLOC_INSTANTIATE_OPS(float)
ADLOC_INSTANTIATE_OPS(double)

#undef ADLOC_INSTANTIATE_OPS

} // namespace adloc::nn
