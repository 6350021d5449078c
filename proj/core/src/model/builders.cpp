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

#include <algorithm>
#include <cmath>

#include "adloc/model/network.hpp"

namespace adloc::model {

using nn::PoolSpec;
using nn::Sequential;

template <typename T>
void build_refinement(Sequential<T>& seq, const NetworkSpec& spec, const std::string& prefix) {
    const auto& r = spec.refinement;
    const std::array<int, 3> dims{spec.M, spec.N, spec.Ng};
    for (int i = 0; i < 3; ++i)
        if (r.left_kernel[i] > dims[i] || r.right_kernel[i] > dims[i])
            throw nn::ShapeError("layer '" + prefix + "': branch kernel extent exceeds input axis " +
                                 std::to_string(i) + " of length " + std::to_string(dims[i]));

    auto branches = std::make_unique<nn::ParallelConcat<T>>(prefix + ".branches");
    auto& left = branches->add_branch(prefix + ".left");
    nn::add_cna(left, prefix + ".left.cna1", r.left_kernel, 1, r.branch_channels);
    nn::add_cna(left, prefix + ".left.cna2", r.left_kernel, r.branch_channels, r.branch_channels);
    left.template add<nn::MaxPool<T>>(prefix + ".left.pool", r.left_pool);
    auto& right = branches->add_branch(prefix + ".right");
    nn::add_cna(right, prefix + ".right.cna1", r.right_kernel, 1, r.branch_channels);
    nn::add_cna(right, prefix + ".right.cna2", r.right_kernel, r.branch_channels, r.branch_channels);
    right.template add<nn::MaxPool<T>>(prefix + ".right.pool", r.right_pool);
    seq.append(std::move(branches));

    nn::add_cna(seq, prefix + ".merge", r.merge_kernel, 2 * r.branch_channels, r.merge_channels);
    seq.template add<nn::MaxPool<T>>(prefix + ".merge.pool", r.merge_pool);
}

template <typename T>
std::unique_ptr<nn::ParallelConcat<T>> build_inception(const std::string& name, int n, int in_channels,
                                                       int base, std::array<int, 3> kernel) {
    if (n < 1 || base < 1 || in_channels < 1)
        throw std::invalid_argument("build_inception: factor, base and channels must be positive");
    const int w = n * base;
    const std::array<int, 3> unit{1, 1, 1};
    auto block = std::make_unique<nn::ParallelConcat<T>>(name);

    auto& a = block->add_branch(name + ".a");
    nn::add_cna(a, name + ".a.reduce", unit, in_channels, w);

    auto& b = block->add_branch(name + ".b");
    nn::add_cna(b, name + ".b.reduce", unit, in_channels, w);
    nn::add_cna(b, name + ".b.conv", kernel, w, w);

    auto& c = block->add_branch(name + ".c");
    nn::add_cna(c, name + ".c.reduce", unit, in_channels, w);
    nn::add_cna(c, name + ".c.conv1", kernel, w, w);
    nn::add_cna(c, name + ".c.conv2", kernel, w, w);

    auto& d = block->add_branch(name + ".d");
    d.template add<nn::AvgPool<T>>(name + ".d.pool", PoolSpec{kernel, {1, 1, 1}, nn::Padding::Same});
    nn::add_cna(d, name + ".d.reduce", unit, in_channels, w);
    return block;
}

template <typename T>
std::unique_ptr<Sequential<T>> build_3dcnn(const NetworkSpec& spec) {
    auto net = std::make_unique<Sequential<T>>("cnn3d");
    build_refinement(*net, spec, "refine");
    int channels = spec.refinement.merge_channels;
    const auto& inc = spec.inception;
    for (std::size_t s = 0; s < inc.factors.size(); ++s) {
        const std::string name = "inception" + std::to_string(s + 1);
        net->append(build_inception<T>(name, inc.factors[s], channels, inc.base, {3, 3, 3}));
        channels = 4 * inc.factors[s] * inc.base;
        if (s < inc.pools.size() && inc.pools[s])
            net->template add<nn::MaxPool<T>>(name + ".pool", *inc.pools[s]);
    }
    net->template add<nn::GlobalAvgPool<T>>("gap");
    net->template add<nn::Linear<T>>("head", channels, spec.outputs);
    return net;
}

namespace {

int scale_kernel(int k, double s) {
    if (s >= 1.0 || k <= 3)
        return k;
    const int scaled = 2 * static_cast<int>(std::lround((k * s - 1.0) / 2.0)) + 1;
    return std::max(3, scaled);
}

int scale_width(int c, double s) {
    return std::max(1, static_cast<int>(std::lround(c * s)));
}

} // namespace

Table2dLayout table2d_layout(const NetworkSpec& spec) {
    Table2dLayout t;
    const double auto_scale = std::min(1.0, std::min(spec.M * spec.N, spec.Ng) / 128.0);
    t.kernel_scale = spec.table2d.kernel_scale > 0.0 ? spec.table2d.kernel_scale : auto_scale;
    t.width_scale = spec.table2d.width_scale > 0.0 ? spec.table2d.width_scale : auto_scale;
    for (auto& k : t.conv_kernels)
        k = scale_kernel(k, t.kernel_scale);
    for (auto& p : t.pool_sizes)
        p = scale_kernel(p, t.kernel_scale);
    for (auto& c : t.conv_channels)
        c = scale_width(c, t.width_scale);
    t.inception_base = scale_width(t.inception_base, t.width_scale);
    return t;
}

nlohmann::json Table2dLayout::to_json() const {
    return {{"kernel_scale", kernel_scale},   {"width_scale", width_scale},
            {"conv_kernels", conv_kernels},   {"conv_channels", conv_channels},
            {"pool_sizes", pool_sizes},       {"inception_base", inception_base},
            {"factors", factors}};
}

template <typename T>
std::unique_ptr<Sequential<T>> build_2dcnn(const NetworkSpec& spec) {
    const Table2dLayout t = table2d_layout(spec);
    auto net = std::make_unique<Sequential<T>>("cnn2d");
    auto sq = [](int k) { return std::array<int, 3>{k, k, 1}; };
    auto pool = [](int k) { return PoolSpec{{k, k, 1}, {2, 2, 1}, nn::Padding::Same}; };

    nn::add_cna(*net, "conv1", sq(t.conv_kernels[0]), 1, t.conv_channels[0]);
    net->template add<nn::MaxPool<T>>("pool1", pool(t.pool_sizes[0]));
    nn::add_cna(*net, "conv2", sq(t.conv_kernels[1]), t.conv_channels[0], t.conv_channels[1]);
    nn::add_cna(*net, "conv3", sq(t.conv_kernels[2]), t.conv_channels[1], t.conv_channels[2]);
    net->template add<nn::MaxPool<T>>("pool2", pool(t.pool_sizes[1]));

    int channels = t.conv_channels[2];
    net->append(build_inception<T>("inception1", t.factors[0], channels, t.inception_base, sq(3)));
    channels = 4 * t.factors[0] * t.inception_base;
    net->template add<nn::MaxPool<T>>("pool3", pool(t.pool_sizes[2]));
    net->append(build_inception<T>("inception2", t.factors[1], channels, t.inception_base, sq(3)));
    channels = 4 * t.factors[1] * t.inception_base;
    net->append(build_inception<T>("inception3", t.factors[2], channels, t.inception_base, sq(3)));
    channels = 4 * t.factors[2] * t.inception_base;
    net->template add<nn::MaxPool<T>>("pool4", pool(t.pool_sizes[3]));
    net->template add<nn::GlobalAvgPool<T>>("gap");
    net->template add<nn::Linear<T>>("head", channels, spec.outputs);
    return net;
}

template <typename T>
std::unique_ptr<Sequential<T>> build_network(const NetworkSpec& spec) {
    spec.validate();
    auto net = spec.arch == Architecture::Cnn3d ? build_3dcnn<T>(spec) : build_2dcnn<T>(spec);
    const nn::Shape4 out = net->output_shape(spec.input_shape());
    if (out != nn::Shape4{1, 1, 1, spec.outputs})
        throw nn::ShapeError("network output " + out.str() + " is not a 3-vector");
    return net;
}

#define ADLOC_INSTANTIATE_BUILDERS(T)                                                              \
    template void build_refinement(Sequential<T>&, const NetworkSpec&, const std::string&);        \
    template std::unique_ptr<nn::ParallelConcat<T>> build_inception(const std::string&, int, int,  \
                                                                    int, std::array<int, 3>);      \
    template std::unique_ptr<Sequential<T>> build_3dcnn(const NetworkSpec&);                       \
    template std::unique_ptr<Sequential<T>> build_2dcnn(const NetworkSpec&);                       \
    template std::unique_ptr<Sequential<T>> build_network(const NetworkSpec&);

ADLOC_INSTANTIATE_BUILDERS(float)
ADLOC_INSTANTIATE_BUILDERS(double)

#undef ADLOC_INSTANTIATE_BUILDERS

} // namespace adloc::model
