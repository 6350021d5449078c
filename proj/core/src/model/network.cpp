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

#include "adloc/model/network.hpp"

#include "json_keys.hpp"

#include <cmath>
#include <stdexcept>

namespace adloc::model {

using nlohmann::json;

const char* to_string(Architecture a) {
    return a == Architecture::Cnn3d ? "cnn3d" : "cnn2d";
}

const char* to_string(InputTransform t) {
    switch (t) {
    case InputTransform::None: return "none";
    case InputTransform::Sqrt: return "sqrt";
    case InputTransform::Log1p: return "log1p";
    }
    return "none";
}

namespace {

Architecture architecture_from_string(const std::string& s) {
    if (s == "cnn3d")
        return Architecture::Cnn3d;
    if (s == "cnn2d")
        return Architecture::Cnn2d;
    throw std::invalid_argument("unknown architecture '" + s + "'");
}

InputTransform transform_from_string(const std::string& s) {
    if (s == "none")
        return InputTransform::None;
    if (s == "sqrt")
        return InputTransform::Sqrt;
    if (s == "log1p")
        return InputTransform::Log1p;
    throw std::invalid_argument("unknown input transform '" + s + "'");
}

json pool_to_json(const nn::PoolSpec& p) {
    return {{"size", p.size},
            {"stride", p.stride},
            {"padding", p.padding == nn::Padding::Same ? "same" : "valid"}};
}

nn::PoolSpec pool_from_json(const json& j) {
    detail::reject_unknown_keys(j, {"size", "stride", "padding"}, "pool");
    nn::PoolSpec p;
    p.size = j.at("size").get<std::array<int, 3>>();
    p.stride = j.value("stride", p.size);
    const std::string pad = j.value("padding", std::string("valid"));
    if (pad == "same")
        p.padding = nn::Padding::Same;
    else if (pad == "valid")
        p.padding = nn::Padding::Valid;
    else
        throw std::invalid_argument("unknown pool padding '" + pad + "'");
    return p;
}

void check_odd(const std::array<int, 3>& k, const char* what) {
    for (int e : k)
        if (e < 1 || e % 2 == 0)
            throw std::invalid_argument(std::string(what) + ": kernel extents must be odd and positive");
}

} // namespace

nn::Shape4 NetworkSpec::input_shape() const {
    if (arch == Architecture::Cnn3d)
        return {M, N, Ng, 1};
    return {M * N, Ng, 1, 1};
}

void NetworkSpec::validate() const {
    if (M < 1 || N < 1 || Ng < 1)
        throw std::invalid_argument("NetworkSpec: input dims must be positive");
    if (outputs != 3)
        throw std::invalid_argument("NetworkSpec: the regression head emits a 3-vector");
    if (!(lambda >= 0.0))
        throw std::invalid_argument("NetworkSpec: lambda must be nonnegative");
    if (inception.base < 1)
        throw std::invalid_argument("NetworkSpec: inception base width must be positive");
    for (int f : inception.factors)
        if (f < 1)
            throw std::invalid_argument("NetworkSpec: inception factors must be positive");
    if (arch == Architecture::Cnn3d) {
        const auto& r = refinement;
        check_odd(r.left_kernel, "refinement left branch");
        check_odd(r.right_kernel, "refinement right branch");
        check_odd(r.merge_kernel, "refinement merge layer");
        if (r.left_kernel[0] != 1 || r.right_kernel[1] != 1)
            throw std::invalid_argument(
                "NetworkSpec: left branch spans horizontal angle x delay, right branch vertical angle x delay");
        if (r.left_kernel[2] <= r.left_kernel[1] || r.right_kernel[2] <= r.right_kernel[0])
            throw std::invalid_argument("NetworkSpec: delay kernel extent must exceed the angle extent");
        if (r.branch_channels < 1 || r.merge_channels < 1)
            throw std::invalid_argument("NetworkSpec: refinement channel counts must be positive");
        if (inception.pools.size() > inception.factors.size())
            throw std::invalid_argument("NetworkSpec: more stage pools than inception stages");
    }
}

json to_json(const NetworkSpec& s) {
    json pools = json::array();
    for (const auto& p : s.inception.pools)
        pools.push_back(p ? pool_to_json(*p) : json(nullptr));
    return {
        {"arch", to_string(s.arch)},
        {"M", s.M},
        {"N", s.N},
        {"Ng", s.Ng},
        {"refinement",
         {{"left_kernel", s.refinement.left_kernel},
          {"right_kernel", s.refinement.right_kernel},
          {"branch_channels", s.refinement.branch_channels},
          {"left_pool", pool_to_json(s.refinement.left_pool)},
          {"right_pool", pool_to_json(s.refinement.right_pool)},
          {"merge_kernel", s.refinement.merge_kernel},
          {"merge_channels", s.refinement.merge_channels},
          {"merge_pool", pool_to_json(s.refinement.merge_pool)}}},
        {"inception", {{"base", s.inception.base}, {"factors", s.inception.factors}, {"pools", pools}}},
        {"table2d", {{"kernel_scale", s.table2d.kernel_scale}, {"width_scale", s.table2d.width_scale}}},
        {"outputs", s.outputs},
        {"lambda", s.lambda},
        {"input_transform", to_string(s.input_transform)},
        {"seed", s.seed},
    };
}

NetworkSpec network_spec_from_json(const json& j) {
    detail::reject_unknown_keys(j, {"arch", "M", "N", "Ng", "refinement", "inception", "table2d", "outputs",
                                    "lambda", "input_transform", "seed"},
                                "network spec");
    NetworkSpec s;
    if (j.contains("arch"))
        s.arch = architecture_from_string(j.at("arch").get<std::string>());
    s.M = j.value("M", s.M);
    s.N = j.value("N", s.N);
    s.Ng = j.value("Ng", s.Ng);
    if (j.contains("refinement")) {
        const json& r = j.at("refinement");
        detail::reject_unknown_keys(r, {"left_kernel", "right_kernel", "branch_channels", "left_pool", "right_pool",
                                        "merge_kernel", "merge_channels", "merge_pool"},
                                    "refinement");
        auto& d = s.refinement;
        d.left_kernel = r.value("left_kernel", d.left_kernel);
        d.right_kernel = r.value("right_kernel", d.right_kernel);
        d.branch_channels = r.value("branch_channels", d.branch_channels);
        d.merge_kernel = r.value("merge_kernel", d.merge_kernel);
        d.merge_channels = r.value("merge_channels", d.merge_channels);
        if (r.contains("left_pool"))
            d.left_pool = pool_from_json(r.at("left_pool"));
        if (r.contains("right_pool"))
            d.right_pool = pool_from_json(r.at("right_pool"));
        if (r.contains("merge_pool"))
            d.merge_pool = pool_from_json(r.at("merge_pool"));
    }
    if (j.contains("inception")) {
        const json& i = j.at("inception");
        detail::reject_unknown_keys(i, {"base", "factors", "pools"}, "inception");
        s.inception.base = i.value("base", s.inception.base);
        if (i.contains("factors"))
            s.inception.factors = i.at("factors").get<std::vector<int>>();
        if (i.contains("pools")) {
            s.inception.pools.clear();
            for (const auto& p : i.at("pools"))
                s.inception.pools.push_back(p.is_null() ? std::nullopt
                                                        : std::optional<nn::PoolSpec>(pool_from_json(p)));
        }
    }
    if (j.contains("table2d")) {
        detail::reject_unknown_keys(j.at("table2d"), {"kernel_scale", "width_scale"}, "table2d");
        s.table2d.kernel_scale = j.at("table2d").value("kernel_scale", 0.0);
        s.table2d.width_scale = j.at("table2d").value("width_scale", 0.0);
    }
    s.outputs = j.value("outputs", s.outputs);
    s.lambda = j.value("lambda", s.lambda);
    if (j.contains("input_transform"))
        s.input_transform = transform_from_string(j.at("input_transform").get<std::string>());
    s.seed = j.value("seed", s.seed);
    s.validate();
    return s;
}

// --- Network --------------------------------------------------------------

Network::Network(NetworkSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    body_ = build_network<float>(spec_);
    Rng rng = make_rng(spec_.seed, 0x1a17);
    body_->initialize(rng);
}

nn::Tensor4<float> Network::prepare(const Fingerprint& fp) const {
    if (fp.M != spec_.M || fp.N != spec_.N)
        throw DimensionError("network expects an " + std::to_string(spec_.M) + "x" +
                             std::to_string(spec_.N) + " array fingerprint");
    return prepare(fp.omega);
}

nn::Tensor4<float> Network::prepare(const RMatrix& omega) const {
    const nn::Shape4 s = input_shape();
    if (static_cast<std::size_t>(omega.rows()) != static_cast<std::size_t>(spec_.M) * spec_.N ||
        omega.cols() != spec_.Ng)
        throw DimensionError("network input must be " + std::to_string(spec_.M * spec_.N) + "x" +
                             std::to_string(spec_.Ng) + ", got " + std::to_string(omega.rows()) + "x" +
                             std::to_string(omega.cols()));
    // Row-major (m*N + n, j) already matches both input layouts.
    const double total = omega.sum();
    const double unit = total > 0.0 ? static_cast<double>(omega.size()) / total : 1.0;
    nn::Tensor4<float> x(s);
    const double* src = omega.data();
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double v = std::max(src[i], 0.0) * unit;
        double t = v;
        if (spec_.input_transform == InputTransform::Sqrt)
            t = std::sqrt(v);
        else if (spec_.input_transform == InputTransform::Log1p)
            t = std::log1p(v);
        x.data[i] = static_cast<float>(t);
    }
    return x;
}

Vec3 Network::predict(const nn::Tensor4<float>& x) {
    return predict(nn::Batch<float>{x}).front();
}

std::vector<Vec3> Network::predict(const nn::Batch<float>& xs) {
    constexpr std::size_t chunk = 64;
    std::vector<Vec3> out;
    out.reserve(xs.size());
    for (std::size_t start = 0; start < xs.size(); start += chunk) {
        const std::size_t stop = std::min(xs.size(), start + chunk);
        nn::Batch<float> part(xs.begin() + static_cast<std::ptrdiff_t>(start),
                              xs.begin() + static_cast<std::ptrdiff_t>(stop));
        for (const auto& x : part)
            if (x.shape != input_shape())
                throw DimensionError("predict: input " + x.shape.str() + " does not match network input " +
                                     input_shape().str());
        const nn::Batch<float> y = body_->forward(part, nn::Mode::Infer);
        for (const auto& t : y) {
            Vec3 p{};
            for (int d = 0; d < 3; ++d)
                p[d] = static_cast<double>(t.data[d]) * scaling_.scale[d] + scaling_.mean[d];
            out.push_back(p);
        }
    }
    return out;
}

} // namespace adloc::model
