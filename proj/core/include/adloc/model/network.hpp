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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adloc/fingerprint.hpp"
#include "adloc/nn/layers.hpp"

namespace adloc::model {

enum class Architecture { Cnn3d, Cnn2d };
enum class InputTransform { None, Sqrt, Log1p };

const char* to_string(Architecture a);
const char* to_string(InputTransform t);

/// Two parallel asymmetric branches (each two CNA layers and a max pool),
/// merged by channel concatenation, one symmetric CNA layer and a max pool.
struct RefinementSpec {
    std::array<int, 3> left_kernel{1, 3, 7};  // horizontal angle x delay
    std::array<int, 3> right_kernel{3, 1, 7}; // vertical angle x delay
    int branch_channels = 8;
    nn::PoolSpec left_pool{{1, 2, 3}, {2, 2, 2}, nn::Padding::Valid};
    nn::PoolSpec right_pool{{2, 1, 3}, {2, 2, 2}, nn::Padding::Valid};
    std::array<int, 3> merge_kernel{3, 3, 3};
    int merge_channels = 16;
    nn::PoolSpec merge_pool{{1, 1, 2}, {1, 1, 2}, nn::Padding::Valid};
};

struct InceptionSpec {
    int base = 8;                  // per-branch width at factor 1
    std::vector<int> factors{1, 2, 4};
    /// Pool applied after each stage; std::nullopt means none.
    std::vector<std::optional<nn::PoolSpec>> pools{
        nn::PoolSpec{{1, 1, 2}, {1, 1, 2}, nn::Padding::Valid}, std::nullopt,
        nn::PoolSpec{{1, 2, 2}, {1, 2, 2}, nn::Padding::Valid}};
};

/// Scaling applied to the fixed 2D layer table when the input is smaller than
/// 128 x 128. Non-positive values are derived from the input size.
struct Table2dScaling {
    double kernel_scale = 0.0;
    double width_scale = 0.0;
};

struct NetworkSpec {
    Architecture arch = Architecture::Cnn3d;
    int M = 4;
    int N = 8;
    int Ng = 32;
    RefinementSpec refinement;
    InceptionSpec inception;
    Table2dScaling table2d;
    int outputs = 3;
    double lambda = 1e-5;
    InputTransform input_transform = InputTransform::Log1p;
    std::uint64_t seed = 1;

    /// (M, N, Ng, 1) for the 3D network, (M*N, Ng, 1, 1) for the 2D one.
    nn::Shape4 input_shape() const;
    void validate() const;
};

nlohmann::json to_json(const NetworkSpec& spec);
NetworkSpec network_spec_from_json(const nlohmann::json& j);

/// Concrete layer parameters of the 2D network after scaling.
struct Table2dLayout {
    double kernel_scale = 1.0;
    double width_scale = 1.0;
    std::array<int, 3> conv_kernels{15, 7, 5};
    std::array<int, 3> conv_channels{32, 64, 128};
    std::array<int, 4> pool_sizes{5, 5, 5, 3};
    int inception_base = 64;
    std::array<int, 3> factors{1, 2, 4};

    nlohmann::json to_json() const;
};

Table2dLayout table2d_layout(const NetworkSpec& spec);

template <typename T>
void build_refinement(nn::Sequential<T>& seq, const NetworkSpec& spec, const std::string& prefix);

/// Four branches of width n * base: 1x1x1; 1x1x1 then k; 1x1x1 then k, k;
/// stride-1 average pool then 1x1x1. Spatial dims are preserved.
template <typename T>
std::unique_ptr<nn::ParallelConcat<T>> build_inception(const std::string& name, int n, int in_channels,
                                                       int base, std::array<int, 3> kernel);

template <typename T>
std::unique_ptr<nn::Sequential<T>> build_3dcnn(const NetworkSpec& spec);

template <typename T>
std::unique_ptr<nn::Sequential<T>> build_2dcnn(const NetworkSpec& spec);

/// Builds the architecture named by `spec` and verifies the shape chain.
template <typename T>
std::unique_ptr<nn::Sequential<T>> build_network(const NetworkSpec& spec);

struct TargetScaling {
    std::array<double, 3> mean{0.0, 0.0, 0.0};
    std::array<double, 3> scale{1.0, 1.0, 1.0};
};

/// A built, initialized network plus its input and output conventions.
class Network {
public:
    explicit Network(NetworkSpec spec);

    const NetworkSpec& spec() const { return spec_; }
    nn::Shape4 input_shape() const { return spec_.input_shape(); }
    nn::Sequential<float>& body() { return *body_; }
    const nn::Sequential<float>& body() const { return *body_; }

    /// Fingerprint to network input: scaled to unit mean, then the configured
    /// compressive transform.
    nn::Tensor4<float> prepare(const Fingerprint& fp) const;
    nn::Tensor4<float> prepare(const RMatrix& omega) const;

    nn::Batch<float> forward(const nn::Batch<float>& input, nn::Mode mode) { return body_->forward(input, mode); }

    /// Infer-mode prediction in meters.
    Vec3 predict(const nn::Tensor4<float>& x);
    std::vector<Vec3> predict(const nn::Batch<float>& xs);

    std::size_t parameter_count() { return body_->parameter_count(); }

    TargetScaling& target_scaling() { return scaling_; }
    const TargetScaling& target_scaling() const { return scaling_; }
    nlohmann::json& metadata() { return metadata_; }
    const nlohmann::json& metadata() const { return metadata_; }

private:
    NetworkSpec spec_;
    std::unique_ptr<nn::Sequential<float>> body_;
    TargetScaling scaling_;
    nlohmann::json metadata_ = nlohmann::json::object();
};

} // namespace adloc::model
