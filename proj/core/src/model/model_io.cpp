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

#include "adloc/model/model_io.hpp"

#include <fstream>
#include <stdexcept>

#include "adloc/fingerprint_io.hpp"

namespace adloc::model {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "adloc-model";
constexpr int kVersion = 1;

struct Block {
    std::string name;
    std::string role;
    std::vector<float>* data;
};

std::vector<Block> blocks_of(nn::Sequential<float>& body) {
    std::vector<nn::ParamRef<float>> params;
    std::vector<nn::BufferRef<float>> buffers;
    body.collect_params(params);
    body.collect_buffers(buffers);
    std::vector<Block> out;
    for (auto& p : params)
        out.push_back({p.name, "param", p.value});
    for (auto& b : buffers)
        out.push_back({b.name, "buffer", b.value});
    return out;
}

} // namespace

std::uintmax_t save_network(Network& net, const std::filesystem::path& manifest) {
    const auto blocks = blocks_of(net.body());
    std::filesystem::path blob = manifest;
    blob.replace_extension(".bin");

    json j;
    j["format"] = kFormat;
    j["version"] = kVersion;
    j["spec"] = to_json(net.spec());
    j["input_shape"] = {net.input_shape().h, net.input_shape().w, net.input_shape().l, net.input_shape().c};
    j["layers"] = net.body().describe();
    if (net.spec().arch == Architecture::Cnn2d)
        j["table2d_layout"] = table2d_layout(net.spec()).to_json();
    j["parameter_count"] = net.body().parameter_count();
    j["target_mean"] = net.target_scaling().mean;
    j["target_scale"] = net.target_scaling().scale;
    j["metadata"] = net.metadata();
    j["blob"] = blob.filename().string();
    json jb = json::array();
    std::uint64_t total = 0;
    for (const auto& b : blocks) {
        jb.push_back({{"name", b.name}, {"role", b.role}, {"count", b.data->size()}});
        total += b.data->size();
    }
    j["blocks"] = jb;
    j["blob_floats"] = total;

    {
        std::ofstream os(blob, std::ios::binary | std::ios::trunc);
        if (!os)
            throw std::runtime_error("cannot write " + blob.string());
        for (const auto& b : blocks)
            for (float v : *b.data)
                io::put_f32(os, v);
        if (!os)
            throw std::runtime_error("write failed: " + blob.string());
    }
    {
        std::ofstream os(manifest, std::ios::trunc);
        if (!os)
            throw std::runtime_error("cannot write " + manifest.string());
        os << j.dump(2) << '\n';
        if (!os)
            throw std::runtime_error("write failed: " + manifest.string());
    }
    return std::filesystem::file_size(manifest) + std::filesystem::file_size(blob);
}

Network load_network(const std::filesystem::path& manifest) {
    std::ifstream is(manifest);
    if (!is)
        throw std::runtime_error("cannot open model manifest " + manifest.string());
    const json j = json::parse(is);
    if (j.value("format", std::string()) != kFormat || j.value("version", 0) != kVersion)
        throw std::runtime_error(manifest.string() + ": not an adloc model manifest (version " +
                                 std::to_string(kVersion) + ")");

    Network net(network_spec_from_json(j.at("spec")));
    net.target_scaling().mean = j.at("target_mean").get<std::array<double, 3>>();
    net.target_scaling().scale = j.at("target_scale").get<std::array<double, 3>>();
    net.metadata() = j.value("metadata", json::object());

    auto blocks = blocks_of(net.body());
    const json& jb = j.at("blocks");
    if (jb.size() != blocks.size())
        throw std::runtime_error("model manifest lists " + std::to_string(jb.size()) +
                                 " blocks, network has " + std::to_string(blocks.size()));
    for (std::size_t i = 0; i < blocks.size(); ++i)
        if (jb[i].at("name").get<std::string>() != blocks[i].name ||
            jb[i].at("count").get<std::size_t>() != blocks[i].data->size())
            throw std::runtime_error("model block " + std::to_string(i) + " (" +
                                     jb[i].at("name").get<std::string>() + ") does not match the network");

    const std::filesystem::path blob = manifest.parent_path() / j.at("blob").get<std::string>();
    std::ifstream bs(blob, std::ios::binary);
    if (!bs)
        throw std::runtime_error("cannot open model blob " + blob.string());
    for (auto& b : blocks)
        for (auto& v : *b.data)
            v = io::get_f32(bs);
    if (bs.peek() != std::ifstream::traits_type::eof())
        throw std::runtime_error(blob.string() + ": trailing bytes after parameter blocks");
    return net;
}

} // namespace adloc::model
