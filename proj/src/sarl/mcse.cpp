// vmbeam/sarl/mcse.cpp
//
// Copyright 2026 vmbeam authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vmbeam/sarl/mcse.hpp"

#include "vmbeam/sm/generator.hpp"

namespace vmbeam::sarl {

using nn::Tensor;

McseModel::McseModel(McseConfig cfg, std::uint64_t init_seed) : cfg_(cfg) {
  cfg_.validate();
  CounterRng rng(init_seed, 0x4d'43'53ULL);
  std::uint64_t idx = 0;
  auto add_conv = [&](const std::string& name, int out_c, int in_c, int k) {
    auto r = rng.fork(idx++);
    params_.add(name + ".w", nn::init_uniform({out_c, in_c, k, k},
                                              static_cast<std::int64_t>(in_c) * k * k, r));
    params_.add(name + ".b",
                nn::init_uniform({out_c}, static_cast<std::int64_t>(in_c) * k * k, r));
  };
  add_conv("enc", cfg_.embed_dim, 2 * cfg_.in_channels, 3);
  for (int b = 0; b < cfg_.blocks; ++b) {
    const std::string base = "sep" + std::to_string(b);
    add_conv(base + ".lin", cfg_.embed_dim, cfg_.embed_dim, 3);
    add_conv(base + ".gate", cfg_.embed_dim, cfg_.embed_dim, 3);
  }
  add_conv("mask", 1, cfg_.embed_dim, 3);
}

Tensor McseModel::encode(const Tensor& spec) const {
  require(spec.rank() == 3 && spec.dim(0) == 2 * cfg_.in_channels,
          ErrorKind::numeric, "mcse: input channel mismatch");
  return nn::mish(
      nn::conv2d(spec, params_.at("enc.w"), params_.at("enc.b"), 1, 1, 1));
}

Tensor McseModel::decode(const Tensor& embedding, const Tensor& ref_spec) const {
  require(embedding.rank() == 3 && embedding.dim(0) == cfg_.embed_dim,
          ErrorKind::numeric, "mcse: embedding dim mismatch");
  require(ref_spec.rank() == 3 && ref_spec.dim(0) == 2, ErrorKind::numeric,
          "mcse: reference spec must be [2,T,F]");
  Tensor h = embedding;
  for (int b = 0; b < cfg_.blocks; ++b) {
    const std::string base = "sep" + std::to_string(b);
    Tensor lin = nn::conv2d(h, params_.at(base + ".lin.w"),
                            params_.at(base + ".lin.b"), 1, 1, 1);
    Tensor gate = nn::sigmoid(nn::conv2d(h, params_.at(base + ".gate.w"),
                                         params_.at(base + ".gate.b"), 1, 1, 1));
    h = nn::add(h, nn::mul(lin, gate));
  }
  Tensor mask = nn::sigmoid(
      nn::conv2d(h, params_.at("mask.w"), params_.at("mask.b"), 1, 1, 1));
  return nn::mul_bcast0(ref_spec, mask);
}

Tensor McseModel::forward(const Tensor& spec) const {
  Tensor ref = nn::slice_channels(spec, 0, 2);  // first mic = reference
  return decode(encode(spec), ref);
}

void McseModel::load_params(const std::vector<nn::NamedTensor>& tensors,
                            const std::string& prefix) {
  sm::load_into_store(params_, tensors, prefix);
}

std::vector<nn::NamedTensor> McseModel::dump_params(
    const std::string& prefix) const {
  return sm::dump_store(params_, prefix);
}

}  // namespace vmbeam::sarl
