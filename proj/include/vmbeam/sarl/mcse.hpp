// vmbeam/sarl/mcse.hpp
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

#ifndef VMBEAM_SARL_MCSE_HPP_
#define VMBEAM_SARL_MCSE_HPP_

#include "vmbeam/nn/checkpoint.hpp"
#include "vmbeam/nn/ops.hpp"
#include "vmbeam/nn/params.hpp"

namespace vmbeam::sarl {

// Compact reference MC-SE model with an explicit encoder/separator/decoder
// split so feature-level conditioning can fuse into the embedding:
//   encoder: 3x3 conv (2*in_channels -> embed_dim) + Mish
//   separator: `blocks` residual gated conv blocks over (T, F)
//   decoder: 3x3 conv to a sigmoid mask, applied to the reference channel.
struct McseConfig {
  int in_channels = 2;  // complex input mics
  int embed_dim = 8;    // H; must match the generator feature head for SARL-F
  int blocks = 2;

  void validate() const {
    require(in_channels >= 1 && embed_dim >= 1 && blocks >= 1,
            ErrorKind::config, "mcse: bad config");
  }
};

class McseModel {
 public:
  McseModel(McseConfig cfg, std::uint64_t init_seed);

  // h_phi: [2*in_channels, T, F] -> [H, T, F]
  nn::Tensor encode(const nn::Tensor& spec) const;

  // Separator + decoder: embedding plus the reference-channel complex planes
  // [2, T, F]; returns the masked estimate [2, T, F].
  nn::Tensor decode(const nn::Tensor& embedding, const nn::Tensor& ref_spec) const;

  // decode(encode(spec), ref channel of spec); the non-decomposed path.
  nn::Tensor forward(const nn::Tensor& spec) const;

  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }
  const McseConfig& config() const { return cfg_; }

  void load_params(const std::vector<nn::NamedTensor>& tensors,
                   const std::string& prefix = "");
  std::vector<nn::NamedTensor> dump_params(const std::string& prefix = "") const;

 private:
  McseConfig cfg_;
  nn::ParamStore params_;
};

}  // namespace vmbeam::sarl

#endif  // VMBEAM_SARL_MCSE_HPP_
