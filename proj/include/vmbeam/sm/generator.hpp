// vmbeam/sm/generator.hpp
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

#ifndef VMBEAM_SM_GENERATOR_HPP_
#define VMBEAM_SM_GENERATOR_HPP_

#include <string>
#include <vector>

#include "vmbeam/nn/checkpoint.hpp"
#include "vmbeam/nn/ops.hpp"
#include "vmbeam/nn/params.hpp"

namespace vmbeam::sm {

// Channel-domain spatial upsampler: initial 3x3 conv expands 2*M_r planes to
// dims[0], then n_blocks stages of (up block, down block, DCA). Up and down
// blocks are back-projection units (projection conv, counter-projection conv,
// residual add/subtract) whose residual operands pass through a pointwise-
// conv + Mish gate when selection is enabled; down-block convs are grouped.
// DCA mixes dca_slots pointwise kernels with attention weights pooled from
// the stage input and reduces width dims[i] -> dims[i+1] (last stage keeps
// its width). Signal and feature heads read the final stage output.
struct GeneratorConfig {
  int n_blocks = 2;
  std::vector<int> dims{16, 12};
  int groups = 4;
  int kernel = 3;
  int m_r = 2;
  int m_v = 4;
  int feature_dim = 8;
  bool enable_selection = true;
  bool enable_dca = true;
  int dca_slots = 4;

  void validate() const;
  int width_after_stage(int stage) const {
    return dims[std::min<std::size_t>(stage + 1, dims.size() - 1)];
  }
};

struct VmEstimate {
  nn::Tensor v_hat_spec;  // [2*M_v, T, F]
  nn::Tensor f_vhat;      // [H, T, F]
};

class Generator {
 public:
  Generator(GeneratorConfig cfg, std::uint64_t init_seed);

  VmEstimate forward(const nn::Tensor& r_spec) const;

  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }
  const GeneratorConfig& config() const { return cfg_; }

  // Copies values into the existing parameter tensors; throws
  // ErrorKind::data when a name is missing or a shape differs.
  void load_params(const std::vector<nn::NamedTensor>& tensors,
                   const std::string& prefix = "");
  std::vector<nn::NamedTensor> dump_params(const std::string& prefix = "") const;

 private:
  GeneratorConfig cfg_;
  nn::ParamStore params_;
};

// Gate from the selection module: features (.) mish(pointwise(features)).
nn::Tensor selection_gate(const nn::Tensor& features, const nn::Tensor& w,
                          const nn::Tensor& b);

// Attention-weighted mixture of K pointwise kernels applied as a 1x1 conv.
// kernels[k] is [D_out, D_in, 1, 1], biases[k] is [D_out].
nn::Tensor dca_forward(const nn::Tensor& features,
                       const std::vector<nn::Tensor>& kernels,
                       const std::vector<nn::Tensor>& biases,
                       const nn::Tensor& att_w1, const nn::Tensor& att_b1,
                       const nn::Tensor& att_w2, const nn::Tensor& att_b2,
                       nn::Tensor* attention_out = nullptr);

// Copies matching names into a ParamStore's tensors (shared by all models).
void load_into_store(nn::ParamStore& store,
                     const std::vector<nn::NamedTensor>& tensors,
                     const std::string& prefix);
std::vector<nn::NamedTensor> dump_store(const nn::ParamStore& store,
                                        const std::string& prefix);

}  // namespace vmbeam::sm

#endif  // VMBEAM_SM_GENERATOR_HPP_
