// vmbeam/sm/gan.hpp
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

#ifndef VMBEAM_SM_GAN_HPP_
#define VMBEAM_SM_GAN_HPP_

#include <vector>

#include "vmbeam/nn/checkpoint.hpp"
#include "vmbeam/nn/ops.hpp"
#include "vmbeam/nn/params.hpp"

namespace vmbeam::sm {

struct LossConfig {
  double w_vme = 0.3;
  double w_bf = 0.7;
  double w_adv_g = 0.01;
  double w_adv_d = 0.01;
  double snr_clip_db = 30.0;

  void validate() const {
    require(w_vme >= 0 && w_bf >= 0 && w_adv_g >= 0 && w_adv_d >= 0,
            ErrorKind::config, "loss weights must be non-negative");
  }
  bool gan_enabled() const { return w_adv_g > 0.0 || w_adv_d > 0.0; }
};

// Strided conv stack on concatenated (reference, estimate) magnitude pairs,
// global pool, scalar score.
struct DiscriminatorConfig {
  int in_channels = 2;   // ref mag + est mag (per-mic pairs are stacked)
  int base_channels = 8;
  int layers = 4;
};

class Discriminator {
 public:
  Discriminator(DiscriminatorConfig cfg, std::uint64_t init_seed);

  // ref_mag and est_mag are [M, T, F] magnitude tensors of the same shape.
  nn::Tensor forward(const nn::Tensor& ref_mag, const nn::Tensor& est_mag) const;

  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }
  const DiscriminatorConfig& config() const { return cfg_; }

  void load_params(const std::vector<nn::NamedTensor>& tensors,
                   const std::string& prefix = "");
  std::vector<nn::NamedTensor> dump_params(const std::string& prefix = "") const;

 private:
  DiscriminatorConfig cfg_;
  nn::ParamStore params_;
};

// Least-squares GAN objectives.
//   generator term:      0.5 * (D(fake) - 1)^2
//   discriminator term:  0.5 * ((D(real) - 1)^2 + D(fake)^2)
nn::Tensor lsgan_generator_term(const nn::Tensor& d_fake);
nn::Tensor lsgan_discriminator_term(const nn::Tensor& d_real,
                                    const nn::Tensor& d_fake);

// Mean over channels of the clipped negative SNR, est [M, L] vs refs[M].
nn::Tensor multichannel_snr_loss(const nn::Tensor& est,
                                 const std::vector<std::vector<double>>& refs,
                                 double clip_db);

struct CompositeLoss {
  nn::Tensor gen_loss;   // w_vme * L_vme + w_bf * L_bf + w_adv_g * adv
  nn::Tensor disc_loss;  // w_adv_d * lsgan_d; undefined when GAN disabled
  // Raw (unweighted) component values for the training log.
  double vme_loss = 0.0;
  double bf_loss = 0.0;
  double adv_g = 0.0;
  double adv_d = 0.0;
};

// vme_time: [M_v, L] estimate vs per-channel references (already trimmed).
// bf_time: [1, L] beamformed estimate vs the direct-path reference.
// d_* score tensors may be undefined when the GAN weights are zero; a zero
// w_vme drops the VME term entirely (the "w/o VM loss" switch).
CompositeLoss composite_loss(const nn::Tensor& vme_time,
                             const std::vector<std::vector<double>>& vme_refs,
                             const nn::Tensor& bf_time,
                             const std::vector<double>& bf_ref,
                             const nn::Tensor& d_fake_for_gen,
                             const nn::Tensor& d_real,
                             const nn::Tensor& d_fake_detached,
                             const LossConfig& cfg);

}  // namespace vmbeam::sm

#endif  // VMBEAM_SM_GAN_HPP_
