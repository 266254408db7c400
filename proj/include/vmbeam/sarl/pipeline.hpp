// vmbeam/sarl/pipeline.hpp
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

#ifndef VMBEAM_SARL_PIPELINE_HPP_
#define VMBEAM_SARL_PIPELINE_HPP_

#include <optional>
#include <string>

#include "vmbeam/bf/beamformer.hpp"
#include "vmbeam/sarl/mcse.hpp"
#include "vmbeam/sm/train.hpp"

namespace vmbeam::sarl {

enum class Conditioning { none, sarl_s, sarl_f };
std::string conditioning_name(Conditioning c);
Conditioning conditioning_from_name(const std::string& name);

// Where the VM channels of the augmented signal come from.
enum class VmSource { generator, oracle_true, none };
std::string vm_source_name(VmSource s);
VmSource vm_source_from_name(const std::string& name);

// Where the target/noise split for SCM estimation comes from.
enum class MaskSource { oracle_exact, oracle_magmask, learned };
std::string mask_source_name(MaskSource s);
MaskSource mask_source_from_name(const std::string& name);

struct PipelineConfig {
  std::string name = "vmbf_mcwf";
  Conditioning conditioning = Conditioning::none;
  bf::Backend backend = bf::Backend::mcwf;
  VmSource vm_source = VmSource::generator;
  MaskSource mask_source = MaskSource::oracle_magmask;
  bool vm_in_beamformer = true;   // "w/o VM signals": SCMs and W^H Y use r only
  bool vm_loss_enabled = true;    // "w/o VM loss": drops the 0.3-weighted term
  int block_len = 25;
  dsp::StftConfig stft;
};

// SARL-S: concatenate RM and estimated VM channels, run the MC-SE model.
nn::Tensor sarl_s_enhance(const nn::Tensor& r_spec, const nn::Tensor& vhat_spec,
                          const McseModel& mcse);

// SARL-F: fuse VM features into the encoded RM signals by addition.
nn::Tensor sarl_f_enhance(const nn::Tensor& r_spec, const nn::Tensor& f_vhat,
                          const McseModel& mcse);

struct PipelineResult {
  std::vector<double> enhanced;     // time domain, OLA length (T-1)*hop+win
  dsp::Spectrogram enhanced_spec;   // 1 channel
  int frames = 0;
};

// generator -> ybar -> MC-SE estimate -> block SCMs -> weights -> W^H Ybar
// -> iSTFT. backend none short-circuits to the MC-SE output (VM-SE task).
// gen may be null when vm_source != generator; mcse may be null when neither
// the learned mask nor backend none is requested.
PipelineResult vm_bf_pipeline(const scene::AudioScene& scene,
                              const sm::Generator* gen, const McseModel* mcse,
                              const PipelineConfig& cfg);

// ---- training-side helpers ----

struct SarlScene {
  nn::Tensor r_spec;      // [2*M_r, T, F]
  nn::Tensor full_spec;   // [2*M, T, F] canonical order [r..., v...]
  nn::Tensor v_true_mag;  // [M_v, T, F]
  std::vector<std::vector<double>> vm_ref_time;
  std::vector<double> x_ref_time;
  int frames = 0;
};

SarlScene prepare_sarl_scene(const scene::AudioScene& scene,
                             const dsp::StftConfig& cfg);

// One supervised step of the MC-SE model alone (phase 1). full_array picks
// the model input: true full array vs RM channels only. Returns the loss.
double mcse_pretrain_step(const std::vector<SarlScene>& batch, McseModel& mcse,
                          nn::AdamState& opt, const dsp::StftConfig& stft,
                          double snr_clip_db, bool full_array);

// Joint phase-2 step: generator + MC-SE trained against the SARL objective
// (SE output replaces the beamformed term of the composite loss).
sm::StepRecord sarl_train_step(const std::vector<SarlScene>& batch,
                               sm::Generator& gen, McseModel& mcse,
                               sm::Discriminator* disc, sm::TrainState& state,
                               nn::AdamState& mcse_opt,
                               const sm::TrainConfig& cfg,
                               Conditioning conditioning);

}  // namespace vmbeam::sarl

#endif  // VMBEAM_SARL_PIPELINE_HPP_
