// vmbeam/sm/train.hpp
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

#ifndef VMBEAM_SM_TRAIN_HPP_
#define VMBEAM_SM_TRAIN_HPP_

#include <optional>

#include "vmbeam/bf/beamformer.hpp"
#include "vmbeam/nn/adam.hpp"
#include "vmbeam/sm/gan.hpp"
#include "vmbeam/sm/generator.hpp"

namespace vmbeam::sm {

struct TrainConfig {
  LossConfig loss;
  dsp::StftConfig stft;
  bf::Backend backend = bf::Backend::mcwf;
  int block_len = 25;
  bool vm_in_beamformer = true;  // false = the "w/o VM signals" switch
  nn::AdamConfig gen_adam;
  nn::AdamConfig disc_adam;
};

// Constant per-scene data for the joint VME + VM-BF objective. The
// beamformer weights come from exact-mode oracle SCMs over the pipeline's
// channel order [r..., v...]; they are constants of the step, so gradients
// reach the generator through the weight application and the VME/adv terms.
struct TrainScene {
  nn::Tensor r_spec;                             // [2*M_r, T, F], constant
  nn::Tensor v_true_mag;                         // [M_v, T, F], constant
  std::vector<std::vector<double>> vm_ref_time;  // trimmed true VM mixtures
  std::vector<double> x_ref_time;                // trimmed direct target @ ref
  bf::BeamWeights weights;                       // oracle weights for this cfg
  int frames = 0;
};

TrainScene prepare_train_scene(const scene::AudioScene& scene,
                               const TrainConfig& cfg);

struct TrainState {
  nn::AdamState gen_opt;
  nn::AdamState disc_opt;
  std::int64_t step = 0;
};

struct StepRecord {
  std::int64_t step = 0;
  double gen_loss = 0.0;
  double disc_loss = 0.0;
  double vme_loss = 0.0;
  double bf_loss = 0.0;
  double adv_g = 0.0;
  double adv_d = 0.0;
  double grad_norm = 0.0;
};

// One alternating update: generator loss/backward/Adam, then (when the GAN
// weights are nonzero) discriminator loss on detached estimates. Losses are
// averaged over the batch in index order; the step is deterministic.
StepRecord train_step(const std::vector<TrainScene>& batch, Generator& gen,
                      Discriminator& disc, TrainState& state,
                      const TrainConfig& cfg);

// Forward pass to the VME SNR in dB (mean over VM channels); used by the
// smoke tests and evaluation.
double vme_snr_db(const TrainScene& scene, const Generator& gen,
                  const TrainConfig& cfg);

// Full training state round-trip for resumable checkpoints.
std::vector<nn::NamedTensor> pack_training_state(const Generator& gen,
                                                 const Discriminator& disc,
                                                 const TrainState& state);
void unpack_training_state(const std::vector<nn::NamedTensor>& tensors,
                           Generator& gen, Discriminator& disc,
                           TrainState& state);

// Optimizer-state (de)serialization for one parameter group, moments named
// "<prefix>m.<param>" / "<prefix>v.<param>" plus "<prefix>step".
void pack_adam(std::vector<nn::NamedTensor>& out, const nn::AdamState& opt,
               const nn::ParamStore& store, const std::string& prefix);
void unpack_adam(const std::vector<nn::NamedTensor>& tensors,
                 nn::AdamState& opt, const nn::ParamStore& store,
                 const std::string& prefix);

}  // namespace vmbeam::sm

#endif  // VMBEAM_SM_TRAIN_HPP_
