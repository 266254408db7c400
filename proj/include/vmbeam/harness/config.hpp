// vmbeam/harness/config.hpp
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

#ifndef VMBEAM_HARNESS_CONFIG_HPP_
#define VMBEAM_HARNESS_CONFIG_HPP_

#include <string>
#include <vector>

#include "vmbeam/sarl/pipeline.hpp"
#include "vmbeam/scene/scene.hpp"
#include "vmbeam/sm/gan.hpp"
#include "vmbeam/sm/generator.hpp"

namespace vmbeam::harness {

enum class TrainMode { vmbf, sarl_s, sarl_f };
std::string train_mode_name(TrainMode m);
TrainMode train_mode_from_name(const std::string& name);

struct ArrayConfig {
  std::string kind = "circular_plus_vertical";
  double radius = 0.10;
  double vertical = 0.10;
  std::vector<room::Point> positions;  // for kind == "custom"
  std::vector<int> rm_channels = {0, 2};

  room::ArrayGeometry build() const;
};

struct CorpusConfig {
  scene::Task task = scene::Task::fov;
  int scenes = 20;
  scene::SceneRanges ranges;
};

struct TrainSection {
  TrainMode mode = TrainMode::vmbf;
  int steps = 200;
  int pretrain_steps = 0;  // phase 1 for the SARL modes
  int batch = 4;
  double lr = 0.001;
  double mcse_lr_scale = 0.1;  // fine-tune factor in phase 2
  int checkpoint_every = 50;
  int block_len = 25;
  std::string backend = "mcwf";
  bool vm_in_beamformer = true;
};

struct PipelineSection {
  std::string name;
  std::string conditioning = "none";
  std::string backend = "mcwf";
  std::string vm_source = "generator";
  std::string mask_source = "oracle_magmask";
  bool vm_in_beamformer = true;
  bool vm_loss_enabled = true;

  sarl::PipelineConfig build(const dsp::StftConfig& stft, int block_len) const;
};

struct EvaluateSection {
  int bootstrap_resamples = 1000;
  bool timing = false;
};

struct RunConfig {
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  CorpusConfig corpus;
  ArrayConfig array;
  dsp::StftConfig stft;
  sm::GeneratorConfig generator;
  sm::DiscriminatorConfig discriminator;
  int mcse_embed_dim = 8;
  int mcse_blocks = 2;
  sm::LossConfig loss;
  TrainSection train;
  std::vector<PipelineSection> pipelines;
  EvaluateSection evaluate;
};

// Strict parse: unknown keys anywhere are a config error. The generator's
// m_r/m_v are derived from the array section and may not be set directly.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

// Serialization is the exact inverse of parse_config (round-trip identity).
std::string dump_config(const RunConfig& cfg);

// The Table 1/2 ablation switches.
void apply_ablation(RunConfig& cfg, const std::string& name);
std::vector<std::string> known_ablations();

}  // namespace vmbeam::harness

#endif  // VMBEAM_HARNESS_CONFIG_HPP_
