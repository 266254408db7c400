// vmbeam/scene/scene.hpp
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

#ifndef VMBEAM_SCENE_SCENE_HPP_
#define VMBEAM_SCENE_SCENE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "vmbeam/dsp/stft.hpp"
#include "vmbeam/room/room.hpp"

namespace vmbeam::scene {

enum class Task { omni, fov };

std::string task_name(Task t);
Task task_from_name(const std::string& name);

// Sampling ranges; defaults follow the simulation protocol this corpus
// mimics. Desk configs usually shrink rooms and clip length.
struct SceneRanges {
  std::array<double, 2> room_x{3.0, 10.0};
  std::array<double, 2> room_y{3.0, 10.0};
  std::array<double, 2> room_z{2.0, 5.0};
  std::array<double, 2> absorption{0.1, 0.5};
  std::array<double, 2> snr_db{-10.0, 5.0};
  std::array<double, 2> sir_db{-10.0, 5.0};
  std::array<double, 2> src_dist{0.5, 2.5};
  std::array<double, 2> array_height{1.0, 2.0};
  double clip_seconds = 10.0;
  double fov_half_angle_deg = 20.0;
  double wall_margin = 0.2;
  int max_order = 6;
  int omni_noise_max = 10;   // noise-source count uniform over [0, max]
  int fov_noise_max = 5;
  int max_interferers = 4;   // interferer count uniform over [0, max]
  double fs = 16000.0;

  void validate() const;
};

struct SceneSpec {
  std::uint64_t seed = 0;
  int scene_index = 0;
  Task task = Task::omni;
  room::Point room_dims{};
  double absorption = 0.0;
  room::Point array_center{};
  double array_yaw = 0.0;  // front axis = +x rotated by yaw about z
  room::Point target_pos{};
  std::vector<room::Point> interferer_pos;
  std::vector<room::Point> noise_pos;
  double snr_db = 0.0;
  double sir_db = 0.0;
  double clip_seconds = 10.0;
  int max_order = 6;
  double fs = 16000.0;
};

// Azimuth/elevation of a world point in the array frame, degrees.
struct ConeAngles {
  double azimuth_deg;
  double elevation_deg;
};
ConeAngles array_frame_angles(const SceneSpec& spec, const room::Point& p);
bool inside_fov(const SceneSpec& spec, const room::Point& p,
                double half_angle_deg);

// Deterministic draw; geometry constraints are enforced by rejection with a
// budget of 1000 tries per position.
SceneSpec sample_scene(std::uint64_t seed, int scene_index, Task task,
                       const SceneRanges& ranges);

struct AudioScene {
  dsp::MultiWave x;      // direct-path target, M channels
  dsp::MultiWave x_rev;  // target reverberation
  dsp::MultiWave n;      // interference + noise (direct and reverberant)
  dsp::MultiWave y;      // x + x_rev + n, summed elementwise
  // Split of n kept for level verification; not persisted.
  dsp::MultiWave n_interf;
  dsp::MultiWave n_noise;
  int ref_channel = 0;
  std::vector<int> rm_channels;
  std::vector<int> vm_channels;
  SceneSpec spec;

  int num_mics() const { return y.num_channels(); }
  const std::vector<double>& x_ref() const { return x.channels[ref_channel]; }
};

// Mixes pre-rendered source material at the spec's SNR/SIR. SNR is
// direct-path target power over total noise-source power at the reference
// channel; SIR is over total interferer power. Both hold exactly by
// construction. Sources shorter than the clip are loop-padded.
AudioScene mix_scene(const SceneSpec& spec, const room::ArrayGeometry& array,
                     const std::vector<double>& target_wav,
                     const std::vector<std::vector<double>>& interferer_wavs,
                     const std::vector<std::vector<double>>& noise_wavs);

// Synthesizes the bundled source material from the scene seed, then mixes.
AudioScene render_scene(const SceneSpec& spec, const room::ArrayGeometry& array);

// Channel subset view (copy).
dsp::MultiWave select_channels(const dsp::MultiWave& wave,
                               const std::vector<int>& channels);

// Measured group powers at the reference channel, for verification.
struct MixLevels {
  double target_direct_power;
  double interferer_power;  // 0 when no interferers
  double noise_power;       // 0 when no noise sources
};
MixLevels measure_levels(const AudioScene& scene);

}  // namespace vmbeam::scene

#endif  // VMBEAM_SCENE_SCENE_HPP_
