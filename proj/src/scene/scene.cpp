// vmbeam/scene/scene.cpp
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

#include "vmbeam/scene/scene.hpp"

#include <cmath>

#include "vmbeam/kernels/kernels.hpp"
#include "vmbeam/scene/sources.hpp"

namespace vmbeam::scene {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kRejectionBudget = 1000;

// Fixed substream ids so draws stay reproducible as code evolves.
enum Stream : std::uint64_t {
  kGeometry = 1,
  kTargetSource = 100,
  kInterfererSource = 200,
  kNoiseSource = 300,
};

bool inside_room_with_margin(const room::Point& p, const room::Point& dims,
                             double margin) {
  for (int a = 0; a < 3; ++a) {
    if (p[a] < margin || p[a] > dims[a] - margin) return false;
  }
  return true;
}

room::Point sample_direction_sphere(CounterRng& rng) {
  for (;;) {
    const double x = rng.uniform(-1.0, 1.0);
    const double y = rng.uniform(-1.0, 1.0);
    const double z = rng.uniform(-1.0, 1.0);
    const double r2 = x * x + y * y + z * z;
    if (r2 > 1e-6 && r2 <= 1.0) {
      const double r = std::sqrt(r2);
      return {x / r, y / r, z / r};
    }
  }
}

room::Point cone_direction(double yaw, double az_deg, double el_deg) {
  const double az = az_deg * kPi / 180.0;
  const double el = el_deg * kPi / 180.0;
  const room::Point local{std::cos(el) * std::cos(az),
                          std::cos(el) * std::sin(az), std::sin(el)};
  const double c = std::cos(yaw), s = std::sin(yaw);
  return {c * local[0] - s * local[1], s * local[0] + c * local[1], local[2]};
}

room::Point sample_position(CounterRng& rng, const SceneSpec& spec,
                            const SceneRanges& ranges, bool in_fov,
                            bool out_of_fov, const char* what) {
  for (int tries = 0; tries < kRejectionBudget; ++tries) {
    const double dist = rng.uniform(ranges.src_dist[0], ranges.src_dist[1]);
    room::Point dir;
    if (in_fov) {
      const double az = rng.uniform(-ranges.fov_half_angle_deg,
                                    ranges.fov_half_angle_deg);
      const double el = rng.uniform(-ranges.fov_half_angle_deg,
                                    ranges.fov_half_angle_deg);
      dir = cone_direction(spec.array_yaw, az, el);
    } else {
      dir = sample_direction_sphere(rng);
    }
    const room::Point p{spec.array_center[0] + dist * dir[0],
                        spec.array_center[1] + dist * dir[1],
                        spec.array_center[2] + dist * dir[2]};
    if (!inside_room_with_margin(p, spec.room_dims, ranges.wall_margin)) continue;
    if (out_of_fov && inside_fov(spec, p, ranges.fov_half_angle_deg)) continue;
    return p;
  }
  throw Error(ErrorKind::data,
              std::string("scene sampling: rejection budget exhausted for ") +
                  what);
}

void accumulate(dsp::MultiWave& acc, const std::vector<std::vector<double>>& add,
                double gain) {
  for (std::size_t m = 0; m < add.size(); ++m) {
    kernels::axpy(gain, add[m].data(), acc.channels[m].data(), add[m].size());
  }
}

}  // namespace

std::string task_name(Task t) { return t == Task::omni ? "omni" : "fov"; }

Task task_from_name(const std::string& name) {
  if (name == "omni") return Task::omni;
  if (name == "fov") return Task::fov;
  throw Error(ErrorKind::config, "unknown task: " + name);
}

void SceneRanges::validate() const {
  require(room_x[0] <= room_x[1] && room_y[0] <= room_y[1] &&
              room_z[0] <= room_z[1],
          ErrorKind::config, "room ranges inverted");
  require(room_x[0] > 2.0 * wall_margin + 2.0 * src_dist[0], ErrorKind::config,
          "room too small for source placement");
  require(absorption[0] > 0.0 && absorption[1] <= 1.0 &&
              absorption[0] <= absorption[1],
          ErrorKind::config, "bad absorption range");
  require(clip_seconds > 0.1, ErrorKind::config, "clip too short");
  require(src_dist[0] > 0.0 && src_dist[0] <= src_dist[1], ErrorKind::config,
          "bad source distance range");
  require(max_order >= 0 && omni_noise_max >= 0 && fov_noise_max >= 0 &&
              max_interferers >= 0,
          ErrorKind::config, "bad counts");
  require(fs == 16000.0, ErrorKind::config, "only 16 kHz is supported");
}

ConeAngles array_frame_angles(const SceneSpec& spec, const room::Point& p) {
  const double dx = p[0] - spec.array_center[0];
  const double dy = p[1] - spec.array_center[1];
  const double dz = p[2] - spec.array_center[2];
  const double c = std::cos(-spec.array_yaw), s = std::sin(-spec.array_yaw);
  const double lx = c * dx - s * dy;
  const double ly = s * dx + c * dy;
  const double horiz = std::sqrt(lx * lx + ly * ly);
  return {std::atan2(ly, lx) * 180.0 / kPi, std::atan2(dz, horiz) * 180.0 / kPi};
}

bool inside_fov(const SceneSpec& spec, const room::Point& p,
                double half_angle_deg) {
  const ConeAngles a = array_frame_angles(spec, p);
  return std::abs(a.azimuth_deg) <= half_angle_deg &&
         std::abs(a.elevation_deg) <= half_angle_deg;
}

SceneSpec sample_scene(std::uint64_t seed, int scene_index, Task task,
                       const SceneRanges& ranges) {
  ranges.validate();
  SceneSpec spec;
  spec.seed = seed;
  spec.scene_index = scene_index;
  spec.task = task;
  spec.clip_seconds = ranges.clip_seconds;
  spec.max_order = ranges.max_order;
  spec.fs = ranges.fs;

  CounterRng rng =
      CounterRng(seed, static_cast<std::uint64_t>(scene_index)).fork(kGeometry);

  spec.room_dims = {rng.uniform(ranges.room_x[0], ranges.room_x[1]),
                    rng.uniform(ranges.room_y[0], ranges.room_y[1]),
                    rng.uniform(ranges.room_z[0], ranges.room_z[1])};
  spec.absorption = rng.uniform(ranges.absorption[0], ranges.absorption[1]);

  // Array center uniform over the central half of each axis; height clamped
  // to the configured band.
  const double z_lo = std::max(ranges.array_height[0], 0.25 * spec.room_dims[2]);
  const double z_hi = std::min(ranges.array_height[1], 0.75 * spec.room_dims[2]);
  require(z_lo <= z_hi, ErrorKind::config, "array height band empty for room");
  spec.array_center = {rng.uniform(0.25 * spec.room_dims[0], 0.75 * spec.room_dims[0]),
                       rng.uniform(0.25 * spec.room_dims[1], 0.75 * spec.room_dims[1]),
                       rng.uniform(z_lo, z_hi)};
  spec.array_yaw = rng.uniform(0.0, 2.0 * kPi);

  const bool fov = task == Task::fov;
  spec.target_pos =
      sample_position(rng, spec, ranges, fov, false, "target");

  const int n_interf =
      static_cast<int>(rng.uniform_int(0, ranges.max_interferers));
  for (int k = 0; k < n_interf; ++k) {
    spec.interferer_pos.push_back(
        sample_position(rng, spec, ranges, false, fov, "interferer"));
  }

  const int noise_max = fov ? ranges.fov_noise_max : ranges.omni_noise_max;
  const int n_noise = static_cast<int>(rng.uniform_int(0, noise_max));
  for (int k = 0; k < n_noise; ++k) {
    spec.noise_pos.push_back(
        sample_position(rng, spec, ranges, false, false, "noise source"));
  }

  spec.snr_db = rng.uniform(ranges.snr_db[0], ranges.snr_db[1]);
  spec.sir_db = rng.uniform(ranges.sir_db[0], ranges.sir_db[1]);
  return spec;
}

dsp::MultiWave select_channels(const dsp::MultiWave& wave,
                               const std::vector<int>& channels) {
  dsp::MultiWave out;
  out.sample_rate = wave.sample_rate;
  for (int c : channels) {
    require(c >= 0 && c < wave.num_channels(), ErrorKind::data,
            "select_channels: index out of range");
    out.channels.push_back(wave.channels[c]);
  }
  return out;
}

AudioScene mix_scene(const SceneSpec& spec, const room::ArrayGeometry& array,
                     const std::vector<double>& target_wav,
                     const std::vector<std::vector<double>>& interferer_wavs,
                     const std::vector<std::vector<double>>& noise_wavs) {
  array.validate();
  require(interferer_wavs.size() == spec.interferer_pos.size(),
          ErrorKind::data, "mix_scene: interferer count mismatch");
  require(noise_wavs.size() == spec.noise_pos.size(), ErrorKind::data,
          "mix_scene: noise count mismatch");

  const std::int64_t n_samples =
      static_cast<std::int64_t>(std::llround(spec.clip_seconds * spec.fs));
  const room::RoomSpec roomspec{spec.room_dims, spec.absorption, 343.0,
                                spec.max_order};
  const auto mics = place_array(array, spec.array_center, spec.array_yaw);
  const int m = static_cast<int>(mics.size());

  auto zeros = [&] {
    dsp::MultiWave w;
    w.sample_rate = spec.fs;
    w.channels.assign(m, std::vector<double>(n_samples, 0.0));
    return w;
  };

  AudioScene scene;
  scene.spec = spec;
  scene.ref_channel = array.ref_channel;
  scene.rm_channels = array.rm_channels();
  scene.vm_channels = array.vm_channels();

  // Target: direct and reverberant parts stay separate (Eq. 1 decomposition).
  {
    const auto src = loop_pad(target_wav, n_samples);
    require(kernels::sum_sq(src.data(), src.size()) > 0.0, ErrorKind::data,
            "mix_scene: silent target clip");
    auto comp = room::simulate_components(roomspec, mics, src, spec.target_pos,
                                          spec.fs);
    scene.x.sample_rate = spec.fs;
    scene.x.channels = std::move(comp.direct);
    scene.x_rev.sample_rate = spec.fs;
    scene.x_rev.channels = std::move(comp.reverb);
  }

  const int ref = scene.ref_channel;
  const double p_target =
      kernels::sum_sq(scene.x.channels[ref].data(), n_samples);
  require(p_target > 0.0, ErrorKind::numeric, "target silent at reference mic");

  // Interferers and noise arrive whole (direct + reverb) in n.
  scene.n_interf = zeros();
  for (std::size_t k = 0; k < interferer_wavs.size(); ++k) {
    const auto src = loop_pad(interferer_wavs[k], n_samples);
    require(kernels::sum_sq(src.data(), src.size()) > 0.0, ErrorKind::data,
            "mix_scene: silent interferer clip");
    auto comp = room::simulate_components(roomspec, mics, src,
                                          spec.interferer_pos[k], spec.fs);
    accumulate(scene.n_interf, comp.direct, 1.0);
    accumulate(scene.n_interf, comp.reverb, 1.0);
  }
  scene.n_noise = zeros();
  for (std::size_t k = 0; k < noise_wavs.size(); ++k) {
    const auto src = loop_pad(noise_wavs[k], n_samples);
    require(kernels::sum_sq(src.data(), src.size()) > 0.0, ErrorKind::data,
            "mix_scene: silent noise clip");
    auto comp = room::simulate_components(roomspec, mics, src,
                                          spec.noise_pos[k], spec.fs);
    accumulate(scene.n_noise, comp.direct, 1.0);
    accumulate(scene.n_noise, comp.reverb, 1.0);
  }

  // Scale each group so SIR / SNR hold exactly at the reference channel.
  if (!interferer_wavs.empty()) {
    const double p = kernels::sum_sq(scene.n_interf.channels[ref].data(), n_samples);
    require(p > 0.0, ErrorKind::numeric, "interferers silent at reference mic");
    const double gain = std::sqrt(p_target * std::pow(10.0, -spec.sir_db / 10.0) / p);
    for (auto& ch : scene.n_interf.channels)
      for (auto& v : ch) v *= gain;
  }
  if (!noise_wavs.empty()) {
    const double p = kernels::sum_sq(scene.n_noise.channels[ref].data(), n_samples);
    require(p > 0.0, ErrorKind::numeric, "noise silent at reference mic");
    const double gain = std::sqrt(p_target * std::pow(10.0, -spec.snr_db / 10.0) / p);
    for (auto& ch : scene.n_noise.channels)
      for (auto& v : ch) v *= gain;
  }

  scene.n = zeros();
  for (int c = 0; c < m; ++c) {
    kernels::add(scene.n_interf.channels[c].data(),
                 scene.n_noise.channels[c].data(), scene.n.channels[c].data(),
                 n_samples);
  }
  scene.y = zeros();
  for (int c = 0; c < m; ++c) {
    for (std::int64_t i = 0; i < n_samples; ++i) {
      scene.y.channels[c][i] = scene.x.channels[c][i] +
                               scene.x_rev.channels[c][i] +
                               scene.n.channels[c][i];
    }
  }
  return scene;
}

AudioScene render_scene(const SceneSpec& spec, const room::ArrayGeometry& array) {
  const std::int64_t n_samples =
      static_cast<std::int64_t>(std::llround(spec.clip_seconds * spec.fs));
  const CounterRng base(spec.seed, static_cast<std::uint64_t>(spec.scene_index));

  const auto target = synth_source(SourceKind::speech, n_samples, spec.fs,
                                   base.fork(kTargetSource));
  std::vector<std::vector<double>> interferers;
  for (std::size_t k = 0; k < spec.interferer_pos.size(); ++k) {
    interferers.push_back(synth_source(SourceKind::speech, n_samples, spec.fs,
                                       base.fork(kInterfererSource + k)));
  }
  std::vector<std::vector<double>> noises;
  for (std::size_t k = 0; k < spec.noise_pos.size(); ++k) {
    noises.push_back(synth_source(SourceKind::noise, n_samples, spec.fs,
                                  base.fork(kNoiseSource + k)));
  }
  return mix_scene(spec, array, target, interferers, noises);
}

MixLevels measure_levels(const AudioScene& scene) {
  const int ref = scene.ref_channel;
  const std::size_t n = scene.x.channels[ref].size();
  MixLevels lv;
  lv.target_direct_power = kernels::sum_sq(scene.x.channels[ref].data(), n);
  lv.interferer_power =
      scene.n_interf.channels.empty()
          ? 0.0
          : kernels::sum_sq(scene.n_interf.channels[ref].data(), n);
  lv.noise_power = scene.n_noise.channels.empty()
                       ? 0.0
                       : kernels::sum_sq(scene.n_noise.channels[ref].data(), n);
  return lv;
}

}  // namespace vmbeam::scene
