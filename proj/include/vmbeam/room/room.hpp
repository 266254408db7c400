// vmbeam/room/room.hpp
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

#ifndef VMBEAM_ROOM_ROOM_HPP_
#define VMBEAM_ROOM_ROOM_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vmbeam/common.hpp"

namespace vmbeam::room {

using Point = std::array<double, 3>;

// Rigid shoebox with one absorption coefficient for all six walls.
// Per-reflection amplitude factor is sqrt(1 - absorption) so that energy
// decays by (1 - absorption) per bounce, which lines up with Eyring RT60.
struct RoomSpec {
  Point dims{6.0, 5.0, 3.0};
  double absorption = 0.3;
  double speed_of_sound = 343.0;
  int max_order = 6;

  void validate() const {
    for (double d : dims)
      require(d > 0.0, ErrorKind::config, "room dims must be positive");
    require(absorption > 0.0 && absorption <= 1.0, ErrorKind::config,
            "absorption must be in (0, 1]");
    require(max_order >= 0, ErrorKind::config, "max_order must be >= 0");
  }
};

struct ArrayGeometry {
  std::vector<Point> mic_positions;  // relative to the array center
  std::vector<bool> is_vm;           // RM/VM designation per mic
  int ref_channel = 0;               // always the first RM channel

  int num_mics() const { return static_cast<int>(mic_positions.size()); }
  std::vector<int> rm_channels() const;
  std::vector<int> vm_channels() const;
  // Marks the given mics as RM (ref = first of them), the rest as VM.
  void set_rm_channels(const std::vector<int>& rm);
  void validate() const;
};

// 4 mics equally spaced on a horizontal circle plus mics at z = +/- vertical.
ArrayGeometry build_array_circular_plus_vertical(double radius, double vertical);
ArrayGeometry build_array_custom(std::vector<Point> positions);

// World-frame mic positions for an array centered at `center`, rotated by
// `yaw` radians about z. The array's front axis (+x) defines the FoV cone.
std::vector<Point> place_array(const ArrayGeometry& array, const Point& center,
                               double yaw);

struct ImageSource {
  Point pos;
  double amplitude;  // sqrt(1-a)^order
  int order;         // total reflection count
};

// All lattice images with total reflection count <= room.max_order.
// Source must be strictly inside the room.
std::vector<ImageSource> image_sources(const RoomSpec& room, const Point& src);

struct Rir {
  std::vector<double> taps;
  std::vector<double> direct_taps;  // order-0 image only
  int source_id = -1;
  int mic_id = -1;
  double fs = 16000.0;
  bool truncated = false;  // some image energy fell beyond `length`
};

// Each image contributes amplitude/(4*pi*d) at delay d/c through an 81-tap
// Hann-windowed sinc fractional-delay kernel.
Rir render_rir(const std::vector<ImageSource>& images, const Point& mic,
               double fs, std::int64_t length, double speed_of_sound = 343.0);

// Samples needed to hold every image of this set at a mic, kernel included.
std::int64_t rir_length_for(const std::vector<ImageSource>& images,
                            const Point& mic, double fs,
                            double speed_of_sound = 343.0);

// Direct-path and reverberant components of one source at each mic:
// direct = src (*) direct_taps, reverb = src (*) (taps - direct_taps),
// both truncated to the source length.
struct SourceComponents {
  std::vector<std::vector<double>> direct;  // [mic][sample]
  std::vector<std::vector<double>> reverb;
  bool truncated = false;
};
SourceComponents simulate_components(const RoomSpec& room,
                                     const std::vector<Point>& mics,
                                     const std::vector<double>& src_signal,
                                     const Point& src_pos, double fs);

// Schroeder backward integration, linear fit of the -5..-25 dB segment
// extrapolated to -60 dB. A 100 Hz high-pass runs first: image-source
// arrivals are all positive and their DC buildup otherwise flattens the
// full-band decay. Throws ErrorKind::data if the decay range is not reached.
double measure_rt60(const std::vector<double>& taps, double fs);

// Multichannel RIR export: one WAV (channel per mic) plus a JSON sidecar
// (<path>.json) recording room dims, absorption, positions and RT60 per mic.
void export_rirs_wav(const std::string& path, const RoomSpec& room,
                     const Point& src, const std::vector<Point>& mics,
                     const std::vector<Rir>& rirs);

// 0.161 V / (-S ln(1 - a))
double eyring_rt60(const RoomSpec& room);

inline double distance(const Point& a, const Point& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace vmbeam::room

#endif  // VMBEAM_ROOM_ROOM_HPP_
