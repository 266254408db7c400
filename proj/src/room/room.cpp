// vmbeam/room/room.cpp
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

#include "vmbeam/room/room.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "vmbeam/dsp/fft.hpp"
#include "vmbeam/dsp/wav.hpp"

namespace vmbeam::room {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kSincHalf = 40;  // 81-tap fractional-delay kernel

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = kPi * x;
  return std::sin(px) / px;
}

// Hann taper over the kernel support [-40.5, 40.5].
double kernel_window(double u) {
  const double half = kSincHalf + 0.5;
  if (std::abs(u) >= half) return 0.0;
  return 0.5 * (1.0 + std::cos(kPi * u / half));
}

// Per-axis image coordinates: 2nL + s carries |2n| reflections,
// 2nL - s carries |2n - 1|.
struct AxisImage {
  double pos;
  int order;
};

std::vector<AxisImage> axis_images(double length, double src, int max_order) {
  std::vector<AxisImage> out;
  for (int n = -(max_order / 2 + 1); n <= max_order / 2 + 1; ++n) {
    const int order_a = std::abs(2 * n);
    if (order_a <= max_order) {
      out.push_back({2.0 * n * length + src, order_a});
    }
    const int order_b = std::abs(2 * n - 1);
    if (order_b <= max_order) {
      out.push_back({2.0 * n * length - src, order_b});
    }
  }
  return out;
}

}  // namespace

std::vector<int> ArrayGeometry::rm_channels() const {
  std::vector<int> out;
  for (int i = 0; i < num_mics(); ++i) {
    if (!is_vm[i]) out.push_back(i);
  }
  return out;
}

std::vector<int> ArrayGeometry::vm_channels() const {
  std::vector<int> out;
  for (int i = 0; i < num_mics(); ++i) {
    if (is_vm[i]) out.push_back(i);
  }
  return out;
}

void ArrayGeometry::set_rm_channels(const std::vector<int>& rm) {
  require(!rm.empty(), ErrorKind::config, "need at least one RM channel");
  is_vm.assign(mic_positions.size(), true);
  for (int c : rm) {
    require(c >= 0 && c < num_mics(), ErrorKind::config,
            "RM channel index out of range");
    is_vm[c] = false;
  }
  ref_channel = rm.front();
}

void ArrayGeometry::validate() const {
  require(!mic_positions.empty(), ErrorKind::config, "array has no mics");
  require(is_vm.size() == mic_positions.size(), ErrorKind::config,
          "array labels inconsistent");
  for (const auto& p : mic_positions) {
    for (double v : p)
      require(std::isfinite(v), ErrorKind::config, "non-finite mic position");
  }
  require(ref_channel >= 0 && ref_channel < num_mics() && !is_vm[ref_channel],
          ErrorKind::config, "reference channel must be an RM mic");
}

ArrayGeometry build_array_circular_plus_vertical(double radius,
                                                 double vertical) {
  require(radius > 0.0, ErrorKind::config, "array radius must be positive");
  ArrayGeometry g;
  for (int k = 0; k < 4; ++k) {
    const double az = 2.0 * kPi * k / 4.0;
    g.mic_positions.push_back({radius * std::cos(az), radius * std::sin(az), 0.0});
  }
  g.mic_positions.push_back({0.0, 0.0, vertical});
  g.mic_positions.push_back({0.0, 0.0, -vertical});
  g.is_vm.assign(g.mic_positions.size(), false);
  g.ref_channel = 0;
  return g;
}

ArrayGeometry build_array_custom(std::vector<Point> positions) {
  require(!positions.empty(), ErrorKind::config, "custom array needs mics");
  ArrayGeometry g;
  g.mic_positions = std::move(positions);
  g.is_vm.assign(g.mic_positions.size(), false);
  g.ref_channel = 0;
  return g;
}

std::vector<Point> place_array(const ArrayGeometry& array, const Point& center,
                               double yaw) {
  const double c = std::cos(yaw), s = std::sin(yaw);
  std::vector<Point> out;
  out.reserve(array.mic_positions.size());
  for (const auto& p : array.mic_positions) {
    out.push_back({center[0] + c * p[0] - s * p[1],
                   center[1] + s * p[0] + c * p[1], center[2] + p[2]});
  }
  return out;
}

std::vector<ImageSource> image_sources(const RoomSpec& room, const Point& src) {
  room.validate();
  for (int a = 0; a < 3; ++a) {
    require(src[a] > 0.0 && src[a] < room.dims[a], ErrorKind::data,
            "source must be strictly inside the room");
  }
  const double beta = std::sqrt(1.0 - room.absorption);
  const auto xs = axis_images(room.dims[0], src[0], room.max_order);
  const auto ys = axis_images(room.dims[1], src[1], room.max_order);
  const auto zs = axis_images(room.dims[2], src[2], room.max_order);

  std::vector<ImageSource> out;
  for (const auto& ix : xs) {
    for (const auto& iy : ys) {
      const int oxy = ix.order + iy.order;
      if (oxy > room.max_order) continue;
      for (const auto& iz : zs) {
        const int order = oxy + iz.order;
        if (order > room.max_order) continue;
        out.push_back({{ix.pos, iy.pos, iz.pos}, std::pow(beta, order), order});
      }
    }
  }
  return out;
}

std::int64_t rir_length_for(const std::vector<ImageSource>& images,
                            const Point& mic, double fs,
                            double speed_of_sound) {
  double max_d = 0.0;
  for (const auto& img : images) max_d = std::max(max_d, distance(img.pos, mic));
  return static_cast<std::int64_t>(std::ceil(max_d / speed_of_sound * fs)) +
         kSincHalf + 2;
}

Rir render_rir(const std::vector<ImageSource>& images, const Point& mic,
               double fs, std::int64_t length, double speed_of_sound) {
  require(length > 0, ErrorKind::config, "render_rir: non-positive length");
  Rir rir;
  rir.fs = fs;
  rir.taps.assign(length, 0.0);
  rir.direct_taps.assign(length, 0.0);
  for (const auto& img : images) {
    const double d = distance(img.pos, mic);
    require(d > 1e-9, ErrorKind::data, "image coincides with microphone");
    const double delay = d / speed_of_sound * fs;
    const double amp = img.amplitude / (4.0 * kPi * d);
    const std::int64_t n0 = static_cast<std::int64_t>(std::llround(delay));
    const double frac = delay - static_cast<double>(n0);
    if (n0 + kSincHalf >= length) rir.truncated = true;
    for (int j = -kSincHalf; j <= kSincHalf; ++j) {
      const std::int64_t n = n0 + j;
      if (n < 0 || n >= length) continue;
      const double u = static_cast<double>(j) - frac;
      const double tap = amp * sinc(u) * kernel_window(u);
      rir.taps[n] += tap;
      if (img.order == 0) rir.direct_taps[n] += tap;
    }
  }
  return rir;
}

SourceComponents simulate_components(const RoomSpec& room,
                                     const std::vector<Point>& mics,
                                     const std::vector<double>& src_signal,
                                     const Point& src_pos, double fs) {
  require(!src_signal.empty(), ErrorKind::data, "empty source signal");
  require(all_finite(src_signal), ErrorKind::numeric, "non-finite source signal");
  const auto images = image_sources(room, src_pos);

  SourceComponents out;
  out.direct.resize(mics.size());
  out.reverb.resize(mics.size());
  const std::size_t n = src_signal.size();
  for (std::size_t m = 0; m < mics.size(); ++m) {
    const std::int64_t len = rir_length_for(images, mics[m], fs, room.speed_of_sound);
    Rir rir = render_rir(images, mics[m], fs, len, room.speed_of_sound);
    out.truncated = out.truncated || rir.truncated;
    std::vector<double> tail(rir.taps.size());
    for (std::size_t i = 0; i < tail.size(); ++i) {
      tail[i] = rir.taps[i] - rir.direct_taps[i];
    }
    auto direct = dsp::fft_convolve(src_signal, rir.direct_taps);
    auto reverb = dsp::fft_convolve(src_signal, tail);
    direct.resize(n);
    reverb.resize(n);
    out.direct[m] = std::move(direct);
    out.reverb[m] = std::move(reverb);
  }
  return out;
}

double measure_rt60(const std::vector<double>& taps, double fs) {
  require(!taps.empty(), ErrorKind::data, "measure_rt60: empty RIR");

  // Allen-Berkley 100 Hz high-pass before integrating. Image-source arrivals
  // are all positive, so dense tails accumulate a DC drift that flattens the
  // full-band Schroeder curve; the decay is defined on band-limited energy.
  std::vector<double> h(taps.size());
  {
    const double w = 2.0 * kPi * 100.0 / fs;
    const double r1 = std::exp(-w);
    const double b1 = 2.0 * r1 * std::cos(w);
    const double b2 = -r1 * r1;
    const double a1 = -(1.0 + r1);
    double y0 = 0.0, y1 = 0.0, y2 = 0.0;
    for (std::size_t i = 0; i < taps.size(); ++i) {
      y2 = y1;
      y1 = y0;
      y0 = b1 * y1 + b2 * y2 + taps[i];
      h[i] = y0 + a1 * y1 + r1 * y2;
    }
  }

  double total = 0.0;
  for (double v : h) total += v * v;
  require(total > 0.0, ErrorKind::data, "measure_rt60: silent RIR");

  // Schroeder backward integral, normalized to 0 dB at t=0.
  std::vector<double> decay_db(h.size());
  double acc = 0.0;
  for (std::size_t i = h.size(); i-- > 0;) {
    acc += h[i] * h[i];
    decay_db[i] = 10.0 * std::log10(std::max(acc / total, 1e-300));
  }

  std::size_t i5 = h.size(), i25 = h.size();
  for (std::size_t i = 0; i < decay_db.size(); ++i) {
    if (i5 == h.size() && decay_db[i] <= -5.0) i5 = i;
    if (decay_db[i] <= -25.0) {
      i25 = i;
      break;
    }
  }
  require(i5 < h.size() && i25 < h.size() && i25 > i5 + 1,
          ErrorKind::data, "measure_rt60: decay range -5..-25 dB not reached");

  // Least-squares line through the fit segment; slope in dB per second.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double count = static_cast<double>(i25 - i5 + 1);
  for (std::size_t i = i5; i <= i25; ++i) {
    const double t = static_cast<double>(i) / fs;
    sx += t;
    sy += decay_db[i];
    sxx += t * t;
    sxy += t * decay_db[i];
  }
  const double denom = count * sxx - sx * sx;
  require(denom > 0.0, ErrorKind::data, "measure_rt60: degenerate fit segment");
  const double slope = (count * sxy - sx * sy) / denom;
  require(slope < 0.0, ErrorKind::data, "measure_rt60: non-decaying response");
  return -60.0 / slope;
}

double eyring_rt60(const RoomSpec& room) {
  room.validate();
  const double v = room.dims[0] * room.dims[1] * room.dims[2];
  const double s = 2.0 * (room.dims[0] * room.dims[1] +
                          room.dims[0] * room.dims[2] +
                          room.dims[1] * room.dims[2]);
  return 0.161 * v / (-s * std::log(1.0 - room.absorption));
}

void export_rirs_wav(const std::string& path, const RoomSpec& room,
                     const Point& src, const std::vector<Point>& mics,
                     const std::vector<Rir>& rirs) {
  require(!rirs.empty() && rirs.size() == mics.size(), ErrorKind::data,
          "export_rirs_wav: mic/RIR count mismatch");
  std::size_t longest = 0;
  for (const auto& r : rirs) longest = std::max(longest, r.taps.size());

  dsp::MultiWave wave;
  wave.sample_rate = rirs[0].fs;
  for (const auto& r : rirs) {
    auto taps = r.taps;
    taps.resize(longest, 0.0);
    wave.channels.push_back(std::move(taps));
  }
  dsp::write_wav(path, wave, dsp::WavFormat::float64);

  nlohmann::json mics_json = nlohmann::json::array();
  for (std::size_t m = 0; m < mics.size(); ++m) {
    double rt = -1.0;
    try {
      rt = measure_rt60(rirs[m].taps, rirs[m].fs);
    } catch (const Error&) {
    }
    mics_json.push_back({{"position", {mics[m][0], mics[m][1], mics[m][2]}},
                         {"rt60", rt},
                         {"truncated", rirs[m].truncated}});
  }
  nlohmann::json meta{
      {"room_dims", {room.dims[0], room.dims[1], room.dims[2]}},
      {"absorption", room.absorption},
      {"max_order", room.max_order},
      {"source", {src[0], src[1], src[2]}},
      {"rt60_eyring", eyring_rt60(room)},
      {"fs", rirs[0].fs},
      {"mics", mics_json}};
  std::ofstream out(path + ".json", std::ios::trunc);
  require(out.good(), ErrorKind::data, "cannot write sidecar for " + path);
  out << meta.dump(2) << "\n";
}

}  // namespace vmbeam::room
