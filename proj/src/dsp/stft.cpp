// vmbeam/dsp/stft.cpp
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

#include "vmbeam/dsp/stft.hpp"

#include <algorithm>
#include <cmath>

#include "vmbeam/dsp/fft.hpp"

namespace vmbeam::dsp {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

std::vector<double> sqrt_hann(int win_len) {
  require(win_len >= 2 && win_len % 2 == 0, ErrorKind::config,
          "sqrt_hann: win_len must be even and >= 2");
  std::vector<double> w(win_len);
  for (int n = 0; n < win_len; ++n) {
    const double hann =
        0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(n) / win_len);
    w[n] = std::sqrt(hann);
  }
  return w;
}

int frame_count(std::int64_t num_samples, const StftConfig& cfg) {
  cfg.validate();
  require(num_samples >= cfg.win_len, ErrorKind::data,
          "signal shorter than one analysis window");
  return static_cast<int>((num_samples - cfg.win_len) / cfg.hop) + 1;
}

std::pair<std::int64_t, std::int64_t> reconstructable_range(
    int frames, const StftConfig& cfg) {
  return {cfg.hop, static_cast<std::int64_t>(frames) * cfg.hop};
}

Spectrogram stft(const MultiWave& wave, const StftConfig& cfg) {
  cfg.validate();
  require(wave.num_channels() >= 1, ErrorKind::data, "stft: empty input");
  const std::int64_t n = wave.num_samples();
  for (const auto& ch : wave.channels) {
    require(static_cast<std::int64_t>(ch.size()) == n, ErrorKind::data,
            "stft: ragged channels");
    require(all_finite(ch), ErrorKind::numeric, "stft: non-finite input");
  }
  const int frames = frame_count(n, cfg);
  Spectrogram spec = Spectrogram::zeros(cfg, wave.num_channels(), frames);

  const auto window = sqrt_hann(cfg.win_len);
  FftPlan plan(static_cast<std::size_t>(cfg.fft_len));
  std::vector<double> re(cfg.fft_len), im(cfg.fft_len);
  for (int c = 0; c < spec.channels; ++c) {
    const auto& x = wave.channels[c];
    for (int t = 0; t < frames; ++t) {
      const std::int64_t off = static_cast<std::int64_t>(t) * cfg.hop;
      for (int i = 0; i < cfg.win_len; ++i) re[i] = x[off + i] * window[i];
      std::fill(re.begin() + cfg.win_len, re.end(), 0.0);
      std::fill(im.begin(), im.end(), 0.0);
      plan.run(re.data(), im.data(), false);
      for (int f = 0; f < spec.bins; ++f) {
        spec.at_re(c, t, f) = re[f];
        spec.at_im(c, t, f) = im[f];
      }
    }
  }
  return spec;
}

MultiWave istft(const Spectrogram& spec) {
  const StftConfig& cfg = spec.cfg;
  cfg.validate();
  require(spec.bins == cfg.bins(), ErrorKind::data,
          "istft: spectrogram inconsistent with its config");
  require(all_finite(spec.re) && all_finite(spec.im), ErrorKind::numeric,
          "istft: non-finite spectrogram");

  const std::int64_t out_len =
      static_cast<std::int64_t>(spec.frames - 1) * cfg.hop + cfg.win_len;
  MultiWave wave;
  wave.sample_rate = cfg.sample_rate;
  wave.channels.assign(spec.channels, std::vector<double>(out_len, 0.0));

  const auto window = sqrt_hann(cfg.win_len);
  FftPlan plan(static_cast<std::size_t>(cfg.fft_len));
  const int n = cfg.fft_len;
  const int half = n / 2;
  std::vector<double> re(n), im(n);
  for (int c = 0; c < spec.channels; ++c) {
    auto& x = wave.channels[c];
    for (int t = 0; t < spec.frames; ++t) {
      // Hermitian extension; the stored imaginary parts at DC and Nyquist do
      // not contribute to a real frame and are ignored.
      re[0] = spec.get_re(c, t, 0);
      im[0] = 0.0;
      re[half] = spec.get_re(c, t, half);
      im[half] = 0.0;
      for (int f = 1; f < half; ++f) {
        re[f] = spec.get_re(c, t, f);
        im[f] = spec.get_im(c, t, f);
        re[n - f] = re[f];
        im[n - f] = -im[f];
      }
      plan.run(re.data(), im.data(), true);
      const std::int64_t off = static_cast<std::int64_t>(t) * cfg.hop;
      for (int i = 0; i < cfg.win_len; ++i) x[off + i] += re[i] * window[i];
    }
  }
  return wave;
}

}  // namespace vmbeam::dsp
