// vmbeam/dsp/stft.hpp
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

#ifndef VMBEAM_DSP_STFT_HPP_
#define VMBEAM_DSP_STFT_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include "vmbeam/common.hpp"

namespace vmbeam::dsp {

// 16 ms sqrt-Hann analysis/synthesis at 16 kHz with 50% overlap. hop must be
// win_len/2 so the squared window satisfies COLA and the round trip is exact
// on the interior. DFT normalization: un-normalized forward, 1/fft_len inverse.
struct StftConfig {
  double sample_rate = 16000.0;
  int win_len = 256;
  int hop = 128;
  int fft_len = 256;

  int bins() const { return fft_len / 2 + 1; }
  void validate() const {
    require(win_len >= 2 && win_len % 2 == 0, ErrorKind::config,
            "win_len must be even and >= 2");
    require(hop * 2 == win_len, ErrorKind::config,
            "hop must be win_len/2 (sqrt-Hann reconstruction)");
    require(fft_len >= win_len, ErrorKind::config, "fft_len must be >= win_len");
  }
};

struct MultiWave {
  double sample_rate = 16000.0;
  std::vector<std::vector<double>> channels;

  int num_channels() const { return static_cast<int>(channels.size()); }
  std::int64_t num_samples() const {
    return channels.empty() ? 0 : static_cast<std::int64_t>(channels[0].size());
  }
};

// Complex T-F tensor over channels x frames x bins, stored as separate
// re/im planes indexed [(c*frames + t)*bins + f].
struct Spectrogram {
  StftConfig cfg;
  int channels = 0;
  int frames = 0;
  int bins = 0;
  std::vector<double> re, im;

  std::int64_t idx(int c, int t, int f) const {
    return (static_cast<std::int64_t>(c) * frames + t) * bins + f;
  }
  double& at_re(int c, int t, int f) { return re[idx(c, t, f)]; }
  double& at_im(int c, int t, int f) { return im[idx(c, t, f)]; }
  double get_re(int c, int t, int f) const { return re[idx(c, t, f)]; }
  double get_im(int c, int t, int f) const { return im[idx(c, t, f)]; }

  static Spectrogram zeros(const StftConfig& cfg, int channels, int frames) {
    Spectrogram s;
    s.cfg = cfg;
    s.channels = channels;
    s.frames = frames;
    s.bins = cfg.bins();
    s.re.assign(static_cast<std::size_t>(channels) * frames * s.bins, 0.0);
    s.im.assign(s.re.size(), 0.0);
    return s;
  }
};

// Elementwise sqrt of the periodic Hann window.
std::vector<double> sqrt_hann(int win_len);

// Frames are fully interior: T = floor((N - win_len)/hop) + 1, no padding.
int frame_count(std::int64_t num_samples, const StftConfig& cfg);

// Samples [hop, frames*hop) are covered by two windows and reconstruct
// exactly; losses and metrics trim to this range.
std::pair<std::int64_t, std::int64_t> reconstructable_range(
    int frames, const StftConfig& cfg);

Spectrogram stft(const MultiWave& wave, const StftConfig& cfg);

// Overlap-add synthesis, output length (T-1)*hop + win_len per channel.
MultiWave istft(const Spectrogram& spec);

}  // namespace vmbeam::dsp

#endif  // VMBEAM_DSP_STFT_HPP_
