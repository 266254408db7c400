// tests/test_dsp.cpp
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "vmbeam/dsp/fft.hpp"
#include "vmbeam/dsp/stft.hpp"
#include "vmbeam/dsp/stft_ops.hpp"
#include "vmbeam/dsp/wav.hpp"
#include "vmbeam/nn/grad_check.hpp"
#include "vmbeam/nn/ops.hpp"

using namespace vmbeam;
using dsp::MultiWave;
using dsp::StftConfig;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

MultiWave random_wave(int channels, std::int64_t n, std::uint64_t seed) {
  MultiWave w;
  w.channels.resize(channels);
  CounterRng rng(seed);
  for (auto& ch : w.channels) {
    ch.resize(n);
    for (auto& v : ch) v = rng.uniform(-1.0, 1.0);
  }
  return w;
}

}  // namespace

TEST_CASE("sqrt_hann: endpoint, scalar oracle, COLA") {
  const int n = 256;
  auto w = dsp::sqrt_hann(n);
  CHECK(w[0] == 0.0);
  for (int i = 0; i < n; ++i) {
    const double want = std::sqrt(0.5 - 0.5 * std::cos(kTwoPi * i / n));
    CHECK(std::abs(w[i] - want) < 1e-15);
  }
  // squared window over 50% overlapped shifts sums to 1 at interior samples
  for (int i = 0; i < n / 2; ++i) {
    const double s = w[i] * w[i] + w[i + n / 2] * w[i + n / 2];
    CHECK(std::abs(s - 1.0) < 1e-12);
  }
}

TEST_CASE("fft: impulse, inverse round trip, non-pow2 fallback") {
  {
    std::vector<double> re(8, 0.0), im(8, 0.0);
    re[0] = 1.0;
    dsp::fft(re, im, false);
    for (int i = 0; i < 8; ++i) {
      CHECK(re[i] == doctest::Approx(1.0));
      CHECK(im[i] == doctest::Approx(0.0));
    }
  }
  for (std::size_t n : {16u, 12u}) {  // 12 exercises the generic fallback
    std::vector<double> re(n), im(n);
    CounterRng rng(n);
    for (std::size_t i = 0; i < n; ++i) {
      re[i] = rng.uniform(-1, 1);
      im[i] = rng.uniform(-1, 1);
    }
    auto re0 = re, im0 = im;
    dsp::fft(re, im, false);
    dsp::fft(re, im, true);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(re[i] - re0[i]) < 1e-12);
      CHECK(std::abs(im[i] - im0[i]) < 1e-12);
    }
  }
}

TEST_CASE("fft_convolve matches direct convolution") {
  auto a = std::vector<double>{1.0, -0.5, 0.25, 2.0};
  auto b = std::vector<double>{0.5, 1.0, -1.0};
  auto got = dsp::fft_convolve(a, b);
  REQUIRE(got.size() == 6);
  std::vector<double> want(6, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) want[i + j] += a[i] * b[j];
  for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(got[i] - want[i]) < 1e-13);
}

TEST_CASE("stft: silence frame count at defaults") {
  StftConfig cfg;
  MultiWave w;
  w.channels.assign(1, std::vector<double>(16000, 0.0));
  auto spec = dsp::stft(w, cfg);
  CHECK(spec.frames == 124);  // floor((16000-256)/128)+1
  CHECK(spec.bins == 129);
  for (double v : spec.re) CHECK(v == 0.0);
  for (double v : spec.im) CHECK(v == 0.0);
}

TEST_CASE("stft: bin-centered cosine matches the windowed-DFT oracle") {
  StftConfig cfg;
  const int k = 20;
  const double f = k * cfg.sample_rate / cfg.fft_len;
  MultiWave w;
  w.channels.assign(1, std::vector<double>(8000));
  for (int i = 0; i < 8000; ++i) {
    w.channels[0][i] = std::cos(kTwoPi * f * i / cfg.sample_rate);
  }
  auto spec = dsp::stft(w, cfg);

  const auto window = dsp::sqrt_hann(cfg.win_len);
  for (int t = 1; t + 1 < spec.frames; t += 17) {
    // Direct DFT of this exact windowed frame.
    std::vector<double> oracle_re(spec.bins, 0.0), oracle_im(spec.bins, 0.0);
    for (int b = 0; b < spec.bins; ++b) {
      for (int i = 0; i < cfg.win_len; ++i) {
        const double v = w.channels[0][t * cfg.hop + i] * window[i];
        const double ang = -kTwoPi * b * i / cfg.fft_len;
        oracle_re[b] += v * std::cos(ang);
        oracle_im[b] += v * std::sin(ang);
      }
      CHECK(std::abs(spec.get_re(0, t, b) - oracle_re[b]) < 1e-9);
      CHECK(std::abs(spec.get_im(0, t, b) - oracle_im[b]) < 1e-9);
    }
    // The sine window's main lobe covers +-1 bin: the tone's energy sits in
    // bins k-1..k+1 (bin k alone carries ~81%, as the oracle shows).
    double total = 0.0, near_k = 0.0, at_k = 0.0;
    for (int b = 0; b < spec.bins; ++b) {
      const double e = spec.get_re(0, t, b) * spec.get_re(0, t, b) +
                       spec.get_im(0, t, b) * spec.get_im(0, t, b);
      total += e;
      if (std::abs(b - k) <= 1) near_k += e;
      if (b == k) at_k = e;
    }
    CHECK(near_k / total > 0.99);
    CHECK(at_k / total > 0.75);
  }
}

TEST_CASE("stft -> istft interior perfect reconstruction") {
  StftConfig cfg;
  for (int channels : {1, 3, 10}) {
    auto w = random_wave(channels, 4000, 77 + channels);
    auto spec = dsp::stft(w, cfg);
    auto back = dsp::istft(spec);
    const auto [lo, hi] = dsp::reconstructable_range(spec.frames, cfg);
    for (int c = 0; c < channels; ++c) {
      double num = 0.0, den = 0.0;
      for (std::int64_t i = lo; i < hi; ++i) {
        const double d = back.channels[c][i] - w.channels[c][i];
        num += d * d;
        den += w.channels[c][i] * w.channels[c][i];
      }
      CHECK(std::sqrt(num / den) < 1e-10);
    }
  }
}

TEST_CASE("istft of an all-zero spectrogram is silence") {
  StftConfig cfg;
  auto spec = dsp::Spectrogram::zeros(cfg, 2, 10);
  auto w = dsp::istft(spec);
  for (const auto& ch : w.channels)
    for (double v : ch) CHECK(v == 0.0);
}

TEST_CASE("stft is linear") {
  StftConfig cfg;
  auto x = random_wave(1, 2000, 91);
  auto y = random_wave(1, 2000, 92);
  const double a = 1.7, b = -0.4;
  MultiWave mix;
  mix.channels.assign(1, std::vector<double>(2000));
  for (int i = 0; i < 2000; ++i) {
    mix.channels[0][i] = a * x.channels[0][i] + b * y.channels[0][i];
  }
  auto sm = dsp::stft(mix, cfg);
  auto sx = dsp::stft(x, cfg);
  auto sy = dsp::stft(y, cfg);
  for (std::size_t i = 0; i < sm.re.size(); ++i) {
    CHECK(std::abs(sm.re[i] - (a * sx.re[i] + b * sy.re[i])) < 1e-10);
    CHECK(std::abs(sm.im[i] - (a * sx.im[i] + b * sy.im[i])) < 1e-10);
  }
}

TEST_CASE("Parseval: frame energy equals 1/fft_len spectral energy") {
  StftConfig cfg;
  auto w = random_wave(1, 1024, 93);
  auto spec = dsp::stft(w, cfg);
  const auto window = dsp::sqrt_hann(cfg.win_len);
  for (int t = 0; t < spec.frames; ++t) {
    double time_energy = 0.0;
    for (int i = 0; i < cfg.win_len; ++i) {
      const double v = w.channels[0][t * cfg.hop + i] * window[i];
      time_energy += v * v;
    }
    double spec_energy = 0.0;
    for (int b = 0; b < spec.bins; ++b) {
      const double e = spec.get_re(0, t, b) * spec.get_re(0, t, b) +
                       spec.get_im(0, t, b) * spec.get_im(0, t, b);
      // interior bins appear twice in the full spectrum
      spec_energy += (b == 0 || b == cfg.fft_len / 2) ? e : 2.0 * e;
    }
    spec_energy /= cfg.fft_len;
    CHECK(std::abs(time_energy - spec_energy) < 1e-9);
  }
}

TEST_CASE("istft_op forward matches dsp::istft; gradient matches FD") {
  StftConfig cfg;
  cfg.win_len = 16;
  cfg.hop = 8;
  cfg.fft_len = 16;
  const int frames = 5, bins = cfg.bins();

  CounterRng rng(99);
  std::vector<double> data(2 * frames * bins);
  for (auto& v : data) v = rng.uniform(-1, 1);
  auto spec_t = nn::Tensor::from_data({2, frames, bins}, data);

  auto wave_t = dsp::istft_op(spec_t, cfg);
  auto spec_plain = dsp::tensor_to_spectrogram(spec_t, cfg);
  auto wave_plain = dsp::istft(spec_plain);
  REQUIRE(wave_t.dim(1) == static_cast<std::int64_t>(wave_plain.channels[0].size()));
  for (std::size_t i = 0; i < wave_plain.channels[0].size(); ++i) {
    CHECK(wave_t.data()[i] == doctest::Approx(wave_plain.channels[0][i]).epsilon(1e-14));
  }

  // gradient of a weighted sum of istft(S) w.r.t. S vs central differences
  CHECK(nn::grad_check(
            [&cfg](const nn::Tensor& s) { return dsp::istft_op(s, cfg); },
            spec_t, 1e-5) < 1e-6);
}

TEST_CASE("wav: float64 round trip is bit exact, pcm16 and float32 are close") {
  auto w = random_wave(3, 500, 123);
  const std::string path = "/tmp/vmbeam_test.wav";

  dsp::write_wav(path, w, dsp::WavFormat::float64);
  auto r64 = dsp::read_wav(path);
  REQUIRE(r64.num_channels() == 3);
  CHECK(r64.channels == w.channels);

  dsp::write_wav(path, w, dsp::WavFormat::float32);
  auto r32 = dsp::read_wav(path);
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 500; ++i)
      CHECK(std::abs(r32.channels[c][i] - w.channels[c][i]) < 1e-6);

  dsp::write_wav(path, w, dsp::WavFormat::pcm16);
  auto r16 = dsp::read_wav(path);
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 500; ++i)
      CHECK(std::abs(r16.channels[c][i] - w.channels[c][i]) < 1.0 / 32000.0);

  std::remove(path.c_str());
}

TEST_CASE("wav: wrong sample rate is rejected") {
  // hand-build a 8 kHz header
  const std::string path = "/tmp/vmbeam_badrate.wav";
  MultiWave w = random_wave(1, 100, 5);
  dsp::write_wav(path, w, dsp::WavFormat::pcm16);
  // patch the rate field (offset 24) to 8000
  FILE* f = fopen(path.c_str(), "r+b");
  REQUIRE(f != nullptr);
  fseek(f, 24, SEEK_SET);
  const std::uint32_t rate = 8000;
  fwrite(&rate, 4, 1, f);
  fclose(f);
  CHECK_THROWS_AS(dsp::read_wav(path), Error);
  std::remove(path.c_str());
}

TEST_CASE("stft rejects empty and too-short input") {
  StftConfig cfg;
  MultiWave w;
  CHECK_THROWS_AS(dsp::stft(w, cfg), Error);
  w.channels.assign(1, std::vector<double>(100, 0.0));
  CHECK_THROWS_AS(dsp::stft(w, cfg), Error);
}
