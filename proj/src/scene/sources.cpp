// vmbeam/scene/sources.cpp
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

#include "vmbeam/scene/sources.hpp"

#include <cmath>

namespace vmbeam::scene {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double rms_normalize(std::vector<double>& x) {
  double p = 0.0;
  for (double v : x) p += v * v;
  const double rms = std::sqrt(p / static_cast<double>(x.size()));
  require(rms > 0.0, ErrorKind::numeric, "synthesized source is silent");
  for (auto& v : x) v /= rms;
  return rms;
}

// Two Gaussian formant bumps over a 1/h rolloff.
double harmonic_gain(double freq_hz, double f1, double f2) {
  const double b1 = std::exp(-0.5 * std::pow((freq_hz - f1) / 180.0, 2));
  const double b2 = std::exp(-0.5 * std::pow((freq_hz - f2) / 350.0, 2));
  return 0.15 + b1 + 0.7 * b2;
}

std::vector<double> synth_speech(std::int64_t n, double fs, CounterRng& rng) {
  const double f0_base = rng.uniform(115.0, 210.0);
  const double drift_rate = rng.uniform(0.25, 0.9);
  const double drift_depth = rng.uniform(0.02, 0.08);
  const double drift_phase = rng.uniform(0.0, kTwoPi);
  const double formant1 = rng.uniform(420.0, 820.0);
  const double formant2 = rng.uniform(1250.0, 2450.0);

  constexpr int kHarmonics = 12;
  double amp[kHarmonics];
  double phase[kHarmonics];
  for (int h = 0; h < kHarmonics; ++h) {
    amp[h] = harmonic_gain(f0_base * (h + 1), formant1, formant2) /
             std::pow(h + 1.0, 1.1);
    phase[h] = rng.uniform(0.0, kTwoPi);
  }

  // Syllabic envelope: voiced bursts with raised-cosine edges and short gaps.
  std::vector<double> env(n, 0.0);
  {
    std::int64_t pos = 0;
    const std::int64_t ramp = static_cast<std::int64_t>(0.02 * fs);
    while (pos < n) {
      const std::int64_t burst =
          static_cast<std::int64_t>(rng.uniform(0.14, 0.30) * fs);
      const std::int64_t gap =
          static_cast<std::int64_t>(rng.uniform(0.04, 0.12) * fs);
      const double level = rng.uniform(0.6, 1.0);
      for (std::int64_t i = 0; i < burst && pos + i < n; ++i) {
        double e = level;
        if (i < ramp) e *= 0.5 - 0.5 * std::cos(kTwoPi * i / (2.0 * ramp));
        if (burst - i <= ramp)
          e *= 0.5 - 0.5 * std::cos(kTwoPi * (burst - i) / (2.0 * ramp));
        env[pos + i] = e;
      }
      pos += burst + gap;
    }
  }

  std::vector<double> x(n, 0.0);
  double breath_state = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    const double f0 =
        f0_base * (1.0 + drift_depth * std::sin(kTwoPi * drift_rate * t + drift_phase));
    double s = 0.0;
    for (int h = 0; h < kHarmonics; ++h) {
      phase[h] += kTwoPi * f0 * (h + 1) / fs;
      if (phase[h] > kTwoPi) phase[h] -= kTwoPi;
      s += amp[h] * std::sin(phase[h]);
    }
    breath_state += 0.12 * (rng.uniform(-1.0, 1.0) - breath_state);
    x[i] = env[i] * (s + 0.05 * breath_state);
  }
  rms_normalize(x);
  return x;
}

std::vector<double> synth_noise(std::int64_t n, double fs, CounterRng& rng) {
  const double pole = rng.uniform(0.85, 0.995);
  const bool modulated = rng.uniform() < 0.5;
  const double mod_rate = rng.uniform(0.3, 2.0);
  const double mod_phase = rng.uniform(0.0, kTwoPi);

  std::vector<double> x(n);
  double state = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    state = pole * state + (1.0 - pole) * rng.normal();
    double v = state;
    if (modulated) {
      const double t = static_cast<double>(i) / fs;
      v *= 1.0 + 0.5 * std::sin(kTwoPi * mod_rate * t + mod_phase);
    }
    x[i] = v;
  }
  rms_normalize(x);
  return x;
}

}  // namespace

std::vector<double> synth_source(SourceKind kind, std::int64_t num_samples,
                                 double fs, CounterRng rng) {
  require(num_samples > 0, ErrorKind::config, "source length must be positive");
  switch (kind) {
    case SourceKind::speech:
      return synth_speech(num_samples, fs, rng);
    case SourceKind::noise:
      return synth_noise(num_samples, fs, rng);
  }
  throw Error(ErrorKind::config, "unknown source kind");
}

std::vector<double> loop_pad(const std::vector<double>& x,
                             std::int64_t num_samples) {
  require(!x.empty(), ErrorKind::data, "loop_pad: empty source");
  if (static_cast<std::int64_t>(x.size()) >= num_samples) {
    return std::vector<double>(x.begin(), x.begin() + num_samples);
  }
  std::vector<double> out;
  out.reserve(num_samples);
  while (static_cast<std::int64_t>(out.size()) < num_samples) {
    const std::int64_t want = num_samples - static_cast<std::int64_t>(out.size());
    const std::int64_t take = std::min<std::int64_t>(want, x.size());
    out.insert(out.end(), x.begin(), x.begin() + take);
  }
  return out;
}

}  // namespace vmbeam::scene
