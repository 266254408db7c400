// vmbeam/metrics/metrics.cpp
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

#include "vmbeam/metrics/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "vmbeam/common.hpp"
#include "vmbeam/dsp/fft.hpp"
#include "vmbeam/kernels/kernels.hpp"

namespace vmbeam::metrics {

namespace {

constexpr double kCapDb = 60.0;
constexpr double kTwoPi = 6.283185307179586476925286766559;

double ratio_db_capped(double num, double den) {
  if (den <= 0.0) return kCapDb;
  const double db = 10.0 * std::log10(num / den);
  return std::min(db, kCapDb);
}

// ---- STOI machinery ----

constexpr int kStoiWin = 256;
constexpr int kStoiHop = 128;
constexpr int kStoiFft = 512;
constexpr int kStoiBands = 15;
constexpr int kStoiSegment = 30;   // frames per intelligibility segment
constexpr double kStoiLowestBand = 150.0;
constexpr double kStoiDynRangeDb = 40.0;
constexpr double kStoiClipDb = -15.0;

struct StoiFrames {
  // band energies [frame][band]
  std::vector<std::array<double, kStoiBands>> bands;
};

// Symmetric Hann as in the original formulation.
std::vector<double> stoi_window() {
  std::vector<double> w(kStoiWin);
  for (int n = 0; n < kStoiWin; ++n) {
    w[n] = 0.5 * (1.0 - std::cos(kTwoPi * (n + 1) / (kStoiWin + 1)));
  }
  return w;
}

std::vector<std::size_t> active_frames(const std::vector<double>& ref,
                                       const std::vector<double>& w) {
  const std::int64_t n = static_cast<std::int64_t>(ref.size());
  std::vector<double> frame_db;
  for (std::int64_t off = 0; off + kStoiWin <= n; off += kStoiHop) {
    double e = 0.0;
    for (int i = 0; i < kStoiWin; ++i) {
      const double v = ref[off + i] * w[i];
      e += v * v;
    }
    frame_db.push_back(20.0 * std::log10(std::sqrt(e) + 1e-300));
  }
  const double peak = *std::max_element(frame_db.begin(), frame_db.end());
  std::vector<std::size_t> keep;
  for (std::size_t t = 0; t < frame_db.size(); ++t) {
    if (frame_db[t] > peak - kStoiDynRangeDb) keep.push_back(t);
  }
  return keep;
}

StoiFrames band_decompose(const std::vector<double>& x,
                          const std::vector<std::size_t>& frames,
                          const std::vector<double>& w, double fs) {
  // 1/3-octave band edges on the 512-point grid.
  std::array<int, kStoiBands> lo_bin, hi_bin;
  for (int j = 0; j < kStoiBands; ++j) {
    const double fc = kStoiLowestBand * std::pow(2.0, j / 3.0);
    const double f_lo = fc * std::pow(2.0, -1.0 / 6.0);
    const double f_hi = fc * std::pow(2.0, 1.0 / 6.0);
    lo_bin[j] = static_cast<int>(std::ceil(f_lo / fs * kStoiFft));
    hi_bin[j] = static_cast<int>(std::ceil(f_hi / fs * kStoiFft));
  }

  dsp::FftPlan plan(kStoiFft);
  std::vector<double> re(kStoiFft), im(kStoiFft);
  StoiFrames out;
  out.bands.resize(frames.size());
  for (std::size_t idx = 0; idx < frames.size(); ++idx) {
    const std::int64_t off = static_cast<std::int64_t>(frames[idx]) * kStoiHop;
    for (int i = 0; i < kStoiWin; ++i) re[i] = x[off + i] * w[i];
    std::fill(re.begin() + kStoiWin, re.end(), 0.0);
    std::fill(im.begin(), im.end(), 0.0);
    plan.run(re.data(), im.data(), false);
    for (int j = 0; j < kStoiBands; ++j) {
      double e = 0.0;
      for (int k = lo_bin[j]; k < hi_bin[j]; ++k) {
        e += re[k] * re[k] + im[k] * im[k];
      }
      out.bands[idx][j] = std::sqrt(e);
    }
  }
  return out;
}

double segment_correlation(const double* x, const double* y, int n) {
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = x[i] - mx;
    const double b = y[i] - my;
    sxy += a * b;
    sxx += a * a;
    syy += b * b;
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double si_sdr(const std::vector<double>& est, const std::vector<double>& ref) {
  require(est.size() == ref.size() && !ref.empty(), ErrorKind::data,
          "si_sdr: length mismatch");
  const double p_ref = kernels::sum_sq(ref.data(), ref.size());
  require(p_ref > 0.0, ErrorKind::data, "si_sdr: zero reference");
  const double alpha = kernels::dot(est.data(), ref.data(), ref.size()) / p_ref;
  const double p_target = alpha * alpha * p_ref;
  double p_err = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double e = alpha * ref[i] - est[i];
    p_err += e * e;
  }
  return ratio_db_capped(p_target, p_err);
}

double snr_metric(const std::vector<double>& est, const std::vector<double>& ref) {
  require(est.size() == ref.size() && !ref.empty(), ErrorKind::data,
          "snr_metric: length mismatch");
  const double p_ref = kernels::sum_sq(ref.data(), ref.size());
  double p_err = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double e = ref[i] - est[i];
    p_err += e * e;
  }
  return ratio_db_capped(p_ref, p_err);
}

double stoi(const std::vector<double>& est, const std::vector<double>& ref,
            double fs) {
  require(fs == 16000.0, ErrorKind::config, "stoi: only 16 kHz is supported");
  require(est.size() == ref.size(), ErrorKind::data, "stoi: length mismatch");
  require(static_cast<int>(ref.size()) >= kStoiWin, ErrorKind::data,
          "stoi: input shorter than one frame");

  const auto w = stoi_window();
  const auto keep = active_frames(ref, w);
  require(static_cast<int>(keep.size()) >= kStoiSegment, ErrorKind::data,
          "stoi: fewer than 30 speech-active frames");

  const StoiFrames xb = band_decompose(ref, keep, w, fs);
  const StoiFrames yb = band_decompose(est, keep, w, fs);

  // SDR lower bound beta = -15 dB: y' <= x * (1 + 10^(-beta/20)).
  const double clip_gain = std::pow(10.0, -kStoiClipDb / 20.0);
  double acc = 0.0;
  std::int64_t count = 0;
  const int n_frames = static_cast<int>(keep.size());
  std::array<double, kStoiSegment> xseg, yseg;
  for (int m = kStoiSegment - 1; m < n_frames; ++m) {
    for (int j = 0; j < kStoiBands; ++j) {
      double ex = 0.0, ey = 0.0;
      for (int i = 0; i < kStoiSegment; ++i) {
        xseg[i] = xb.bands[m - kStoiSegment + 1 + i][j];
        yseg[i] = yb.bands[m - kStoiSegment + 1 + i][j];
        ex += xseg[i] * xseg[i];
        ey += yseg[i] * yseg[i];
      }
      const double alpha = ey > 0.0 ? std::sqrt(ex / ey) : 0.0;
      for (int i = 0; i < kStoiSegment; ++i) {
        const double bound = xseg[i] * (1.0 + clip_gain);
        yseg[i] = std::min(alpha * yseg[i], bound);
      }
      acc += segment_correlation(xseg.data(), yseg.data(), kStoiSegment);
      ++count;
    }
  }
  const double score = acc / static_cast<double>(count);
  return std::clamp(score, 0.0, 1.0);
}

}  // namespace vmbeam::metrics
