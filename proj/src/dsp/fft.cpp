// vmbeam/dsp/fft.cpp
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

#include "vmbeam/dsp/fft.hpp"

#include <algorithm>
#include <cmath>

#include "vmbeam/common.hpp"

namespace vmbeam::dsp {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }
}  // namespace

FftPlan::FftPlan(std::size_t n) : n_(n), radix2_(is_pow2(n)) {
  require(n >= 1, ErrorKind::numeric, "fft size must be >= 1");
  if (!radix2_) return;
  bitrev_.resize(n);
  std::size_t bits = 0;
  while ((1u << bits) < n) ++bits;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < bits; ++b) {
      if (i & (1u << b)) r |= 1u << (bits - 1 - b);
    }
    bitrev_[i] = r;
  }
  tw_re_.resize(n / 2);
  tw_im_.resize(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double ang = -kTwoPi * static_cast<double>(k) / static_cast<double>(n);
    tw_re_[k] = std::cos(ang);
    tw_im_[k] = std::sin(ang);
  }
}

void FftPlan::run(double* re, double* im, bool inverse) const {
  const std::size_t n = n_;
  if (n == 1) return;

  if (!radix2_) {
    // Generic fallback: direct DFT.
    std::vector<double> out_re(n, 0.0), out_im(n, 0.0);
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n; ++k) {
      double ar = 0.0, ai = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        const double ang = sign * kTwoPi * static_cast<double>(k) *
                           static_cast<double>(t) / static_cast<double>(n);
        const double c = std::cos(ang), s = std::sin(ang);
        ar += re[t] * c - im[t] * s;
        ai += re[t] * s + im[t] * c;
      }
      out_re[k] = ar;
      out_im[k] = ai;
    }
    const double norm = inverse ? 1.0 / static_cast<double>(n) : 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      re[k] = out_re[k] * norm;
      im[k] = out_im[k] * norm;
    }
    return;
  }

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = bitrev_[i];
    if (j > i) {
      std::swap(re[i], re[j]);
      std::swap(im[i], im[j]);
    }
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len >> 1;
    const std::size_t step = n / len;
    for (std::size_t base = 0; base < n; base += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const double wr = tw_re_[k * step];
        const double wi = inverse ? -tw_im_[k * step] : tw_im_[k * step];
        const std::size_t a = base + k;
        const std::size_t b = a + half;
        const double tr = re[b] * wr - im[b] * wi;
        const double ti = re[b] * wi + im[b] * wr;
        re[b] = re[a] - tr;
        im[b] = im[a] - ti;
        re[a] += tr;
        im[a] += ti;
      }
    }
  }

  if (inverse) {
    const double norm = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      re[i] *= norm;
      im[i] *= norm;
    }
  }
}

void fft(std::vector<double>& re, std::vector<double>& im, bool inverse) {
  require(re.size() == im.size(), ErrorKind::numeric, "fft: re/im size mismatch");
  FftPlan plan(re.size());
  plan.run(re.data(), im.data(), inverse);
}

std::vector<double> fft_convolve(const std::vector<double>& a,
                                 const std::vector<double>& b) {
  require(!a.empty() && !b.empty(), ErrorKind::numeric, "fft_convolve: empty input");
  const std::size_t out_len = a.size() + b.size() - 1;
  std::size_t n = 1;
  while (n < out_len) n <<= 1;
  FftPlan plan(n);

  std::vector<double> are(n, 0.0), aim(n, 0.0), bre(n, 0.0), bim(n, 0.0);
  std::copy(a.begin(), a.end(), are.begin());
  std::copy(b.begin(), b.end(), bre.begin());
  plan.run(are.data(), aim.data(), false);
  plan.run(bre.data(), bim.data(), false);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = are[i] * bre[i] - aim[i] * bim[i];
    const double s = are[i] * bim[i] + aim[i] * bre[i];
    are[i] = r;
    aim[i] = s;
  }
  plan.run(are.data(), aim.data(), true);
  are.resize(out_len);
  return are;
}

}  // namespace vmbeam::dsp
