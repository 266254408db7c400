// vmbeam/dsp/stft_ops.cpp
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

#include "vmbeam/dsp/stft_ops.hpp"

#include <algorithm>

#include "vmbeam/dsp/fft.hpp"
#include "vmbeam/nn/ops.hpp"

namespace vmbeam::dsp {

nn::Tensor spectrogram_to_tensor(const Spectrogram& spec, bool requires_grad) {
  const std::int64_t m = spec.channels;
  const std::int64_t t = spec.frames;
  const std::int64_t f = spec.bins;
  const std::int64_t plane = t * f;
  std::vector<double> data(2 * m * plane);
  for (std::int64_t c = 0; c < m; ++c) {
    std::copy(spec.re.begin() + c * plane, spec.re.begin() + (c + 1) * plane,
              data.begin() + (2 * c) * plane);
    std::copy(spec.im.begin() + c * plane, spec.im.begin() + (c + 1) * plane,
              data.begin() + (2 * c + 1) * plane);
  }
  return nn::Tensor::from_data({2 * m, t, f}, std::move(data), requires_grad);
}

Spectrogram tensor_to_spectrogram(const nn::Tensor& t, const StftConfig& cfg) {
  require(t.rank() == 3 && t.dim(0) % 2 == 0, ErrorKind::numeric,
          "tensor_to_spectrogram expects [2M,T,F]");
  require(t.dim(2) == cfg.bins(), ErrorKind::data,
          "tensor_to_spectrogram: bins do not match config");
  Spectrogram spec = Spectrogram::zeros(cfg, static_cast<int>(t.dim(0) / 2),
                                        static_cast<int>(t.dim(1)));
  const std::int64_t plane = t.dim(1) * t.dim(2);
  for (int c = 0; c < spec.channels; ++c) {
    std::copy(t.data().begin() + (2 * c) * plane,
              t.data().begin() + (2 * c + 1) * plane,
              spec.re.begin() + static_cast<std::int64_t>(c) * plane);
    std::copy(t.data().begin() + (2 * c + 1) * plane,
              t.data().begin() + (2 * c + 2) * plane,
              spec.im.begin() + static_cast<std::int64_t>(c) * plane);
  }
  return spec;
}

nn::Tensor istft_op(const nn::Tensor& spec, const StftConfig& cfg) {
  cfg.validate();
  require(spec.rank() == 3 && spec.dim(0) % 2 == 0 && spec.dim(2) == cfg.bins(),
          ErrorKind::numeric, "istft_op expects [2M,T,F] matching config");
  const std::int64_t mics = spec.dim(0) / 2;
  const std::int64_t frames = spec.dim(1);
  const std::int64_t bins = spec.dim(2);
  const std::int64_t plane = frames * bins;
  const std::int64_t out_len = (frames - 1) * cfg.hop + cfg.win_len;
  const int n = cfg.fft_len;
  const int half = n / 2;

  const auto window = sqrt_hann(cfg.win_len);
  FftPlan plan(static_cast<std::size_t>(n));

  std::vector<double> out(mics * out_len, 0.0);
  {
    std::vector<double> re(n), im(n);
    const auto& v = spec.data();
    for (std::int64_t m = 0; m < mics; ++m) {
      const double* sre = v.data() + (2 * m) * plane;
      const double* sim = v.data() + (2 * m + 1) * plane;
      double* x = out.data() + m * out_len;
      for (std::int64_t t = 0; t < frames; ++t) {
        re[0] = sre[t * bins];
        im[0] = 0.0;
        re[half] = sre[t * bins + half];
        im[half] = 0.0;
        for (int f = 1; f < half; ++f) {
          re[f] = sre[t * bins + f];
          im[f] = sim[t * bins + f];
          re[n - f] = re[f];
          im[n - f] = -im[f];
        }
        plan.run(re.data(), im.data(), true);
        const std::int64_t off = t * cfg.hop;
        for (int i = 0; i < cfg.win_len; ++i) x[off + i] += re[i] * window[i];
      }
    }
  }

  return nn::make_op(
      {mics, out_len}, std::move(out), {spec},
      [mics, frames, bins, plane, out_len, cfg, window,
       plan = std::make_shared<FftPlan>(static_cast<std::size_t>(n)), n,
       half](nn::TensorNode& self) {
        auto& gs = self.parents[0]->grad;
        std::vector<double> re(n), im(n);
        for (std::int64_t m = 0; m < mics; ++m) {
          const double* gx = self.grad.data() + m * out_len;
          double* gre = gs.data() + (2 * m) * plane;
          double* gim = gs.data() + (2 * m + 1) * plane;
          for (std::int64_t t = 0; t < frames; ++t) {
            const std::int64_t off = t * cfg.hop;
            for (int i = 0; i < cfg.win_len; ++i) re[i] = gx[off + i] * window[i];
            std::fill(re.begin() + cfg.win_len, re.end(), 0.0);
            std::fill(im.begin(), im.end(), 0.0);
            plan->run(re.data(), im.data(), false);
            const double s2 = 2.0 / static_cast<double>(n);
            const double s1 = 1.0 / static_cast<double>(n);
            gre[t * bins] += s1 * re[0];
            gre[t * bins + half] += s1 * re[half];
            for (int f = 1; f < half; ++f) {
              gre[t * bins + f] += s2 * re[f];
              gim[t * bins + f] += s2 * im[f];
            }
          }
        }
      });
}

}  // namespace vmbeam::dsp
