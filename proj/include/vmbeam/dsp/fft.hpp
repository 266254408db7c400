// vmbeam/dsp/fft.hpp
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

#ifndef VMBEAM_DSP_FFT_HPP_
#define VMBEAM_DSP_FFT_HPP_

#include <cstddef>
#include <vector>

namespace vmbeam::dsp {

// Iterative radix-2 FFT with precomputed twiddles; a naive O(n^2) DFT covers
// non-power-of-two sizes. Forward is un-normalized, inverse carries 1/n.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);
  std::size_t size() const { return n_; }
  void run(double* re, double* im, bool inverse) const;

 private:
  std::size_t n_;
  bool radix2_;
  std::vector<std::size_t> bitrev_;
  std::vector<double> tw_re_, tw_im_;  // e^{-2πik/n}, k < n/2
};

// One-shot convenience wrapper.
void fft(std::vector<double>& re, std::vector<double>& im, bool inverse);

// Full linear convolution, output length a.size() + b.size() - 1.
std::vector<double> fft_convolve(const std::vector<double>& a,
                                 const std::vector<double>& b);

}  // namespace vmbeam::dsp

#endif  // VMBEAM_DSP_FFT_HPP_
