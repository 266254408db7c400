// vmbeam/dsp/stft_ops.hpp
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

#ifndef VMBEAM_DSP_STFT_OPS_HPP_
#define VMBEAM_DSP_STFT_OPS_HPP_

#include "vmbeam/dsp/stft.hpp"
#include "vmbeam/nn/tensor.hpp"

namespace vmbeam::dsp {

// Bridges between plain spectrograms and autodiff tensors. Tensor layout for
// complex T-F data is [2M, T, F] with channel 2m the real plane and 2m+1 the
// imaginary plane of mic m.

nn::Tensor spectrogram_to_tensor(const Spectrogram& spec,
                                 bool requires_grad = false);
Spectrogram tensor_to_spectrogram(const nn::Tensor& t, const StftConfig& cfg);

// Differentiable overlap-add synthesis: [2M, T, F] -> [M, (T-1)*hop+win].
// Forward matches dsp::istft; backward is the exact adjoint (window + frame
// extraction followed by a forward DFT scaled 2/fft_len, 1/fft_len at DC and
// Nyquist).
nn::Tensor istft_op(const nn::Tensor& spec, const StftConfig& cfg);

}  // namespace vmbeam::dsp

#endif  // VMBEAM_DSP_STFT_OPS_HPP_
