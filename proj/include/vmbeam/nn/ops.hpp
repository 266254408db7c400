// vmbeam/nn/ops.hpp
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

#ifndef VMBEAM_NN_OPS_HPP_
#define VMBEAM_NN_OPS_HPP_

#include <vector>

#include "vmbeam/nn/tensor.hpp"

namespace vmbeam::nn {

// Graph construction hook for modules that define their own differentiable
// ops (iSTFT, beamformer application). backward_fn sees the result node with
// its grad populated and must accumulate into parents[i]->grad.
Tensor make_op(std::vector<std::int64_t> shape, std::vector<double> value,
               std::vector<Tensor> parents,
               std::function<void(TensorNode&)> backward_fn);

// Leaf copy that does not track gradients.
Tensor detach(const Tensor& t);

// ---- elementwise ----
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor neg(const Tensor& a);
Tensor scale(const Tensor& a, double s);
Tensor add_scalar(const Tensor& a, double s);
// a[C,...] scaled per-position by m[1,...] (broadcast over the leading axis)
Tensor mul_bcast0(const Tensor& a, const Tensor& m);
// x * s where s is a scalar tensor (gradients flow to both)
Tensor scale_by(const Tensor& x, const Tensor& s);

// ---- activations ----
// x * tanh(softplus(x)); softplus stabilized as max(x,0) + log1p(exp(-|x|)).
Tensor mish(const Tensor& x);
Tensor sigmoid(const Tensor& x);

// ---- reductions / scalar math ----
Tensor sum_all(const Tensor& x);
Tensor mean_all(const Tensor& x);
Tensor sum_sq(const Tensor& x);   // sum of squares, scalar
Tensor log_scalar(const Tensor& x);         // natural log of a positive scalar
Tensor min_const(const Tensor& x, double c);  // min(x, c); zero grad when clipped
Tensor index(const Tensor& x, std::int64_t i);  // scalar view of one element

// ---- shape ----
Tensor concat_channels(const std::vector<Tensor>& parts);  // along axis 0
Tensor slice_channels(const Tensor& x, std::int64_t begin, std::int64_t count);
// column slice of a rank-2 tensor (time trimming of [M, L] waveforms)
Tensor slice_cols(const Tensor& x, std::int64_t begin, std::int64_t count);

// ---- structured layers ----
// input [C_in,H,W], kernel [C_out,C_in/groups,kh,kw], optional bias [C_out].
// Cross-correlation with symmetric stride/padding. Output [C_out,H',W'] with
// H' = (H + 2*pad - kh)/stride + 1.
Tensor conv2d(const Tensor& input, const Tensor& kernel, const Tensor& bias,
              int stride, int padding, int groups);
inline Tensor conv2d(const Tensor& input, const Tensor& kernel, int stride,
                     int padding, int groups) {
  return conv2d(input, kernel, Tensor(), stride, padding, groups);
}

// w [out,in] * x [in] + b [out]
Tensor linear(const Tensor& w, const Tensor& x, const Tensor& b);

Tensor global_avg_pool(const Tensor& x);  // [C,H,W] -> [C]
Tensor softmax(const Tensor& x);          // 1-D

// ---- complex-plane helpers (channel layout: 2m = re, 2m+1 = im) ----
// sqrt(re^2 + im^2 + eps) per mic -> [M,T,F]
Tensor complex_magnitude(const Tensor& spec, double eps = 1e-12);

// ---- losses ----
// Negative clipped SNR in dB: -min(10*log10(|ref|^2 / |ref - est|^2), clip).
// ref is a plain buffer (no gradient). Zero-power ref is an error.
Tensor snr_loss(const Tensor& est, const std::vector<double>& ref,
                double clip_db);

}  // namespace vmbeam::nn

#endif  // VMBEAM_NN_OPS_HPP_
