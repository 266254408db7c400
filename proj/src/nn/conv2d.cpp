// vmbeam/nn/conv2d.cpp
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

#include <algorithm>
#include <vector>

#include "vmbeam/kernels/kernels.hpp"
#include "vmbeam/nn/ops.hpp"

namespace vmbeam::nn {

namespace {

struct ConvDims {
  std::int64_t c_in, h, w;
  std::int64_t c_out, c_g, kh, kw;  // c_g = C_in / groups
  std::int64_t h_out, w_out;
  int stride, padding, groups;
};

// col is [c_g*kh*kw, h_out*w_out] for one input-channel group.
void im2col_group(const double* input, std::int64_t group, const ConvDims& d,
                  double* col) {
  const std::int64_t hw = d.h_out * d.w_out;
  for (std::int64_t ci = 0; ci < d.c_g; ++ci) {
    const double* chan = input + (group * d.c_g + ci) * d.h * d.w;
    for (std::int64_t ki = 0; ki < d.kh; ++ki) {
      for (std::int64_t kj = 0; kj < d.kw; ++kj) {
        double* row = col + ((ci * d.kh + ki) * d.kw + kj) * hw;
        for (std::int64_t oy = 0; oy < d.h_out; ++oy) {
          const std::int64_t iy = oy * d.stride - d.padding + ki;
          double* out_row = row + oy * d.w_out;
          if (iy < 0 || iy >= d.h) {
            std::fill(out_row, out_row + d.w_out, 0.0);
            continue;
          }
          const double* in_row = chan + iy * d.w;
          for (std::int64_t ox = 0; ox < d.w_out; ++ox) {
            const std::int64_t ix = ox * d.stride - d.padding + kj;
            out_row[ox] = (ix >= 0 && ix < d.w) ? in_row[ix] : 0.0;
          }
        }
      }
    }
  }
}

// Scatter-add of grad_col back into the padded input gradient.
void col2im_group(const double* col, std::int64_t group, const ConvDims& d,
                  double* grad_input) {
  const std::int64_t hw = d.h_out * d.w_out;
  for (std::int64_t ci = 0; ci < d.c_g; ++ci) {
    double* chan = grad_input + (group * d.c_g + ci) * d.h * d.w;
    for (std::int64_t ki = 0; ki < d.kh; ++ki) {
      for (std::int64_t kj = 0; kj < d.kw; ++kj) {
        const double* row = col + ((ci * d.kh + ki) * d.kw + kj) * hw;
        for (std::int64_t oy = 0; oy < d.h_out; ++oy) {
          const std::int64_t iy = oy * d.stride - d.padding + ki;
          if (iy < 0 || iy >= d.h) continue;
          const double* in_row = row + oy * d.w_out;
          double* out_row = chan + iy * d.w;
          for (std::int64_t ox = 0; ox < d.w_out; ++ox) {
            const std::int64_t ix = ox * d.stride - d.padding + kj;
            if (ix >= 0 && ix < d.w) out_row[ix] += in_row[ox];
          }
        }
      }
    }
  }
}

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& kernel, const Tensor& bias,
              int stride, int padding, int groups) {
  require(input.rank() == 3, ErrorKind::numeric, "conv2d: input must be [C,H,W]");
  require(kernel.rank() == 4, ErrorKind::numeric,
          "conv2d: kernel must be [C_out,C_in/groups,kh,kw]");
  require(stride >= 1 && padding >= 0 && groups >= 1, ErrorKind::numeric,
          "conv2d: bad stride/padding/groups");

  ConvDims d;
  d.c_in = input.dim(0);
  d.h = input.dim(1);
  d.w = input.dim(2);
  d.c_out = kernel.dim(0);
  d.c_g = kernel.dim(1);
  d.kh = kernel.dim(2);
  d.kw = kernel.dim(3);
  d.stride = stride;
  d.padding = padding;
  d.groups = groups;
  require(d.c_in % groups == 0, ErrorKind::numeric,
          "conv2d: groups does not divide C_in");
  require(d.c_out % groups == 0, ErrorKind::numeric,
          "conv2d: groups does not divide C_out");
  require(d.c_g == d.c_in / groups, ErrorKind::numeric,
          "conv2d: kernel channel dim inconsistent with groups");
  d.h_out = (d.h + 2 * padding - d.kh) / stride + 1;
  d.w_out = (d.w + 2 * padding - d.kw) / stride + 1;
  require(d.h_out >= 1 && d.w_out >= 1, ErrorKind::numeric,
          "conv2d: kernel larger than padded input");

  const std::int64_t hw = d.h_out * d.w_out;
  const std::int64_t ckk = d.c_g * d.kh * d.kw;
  const std::int64_t c_out_g = d.c_out / groups;

  std::vector<double> out(d.c_out * hw, 0.0);
  std::vector<double> col(ckk * hw);
  for (int g = 0; g < groups; ++g) {
    im2col_group(input.data().data(), g, d, col.data());
    kernels::gemm_nn(c_out_g, hw, ckk, kernel.data().data() + g * c_out_g * ckk,
                     col.data(), out.data() + g * c_out_g * hw);
  }
  const bool has_bias = bias.defined();
  if (has_bias) {
    require(bias.rank() == 1 && bias.dim(0) == d.c_out, ErrorKind::numeric,
            "conv2d: bias shape mismatch");
    for (std::int64_t co = 0; co < d.c_out; ++co) {
      const double b = bias.data()[co];
      double* p = out.data() + co * hw;
      for (std::int64_t i = 0; i < hw; ++i) p[i] += b;
    }
  }

  std::vector<Tensor> parents = {input, kernel};
  if (has_bias) parents.push_back(bias);

  return make_op(
      {d.c_out, d.h_out, d.w_out}, std::move(out), parents,
      [d, hw, ckk, c_out_g, has_bias](TensorNode& self) {
        const auto& in_v = self.parents[0]->value;
        const auto& k_v = self.parents[1]->value;
        auto& g_in = self.parents[0]->grad;
        auto& g_k = self.parents[1]->grad;
        // col is recomputed here instead of cached across the forward pass;
        // the gather is cheap next to the GEMMs and the buffers are large.
        std::vector<double> col(ckk * hw);
        std::vector<double> gcol(ckk * hw);
        for (int g = 0; g < d.groups; ++g) {
          im2col_group(in_v.data(), g, d, col.data());
          const double* gout = self.grad.data() + g * c_out_g * hw;
          kernels::gemm_nt(c_out_g, ckk, hw, gout, col.data(),
                           g_k.data() + g * c_out_g * ckk);
          std::fill(gcol.begin(), gcol.end(), 0.0);
          kernels::gemm_tn(c_out_g, ckk, hw, k_v.data() + g * c_out_g * ckk,
                           gout, gcol.data());
          col2im_group(gcol.data(), g, d, g_in.data());
        }
        if (has_bias) {
          auto& g_b = self.parents[2]->grad;
          for (std::int64_t co = 0; co < d.c_out; ++co) {
            const double* p = self.grad.data() + co * hw;
            double acc = 0.0;
            for (std::int64_t i = 0; i < hw; ++i) acc += p[i];
            g_b[co] += acc;
          }
        }
      });
}

}  // namespace vmbeam::nn
