// vmbeam/kernels/kernels_neon.cpp
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

// NEON variants (aarch64, where NEON is baseline). 2-wide f64 lanes.

#include "vmbeam/kernels/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace vmbeam::kernels {

namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double sum_sq_neon(const double* a, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t v = vld1q_f64(a + i);
    acc = vfmaq_f64(acc, v, v);
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += a[i] * a[i];
  return s;
}

void add_neon(const double* a, const double* b, double* dst, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(dst + i, vaddq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  }
  for (; i < n; ++i) dst[i] = a[i] + b[i];
}

void sub_neon(const double* a, const double* b, double* dst, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(dst + i, vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  }
  for (; i < n; ++i) dst[i] = a[i] - b[i];
}

void mul_neon(const double* a, const double* b, double* dst, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(dst + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  }
  for (; i < n; ++i) dst[i] = a[i] * b[i];
}

void cmul_conj_acc_neon(double* dre, double* dim, const double* are,
                        const double* aim, const double* bre,
                        const double* bim, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t ar = vld1q_f64(are + i);
    float64x2_t ai = vld1q_f64(aim + i);
    float64x2_t br = vld1q_f64(bre + i);
    float64x2_t bi = vld1q_f64(bim + i);
    float64x2_t re = vld1q_f64(dre + i);
    float64x2_t im = vld1q_f64(dim + i);
    re = vfmaq_f64(re, ar, br);
    re = vfmaq_f64(re, ai, bi);
    im = vfmaq_f64(im, ai, br);
    im = vfmsq_f64(im, ar, bi);
    vst1q_f64(dre + i, re);
    vst1q_f64(dim + i, im);
  }
  for (; i < n; ++i) {
    dre[i] += are[i] * bre[i] + aim[i] * bim[i];
    dim[i] += aim[i] * bre[i] - are[i] * bim[i];
  }
}

const KernelTable kNeonTable = {
    dot_neon,  axpy_neon, sum_sq_neon,        add_neon,
    sub_neon,  mul_neon,  cmul_conj_acc_neon, "neon",
};

}  // namespace

const KernelTable* neon_table() { return &kNeonTable; }

}  // namespace vmbeam::kernels

#endif  // __aarch64__
