// vmbeam/kernels/kernels.cpp
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

#include "vmbeam/kernels/kernels.hpp"

#include <cstdlib>
#include <mutex>
#include <stdexcept>

namespace vmbeam::kernels {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sum_sq_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
  return acc;
}

void add_scalar(const double* a, const double* b, double* dst, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] + b[i];
}

void sub_scalar(const double* a, const double* b, double* dst, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] - b[i];
}

void mul_scalar(const double* a, const double* b, double* dst, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] * b[i];
}

void cmul_conj_acc_scalar(double* dre, double* dim, const double* are,
                          const double* aim, const double* bre,
                          const double* bim, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    dre[i] += are[i] * bre[i] + aim[i] * bim[i];
    dim[i] += aim[i] * bre[i] - are[i] * bim[i];
  }
}

const KernelTable kScalarTable = {
    dot_scalar,  axpy_scalar, sum_sq_scalar,        add_scalar,
    sub_scalar,  mul_scalar,  cmul_conj_acc_scalar, "scalar",
};

const KernelTable* g_active = nullptr;
std::once_flag g_init_flag;

const KernelTable* pick_from_env() {
  const char* env = std::getenv("VMBEAM_SIMD");
  std::string want = env ? env : "auto";
  if (want == "scalar") return &kScalarTable;
  const KernelTable* simd = simd_table();
  if (want == "auto") return simd ? simd : &kScalarTable;
  if (simd && want == simd->name) return simd;
  // Unknown or unavailable request: fall back rather than abort, the env
  // var is a debugging aid.
  return simd ? simd : &kScalarTable;
}

}  // namespace

#if defined(__x86_64__) || defined(_M_X64)
const KernelTable* avx2_table_if_supported();  // kernels_avx2.cpp
const KernelTable* simd_table() { return avx2_table_if_supported(); }
#elif defined(__aarch64__)
const KernelTable* neon_table();  // kernels_neon.cpp
const KernelTable* simd_table() { return neon_table(); }
#else
const KernelTable* simd_table() { return nullptr; }
#endif

const KernelTable& scalar_table() { return kScalarTable; }

const KernelTable& active() {
  std::call_once(g_init_flag, [] { g_active = pick_from_env(); });
  return *g_active;
}

void force_backend(const std::string& name) {
  active();  // ensure initialized
  if (name == "scalar") {
    g_active = &kScalarTable;
    return;
  }
  if (name == "auto") {
    const KernelTable* simd = simd_table();
    g_active = simd ? simd : &kScalarTable;
    return;
  }
  const KernelTable* simd = simd_table();
  if (simd && name == simd->name) {
    g_active = simd;
    return;
  }
  throw std::runtime_error("kernel backend unavailable: " + name);
}

void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c) {
  // axpy form: row l of B streams once per output row batch, C rows stay hot.
  for (std::size_t l = 0; l < k; ++l) {
    const double* brow = b + l * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double alpha = a[i * k + l];
      if (alpha != 0.0) axpy(alpha, brow, c + i * n, n);
    }
  }
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      c[i * n + j] += dot(arow, b + j * k, k);
    }
  }
}

void gemm_tn(std::size_t m, std::size_t p, std::size_t n, const double* a,
             const double* b, double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* brow = b + i * n;
    for (std::size_t q = 0; q < p; ++q) {
      const double alpha = a[i * p + q];
      if (alpha != 0.0) axpy(alpha, brow, c + q * n, n);
    }
  }
}

}  // namespace vmbeam::kernels
