// vmbeam/kernels/kernels.hpp
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

#ifndef VMBEAM_KERNELS_KERNELS_HPP_
#define VMBEAM_KERNELS_KERNELS_HPP_

#include <cstddef>
#include <string>

namespace vmbeam::kernels {

// Data-parallel inner loops shared by the tensor engine, the beamformer and
// the metrics. Every kernel has a scalar reference implementation and may
// have SIMD variants (AVX2 on x86-64, NEON on aarch64) selected once at
// runtime. Variants are equivalence-tested against the scalar reference;
// accumulation order within a kernel is left-to-right in all variants so
// results agree to FMA rounding.

struct KernelTable {
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  double (*sum_sq)(const double*, std::size_t);
  void (*add)(const double*, const double*, double*, std::size_t);
  void (*sub)(const double*, const double*, double*, std::size_t);
  void (*mul)(const double*, const double*, double*, std::size_t);
  // d += a * conj(b), split re/im arrays
  void (*cmul_conj_acc)(double*, double*, const double*, const double*,
                        const double*, const double*, std::size_t);
  const char* name;
};

// Active table. Resolved on first use: honors VMBEAM_SIMD=scalar|avx2|neon|auto.
const KernelTable& active();

// Force a backend by name ("scalar", "avx2", "neon", "auto").
// Throws std::runtime_error if the backend is unavailable on this CPU.
void force_backend(const std::string& name);

// Tables for direct A/B testing.
const KernelTable& scalar_table();
const KernelTable* simd_table();  // nullptr when no SIMD variant is usable

inline double dot(const double* a, const double* b, std::size_t n) {
  return active().dot(a, b, n);
}
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active().axpy(alpha, x, y, n);
}
inline double sum_sq(const double* a, std::size_t n) {
  return active().sum_sq(a, n);
}
inline void add(const double* a, const double* b, double* dst, std::size_t n) {
  active().add(a, b, dst, n);
}
inline void sub(const double* a, const double* b, double* dst, std::size_t n) {
  active().sub(a, b, dst, n);
}
inline void mul(const double* a, const double* b, double* dst, std::size_t n) {
  active().mul(a, b, dst, n);
}
inline void cmul_conj_acc(double* dre, double* dim, const double* are,
                          const double* aim, const double* bre,
                          const double* bim, std::size_t n) {
  active().cmul_conj_acc(dre, dim, are, aim, bre, bim, n);
}

// Small GEMM helpers built on the dispatched primitives. All matrices are
// dense row-major with no padding.

// C[m x n] += A[m x k] * B[k x n]
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c);

// C[m x n] += A[m x k] * B^T where B is [n x k]
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c);

// C[p x n] += A^T * B where A is [m x p], B is [m x n]
void gemm_tn(std::size_t m, std::size_t p, std::size_t n, const double* a,
             const double* b, double* c);

}  // namespace vmbeam::kernels

#endif  // VMBEAM_KERNELS_KERNELS_HPP_
