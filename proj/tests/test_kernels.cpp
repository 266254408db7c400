// tests/test_kernels.cpp
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "vmbeam/common.hpp"
#include "vmbeam/kernels/kernels.hpp"

using namespace vmbeam;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

// FMA variants round differently; near-cancellation results are compared
// against the accumulation scale rather than the (tiny) final value.
double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
}

}  // namespace

TEST_CASE("simd variants match the scalar reference") {
  const auto* simd = kernels::simd_table();
  if (!simd) {
    MESSAGE("no SIMD backend on this CPU, nothing to compare");
    return;
  }
  const auto& ref = kernels::scalar_table();
  // Sizes straddle the vector width boundaries, including remainders.
  for (std::size_t n : {1u, 3u, 4u, 7u, 8u, 31u, 128u, 1001u}) {
    auto a = random_vec(n, 11 * n + 1);
    auto b = random_vec(n, 13 * n + 2);

    CHECK(rel_err(ref.dot(a.data(), b.data(), n),
                  simd->dot(a.data(), b.data(), n)) < 1e-13);
    CHECK(rel_err(ref.sum_sq(a.data(), n), simd->sum_sq(a.data(), n)) < 1e-13);

    auto y1 = random_vec(n, 17 * n + 3);
    auto y2 = y1;
    ref.axpy(0.37, a.data(), y1.data(), n);
    simd->axpy(0.37, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(rel_err(y1[i], y2[i]) < 1e-13);

    std::vector<double> d1(n), d2(n);
    ref.add(a.data(), b.data(), d1.data(), n);
    simd->add(a.data(), b.data(), d2.data(), n);
    CHECK(d1 == d2);
    ref.sub(a.data(), b.data(), d1.data(), n);
    simd->sub(a.data(), b.data(), d2.data(), n);
    CHECK(d1 == d2);
    ref.mul(a.data(), b.data(), d1.data(), n);
    simd->mul(a.data(), b.data(), d2.data(), n);
    CHECK(d1 == d2);

    auto ai = random_vec(n, 19 * n + 4);
    auto bi = random_vec(n, 23 * n + 5);
    std::vector<double> r1(n, 0.1), i1(n, -0.2), r2(n, 0.1), i2(n, -0.2);
    ref.cmul_conj_acc(r1.data(), i1.data(), a.data(), ai.data(), b.data(),
                      bi.data(), n);
    simd->cmul_conj_acc(r2.data(), i2.data(), a.data(), ai.data(), b.data(),
                        bi.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(rel_err(r1[i], r2[i]) < 1e-13);
      CHECK(rel_err(i1[i], i2[i]) < 1e-13);
    }
  }
}

TEST_CASE("cmul_conj_acc computes d += a * conj(b)") {
  // (1+2i) * conj(3-4i) = (1+2i)(3+4i) = 3+4i+6i-8 = -5+10i
  double dre = 1.0, dim = 1.0;
  const double ar = 1.0, ai = 2.0, br = 3.0, bi = -4.0;
  kernels::cmul_conj_acc(&dre, &dim, &ar, &ai, &br, &bi, 1);
  CHECK(dre == doctest::Approx(1.0 - 5.0));
  CHECK(dim == doctest::Approx(1.0 + 10.0));
}

TEST_CASE("gemm helpers against index-by-index reference") {
  const std::size_t m = 5, n = 7, k = 4;
  auto a = random_vec(m * k, 101);
  auto b = random_vec(k * n, 102);
  auto bt = std::vector<double>(n * k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) bt[i * k + j] = b[j * n + i];

  std::vector<double> want(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t l = 0; l < k; ++l)
      for (std::size_t j = 0; j < n; ++j)
        want[i * n + j] += a[i * k + l] * b[l * n + j];

  std::vector<double> c(m * n, 0.0);
  kernels::gemm_nn(m, n, k, a.data(), b.data(), c.data());
  for (std::size_t i = 0; i < m * n; ++i) CHECK(rel_err(c[i], want[i]) < 1e-12);

  std::fill(c.begin(), c.end(), 0.0);
  kernels::gemm_nt(m, n, k, a.data(), bt.data(), c.data());
  for (std::size_t i = 0; i < m * n; ++i) CHECK(rel_err(c[i], want[i]) < 1e-12);

  // gemm_tn: C[p x n] += A^T B with A [m x p]
  const std::size_t p = 3;
  auto a2 = random_vec(m * p, 103);
  auto b2 = random_vec(m * n, 104);
  std::vector<double> want2(p * n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t q = 0; q < p; ++q)
      for (std::size_t j = 0; j < n; ++j)
        want2[q * n + j] += a2[i * p + q] * b2[i * n + j];
  std::vector<double> c2(p * n, 0.0);
  kernels::gemm_tn(m, p, n, a2.data(), b2.data(), c2.data());
  for (std::size_t i = 0; i < p * n; ++i)
    CHECK(rel_err(c2[i], want2[i]) < 1e-12);
}

TEST_CASE("backend forcing round-trips") {
  const std::string active = kernels::active().name;
  kernels::force_backend("scalar");
  CHECK(std::string(kernels::active().name) == "scalar");
  kernels::force_backend("auto");
  if (kernels::simd_table()) {
    CHECK(std::string(kernels::active().name) ==
          kernels::simd_table()->name);
  }
  CHECK_THROWS(kernels::force_backend("not-a-backend"));
  kernels::force_backend(active);
}
