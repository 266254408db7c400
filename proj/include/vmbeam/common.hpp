// vmbeam/common.hpp
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

#ifndef VMBEAM_COMMON_HPP_
#define VMBEAM_COMMON_HPP_

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vmbeam {

// Error categories map onto the CLI exit codes: config=2, data=3, numeric=4.
enum class ErrorKind { config, data, numeric };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& msg) {
  if (!cond) throw Error(kind, msg);
}

// Counter-based splittable PRNG. A stream is a pure function of
// (key, stream, counter), so per-scene / per-purpose streams are independent
// of how many draws any other stream made. Two finalizer rounds give
// avalanche comparable to splitmix64.
class CounterRng {
 public:
  CounterRng(std::uint64_t key, std::uint64_t stream = 0)
      : key_(key), stream_(stream) {}

  CounterRng fork(std::uint64_t substream) const {
    return CounterRng(key_, mix(stream_ + 0x9e3779b97f4a7c15ULL, substream));
  }

  std::uint64_t next_u64() {
    return mix(key_ ^ mix(stream_, 0xa0761d6478bd642fULL), counter_++);
  }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    // Rejection-free modulo is fine here: span is tiny vs 2^64 so bias is
    // below 2^-50 and irrelevant to the statistical tests we run.
    return lo + static_cast<std::int64_t>(next_u64() % span);
  }

  // Standard normal via Box-Muller.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  std::uint64_t counter() const { return counter_; }
  void set_counter(std::uint64_t c) { counter_ = c; }
  std::uint64_t key() const { return key_; }
  std::uint64_t stream() const { return stream_; }

  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

// Runs fn(i) for i in [0, count). Work items must be independent; callers do
// any reduction in index order afterwards so results do not depend on the
// worker count. threads <= 1 runs inline.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& fn);

// Global worker default: --threads flag or VMBEAM_THREADS, else 1.
int default_threads();
void set_default_threads(int threads);

inline bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace vmbeam

#endif  // VMBEAM_COMMON_HPP_
