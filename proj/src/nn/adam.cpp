// vmbeam/nn/adam.cpp
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

#include "vmbeam/nn/adam.hpp"

#include <cmath>

namespace vmbeam::nn {

Tensor init_uniform(std::vector<std::int64_t> shape, std::int64_t fan_in,
                    CounterRng& rng) {
  std::int64_t n = 1;
  for (auto d : shape) n *= d;
  const double bound = std::sqrt(1.0 / static_cast<double>(std::max<std::int64_t>(fan_in, 1)));
  std::vector<double> data(n);
  for (auto& v : data) v = rng.uniform(-bound, bound);
  return Tensor::from_data(std::move(shape), std::move(data), true);
}

void adam_step(std::vector<Tensor>& params, AdamState& state) {
  if (state.first_moment.empty()) {
    state.first_moment.resize(params.size());
    state.second_moment.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      state.first_moment[i].assign(params[i].numel(), 0.0);
      state.second_moment[i].assign(params[i].numel(), 0.0);
    }
  }
  require(state.first_moment.size() == params.size(), ErrorKind::numeric,
          "adam_step: state/parameter count mismatch");

  // Validate everything before mutating anything: a bad gradient must leave
  // parameters and moments untouched.
  for (std::size_t i = 0; i < params.size(); ++i) {
    require(state.first_moment[i].size() ==
                static_cast<std::size_t>(params[i].numel()),
            ErrorKind::numeric, "adam_step: moment shape mismatch");
    const auto& g = params[i].node()->grad;
    // A parameter the loss never reached keeps an empty grad buffer and is
    // treated as zero gradient below.
    require(g.empty() || g.size() == static_cast<std::size_t>(params[i].numel()),
            ErrorKind::numeric, "adam_step: gradient shape mismatch");
    require(all_finite(g), ErrorKind::numeric,
            "adam_step: non-finite gradient, step rejected");
  }

  const auto& cfg = state.cfg;
  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);

  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i].mutable_data();
    const auto& g = params[i].node()->grad;
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double gj = g.empty() ? 0.0 : g[j];
      m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * gj;
      v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * gj * gj;
      const double m_hat = m[j] / bc1;
      const double v_hat = v[j] / bc2;
      p[j] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
    }
  }
}

}  // namespace vmbeam::nn
