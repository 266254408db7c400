// vmbeam/nn/grad_check.cpp
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

#include "vmbeam/nn/grad_check.hpp"

#include <cmath>

#include "vmbeam/kernels/kernels.hpp"
#include "vmbeam/nn/ops.hpp"

namespace vmbeam::nn {

namespace {

std::vector<double> projection_weights(std::int64_t n) {
  CounterRng rng(0x67726164ULL, 7);  // fixed: the projection must not vary
  std::vector<double> w(n);
  for (auto& v : w) v = rng.uniform(0.5, 1.5);
  return w;
}

double project(const Tensor& out, const std::vector<double>& w) {
  require(!out.has_nonfinite(), ErrorKind::numeric,
          "grad_check: non-finite output");
  return kernels::dot(out.data().data(), w.data(), w.size());
}

}  // namespace

double grad_check(const std::function<Tensor(const Tensor&)>& fn,
                  const Tensor& input, double eps) {
  require(eps > 0.0, ErrorKind::numeric, "grad_check: eps must be positive");

  Tensor probe = Tensor::from_data(input.shape(), input.data(), true);
  Tensor out = fn(probe);
  auto w = projection_weights(out.numel());

  Tensor w_t = Tensor::from_data(out.shape(), w, false);
  Tensor projected = sum_all(mul(out, w_t));
  backward(projected);
  const std::vector<double> analytic = probe.grad();

  std::vector<double> base = input.data();
  double worst = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double keep = base[i];
    base[i] = keep + eps;
    const double plus =
        project(fn(Tensor::from_data(input.shape(), base, false)), w);
    base[i] = keep - eps;
    const double minus =
        project(fn(Tensor::from_data(input.shape(), base, false)), w);
    base[i] = keep;
    const double cd = (plus - minus) / (2.0 * eps);
    const double denom =
        std::max({std::abs(analytic[i]), std::abs(cd), 1e-8});
    worst = std::max(worst, std::abs(analytic[i] - cd) / denom);
  }
  return worst;
}

double grad_check_direction(const std::function<double()>& loss_value,
                            const std::function<Tensor()>& loss_graph,
                            Tensor param, std::uint64_t dir_seed, double eps) {
  CounterRng rng(dir_seed, 11);
  std::vector<double> dir(param.numel());
  double norm_sq = 0.0;
  for (auto& v : dir) {
    v = rng.normal();
    norm_sq += v * v;
  }
  const double inv_norm = 1.0 / std::sqrt(norm_sq);
  for (auto& v : dir) v *= inv_norm;

  param.zero_grad();
  Tensor loss = loss_graph();
  backward(loss);
  const double analytic =
      kernels::dot(param.grad().data(), dir.data(), dir.size());

  auto& data = param.mutable_data();
  const std::vector<double> keep = data;
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = keep[i] + eps * dir[i];
  const double plus = loss_value();
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = keep[i] - eps * dir[i];
  const double minus = loss_value();
  data = keep;

  const double cd = (plus - minus) / (2.0 * eps);
  return std::abs(analytic - cd) / std::max({std::abs(analytic), std::abs(cd), 1e-8});
}

}  // namespace vmbeam::nn
