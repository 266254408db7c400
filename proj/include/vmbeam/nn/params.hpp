// vmbeam/nn/params.hpp
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

#ifndef VMBEAM_NN_PARAMS_HPP_
#define VMBEAM_NN_PARAMS_HPP_

#include <string>
#include <utility>
#include <vector>

#include "vmbeam/common.hpp"
#include "vmbeam/nn/tensor.hpp"

namespace vmbeam::nn {

// Named learnable tensors in insertion order. Order is the iteration order
// for the optimizer and the checkpoint writer, so runs are reproducible.
class ParamStore {
 public:
  Tensor add(const std::string& name, Tensor t) {
    require(!has(name), ErrorKind::config, "duplicate parameter: " + name);
    items_.emplace_back(name, t);
    return t;
  }

  bool has(const std::string& name) const {
    for (const auto& [n, t] : items_) {
      if (n == name) return true;
    }
    return false;
  }

  Tensor at(const std::string& name) const {
    for (const auto& [n, t] : items_) {
      if (n == name) return t;
    }
    throw Error(ErrorKind::data, "unknown parameter: " + name);
  }

  const std::vector<std::pair<std::string, Tensor>>& items() const {
    return items_;
  }

  std::vector<Tensor> tensors() const {
    std::vector<Tensor> out;
    out.reserve(items_.size());
    for (const auto& [n, t] : items_) out.push_back(t);
    return out;
  }

  std::int64_t total_count() const {
    std::int64_t n = 0;
    for (const auto& [name, t] : items_) n += t.numel();
    return n;
  }

  void zero_grads() {
    for (auto& [n, t] : items_) t.zero_grad();
  }

 private:
  std::vector<std::pair<std::string, Tensor>> items_;
};

// Uniform fan-in init (He-style bound sqrt(1/fan_in)), deterministic per rng.
Tensor init_uniform(std::vector<std::int64_t> shape, std::int64_t fan_in,
                    CounterRng& rng);

}  // namespace vmbeam::nn

#endif  // VMBEAM_NN_PARAMS_HPP_
