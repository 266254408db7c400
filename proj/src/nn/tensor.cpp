// vmbeam/nn/tensor.cpp
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

#include "vmbeam/nn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace vmbeam::nn {

namespace {

NodePtr make_leaf(std::vector<std::int64_t> shape, std::vector<double> data,
                  bool requires_grad) {
  auto node = std::make_shared<TensorNode>();
  node->shape = std::move(shape);
  node->value = std::move(data);
  node->requires_grad = requires_grad;
  std::int64_t n = 1;
  for (auto d : node->shape) {
    require(d > 0, ErrorKind::numeric, "tensor dims must be positive");
    n *= d;
  }
  require(static_cast<std::size_t>(n) == node->value.size(), ErrorKind::numeric,
          "tensor data length does not match shape");
  return node;
}

}  // namespace

Tensor Tensor::zeros(std::vector<std::int64_t> shape, bool requires_grad) {
  std::int64_t n = 1;
  for (auto d : shape) n *= d;
  return Tensor(make_leaf(std::move(shape), std::vector<double>(n, 0.0),
                          requires_grad));
}

Tensor Tensor::full(std::vector<std::int64_t> shape, double fill,
                    bool requires_grad) {
  std::int64_t n = 1;
  for (auto d : shape) n *= d;
  return Tensor(make_leaf(std::move(shape), std::vector<double>(n, fill),
                          requires_grad));
}

Tensor Tensor::from_data(std::vector<std::int64_t> shape,
                         std::vector<double> data, bool requires_grad) {
  return Tensor(make_leaf(std::move(shape), std::move(data), requires_grad));
}

Tensor Tensor::scalar(double v, bool requires_grad) {
  return Tensor(make_leaf({1}, {v}, requires_grad));
}

void backward(const Tensor& loss) {
  require(loss.defined() && loss.numel() == 1, ErrorKind::numeric,
          "backward() requires a scalar loss");
  require(std::isfinite(loss.item()), ErrorKind::numeric,
          "backward() on non-finite loss");

  // Iterative post-order DFS; the recorded graph is a DAG by construction
  // (ops only reference already-built nodes), assert no cycle anyway via the
  // in-progress set.
  std::vector<TensorNode*> order;
  std::unordered_set<TensorNode*> done;
  std::unordered_set<TensorNode*> in_progress;
  std::vector<std::pair<TensorNode*, std::size_t>> stack;
  stack.emplace_back(loss.node().get(), 0);
  in_progress.insert(loss.node().get());
  while (!stack.empty()) {
    auto& [node, next_child] = stack.back();
    if (next_child < node->parents.size()) {
      TensorNode* child = node->parents[next_child++].get();
      if (done.count(child)) continue;
      require(!in_progress.count(child), ErrorKind::numeric,
              "cycle detected in autodiff graph");
      in_progress.insert(child);
      stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      done.insert(node);
      in_progress.erase(node);
      stack.pop_back();
    }
  }

  loss.node()->ensure_grad();
  loss.node()->grad[0] = 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    TensorNode* node = *it;
    if (!node->backward_fn || node->grad.empty()) continue;
    for (auto& p : node->parents) p->ensure_grad();
    node->backward_fn(*node);
  }
}

}  // namespace vmbeam::nn
