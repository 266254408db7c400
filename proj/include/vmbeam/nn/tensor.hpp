// vmbeam/nn/tensor.hpp
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

#ifndef VMBEAM_NN_TENSOR_HPP_
#define VMBEAM_NN_TENSOR_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "vmbeam/common.hpp"

namespace vmbeam::nn {

// Dense float64 tensor with define-by-run reverse-mode differentiation.
// Values are immutable once an op has consumed them; gradients accumulate
// into the grad buffer during backward(). The recorded graph hangs off
// shared_ptr parents, so a step's graph is freed when its tensors go out of
// scope.

struct TensorNode;
using NodePtr = std::shared_ptr<TensorNode>;

struct TensorNode {
  std::vector<std::int64_t> shape;
  std::vector<double> value;
  std::vector<double> grad;  // allocated lazily, same length as value
  bool requires_grad = false;
  std::vector<NodePtr> parents;
  // Propagates this->grad into parents' grads. Null for leaves.
  std::function<void(TensorNode&)> backward_fn;

  std::int64_t numel() const {
    std::int64_t n = 1;
    for (auto d : shape) n *= d;
    return n;
  }
  void ensure_grad() {
    if (grad.empty()) grad.assign(value.size(), 0.0);
  }
};

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(NodePtr node) : node_(std::move(node)) {}

  // Leaf constructors.
  static Tensor zeros(std::vector<std::int64_t> shape, bool requires_grad = false);
  static Tensor full(std::vector<std::int64_t> shape, double fill,
                     bool requires_grad = false);
  static Tensor from_data(std::vector<std::int64_t> shape,
                          std::vector<double> data, bool requires_grad = false);
  static Tensor scalar(double v, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const std::vector<std::int64_t>& shape() const { return node_->shape; }
  std::int64_t numel() const { return node_->numel(); }
  std::int64_t dim(int i) const { return node_->shape.at(i); }
  int rank() const { return static_cast<int>(node_->shape.size()); }
  bool requires_grad() const { return node_->requires_grad; }

  const std::vector<double>& data() const { return node_->value; }
  std::vector<double>& mutable_data() { return node_->value; }
  const std::vector<double>& grad() const { return node_->grad; }

  double item() const {
    require(numel() == 1, ErrorKind::numeric, "item() on non-scalar tensor");
    return node_->value[0];
  }

  void zero_grad() {
    if (!node_->grad.empty()) node_->grad.assign(node_->value.size(), 0.0);
  }

  // True if any value is NaN or Inf.
  bool has_nonfinite() const { return !all_finite(node_->value); }

  NodePtr node() const { return node_; }

 private:
  NodePtr node_;
};

// Runs reverse-mode accumulation from a scalar loss. Seeds d(loss)/d(loss)=1
// and walks the recorded graph once in reverse topological order. Throws if
// loss is not scalar or not finite.
void backward(const Tensor& loss);

inline bool same_shape(const Tensor& a, const Tensor& b) {
  return a.shape() == b.shape();
}

}  // namespace vmbeam::nn

#endif  // VMBEAM_NN_TENSOR_HPP_
