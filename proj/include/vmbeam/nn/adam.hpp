// vmbeam/nn/adam.hpp
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

#ifndef VMBEAM_NN_ADAM_HPP_
#define VMBEAM_NN_ADAM_HPP_

#include <vector>

#include "vmbeam/nn/params.hpp"
#include "vmbeam/nn/tensor.hpp"

namespace vmbeam::nn {

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam over an ordered parameter group. Moments are keyed by
// position, so the parameter list must be stable across steps (ParamStore
// guarantees this).
struct AdamState {
  AdamConfig cfg;
  std::int64_t step_count = 0;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
};

// Applies one update in place using each parameter's accumulated grad.
// A non-finite gradient rejects the whole step (no parameter is touched)
// and throws ErrorKind::numeric.
void adam_step(std::vector<Tensor>& params, AdamState& state);

inline void adam_step(ParamStore& store, AdamState& state) {
  auto tensors = store.tensors();
  adam_step(tensors, state);
}

}  // namespace vmbeam::nn

#endif  // VMBEAM_NN_ADAM_HPP_
