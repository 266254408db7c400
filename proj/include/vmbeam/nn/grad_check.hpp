// vmbeam/nn/grad_check.hpp
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

#ifndef VMBEAM_NN_GRAD_CHECK_HPP_
#define VMBEAM_NN_GRAD_CHECK_HPP_

#include <functional>

#include "vmbeam/nn/tensor.hpp"

namespace vmbeam::nn {

// Compares reverse-mode gradients of fn against central finite differences,
// element by element over the input. Non-scalar outputs are reduced through
// a fixed random projection so one backward covers the full Jacobian action.
// Returns max over elements of |analytic - cd| / max(|analytic|, |cd|, 1e-8).
// Throws ErrorKind::numeric if fn produces non-finite values.
double grad_check(const std::function<Tensor(const Tensor&)>& fn,
                  const Tensor& input, double eps);

// Directional derivative check over a parameter tensor: compares
// dot(grad_p, u) for a random unit direction u against central differences
// of loss_fn while perturbing p along u. Used for composed-model checks where
// element-wise probing of every parameter would be wasteful.
double grad_check_direction(const std::function<double()>& loss_value,
                            const std::function<Tensor()>& loss_graph,
                            Tensor param, std::uint64_t dir_seed, double eps);

}  // namespace vmbeam::nn

#endif  // VMBEAM_NN_GRAD_CHECK_HPP_
