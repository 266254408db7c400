// vmbeam/nn/checkpoint.hpp
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

#ifndef VMBEAM_NN_CHECKPOINT_HPP_
#define VMBEAM_NN_CHECKPOINT_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace vmbeam::nn {

// Versioned binary tensor container:
//   magic "VMBM" | u32 version (=1) | u32 count |
//   per tensor: u32 name_len | name bytes | u32 rank | u64 dims[rank] |
//               f64 payload (little-endian, row-major)
struct NamedTensor {
  std::string name;
  std::vector<std::int64_t> shape;
  std::vector<double> data;
};

void write_checkpoint(const std::string& path,
                      const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> read_checkpoint(const std::string& path);

}  // namespace vmbeam::nn

#endif  // VMBEAM_NN_CHECKPOINT_HPP_
