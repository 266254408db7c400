// vmbeam/nn/checkpoint.cpp
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

#include "vmbeam/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "vmbeam/common.hpp"

namespace vmbeam::nn {

namespace {

constexpr char kMagic[4] = {'V', 'M', 'B', 'M'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in, const std::string& what) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  require(static_cast<bool>(in), ErrorKind::data,
          "checkpoint truncated while reading " + what);
  return v;
}

}  // namespace

void write_checkpoint(const std::string& path,
                      const std::vector<NamedTensor>& tensors) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorKind::data, "cannot open checkpoint for write: " + path);
  out.write(kMagic, 4);
  write_pod<std::uint32_t>(out, kVersion);
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(t.shape.size()));
    std::int64_t n = 1;
    for (auto d : t.shape) {
      write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(d));
      n *= d;
    }
    require(static_cast<std::size_t>(n) == t.data.size(), ErrorKind::data,
            "checkpoint tensor " + t.name + " has inconsistent shape");
    out.write(reinterpret_cast<const char*>(t.data.data()),
              static_cast<std::streamsize>(t.data.size() * sizeof(double)));
  }
  require(out.good(), ErrorKind::data, "checkpoint write failed: " + path);
}

std::vector<NamedTensor> read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::data, "cannot open checkpoint: " + path);
  char magic[4];
  in.read(magic, 4);
  require(in.good() && std::memcmp(magic, kMagic, 4) == 0, ErrorKind::data,
          "bad checkpoint magic in " + path);
  const auto version = read_pod<std::uint32_t>(in, "version");
  require(version == kVersion, ErrorKind::data,
          "unsupported checkpoint version in " + path);
  const auto count = read_pod<std::uint32_t>(in, "tensor count");
  std::vector<NamedTensor> tensors(count);
  for (auto& t : tensors) {
    const auto name_len = read_pod<std::uint32_t>(in, "name length");
    t.name.resize(name_len);
    in.read(t.name.data(), name_len);
    require(static_cast<bool>(in), ErrorKind::data, "checkpoint truncated in name");
    const auto rank = read_pod<std::uint32_t>(in, "rank");
    t.shape.resize(rank);
    std::int64_t n = 1;
    for (auto& d : t.shape) {
      d = static_cast<std::int64_t>(read_pod<std::uint64_t>(in, "dim"));
      require(d > 0, ErrorKind::data, "checkpoint has non-positive dim");
      n *= d;
    }
    t.data.resize(n);
    in.read(reinterpret_cast<char*>(t.data.data()),
            static_cast<std::streamsize>(t.data.size() * sizeof(double)));
    require(static_cast<bool>(in), ErrorKind::data,
            "checkpoint truncated in payload of " + t.name);
  }
  return tensors;
}

}  // namespace vmbeam::nn
