// vmbeam/scene/manifest.hpp
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

#ifndef VMBEAM_SCENE_MANIFEST_HPP_
#define VMBEAM_SCENE_MANIFEST_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vmbeam/scene/scene.hpp"

namespace vmbeam::scene {

// Line-delimited JSON: a schema-versioned header record followed by one
// record per scene. Audio is referenced by path relative to the manifest.

struct SceneFiles {
  std::string y, x, x_rev, n;
};

struct SceneRecord {
  SceneSpec spec;
  SceneFiles files;
  std::map<std::string, std::uint64_t> checksums;  // keys y/x/x_rev/n
  double rt60_measured = -1.0;  // < 0 when the decay range was not reached
  double rt60_eyring = 0.0;
};

struct CorpusManifest {
  std::uint64_t seed = 0;
  Task task = Task::omni;
  SceneRanges ranges;
  room::ArrayGeometry array;
  std::string array_kind;  // informational ("circular_plus_vertical", ...)
  std::vector<SceneRecord> scenes;
};

void write_manifest(const std::string& path, const CorpusManifest& manifest);
CorpusManifest read_manifest(const std::string& path);

// Checks that every referenced WAV exists and matches its checksum.
// Throws ErrorKind::data naming the offending path.
void verify_audio(const CorpusManifest& manifest, const std::string& dir);

std::uint64_t fnv1a64_file(const std::string& path);
std::uint64_t fnv1a64(const void* data, std::size_t size);

}  // namespace vmbeam::scene

#endif  // VMBEAM_SCENE_MANIFEST_HPP_
