// vmbeam/scene/sources.hpp
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

#ifndef VMBEAM_SCENE_SOURCES_HPP_
#define VMBEAM_SCENE_SOURCES_HPP_

#include <cstdint>
#include <vector>

#include "vmbeam/common.hpp"

namespace vmbeam::scene {

// Bundled deterministic source material. `speech` is a harmonic complex with
// drifting pitch, formant-shaped partials and syllabic on/off bursts so STOI
// has speech-active frames to work with; `noise` is filtered noise with slow
// amplitude modulation. Both are RMS-normalized to 1.
enum class SourceKind { speech, noise };

std::vector<double> synth_source(SourceKind kind, std::int64_t num_samples,
                                 double fs, CounterRng rng);

// Repeats x until it covers num_samples (identity when long enough).
std::vector<double> loop_pad(const std::vector<double>& x,
                             std::int64_t num_samples);

}  // namespace vmbeam::scene

#endif  // VMBEAM_SCENE_SOURCES_HPP_
