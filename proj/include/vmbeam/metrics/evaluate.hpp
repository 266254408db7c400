// vmbeam/metrics/evaluate.hpp
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

#ifndef VMBEAM_METRICS_EVALUATE_HPP_
#define VMBEAM_METRICS_EVALUATE_HPP_

#include <functional>
#include <string>
#include <vector>

#include "vmbeam/dsp/stft.hpp"
#include "vmbeam/scene/manifest.hpp"

namespace vmbeam::metrics {

struct MetricRecord {
  std::string scene_id;
  std::string config;
  double si_sdr_db = 0.0;
  double snr_db = 0.0;
  double stoi_score = 0.0;
  double runtime_ms = 0.0;
};

// A pipeline maps a loaded scene to a time-domain estimate of the reference
// target (any length >= the reconstructable interior; it is trimmed here).
struct NamedPipeline {
  std::string name;
  std::function<std::vector<double>(const scene::AudioScene&)> run;
};

// Rebuilds an AudioScene from the corpus WAVs (n_interf/n_noise stay empty).
scene::AudioScene load_scene_audio(const scene::CorpusManifest& manifest,
                                   int index, const std::string& dir);

// Per-(scene, pipeline) metrics against the direct-path reference, trimmed
// to the STFT-reconstructable interior. Deterministic; runtime_ms is 0
// unless timing is requested.
std::vector<MetricRecord> evaluate_batch(
    const scene::CorpusManifest& manifest, const std::string& dir,
    const std::vector<NamedPipeline>& pipelines, const dsp::StftConfig& stft,
    bool timing, int threads);

// header: scene_id,config,si_sdr_db,snr_db,stoi,runtime_ms
void write_metrics_csv(const std::string& path,
                       const std::vector<MetricRecord>& records);
std::vector<MetricRecord> read_metrics_csv(const std::string& path);

// Per-config means with seeded bootstrap intervals (given resample count);
// PESQ is reported as "unavailable" so the table shape matches the usual
// four-metric layout.
std::string summary_json(const std::vector<MetricRecord>& records,
                         int resamples, std::uint64_t seed);

}  // namespace vmbeam::metrics

#endif  // VMBEAM_METRICS_EVALUATE_HPP_
