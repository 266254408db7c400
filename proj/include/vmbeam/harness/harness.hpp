// vmbeam/harness/harness.hpp
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

#ifndef VMBEAM_HARNESS_HARNESS_HPP_
#define VMBEAM_HARNESS_HARNESS_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "vmbeam/harness/config.hpp"
#include "vmbeam/metrics/evaluate.hpp"

namespace vmbeam::harness {

struct SimulateResult {
  std::string corpus_dir;
  std::string manifest_path;
  int scenes = 0;
  double rt60_min = 0.0, rt60_max = 0.0;
};

// Generates the corpus under <output_dir>/corpus. Refuses to overwrite an
// existing manifest unless force is set.
SimulateResult cmd_simulate(const RunConfig& cfg, bool force, int threads,
                            std::ostream& log);

struct TrainResult {
  std::string checkpoint_path;  // latest
  std::string log_path;
  std::int64_t steps_done = 0;
};

// Runs the configured phase schedule; resumes bit-exactly from
// <output_dir>/checkpoint_latest.vmbm when present.
TrainResult cmd_train(const RunConfig& cfg, int threads, std::ostream& log);

struct EvaluateResult {
  std::string csv_path;
  std::string summary_path;
  std::vector<metrics::MetricRecord> records;
};

// Evaluates the oracle rows plus (unless oracle_only) every configured
// pipeline against the corpus; writes metrics.csv and summary.json.
EvaluateResult cmd_evaluate(const RunConfig& cfg, const std::string& checkpoint,
                            bool oracle_only, int threads, std::ostream& log);

// Aggregates one or more metric CSVs into an aligned comparison table plus
// per-metric plot-data files (config, mean, lo, hi). Returns the table text.
std::string cmd_report(const std::vector<std::string>& csv_paths,
                       const std::string& baseline,
                       const std::string& out_dir, std::uint64_t seed,
                       int resamples);

// Evaluation pipeline assembly, shared with the acceptance suite.
std::vector<metrics::NamedPipeline> build_oracle_pipelines(const RunConfig& cfg);
std::vector<metrics::NamedPipeline> build_model_pipelines(
    const RunConfig& cfg, const std::string& checkpoint_path);

}  // namespace vmbeam::harness

#endif  // VMBEAM_HARNESS_HARNESS_HPP_
