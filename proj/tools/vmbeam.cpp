// tools/vmbeam.cpp
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

// Command-line front end:
//   vmbeam simulate --config cfg.json [--out DIR] [--seed N] [--force]
//   vmbeam train    --config cfg.json [--out DIR] [--seed N] [--ablation A]
//   vmbeam evaluate --config cfg.json [--checkpoint F] [--oracle-only]
//   vmbeam report   CSV... [--baseline NAME] [--out DIR]
// Exit codes: 0 ok, 2 config error, 3 data error, 4 numeric failure.

#include <CLI11.hpp>

#include <iostream>

#include "vmbeam/harness/harness.hpp"

using namespace vmbeam;

namespace {

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::config: return 2;
    case ErrorKind::data: return 3;
    case ErrorKind::numeric: return 4;
  }
  return 4;
}

struct CommonFlags {
  std::string config_path;
  std::string out_override;
  std::uint64_t seed_override = 0;
  bool seed_set = false;
  int threads = 0;
  std::string ablation;
};

harness::RunConfig resolve(const CommonFlags& flags) {
  auto cfg = harness::load_config(flags.config_path);
  if (!flags.out_override.empty()) cfg.output_dir = flags.out_override;
  if (flags.seed_set) cfg.seed = flags.seed_override;
  if (!flags.ablation.empty()) harness::apply_ablation(cfg, flags.ablation);
  if (flags.threads > 0) set_default_threads(flags.threads);
  std::cout << "effective config:\n" << harness::dump_config(cfg) << "\n";
  return cfg;
}

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_ablation) {
  cmd->add_option("--config", flags.config_path, "run configuration (JSON)")
      ->required();
  cmd->add_option("--out", flags.out_override, "override output_dir");
  cmd->add_option("--seed", flags.seed_override, "override seed")
      ->each([&flags](const std::string&) { flags.seed_set = true; });
  cmd->add_option("--threads", flags.threads,
                  "worker cap (falls back to VMBEAM_THREADS, then 1)");
  if (with_ablation) {
    cmd->add_option("--ablation", flags.ablation,
                    "one of: w/o-vm-loss, w/o-vm-signals, w/o-gan, "
                    "w/o-selection, w/o-dca");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"virtual-microphone beamforming toolkit"};
  app.require_subcommand(1);

  CommonFlags sim_flags, train_flags, eval_flags;
  bool force = false;
  bool oracle_only = false;
  std::string checkpoint;
  std::vector<std::string> report_csvs;
  std::string report_baseline = "unprocessed";
  std::string report_out = ".";

  auto* sim = app.add_subcommand("simulate", "generate a scene corpus");
  add_common(sim, sim_flags, false);
  sim->add_flag("--force", force, "overwrite an existing corpus");

  auto* train = app.add_subcommand("train", "run the training schedule");
  add_common(train, train_flags, true);

  auto* eval = app.add_subcommand("evaluate", "compute metrics over the corpus");
  add_common(eval, eval_flags, true);
  eval->add_option("--checkpoint", checkpoint,
                   "checkpoint to evaluate (default: <out>/checkpoint_latest.vmbm)");
  eval->add_flag("--oracle-only", oracle_only,
                 "evaluate only the unprocessed and oracle rows");

  auto* report = app.add_subcommand("report", "aggregate metric CSVs");
  report->add_option("csv", report_csvs, "metric CSV files")->required();
  report->add_option("--baseline", report_baseline,
                     "config name for the delta column");
  report->add_option("--out", report_out, "directory for plot-data files");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      auto cfg = resolve(sim_flags);
      harness::cmd_simulate(cfg, force, default_threads(), std::cout);
    } else if (train->parsed()) {
      auto cfg = resolve(train_flags);
      harness::cmd_train(cfg, default_threads(), std::cout);
    } else if (eval->parsed()) {
      auto cfg = resolve(eval_flags);
      harness::cmd_evaluate(cfg, checkpoint, oracle_only, default_threads(),
                            std::cout);
    } else if (report->parsed()) {
      std::cout << harness::cmd_report(report_csvs, report_baseline, report_out,
                                       1, 1000);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
