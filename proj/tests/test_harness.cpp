// tests/test_harness.cpp
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "vmbeam/harness/harness.hpp"
#include "vmbeam/nn/checkpoint.hpp"

using namespace vmbeam;
namespace fs = std::filesystem;

namespace {

std::string small_config(const std::string& out_dir, int steps = 2) {
  return R"({
  "seed": 42,
  "output_dir": ")" + out_dir + R"(",
  "corpus": {
    "task": "omni", "scenes": 3, "clip_seconds": 0.6,
    "room_x": [3.6, 5.0], "room_y": [3.6, 5.0], "room_z": [2.3, 3.0],
    "absorption": [0.25, 0.45], "snr_db": [-5, 2], "sir_db": [-5, 2],
    "src_dist": [0.5, 1.2], "max_order": 2,
    "omni_noise_max": 2, "fov_noise_max": 2, "max_interferers": 1
  },
  "array": { "kind": "circular_plus_vertical", "radius": 0.1, "vertical": 0.1,
             "rm_channels": [0, 2] },
  "generator": { "dims": [8, 8], "groups": 2, "feature_dim": 8 },
  "discriminator": { "base_channels": 4, "layers": 3 },
  "train": { "mode": "vmbf", "steps": )" + std::to_string(steps) + R"(,
             "batch": 2, "checkpoint_every": 1, "lr": 0.001 },
  "pipelines": [
    { "name": "vmbf_mcwf", "backend": "mcwf", "vm_source": "generator",
      "mask_source": "oracle_magmask" }
  ],
  "evaluate": { "bootstrap_resamples": 50 }
})";
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

struct TempDir {
  std::string path;
  explicit TempDir(const std::string& name) : path("/tmp/" + name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config: round trip, unknown keys, ablations") {
  auto cfg = harness::parse_config(small_config("/tmp/x"));
  CHECK(cfg.seed == 42);
  CHECK(cfg.generator.m_r == 2);
  CHECK(cfg.generator.m_v == 4);

  // effective config re-parses to an identical structure
  auto text = harness::dump_config(cfg);
  auto cfg2 = harness::parse_config(text);
  CHECK(harness::dump_config(cfg2) == text);

  CHECK_THROWS_AS(harness::parse_config(R"({"sneaky": 1})"), Error);
  CHECK_THROWS_AS(harness::parse_config(R"({"corpus": {"scnes": 3}})"), Error);
  CHECK_THROWS_AS(harness::parse_config("{not json"), Error);

  for (const auto& name : harness::known_ablations()) {
    auto c = harness::parse_config(small_config("/tmp/x"));
    harness::apply_ablation(c, name);
  }
  {
    auto c = harness::parse_config(small_config("/tmp/x"));
    harness::apply_ablation(c, "w/o-gan");
    CHECK(c.loss.w_adv_g == 0.0);
    CHECK(c.loss.w_adv_d == 0.0);
    harness::apply_ablation(c, "w/o-dca");
    CHECK_FALSE(c.generator.enable_dca);
    CHECK_THROWS_AS(harness::apply_ablation(c, "w/o-everything"), Error);
  }
}

TEST_CASE("simulate: files, manifest, force-guard, RT60 range") {
  TempDir tmp("vmbeam_h_sim");
  auto cfg = harness::parse_config(small_config(tmp.path + "/run"));
  std::ostringstream log;
  auto result = harness::cmd_simulate(cfg, false, 1, log);
  CHECK(result.scenes == 3);
  // 4 WAVs per scene plus the manifest
  int wavs = 0;
  for (const auto& e : fs::directory_iterator(result.corpus_dir)) {
    if (e.path().extension() == ".wav") ++wavs;
  }
  CHECK(wavs == 12);
  CHECK(fs::exists(result.manifest_path));
  CHECK(result.rt60_min > 0.05);
  CHECK(result.rt60_max < 2.0);

  // refuses to overwrite without force
  CHECK_THROWS_AS(harness::cmd_simulate(cfg, false, 1, log), Error);
  harness::cmd_simulate(cfg, true, 1, log);  // --force succeeds

  // the corpus audio passes checksum verification
  auto manifest = scene::read_manifest(result.manifest_path);
  scene::verify_audio(manifest, result.corpus_dir);
}

TEST_CASE("train + evaluate: harness end to end, idempotent CSV, resume") {
  TempDir tmp("vmbeam_h_train");
  auto cfg = harness::parse_config(small_config(tmp.path + "/run", 4));
  std::ostringstream log;
  harness::cmd_simulate(cfg, false, 1, log);

  auto t1 = harness::cmd_train(cfg, 1, log);
  CHECK(t1.steps_done == 4);
  CHECK(fs::exists(t1.checkpoint_path));
  {
    // log rows = header + pretrain+joint steps
    std::ifstream in(t1.log_path);
    int rows = 0;
    std::string line;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 5);
  }

  // uninterrupted reference: same run in a second directory
  auto cfg_b = harness::parse_config(small_config(tmp.path + "/run_b", 4));
  cfg_b.output_dir = tmp.path + "/run_b";
  harness::cmd_simulate(cfg_b, false, 1, log);
  auto t_full = harness::cmd_train(cfg_b, 1, log);

  // interrupted run: stop at 2 steps, then resume to 4
  auto cfg_c = harness::parse_config(small_config(tmp.path + "/run_c", 2));
  cfg_c.output_dir = tmp.path + "/run_c";
  harness::cmd_simulate(cfg_c, false, 1, log);
  harness::cmd_train(cfg_c, 1, log);
  auto cfg_c4 = cfg_c;
  cfg_c4.train.steps = 4;
  auto t_resumed = harness::cmd_train(cfg_c4, 1, log);

  auto full_ck = nn::read_checkpoint(t_full.checkpoint_path);
  auto res_ck = nn::read_checkpoint(t_resumed.checkpoint_path);
  REQUIRE(full_ck.size() == res_ck.size());
  for (std::size_t i = 0; i < full_ck.size(); ++i) {
    CHECK(full_ck[i].name == res_ck[i].name);
    CHECK(full_ck[i].data == res_ck[i].data);
  }

  // evaluation: oracle rows always present; reruns byte-identical
  auto e1 = harness::cmd_evaluate(cfg, "", false, 1, log);
  auto bytes1 = slurp(e1.csv_path);
  auto e2 = harness::cmd_evaluate(cfg, "", false, 1, log);
  CHECK(slurp(e2.csv_path) == bytes1);
  bool saw_unprocessed = false, saw_oracle = false, saw_model = false;
  for (const auto& r : e1.records) {
    saw_unprocessed |= r.config == "unprocessed";
    saw_oracle |= r.config == "oracle_mcwf_full";
    saw_model |= r.config == "vmbf_mcwf";
  }
  CHECK(saw_unprocessed);
  CHECK(saw_oracle);
  CHECK(saw_model);

  // report: single CSV -> one row per config (before --oracle-only rewrites
  // metrics.csv in place)
  auto table = harness::cmd_report({e1.csv_path}, "unprocessed",
                                   tmp.path + "/report", 1, 50);
  CHECK(table.find("unprocessed") != std::string::npos);
  CHECK(table.find("vmbf_mcwf") != std::string::npos);
  CHECK(fs::exists(tmp.path + "/report/report_si_sdr_db.tsv"));

  // --oracle-only drops the model rows
  auto e3 = harness::cmd_evaluate(cfg, "", true, 1, log);
  for (const auto& r : e3.records) CHECK(r.config != "vmbf_mcwf");
}

TEST_CASE("evaluate rejects an incompatible checkpoint") {
  TempDir tmp("vmbeam_h_badckpt");
  auto cfg = harness::parse_config(small_config(tmp.path + "/run"));
  std::ostringstream log;
  harness::cmd_simulate(cfg, false, 1, log);
  const std::string bad = tmp.path + "/bad.vmbm";
  nn::write_checkpoint(bad, {{"gen.bogus", {2}, {1.0, 2.0}}});
  CHECK_THROWS_AS(harness::cmd_evaluate(cfg, bad, false, 1, log), Error);
}

TEST_CASE("ablation w/o-dca trains a checkpoint without DCA tensors") {
  TempDir tmp("vmbeam_h_ablate");
  auto cfg = harness::parse_config(small_config(tmp.path + "/run", 1));
  harness::apply_ablation(cfg, "w/o-dca");
  std::ostringstream log;
  harness::cmd_simulate(cfg, false, 1, log);
  auto t = harness::cmd_train(cfg, 1, log);
  bool any_dca = false, any_reduce = false;
  for (const auto& nt : nn::read_checkpoint(t.checkpoint_path)) {
    if (nt.name.find(".dca.") != std::string::npos) any_dca = true;
    if (nt.name.find(".reduce.") != std::string::npos) any_reduce = true;
  }
  CHECK_FALSE(any_dca);
  CHECK(any_reduce);
}

TEST_CASE("report merges CSVs with disjoint configs; hand-checked delta") {
  TempDir tmp("vmbeam_h_report");
  // 3-row fixture with known means
  const std::string a = tmp.path + "/a.csv";
  const std::string b = tmp.path + "/b.csv";
  {
    std::ofstream f(a);
    f << "scene_id,config,si_sdr_db,snr_db,stoi,runtime_ms\n";
    f << "s0,base,1.000000,1.000000,0.500000,0.000\n";
    f << "s1,base,3.000000,2.000000,0.700000,0.000\n";
    f << "s2,base,5.000000,3.000000,0.900000,0.000\n";
  }
  {
    std::ofstream f(b);
    f << "scene_id,config,si_sdr_db,snr_db,stoi,runtime_ms\n";
    f << "s0,other,4.000000,1.000000,0.600000,0.000\n";
    f << "s1,other,6.000000,2.000000,0.800000,0.000\n";
  }
  auto table = harness::cmd_report({a, b}, "base", tmp.path, 1, 50);
  // means: base 3.0, other 5.0 -> delta +2.00
  CHECK(table.find("base") != std::string::npos);
  CHECK(table.find("other") != std::string::npos);
  CHECK(table.find("+2.00") != std::string::npos);

  std::ifstream tsv(tmp.path + "/report_si_sdr_db.tsv");
  REQUIRE(tsv.good());
  std::string line;
  std::getline(tsv, line);
  CHECK(line == "config\tmean\tlo\thi");

  // schema mismatch is rejected
  const std::string bad = tmp.path + "/bad.csv";
  {
    std::ofstream f(bad);
    f << "wrong,header\n";
  }
  CHECK_THROWS_AS(harness::cmd_report({bad}, "base", tmp.path, 1, 10), Error);
}

#ifdef VMBEAM_CLI_PATH
TEST_CASE("CLI process: exit codes and subcommand plumbing") {
  TempDir tmp("vmbeam_h_cli");
  const std::string cli = VMBEAM_CLI_PATH;
  const std::string cfg_path = tmp.path + "/cfg.json";
  {
    std::ofstream f(cfg_path);
    f << small_config(tmp.path + "/run", 1);
  }
  auto run = [&](const std::string& args) {
    const int status = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  CHECK(run("--help") == 0);
  CHECK(run("simulate --config " + tmp.path + "/missing.json") == 2);
  CHECK(run("simulate --config " + cfg_path) == 0);
  // refuses to overwrite without --force (data error)
  CHECK(run("simulate --config " + cfg_path) == 3);
  CHECK(run("simulate --config " + cfg_path + " --force") == 0);
  CHECK(run("train --config " + cfg_path) == 0);
  CHECK(run("evaluate --config " + cfg_path) == 0);
  CHECK(run("evaluate --config " + cfg_path + " --oracle-only") == 0);
  CHECK(run("report " + tmp.path + "/run/metrics.csv --out " + tmp.path) == 0);
  CHECK(run("report " + tmp.path + "/nope.csv") == 3);
  CHECK(run("train --config " + cfg_path + " --ablation w/o-nothing") == 2);
}
#endif
