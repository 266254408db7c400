// vmbeam/harness/harness.cpp
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

#include "vmbeam/harness/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>

#include "vmbeam/dsp/wav.hpp"
#include "vmbeam/metrics/metrics.hpp"
#include "vmbeam/nn/checkpoint.hpp"
#include "vmbeam/sarl/pipeline.hpp"
#include "vmbeam/sm/train.hpp"

namespace vmbeam::harness {

namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kGenStream = 0x47;
constexpr std::uint64_t kDiscStream = 0x44;
constexpr std::uint64_t kMcseStream = 0x4d;

std::string corpus_dir_of(const RunConfig& cfg) {
  return (fs::path(cfg.output_dir) / "corpus").string();
}

int mcse_in_channels(const RunConfig& cfg) {
  const auto geometry = cfg.array.build();
  const int m_r = static_cast<int>(geometry.rm_channels().size());
  const int m_v = static_cast<int>(geometry.vm_channels().size());
  return cfg.train.mode == TrainMode::sarl_f ? m_r : m_r + m_v;
}

sarl::McseModel make_mcse(const RunConfig& cfg) {
  sarl::McseConfig mcfg;
  mcfg.in_channels = mcse_in_channels(cfg);
  mcfg.embed_dim = cfg.mcse_embed_dim;
  mcfg.blocks = cfg.mcse_blocks;
  if (cfg.train.mode == TrainMode::sarl_f) {
    require(cfg.mcse_embed_dim == cfg.generator.feature_dim, ErrorKind::config,
            "sarl_f requires mcse.embed_dim == generator.feature_dim");
  }
  return sarl::McseModel(mcfg, CounterRng::mix(cfg.seed, kMcseStream));
}

// Round-robin batch for a given step.
template <typename SceneT>
std::vector<SceneT> pick_batch(const std::vector<SceneT>& scenes,
                               std::int64_t step, int batch) {
  std::vector<SceneT> out;
  out.reserve(batch);
  for (int j = 0; j < batch; ++j) {
    out.push_back(scenes[(static_cast<std::size_t>(step) * batch + j) %
                         scenes.size()]);
  }
  return out;
}

void append_log_row(std::ofstream& log, std::int64_t row,
                    const std::string& phase, const sm::StepRecord& rec) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%lld,%s,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f",
                static_cast<long long>(row), phase.c_str(), rec.gen_loss,
                rec.disc_loss, rec.vme_loss, rec.bf_loss, rec.adv_g, rec.adv_d,
                rec.grad_norm);
  log << buf << "\n";
}

}  // namespace

SimulateResult cmd_simulate(const RunConfig& cfg, bool force, int threads,
                            std::ostream& log) {
  const std::string dir = corpus_dir_of(cfg);
  const std::string manifest_path = (fs::path(dir) / "manifest.jsonl").string();
  if (fs::exists(manifest_path)) {
    require(force, ErrorKind::data,
            "corpus already exists (use --force to overwrite): " + manifest_path);
  }
  fs::create_directories(dir);

  const auto array = cfg.array.build();
  scene::CorpusManifest manifest;
  manifest.seed = cfg.seed;
  manifest.task = cfg.corpus.task;
  manifest.ranges = cfg.corpus.ranges;
  manifest.array = array;
  manifest.array_kind = cfg.array.kind;
  manifest.scenes.resize(cfg.corpus.scenes);

  std::vector<int> snr_histogram(8, 0);
  parallel_for(cfg.corpus.scenes, threads, [&](std::size_t i) {
    auto spec = scene::sample_scene(cfg.seed, static_cast<int>(i),
                                    cfg.corpus.task, cfg.corpus.ranges);
    auto sc = scene::render_scene(spec, array);

    scene::SceneRecord rec;
    rec.spec = spec;
    char base[64];
    std::snprintf(base, sizeof(base), "scene_%05d", static_cast<int>(i));
    rec.files = {std::string(base) + "_y.wav", std::string(base) + "_x.wav",
                 std::string(base) + "_xrev.wav", std::string(base) + "_n.wav"};
    dsp::write_wav((fs::path(dir) / rec.files.y).string(), sc.y,
                   dsp::WavFormat::float64);
    dsp::write_wav((fs::path(dir) / rec.files.x).string(), sc.x,
                   dsp::WavFormat::float64);
    dsp::write_wav((fs::path(dir) / rec.files.x_rev).string(), sc.x_rev,
                   dsp::WavFormat::float64);
    dsp::write_wav((fs::path(dir) / rec.files.n).string(), sc.n,
                   dsp::WavFormat::float64);
    rec.checksums["y"] = scene::fnv1a64_file((fs::path(dir) / rec.files.y).string());
    rec.checksums["x"] = scene::fnv1a64_file((fs::path(dir) / rec.files.x).string());
    rec.checksums["x_rev"] =
        scene::fnv1a64_file((fs::path(dir) / rec.files.x_rev).string());
    rec.checksums["n"] = scene::fnv1a64_file((fs::path(dir) / rec.files.n).string());

    // RT60 of the target's RIR at the reference mic; Eyring fallback when the
    // order-limited response does not reach the -25 dB range.
    room::RoomSpec roomspec{spec.room_dims, spec.absorption, 343.0,
                            spec.max_order};
    rec.rt60_eyring = room::eyring_rt60(roomspec);
    try {
      const auto images = room::image_sources(roomspec, spec.target_pos);
      const auto mics = room::place_array(array, spec.array_center, spec.array_yaw);
      const auto len =
          room::rir_length_for(images, mics[array.ref_channel], spec.fs);
      const auto rir = room::render_rir(images, mics[array.ref_channel],
                                        spec.fs, len);
      rec.rt60_measured = room::measure_rt60(rir.taps, spec.fs);
    } catch (const Error&) {
      rec.rt60_measured = -1.0;
    }
    manifest.scenes[i] = std::move(rec);
  });

  write_manifest(manifest_path, manifest);

  SimulateResult result;
  result.corpus_dir = dir;
  result.manifest_path = manifest_path;
  result.scenes = cfg.corpus.scenes;
  double lo = 1e9, hi = -1e9;
  for (const auto& rec : manifest.scenes) {
    const double rt = rec.rt60_measured > 0 ? rec.rt60_measured : rec.rt60_eyring;
    lo = std::min(lo, rt);
    hi = std::max(hi, rt);
    const int bin = std::clamp(
        static_cast<int>((rec.spec.snr_db - cfg.corpus.ranges.snr_db[0]) /
                         std::max(1e-9, (cfg.corpus.ranges.snr_db[1] -
                                         cfg.corpus.ranges.snr_db[0]) /
                                            8.0)),
        0, 7);
    snr_histogram[bin]++;
  }
  result.rt60_min = lo;
  result.rt60_max = hi;

  log << "simulated " << result.scenes << " scenes into " << dir << "\n";
  log << "rt60 range: [" << lo << ", " << hi << "] s\n";
  log << "snr histogram:";
  for (int c : snr_histogram) log << " " << c;
  log << "\n";
  return result;
}

TrainResult cmd_train(const RunConfig& cfg, int threads, std::ostream& log) {
  (void)threads;
  const std::string dir = corpus_dir_of(cfg);
  const std::string manifest_path = (fs::path(dir) / "manifest.jsonl").string();
  require(fs::exists(manifest_path), ErrorKind::data,
          "corpus manifest not found (run simulate first): " + manifest_path);
  const auto manifest = scene::read_manifest(manifest_path);
  require(!manifest.scenes.empty(), ErrorKind::data, "corpus is empty");

  sm::TrainConfig tcfg;
  tcfg.loss = cfg.loss;
  tcfg.stft = cfg.stft;
  tcfg.backend = bf::backend_from_name(cfg.train.backend);
  tcfg.block_len = cfg.train.block_len;
  tcfg.vm_in_beamformer = cfg.train.vm_in_beamformer;
  tcfg.gen_adam.lr = cfg.train.lr;
  tcfg.disc_adam.lr = cfg.train.lr;

  sm::Generator gen(cfg.generator, CounterRng::mix(cfg.seed, kGenStream));
  sm::DiscriminatorConfig dcfg = cfg.discriminator;
  dcfg.in_channels = 2 * cfg.generator.m_v;
  sm::Discriminator disc(dcfg, CounterRng::mix(cfg.seed, kDiscStream));

  const bool sarl_mode = cfg.train.mode != TrainMode::vmbf;
  std::unique_ptr<sarl::McseModel> mcse;
  if (sarl_mode) mcse = std::make_unique<sarl::McseModel>(make_mcse(cfg));

  sm::TrainState state;
  state.gen_opt.cfg = tcfg.gen_adam;
  state.disc_opt.cfg = tcfg.disc_adam;
  nn::AdamState mcse_opt;
  mcse_opt.cfg.lr = cfg.train.lr;  // phase 1 full rate
  std::int64_t pretrain_step = 0;

  const std::string latest =
      (fs::path(cfg.output_dir) / "checkpoint_latest.vmbm").string();
  const std::string log_path =
      (fs::path(cfg.output_dir) / "train_log.csv").string();
  bool resumed = false;
  if (fs::exists(latest)) {
    const auto tensors = nn::read_checkpoint(latest);
    sm::unpack_training_state(tensors, gen, disc, state);
    if (sarl_mode) {
      mcse->load_params(tensors, "mcse.");
      sm::unpack_adam(tensors, mcse_opt, mcse->params(), "opt.mcse.");
    }
    for (const auto& t : tensors) {
      if (t.name == "meta.pretrain_step") {
        pretrain_step = static_cast<std::int64_t>(t.data.at(0));
      }
    }
    resumed = true;
    log << "resuming from " << latest << " at step " << state.step << "\n";
  }
  fs::create_directories(cfg.output_dir);

  std::ofstream log_csv(log_path, resumed ? std::ios::app : std::ios::trunc);
  require(log_csv.good(), ErrorKind::data, "cannot write " + log_path);
  if (!resumed) {
    log_csv << "step,phase,gen_loss,disc_loss,vme_loss,bf_loss,adv_g,adv_d,"
               "grad_norm\n";
  }

  auto save = [&](const std::string& path) {
    auto tensors = sm::pack_training_state(gen, disc, state);
    if (sarl_mode) {
      for (auto& t : mcse->dump_params("mcse.")) tensors.push_back(std::move(t));
      sm::pack_adam(tensors, mcse_opt, mcse->params(), "opt.mcse.");
    }
    tensors.push_back({"meta.pretrain_step",
                       {1},
                       {static_cast<double>(pretrain_step)}});
    nn::write_checkpoint(path, tensors);
  };

  // Scene preparation is the expensive constant part; do it once.
  std::vector<sm::TrainScene> vmbf_scenes;
  std::vector<sarl::SarlScene> sarl_scenes;
  for (std::size_t i = 0; i < manifest.scenes.size(); ++i) {
    const auto sc = metrics::load_scene_audio(manifest, static_cast<int>(i), dir);
    if (sarl_mode) {
      sarl_scenes.push_back(sarl::prepare_sarl_scene(sc, cfg.stft));
    } else {
      vmbf_scenes.push_back(sm::prepare_train_scene(sc, tcfg));
    }
  }

  // Phase 1: MC-SE pretraining (SARL modes only).
  if (sarl_mode) {
    const bool full_array = cfg.train.mode == TrainMode::sarl_s;
    for (; pretrain_step < cfg.train.pretrain_steps; ++pretrain_step) {
      auto batch = pick_batch(sarl_scenes, pretrain_step, cfg.train.batch);
      const double loss = sarl::mcse_pretrain_step(
          batch, *mcse, mcse_opt, cfg.stft, cfg.loss.snr_clip_db, full_array);
      sm::StepRecord rec;
      rec.gen_loss = loss;
      append_log_row(log_csv, pretrain_step + 1, "pretrain", rec);
      if ((pretrain_step + 1) % cfg.train.checkpoint_every == 0) save(latest);
    }
    // Phase 2 fine-tunes the MC-SE at a reduced rate.
    mcse_opt.cfg.lr = cfg.train.lr * cfg.train.mcse_lr_scale;
  }

  // Phase 2 (or the only phase for vmbf).
  while (state.step < cfg.train.steps) {
    sm::StepRecord rec;
    if (sarl_mode) {
      auto batch = pick_batch(sarl_scenes, state.step, cfg.train.batch);
      rec = sarl::sarl_train_step(batch, gen, *mcse,
                                  tcfg.loss.gan_enabled() ? &disc : nullptr,
                                  state, mcse_opt, tcfg,
                                  cfg.train.mode == TrainMode::sarl_s
                                      ? sarl::Conditioning::sarl_s
                                      : sarl::Conditioning::sarl_f);
    } else {
      auto batch = pick_batch(vmbf_scenes, state.step, cfg.train.batch);
      rec = sm::train_step(batch, gen, disc, state, tcfg);
    }
    append_log_row(log_csv, rec.step, "joint", rec);
    if (state.step % cfg.train.checkpoint_every == 0 ||
        state.step == cfg.train.steps) {
      save(latest);
      save((fs::path(cfg.output_dir) /
            ("checkpoint_step" + std::to_string(state.step) + ".vmbm"))
               .string());
    }
  }
  save(latest);

  TrainResult result;
  result.checkpoint_path = latest;
  result.log_path = log_path;
  result.steps_done = state.step;
  log << "trained to step " << state.step << ", checkpoint at " << latest
      << "\n";
  return result;
}

std::vector<metrics::NamedPipeline> build_oracle_pipelines(const RunConfig& cfg) {
  const auto stft = cfg.stft;
  std::vector<metrics::NamedPipeline> pipelines;
  pipelines.push_back(
      {"unprocessed", [](const scene::AudioScene& sc) {
         return sc.y.channels[sc.ref_channel];
       }});

  auto add_oracle = [&](const std::string& name, bool full) {
    sarl::PipelineConfig p;
    p.name = name;
    p.vm_source = full ? sarl::VmSource::oracle_true : sarl::VmSource::none;
    p.mask_source = sarl::MaskSource::oracle_exact;
    p.backend = bf::Backend::mcwf;
    p.block_len = cfg.train.block_len;
    p.stft = stft;
    pipelines.push_back({name, [p](const scene::AudioScene& sc) {
                           return sarl::vm_bf_pipeline(sc, nullptr, nullptr, p)
                               .enhanced;
                         }});
  };
  add_oracle("oracle_mcwf_full", true);
  add_oracle("oracle_mcwf_rm", false);
  return pipelines;
}

std::vector<metrics::NamedPipeline> build_model_pipelines(
    const RunConfig& cfg, const std::string& checkpoint_path) {
  require(fs::exists(checkpoint_path), ErrorKind::data,
          "checkpoint not found: " + checkpoint_path);
  const auto tensors = nn::read_checkpoint(checkpoint_path);

  auto gen = std::make_shared<sm::Generator>(
      cfg.generator, CounterRng::mix(cfg.seed, kGenStream));
  gen->load_params(tensors, "gen.");

  std::shared_ptr<sarl::McseModel> mcse;
  const bool have_mcse = std::any_of(
      tensors.begin(), tensors.end(),
      [](const nn::NamedTensor& t) { return t.name.rfind("mcse.", 0) == 0; });
  if (have_mcse) {
    mcse = std::make_shared<sarl::McseModel>(make_mcse(cfg));
    mcse->load_params(tensors, "mcse.");
  }

  std::vector<metrics::NamedPipeline> pipelines;
  for (const auto& section : cfg.pipelines) {
    const auto p = section.build(cfg.stft, cfg.train.block_len);
    const bool needs_mcse = p.backend == bf::Backend::none ||
                            p.mask_source == sarl::MaskSource::learned;
    require(!needs_mcse || mcse != nullptr, ErrorKind::data,
            "pipeline " + p.name +
                " needs an MC-SE model but the checkpoint has none");
    pipelines.push_back(
        {p.name, [p, gen, mcse](const scene::AudioScene& sc) {
           return sarl::vm_bf_pipeline(sc, gen.get(), mcse.get(), p).enhanced;
         }});
  }
  return pipelines;
}

EvaluateResult cmd_evaluate(const RunConfig& cfg, const std::string& checkpoint,
                            bool oracle_only, int threads, std::ostream& log) {
  const std::string dir = corpus_dir_of(cfg);
  const std::string manifest_path = (fs::path(dir) / "manifest.jsonl").string();
  require(fs::exists(manifest_path), ErrorKind::data,
          "corpus manifest not found: " + manifest_path);
  const auto manifest = scene::read_manifest(manifest_path);

  auto pipelines = build_oracle_pipelines(cfg);
  if (!oracle_only) {
    auto model = build_model_pipelines(
        cfg, checkpoint.empty()
                 ? (fs::path(cfg.output_dir) / "checkpoint_latest.vmbm").string()
                 : checkpoint);
    for (auto& p : model) pipelines.push_back(std::move(p));
  }

  auto records = metrics::evaluate_batch(manifest, dir, pipelines, cfg.stft,
                                         cfg.evaluate.timing, threads);

  EvaluateResult result;
  result.csv_path = (fs::path(cfg.output_dir) / "metrics.csv").string();
  result.summary_path = (fs::path(cfg.output_dir) / "summary.json").string();
  fs::create_directories(cfg.output_dir);
  metrics::write_metrics_csv(result.csv_path, records);
  {
    std::ofstream out(result.summary_path, std::ios::trunc);
    out << metrics::summary_json(records, cfg.evaluate.bootstrap_resamples,
                                 cfg.seed);
    out << "\n";
  }
  result.records = std::move(records);
  log << "evaluated " << manifest.scenes.size() << " scenes x "
      << pipelines.size() << " configs -> " << result.csv_path << "\n";
  return result;
}

std::string cmd_report(const std::vector<std::string>& csv_paths,
                       const std::string& baseline, const std::string& out_dir,
                       std::uint64_t seed, int resamples) {
  require(!csv_paths.empty(), ErrorKind::config, "report needs >= 1 csv");
  std::vector<metrics::MetricRecord> records;
  for (const auto& path : csv_paths) {
    auto part = metrics::read_metrics_csv(path);
    records.insert(records.end(), part.begin(), part.end());
  }

  std::map<std::string, std::vector<const metrics::MetricRecord*>> by_config;
  for (const auto& r : records) by_config[r.config].push_back(&r);

  struct Stat {
    double mean, lo, hi;
  };
  auto stat_of = [&](const std::vector<double>& values, std::uint64_t stream) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    CounterRng rng(seed, stream);
    std::vector<double> means(resamples);
    for (int b = 0; b < resamples; ++b) {
      double acc = 0.0;
      for (std::size_t k = 0; k < values.size(); ++k) {
        acc += values[rng.uniform_int(
            0, static_cast<std::int64_t>(values.size()) - 1)];
      }
      means[b] = acc / static_cast<double>(values.size());
    }
    std::sort(means.begin(), means.end());
    return Stat{mean, means[static_cast<std::size_t>(0.025 * (resamples - 1))],
                means[static_cast<std::size_t>(0.975 * (resamples - 1))]};
  };

  const std::vector<std::string> metric_names = {"si_sdr_db", "snr_db", "stoi"};
  std::map<std::string, std::map<std::string, Stat>> table;
  for (const auto& [name, rows] : by_config) {
    std::vector<double> si, snr, st;
    for (const auto* r : rows) {
      si.push_back(r->si_sdr_db);
      snr.push_back(r->snr_db);
      st.push_back(r->stoi_score);
    }
    table[name]["si_sdr_db"] = stat_of(si, CounterRng::mix(11, std::hash<std::string>{}(name)));
    table[name]["snr_db"] = stat_of(snr, CounterRng::mix(12, std::hash<std::string>{}(name)));
    table[name]["stoi"] = stat_of(st, CounterRng::mix(13, std::hash<std::string>{}(name)));
  }

  const bool have_baseline = by_config.count(baseline) > 0;
  std::string out;
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%-24s %22s %22s %20s %6s %14s\n",
                "config", "si_sdr_db", "snr_db", "stoi", "pesq",
                have_baseline ? ("d_si_sdr(" + baseline + ")").c_str() : "");
  out += buf;
  for (const auto& [name, stats] : table) {
    const auto& si = stats.at("si_sdr_db");
    const auto& snr = stats.at("snr_db");
    const auto& st = stats.at("stoi");
    std::string delta = "";
    if (have_baseline) {
      std::snprintf(buf, sizeof(buf), "%+.2f",
                    si.mean - table.at(baseline).at("si_sdr_db").mean);
      delta = buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "%-24s %8.2f [%5.2f,%6.2f] %8.2f [%5.2f,%6.2f] %6.3f "
                  "[%5.3f,%5.3f] %6s %14s\n",
                  name.c_str(), si.mean, si.lo, si.hi, snr.mean, snr.lo, snr.hi,
                  st.mean, st.lo, st.hi, "n/a", delta.c_str());
    out += buf;
  }

  // plot data: config \t mean \t lo \t hi per metric
  fs::create_directories(out_dir);
  for (const auto& metric : metric_names) {
    std::ofstream f((fs::path(out_dir) / ("report_" + metric + ".tsv")).string(),
                    std::ios::trunc);
    f << "config\tmean\tlo\thi\n";
    for (const auto& [name, stats] : table) {
      const auto& s = stats.at(metric);
      std::snprintf(buf, sizeof(buf), "%s\t%.6f\t%.6f\t%.6f\n", name.c_str(),
                    s.mean, s.lo, s.hi);
      f << buf;
    }
  }
  return out;
}

}  // namespace vmbeam::harness
