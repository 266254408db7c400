// vmbeam/metrics/evaluate.cpp
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

#include "vmbeam/metrics/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include <json.hpp>

#include "vmbeam/dsp/wav.hpp"
#include "vmbeam/metrics/metrics.hpp"

namespace vmbeam::metrics {

namespace {

namespace fs = std::filesystem;

std::string format_row(const MetricRecord& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%s,%s,%.6f,%.6f,%.6f,%.3f",
                r.scene_id.c_str(), r.config.c_str(), r.si_sdr_db, r.snr_db,
                r.stoi_score, r.runtime_ms);
  return buf;
}

}  // namespace

scene::AudioScene load_scene_audio(const scene::CorpusManifest& manifest,
                                   int index, const std::string& dir) {
  require(index >= 0 && index < static_cast<int>(manifest.scenes.size()),
          ErrorKind::data, "scene index out of range");
  const auto& rec = manifest.scenes[index];
  scene::AudioScene sc;
  sc.spec = rec.spec;
  auto read = [&](const std::string& rel) {
    const std::string full = (fs::path(dir) / rel).string();
    require(fs::exists(full), ErrorKind::data, "missing audio file: " + full);
    return dsp::read_wav(full);
  };
  sc.y = read(rec.files.y);
  sc.x = read(rec.files.x);
  sc.x_rev = read(rec.files.x_rev);
  sc.n = read(rec.files.n);
  sc.ref_channel = manifest.array.ref_channel;
  sc.rm_channels = manifest.array.rm_channels();
  sc.vm_channels = manifest.array.vm_channels();
  return sc;
}

std::vector<MetricRecord> evaluate_batch(
    const scene::CorpusManifest& manifest, const std::string& dir,
    const std::vector<NamedPipeline>& pipelines, const dsp::StftConfig& stft,
    bool timing, int threads) {
  const std::size_t n_scenes = manifest.scenes.size();
  std::vector<MetricRecord> records(n_scenes * pipelines.size());

  parallel_for(n_scenes, threads, [&](std::size_t i) {
    const auto sc = load_scene_audio(manifest, static_cast<int>(i), dir);
    const int frames = dsp::frame_count(sc.y.num_samples(), stft);
    const auto [lo, hi] = dsp::reconstructable_range(frames, stft);
    const std::vector<double> ref(sc.x_ref().begin() + lo,
                                  sc.x_ref().begin() + hi);
    for (std::size_t p = 0; p < pipelines.size(); ++p) {
      const auto start = std::chrono::steady_clock::now();
      auto est_full = pipelines[p].run(sc);
      const auto stop = std::chrono::steady_clock::now();
      require(static_cast<std::int64_t>(est_full.size()) >= hi,
              ErrorKind::numeric,
              "pipeline output shorter than the reconstructable interior");
      const std::vector<double> est(est_full.begin() + lo,
                                    est_full.begin() + hi);
      MetricRecord rec;
      rec.scene_id = "scene_" + std::to_string(i);
      rec.config = pipelines[p].name;
      rec.si_sdr_db = si_sdr(est, ref);
      rec.snr_db = snr_metric(est, ref);
      rec.stoi_score = stoi(est, ref);
      rec.runtime_ms =
          timing ? std::chrono::duration<double, std::milli>(stop - start).count()
                 : 0.0;
      records[i * pipelines.size() + p] = std::move(rec);
    }
  });
  return records;
}

void write_metrics_csv(const std::string& path,
                       const std::vector<MetricRecord>& records) {
  std::ofstream out(path, std::ios::trunc);
  require(out.good(), ErrorKind::data, "cannot write csv: " + path);
  out << "scene_id,config,si_sdr_db,snr_db,stoi,runtime_ms\n";
  for (const auto& r : records) out << format_row(r) << "\n";
  require(out.good(), ErrorKind::data, "csv write failed: " + path);
}

std::vector<MetricRecord> read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::data, "cannot open csv: " + path);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::data,
          "empty csv: " + path);
  require(line == "scene_id,config,si_sdr_db,snr_db,stoi,runtime_ms",
          ErrorKind::data, "csv schema mismatch in " + path);
  std::vector<MetricRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    MetricRecord r;
    std::size_t pos = 0;
    auto next = [&](bool last = false) {
      const std::size_t comma = last ? line.size() : line.find(',', pos);
      require(comma != std::string::npos, ErrorKind::data,
              "malformed csv row in " + path);
      std::string field = line.substr(pos, comma - pos);
      pos = comma + 1;
      return field;
    };
    r.scene_id = next();
    r.config = next();
    r.si_sdr_db = std::stod(next());
    r.snr_db = std::stod(next());
    r.stoi_score = std::stod(next());
    r.runtime_ms = std::stod(next(true));
    records.push_back(std::move(r));
  }
  return records;
}

std::string summary_json(const std::vector<MetricRecord>& records,
                         int resamples, std::uint64_t seed) {
  using nlohmann::json;
  std::map<std::string, std::vector<const MetricRecord*>> by_config;
  for (const auto& r : records) by_config[r.config].push_back(&r);

  auto bootstrap = [&](const std::vector<double>& values, std::uint64_t stream) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    CounterRng rng(seed, stream);
    std::vector<double> means(resamples);
    for (int b = 0; b < resamples; ++b) {
      double acc = 0.0;
      for (std::size_t k = 0; k < values.size(); ++k) {
        acc += values[rng.uniform_int(0, static_cast<std::int64_t>(values.size()) - 1)];
      }
      means[b] = acc / static_cast<double>(values.size());
    }
    std::sort(means.begin(), means.end());
    const auto quant = [&](double q) {
      const double pos = q * (resamples - 1);
      const std::size_t i = static_cast<std::size_t>(pos);
      const double frac = pos - static_cast<double>(i);
      return i + 1 < means.size() ? means[i] * (1 - frac) + means[i + 1] * frac
                                  : means[i];
    };
    return json{{"mean", mean}, {"lo", quant(0.025)}, {"hi", quant(0.975)}};
  };

  json configs = json::object();
  for (const auto& [name, rows] : by_config) {
    std::vector<double> si, snr, st;
    for (const auto* r : rows) {
      si.push_back(r->si_sdr_db);
      snr.push_back(r->snr_db);
      st.push_back(r->stoi_score);
    }
    configs[name] = {
        {"scenes", rows.size()},
        {"si_sdr_db", bootstrap(si, CounterRng::mix(1, std::hash<std::string>{}(name)))},
        {"snr_db", bootstrap(snr, CounterRng::mix(2, std::hash<std::string>{}(name)))},
        {"stoi", bootstrap(st, CounterRng::mix(3, std::hash<std::string>{}(name)))},
        {"pesq", "unavailable"}};
  }
  json out{{"configs", configs}, {"resamples", resamples}, {"seed", seed}};
  return out.dump(2);
}

}  // namespace vmbeam::metrics
