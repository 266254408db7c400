// vmbeam/harness/config.cpp
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

#include "vmbeam/harness/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

namespace vmbeam::harness {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& where) {
  require(j.is_object(), ErrorKind::config, where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    require(allowed.count(key) == 1, ErrorKind::config,
            "unknown key \"" + key + "\" in " + where);
  }
}

std::array<double, 2> get_range(const json& j, const std::string& key,
                                std::array<double, 2> fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  require(v.is_array() && v.size() == 2, ErrorKind::config,
          key + " must be [lo, hi]");
  return {v[0].get<double>(), v[1].get<double>()};
}

json range_json(const std::array<double, 2>& r) {
  return json::array({r[0], r[1]});
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

std::string train_mode_name(TrainMode m) {
  switch (m) {
    case TrainMode::vmbf: return "vmbf";
    case TrainMode::sarl_s: return "sarl_s";
    case TrainMode::sarl_f: return "sarl_f";
  }
  return "?";
}

TrainMode train_mode_from_name(const std::string& name) {
  if (name == "vmbf") return TrainMode::vmbf;
  if (name == "sarl_s") return TrainMode::sarl_s;
  if (name == "sarl_f") return TrainMode::sarl_f;
  throw Error(ErrorKind::config, "unknown train mode: " + name);
}

room::ArrayGeometry ArrayConfig::build() const {
  room::ArrayGeometry g;
  if (kind == "circular_plus_vertical") {
    g = room::build_array_circular_plus_vertical(radius, vertical);
  } else if (kind == "custom") {
    g = room::build_array_custom(positions);
  } else {
    throw Error(ErrorKind::config, "unknown array kind: " + kind);
  }
  g.set_rm_channels(rm_channels);
  g.validate();
  return g;
}

sarl::PipelineConfig PipelineSection::build(const dsp::StftConfig& stft,
                                            int block_len) const {
  sarl::PipelineConfig p;
  p.name = name;
  p.conditioning = sarl::conditioning_from_name(conditioning);
  p.backend = bf::backend_from_name(backend);
  p.vm_source = sarl::vm_source_from_name(vm_source);
  p.mask_source = sarl::mask_source_from_name(mask_source);
  p.vm_in_beamformer = vm_in_beamformer;
  p.vm_loss_enabled = vm_loss_enabled;
  p.block_len = block_len;
  p.stft = stft;
  return p;
}

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, std::string("config parse error: ") + e.what());
  }
  check_keys(j, {"seed", "output_dir", "corpus", "array", "stft", "generator",
                 "discriminator", "mcse", "loss", "train", "pipelines",
                 "evaluate"},
             "config");
  RunConfig cfg;
  cfg.seed = get_or<std::uint64_t>(j, "seed", 1);
  cfg.output_dir = get_or<std::string>(j, "output_dir", "out");

  if (j.contains("corpus")) {
    const auto& c = j.at("corpus");
    check_keys(c,
               {"task", "scenes", "clip_seconds", "room_x", "room_y", "room_z",
                "absorption", "snr_db", "sir_db", "src_dist", "array_height",
                "wall_margin", "fov_half_angle_deg", "max_order",
                "omni_noise_max", "fov_noise_max", "max_interferers"},
               "corpus");
    cfg.corpus.task = scene::task_from_name(get_or<std::string>(c, "task", "fov"));
    cfg.corpus.scenes = get_or<int>(c, "scenes", 20);
    auto& r = cfg.corpus.ranges;
    r.clip_seconds = get_or<double>(c, "clip_seconds", r.clip_seconds);
    r.room_x = get_range(c, "room_x", r.room_x);
    r.room_y = get_range(c, "room_y", r.room_y);
    r.room_z = get_range(c, "room_z", r.room_z);
    r.absorption = get_range(c, "absorption", r.absorption);
    r.snr_db = get_range(c, "snr_db", r.snr_db);
    r.sir_db = get_range(c, "sir_db", r.sir_db);
    r.src_dist = get_range(c, "src_dist", r.src_dist);
    r.array_height = get_range(c, "array_height", r.array_height);
    r.wall_margin = get_or<double>(c, "wall_margin", r.wall_margin);
    r.fov_half_angle_deg =
        get_or<double>(c, "fov_half_angle_deg", r.fov_half_angle_deg);
    r.max_order = get_or<int>(c, "max_order", r.max_order);
    r.omni_noise_max = get_or<int>(c, "omni_noise_max", r.omni_noise_max);
    r.fov_noise_max = get_or<int>(c, "fov_noise_max", r.fov_noise_max);
    r.max_interferers = get_or<int>(c, "max_interferers", r.max_interferers);
    r.validate();
  }

  if (j.contains("array")) {
    const auto& a = j.at("array");
    check_keys(a, {"kind", "radius", "vertical", "positions", "rm_channels"},
               "array");
    cfg.array.kind = get_or<std::string>(a, "kind", cfg.array.kind);
    cfg.array.radius = get_or<double>(a, "radius", cfg.array.radius);
    cfg.array.vertical = get_or<double>(a, "vertical", cfg.array.vertical);
    if (a.contains("positions")) {
      cfg.array.positions.clear();
      for (const auto& p : a.at("positions")) {
        require(p.is_array() && p.size() == 3, ErrorKind::config,
                "array position must be [x, y, z]");
        cfg.array.positions.push_back(
            {p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
      }
    }
    if (a.contains("rm_channels")) {
      cfg.array.rm_channels.clear();
      for (const auto& c : a.at("rm_channels")) {
        cfg.array.rm_channels.push_back(c.get<int>());
      }
    }
  }

  if (j.contains("stft")) {
    const auto& s = j.at("stft");
    check_keys(s, {"win_len", "hop", "fft_len"}, "stft");
    cfg.stft.win_len = get_or<int>(s, "win_len", cfg.stft.win_len);
    cfg.stft.hop = get_or<int>(s, "hop", cfg.stft.hop);
    cfg.stft.fft_len = get_or<int>(s, "fft_len", cfg.stft.fft_len);
    cfg.stft.validate();
  }

  if (j.contains("generator")) {
    const auto& g = j.at("generator");
    check_keys(g,
               {"n_blocks", "dims", "groups", "kernel", "feature_dim",
                "enable_selection", "enable_dca", "dca_slots"},
               "generator");
    if (g.contains("dims")) {
      cfg.generator.dims.clear();
      for (const auto& d : g.at("dims")) cfg.generator.dims.push_back(d.get<int>());
      cfg.generator.n_blocks = static_cast<int>(cfg.generator.dims.size());
    }
    cfg.generator.n_blocks = get_or<int>(g, "n_blocks", cfg.generator.n_blocks);
    cfg.generator.groups = get_or<int>(g, "groups", cfg.generator.groups);
    cfg.generator.kernel = get_or<int>(g, "kernel", cfg.generator.kernel);
    cfg.generator.feature_dim =
        get_or<int>(g, "feature_dim", cfg.generator.feature_dim);
    cfg.generator.enable_selection =
        get_or<bool>(g, "enable_selection", cfg.generator.enable_selection);
    cfg.generator.enable_dca =
        get_or<bool>(g, "enable_dca", cfg.generator.enable_dca);
    cfg.generator.dca_slots = get_or<int>(g, "dca_slots", cfg.generator.dca_slots);
  }

  if (j.contains("discriminator")) {
    const auto& d = j.at("discriminator");
    check_keys(d, {"base_channels", "layers"}, "discriminator");
    cfg.discriminator.base_channels =
        get_or<int>(d, "base_channels", cfg.discriminator.base_channels);
    cfg.discriminator.layers = get_or<int>(d, "layers", cfg.discriminator.layers);
  }

  if (j.contains("mcse")) {
    const auto& m = j.at("mcse");
    check_keys(m, {"embed_dim", "blocks"}, "mcse");
    cfg.mcse_embed_dim = get_or<int>(m, "embed_dim", cfg.mcse_embed_dim);
    cfg.mcse_blocks = get_or<int>(m, "blocks", cfg.mcse_blocks);
  }

  if (j.contains("loss")) {
    const auto& l = j.at("loss");
    check_keys(l, {"w_vme", "w_bf", "w_adv_g", "w_adv_d", "snr_clip_db"}, "loss");
    cfg.loss.w_vme = get_or<double>(l, "w_vme", cfg.loss.w_vme);
    cfg.loss.w_bf = get_or<double>(l, "w_bf", cfg.loss.w_bf);
    cfg.loss.w_adv_g = get_or<double>(l, "w_adv_g", cfg.loss.w_adv_g);
    cfg.loss.w_adv_d = get_or<double>(l, "w_adv_d", cfg.loss.w_adv_d);
    cfg.loss.snr_clip_db = get_or<double>(l, "snr_clip_db", cfg.loss.snr_clip_db);
    cfg.loss.validate();
  }

  if (j.contains("train")) {
    const auto& t = j.at("train");
    check_keys(t,
               {"mode", "steps", "pretrain_steps", "batch", "lr",
                "mcse_lr_scale", "checkpoint_every", "block_len", "backend",
                "vm_in_beamformer"},
               "train");
    cfg.train.mode = train_mode_from_name(get_or<std::string>(t, "mode", "vmbf"));
    cfg.train.steps = get_or<int>(t, "steps", cfg.train.steps);
    cfg.train.pretrain_steps =
        get_or<int>(t, "pretrain_steps", cfg.train.pretrain_steps);
    cfg.train.batch = get_or<int>(t, "batch", cfg.train.batch);
    cfg.train.lr = get_or<double>(t, "lr", cfg.train.lr);
    cfg.train.mcse_lr_scale =
        get_or<double>(t, "mcse_lr_scale", cfg.train.mcse_lr_scale);
    cfg.train.checkpoint_every =
        get_or<int>(t, "checkpoint_every", cfg.train.checkpoint_every);
    cfg.train.block_len = get_or<int>(t, "block_len", cfg.train.block_len);
    cfg.train.backend = get_or<std::string>(t, "backend", cfg.train.backend);
    cfg.train.vm_in_beamformer =
        get_or<bool>(t, "vm_in_beamformer", cfg.train.vm_in_beamformer);
    bf::backend_from_name(cfg.train.backend);
    require(cfg.train.steps >= 0 && cfg.train.batch >= 1 &&
                cfg.train.checkpoint_every >= 1,
            ErrorKind::config, "bad train section");
  }

  if (j.contains("pipelines")) {
    require(j.at("pipelines").is_array(), ErrorKind::config,
            "pipelines must be an array");
    for (const auto& p : j.at("pipelines")) {
      check_keys(p,
                 {"name", "conditioning", "backend", "vm_source", "mask_source",
                  "vm_in_beamformer", "vm_loss_enabled"},
                 "pipeline");
      PipelineSection s;
      s.name = p.at("name").get<std::string>();
      s.conditioning = get_or<std::string>(p, "conditioning", s.conditioning);
      s.backend = get_or<std::string>(p, "backend", s.backend);
      s.vm_source = get_or<std::string>(p, "vm_source", s.vm_source);
      s.mask_source = get_or<std::string>(p, "mask_source", s.mask_source);
      s.vm_in_beamformer = get_or<bool>(p, "vm_in_beamformer", s.vm_in_beamformer);
      s.vm_loss_enabled = get_or<bool>(p, "vm_loss_enabled", s.vm_loss_enabled);
      // fail early on unknown enum values
      s.build(cfg.stft, cfg.train.block_len);
      cfg.pipelines.push_back(std::move(s));
    }
  }

  if (j.contains("evaluate")) {
    const auto& e = j.at("evaluate");
    check_keys(e, {"bootstrap_resamples", "timing"}, "evaluate");
    cfg.evaluate.bootstrap_resamples =
        get_or<int>(e, "bootstrap_resamples", cfg.evaluate.bootstrap_resamples);
    cfg.evaluate.timing = get_or<bool>(e, "timing", cfg.evaluate.timing);
  }

  // Channel counts always follow the array section.
  const auto geometry = cfg.array.build();
  cfg.generator.m_r = static_cast<int>(geometry.rm_channels().size());
  cfg.generator.m_v = static_cast<int>(geometry.vm_channels().size());
  cfg.generator.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::config, "cannot open config: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_config(text);
}

std::string dump_config(const RunConfig& cfg) {
  json corpus{{"task", scene::task_name(cfg.corpus.task)},
              {"scenes", cfg.corpus.scenes},
              {"clip_seconds", cfg.corpus.ranges.clip_seconds},
              {"room_x", range_json(cfg.corpus.ranges.room_x)},
              {"room_y", range_json(cfg.corpus.ranges.room_y)},
              {"room_z", range_json(cfg.corpus.ranges.room_z)},
              {"absorption", range_json(cfg.corpus.ranges.absorption)},
              {"snr_db", range_json(cfg.corpus.ranges.snr_db)},
              {"sir_db", range_json(cfg.corpus.ranges.sir_db)},
              {"src_dist", range_json(cfg.corpus.ranges.src_dist)},
              {"array_height", range_json(cfg.corpus.ranges.array_height)},
              {"wall_margin", cfg.corpus.ranges.wall_margin},
              {"fov_half_angle_deg", cfg.corpus.ranges.fov_half_angle_deg},
              {"max_order", cfg.corpus.ranges.max_order},
              {"omni_noise_max", cfg.corpus.ranges.omni_noise_max},
              {"fov_noise_max", cfg.corpus.ranges.fov_noise_max},
              {"max_interferers", cfg.corpus.ranges.max_interferers}};
  json array{{"kind", cfg.array.kind},
             {"radius", cfg.array.radius},
             {"vertical", cfg.array.vertical},
             {"rm_channels", cfg.array.rm_channels}};
  if (!cfg.array.positions.empty()) {
    json pos = json::array();
    for (const auto& p : cfg.array.positions) {
      pos.push_back(json::array({p[0], p[1], p[2]}));
    }
    array["positions"] = pos;
  }
  json pipelines = json::array();
  for (const auto& p : cfg.pipelines) {
    pipelines.push_back({{"name", p.name},
                         {"conditioning", p.conditioning},
                         {"backend", p.backend},
                         {"vm_source", p.vm_source},
                         {"mask_source", p.mask_source},
                         {"vm_in_beamformer", p.vm_in_beamformer},
                         {"vm_loss_enabled", p.vm_loss_enabled}});
  }
  json j{{"seed", cfg.seed},
         {"output_dir", cfg.output_dir},
         {"corpus", corpus},
         {"array", array},
         {"stft",
          {{"win_len", cfg.stft.win_len},
           {"hop", cfg.stft.hop},
           {"fft_len", cfg.stft.fft_len}}},
         {"generator",
          {{"n_blocks", cfg.generator.n_blocks},
           {"dims", cfg.generator.dims},
           {"groups", cfg.generator.groups},
           {"kernel", cfg.generator.kernel},
           {"feature_dim", cfg.generator.feature_dim},
           {"enable_selection", cfg.generator.enable_selection},
           {"enable_dca", cfg.generator.enable_dca},
           {"dca_slots", cfg.generator.dca_slots}}},
         {"discriminator",
          {{"base_channels", cfg.discriminator.base_channels},
           {"layers", cfg.discriminator.layers}}},
         {"mcse", {{"embed_dim", cfg.mcse_embed_dim}, {"blocks", cfg.mcse_blocks}}},
         {"loss",
          {{"w_vme", cfg.loss.w_vme},
           {"w_bf", cfg.loss.w_bf},
           {"w_adv_g", cfg.loss.w_adv_g},
           {"w_adv_d", cfg.loss.w_adv_d},
           {"snr_clip_db", cfg.loss.snr_clip_db}}},
         {"train",
          {{"mode", train_mode_name(cfg.train.mode)},
           {"steps", cfg.train.steps},
           {"pretrain_steps", cfg.train.pretrain_steps},
           {"batch", cfg.train.batch},
           {"lr", cfg.train.lr},
           {"mcse_lr_scale", cfg.train.mcse_lr_scale},
           {"checkpoint_every", cfg.train.checkpoint_every},
           {"block_len", cfg.train.block_len},
           {"backend", cfg.train.backend},
           {"vm_in_beamformer", cfg.train.vm_in_beamformer}}},
         {"pipelines", pipelines},
         {"evaluate",
          {{"bootstrap_resamples", cfg.evaluate.bootstrap_resamples},
           {"timing", cfg.evaluate.timing}}}};
  return j.dump(2);
}

std::vector<std::string> known_ablations() {
  return {"w/o-vm-loss", "w/o-vm-signals", "w/o-gan", "w/o-selection",
          "w/o-dca"};
}

void apply_ablation(RunConfig& cfg, const std::string& name) {
  std::string key = name;
  if (key.rfind("wo-", 0) == 0) key = "w/o-" + key.substr(3);
  if (key == "w/o-vm-loss") {
    cfg.loss.w_vme = 0.0;
    for (auto& p : cfg.pipelines) p.vm_loss_enabled = false;
  } else if (key == "w/o-vm-signals") {
    cfg.train.vm_in_beamformer = false;
    for (auto& p : cfg.pipelines) p.vm_in_beamformer = false;
  } else if (key == "w/o-gan") {
    cfg.loss.w_adv_g = 0.0;
    cfg.loss.w_adv_d = 0.0;
  } else if (key == "w/o-selection") {
    cfg.generator.enable_selection = false;
  } else if (key == "w/o-dca") {
    cfg.generator.enable_dca = false;
  } else {
    throw Error(ErrorKind::config, "unknown ablation: " + name);
  }
}

}  // namespace vmbeam::harness
