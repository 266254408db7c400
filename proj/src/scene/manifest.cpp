// vmbeam/scene/manifest.cpp
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

#include "vmbeam/scene/manifest.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace vmbeam::scene {

namespace {

using nlohmann::json;

constexpr const char* kSchema = "vmbeam-corpus";
constexpr int kVersion = 1;

json point_to_json(const room::Point& p) { return json::array({p[0], p[1], p[2]}); }

room::Point point_from_json(const json& j) {
  require(j.is_array() && j.size() == 3, ErrorKind::data, "bad point in manifest");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json range_to_json(const std::array<double, 2>& r) {
  return json::array({r[0], r[1]});
}

std::array<double, 2> range_from_json(const json& j) {
  require(j.is_array() && j.size() == 2, ErrorKind::data, "bad range in manifest");
  return {j[0].get<double>(), j[1].get<double>()};
}

json ranges_to_json(const SceneRanges& r) {
  return json{{"room_x", range_to_json(r.room_x)},
              {"room_y", range_to_json(r.room_y)},
              {"room_z", range_to_json(r.room_z)},
              {"absorption", range_to_json(r.absorption)},
              {"snr_db", range_to_json(r.snr_db)},
              {"sir_db", range_to_json(r.sir_db)},
              {"src_dist", range_to_json(r.src_dist)},
              {"array_height", range_to_json(r.array_height)},
              {"clip_seconds", r.clip_seconds},
              {"fov_half_angle_deg", r.fov_half_angle_deg},
              {"wall_margin", r.wall_margin},
              {"max_order", r.max_order},
              {"omni_noise_max", r.omni_noise_max},
              {"fov_noise_max", r.fov_noise_max},
              {"max_interferers", r.max_interferers},
              {"fs", r.fs}};
}

SceneRanges ranges_from_json(const json& j) {
  SceneRanges r;
  r.room_x = range_from_json(j.at("room_x"));
  r.room_y = range_from_json(j.at("room_y"));
  r.room_z = range_from_json(j.at("room_z"));
  r.absorption = range_from_json(j.at("absorption"));
  r.snr_db = range_from_json(j.at("snr_db"));
  r.sir_db = range_from_json(j.at("sir_db"));
  r.src_dist = range_from_json(j.at("src_dist"));
  r.array_height = range_from_json(j.at("array_height"));
  r.clip_seconds = j.at("clip_seconds").get<double>();
  r.fov_half_angle_deg = j.at("fov_half_angle_deg").get<double>();
  r.wall_margin = j.at("wall_margin").get<double>();
  r.max_order = j.at("max_order").get<int>();
  r.omni_noise_max = j.at("omni_noise_max").get<int>();
  r.fov_noise_max = j.at("fov_noise_max").get<int>();
  r.max_interferers = j.at("max_interferers").get<int>();
  r.fs = j.at("fs").get<double>();
  return r;
}

json array_to_json(const room::ArrayGeometry& a, const std::string& kind) {
  json mics = json::array();
  for (const auto& p : a.mic_positions) mics.push_back(point_to_json(p));
  json vm = json::array();
  for (bool b : a.is_vm) vm.push_back(b);
  return json{{"kind", kind},
              {"mic_positions", mics},
              {"is_vm", vm},
              {"ref_channel", a.ref_channel},
              {"front_axis", "+x of the array frame, rotated by yaw"}};
}

room::ArrayGeometry array_from_json(const json& j, std::string* kind) {
  room::ArrayGeometry a;
  for (const auto& p : j.at("mic_positions")) {
    a.mic_positions.push_back(point_from_json(p));
  }
  for (const auto& b : j.at("is_vm")) a.is_vm.push_back(b.get<bool>());
  a.ref_channel = j.at("ref_channel").get<int>();
  if (kind) *kind = j.at("kind").get<std::string>();
  a.validate();
  return a;
}

json spec_to_json(const SceneSpec& s) {
  json interferers = json::array();
  for (const auto& p : s.interferer_pos) interferers.push_back(point_to_json(p));
  json noises = json::array();
  for (const auto& p : s.noise_pos) noises.push_back(point_to_json(p));
  return json{{"seed", s.seed},
              {"scene_index", s.scene_index},
              {"task", task_name(s.task)},
              {"room_dims", point_to_json(s.room_dims)},
              {"absorption", s.absorption},
              {"array_center", point_to_json(s.array_center)},
              {"array_yaw", s.array_yaw},
              {"target_pos", point_to_json(s.target_pos)},
              {"interferer_pos", interferers},
              {"noise_pos", noises},
              {"snr_db", s.snr_db},
              {"sir_db", s.sir_db},
              {"clip_seconds", s.clip_seconds},
              {"max_order", s.max_order},
              {"fs", s.fs}};
}

SceneSpec spec_from_json(const json& j) {
  SceneSpec s;
  s.seed = j.at("seed").get<std::uint64_t>();
  s.scene_index = j.at("scene_index").get<int>();
  s.task = task_from_name(j.at("task").get<std::string>());
  s.room_dims = point_from_json(j.at("room_dims"));
  s.absorption = j.at("absorption").get<double>();
  s.array_center = point_from_json(j.at("array_center"));
  s.array_yaw = j.at("array_yaw").get<double>();
  s.target_pos = point_from_json(j.at("target_pos"));
  for (const auto& p : j.at("interferer_pos")) {
    s.interferer_pos.push_back(point_from_json(p));
  }
  for (const auto& p : j.at("noise_pos")) {
    s.noise_pos.push_back(point_from_json(p));
  }
  s.snr_db = j.at("snr_db").get<double>();
  s.sir_db = j.at("sir_db").get<double>();
  s.clip_seconds = j.at("clip_seconds").get<double>();
  s.max_order = j.at("max_order").get<int>();
  s.fs = j.at("fs").get<double>();
  return s;
}

}  // namespace

std::uint64_t fnv1a64(const void* data, std::size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::data, "missing audio file: " + path);
  std::string buf((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  return fnv1a64(buf.data(), buf.size());
}

void write_manifest(const std::string& path, const CorpusManifest& manifest) {
  std::ofstream out(path, std::ios::trunc);
  require(out.good(), ErrorKind::data, "cannot write manifest: " + path);
  json header{{"schema", kSchema},
              {"version", kVersion},
              {"seed", manifest.seed},
              {"task", task_name(manifest.task)},
              {"ranges", ranges_to_json(manifest.ranges)},
              {"array", array_to_json(manifest.array, manifest.array_kind)},
              {"scene_count", manifest.scenes.size()}};
  out << header.dump() << "\n";
  for (const auto& rec : manifest.scenes) {
    json files{{"y", rec.files.y},
               {"x", rec.files.x},
               {"x_rev", rec.files.x_rev},
               {"n", rec.files.n}};
    json sums = json::object();
    for (const auto& [k, v] : rec.checksums) sums[k] = v;
    json line{{"spec", spec_to_json(rec.spec)},
              {"files", files},
              {"checksums", sums},
              {"rt60_measured", rec.rt60_measured},
              {"rt60_eyring", rec.rt60_eyring}};
    out << line.dump() << "\n";
  }
  require(out.good(), ErrorKind::data, "manifest write failed: " + path);
}

CorpusManifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::data, "cannot open manifest: " + path);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::data,
          "empty manifest: " + path);
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::data, "manifest header parse error: " + std::string(e.what()));
  }
  require(header.value("schema", "") == kSchema, ErrorKind::data,
          "not a vmbeam corpus manifest: " + path);
  require(header.value("version", 0) == kVersion, ErrorKind::data,
          "unsupported manifest version in " + path);

  CorpusManifest m;
  m.seed = header.at("seed").get<std::uint64_t>();
  m.task = task_from_name(header.at("task").get<std::string>());
  m.ranges = ranges_from_json(header.at("ranges"));
  m.array = array_from_json(header.at("array"), &m.array_kind);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::data, "manifest scene parse error: " + std::string(e.what()));
    }
    SceneRecord rec;
    rec.spec = spec_from_json(j.at("spec"));
    rec.files.y = j.at("files").at("y").get<std::string>();
    rec.files.x = j.at("files").at("x").get<std::string>();
    rec.files.x_rev = j.at("files").at("x_rev").get<std::string>();
    rec.files.n = j.at("files").at("n").get<std::string>();
    for (const auto& [k, v] : j.at("checksums").items()) {
      rec.checksums[k] = v.get<std::uint64_t>();
    }
    rec.rt60_measured = j.at("rt60_measured").get<double>();
    rec.rt60_eyring = j.at("rt60_eyring").get<double>();
    m.scenes.push_back(std::move(rec));
  }
  return m;
}

void verify_audio(const CorpusManifest& manifest, const std::string& dir) {
  namespace fs = std::filesystem;
  for (const auto& rec : manifest.scenes) {
    const std::vector<std::pair<std::string, std::string>> entries = {
        {"y", rec.files.y},
        {"x", rec.files.x},
        {"x_rev", rec.files.x_rev},
        {"n", rec.files.n}};
    for (const auto& [key, rel] : entries) {
      const std::string full = (fs::path(dir) / rel).string();
      require(fs::exists(full), ErrorKind::data, "missing audio file: " + full);
      const auto it = rec.checksums.find(key);
      if (it != rec.checksums.end()) {
        require(fnv1a64_file(full) == it->second, ErrorKind::data,
                "checksum mismatch for " + full);
      }
    }
  }
}

}  // namespace vmbeam::scene
