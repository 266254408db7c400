// tests/fixtures.hpp
//
// Shared desk-scale fixtures: small rooms, short clips, low ISM order so
// suites stay fast while exercising the full synthesis path.

#ifndef VMBEAM_TESTS_FIXTURES_HPP_
#define VMBEAM_TESTS_FIXTURES_HPP_

#include "vmbeam/room/room.hpp"
#include "vmbeam/scene/scene.hpp"

namespace vmbeam::testfix {

inline scene::SceneRanges desk_ranges(double clip_seconds = 0.6,
                                      int max_order = 3) {
  scene::SceneRanges r;
  r.room_x = {3.4, 5.0};
  r.room_y = {3.4, 5.0};
  r.room_z = {2.2, 3.0};
  r.absorption = {0.25, 0.45};
  r.snr_db = {-5.0, 5.0};
  r.sir_db = {-5.0, 5.0};
  r.src_dist = {0.5, 1.2};
  r.clip_seconds = clip_seconds;
  r.max_order = max_order;
  r.omni_noise_max = 3;
  r.fov_noise_max = 2;
  r.max_interferers = 2;
  return r;
}

inline room::ArrayGeometry desk_array() {
  auto a = room::build_array_circular_plus_vertical(0.10, 0.10);
  a.set_rm_channels({0, 2});  // opposite circle mics; ref = mic 0
  return a;
}

inline scene::AudioScene make_scene(std::uint64_t seed, int index,
                                    scene::Task task,
                                    const scene::SceneRanges& ranges,
                                    const room::ArrayGeometry& array) {
  auto spec = scene::sample_scene(seed, index, task, ranges);
  return scene::render_scene(spec, array);
}

inline scene::AudioScene make_scene(std::uint64_t seed, int index = 0) {
  return make_scene(seed, index, scene::Task::omni, desk_ranges(), desk_array());
}

}  // namespace vmbeam::testfix

#endif  // VMBEAM_TESTS_FIXTURES_HPP_
