/*
 * Copyright 2026 The Trajkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef TRAJKIT_MANIFEST_HPP_
#define TRAJKIT_MANIFEST_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "trajkit/camera.hpp"
#include "trajkit/rng.hpp"
#include "trajkit/scene.hpp"
#include "trajkit/trajectory.hpp"

namespace trajkit {

// A renderable subject: its id, whether it moves like a person or an
// animal (which fixes the render scale), and the caption used as its
// prompt.
struct AssetRecord {
  std::string asset_id;
  EntityKind kind = EntityKind::human;
  std::string prompt;
};

// Built-in asset bank: 35 human and 35 animal subjects with short varied
// captions.
const std::vector<AssetRecord>& default_assets();

// One placed subject inside a composition. The placement (yaw + offset) is
// drawn during enumeration and recorded here, so realizing the scene is a
// deterministic replay with no retry loop.
struct ManifestEntity {
  std::string asset_id;
  std::string template_id;
  double scale_factor = 1.0;
  double yaw_rad = 0.0;
  double dx = 0.0;
  double dy = 0.0;
};

struct ManifestComposition {
  std::string comp_id;
  std::string location_tag;
  int frames = 0;
  double fps = 0.0;
  std::vector<ManifestEntity> entities;
};

// One rendered view of a composition: clip_id is "<comp_id>_cam<k>".
struct ClipRecord {
  std::string clip_id;
  std::string comp_id;
  int camera_index = 0;
};

struct Manifest {
  std::uint64_t seed = 0;
  double stage_side = kStageSideM;
  CameraRig rig;
  std::vector<AssetRecord> assets;
  std::vector<ManifestComposition> compositions;
  std::vector<ClipRecord> clips;
};

struct ManifestOptions {
  int compositions = 0;
  int frames = 100;
  double fps = 20.0;
  std::uint64_t seed = 0;
  std::vector<std::string> locations;  // empty -> default_locations()
};

const std::vector<std::string>& default_locations();

// Upper bound on distinct compositions: for each entity count n in [1, 3],
// unordered asset n-subsets times unordered template n-subsets, summed and
// multiplied by the location count. The canonical pairing (sorted assets
// matched to sorted templates) makes each (asset-set, template-set,
// location) triple one composition.
long long achievable_compositions(std::size_t asset_count,
                                  std::size_t template_count,
                                  std::size_t location_count);

// Seeded enumeration of `options.compositions` distinct compositions plus
// one clip per rig camera for each. Draws (asset-set, template-set,
// location) triples without replacement, realizes a stage placement for
// each accepted draw, and records it. Throws RangeError when the budget
// exceeds the achievable count and PlacementError is folded into the draw
// loop (a triple whose placement fails is skipped, not retried).
Manifest enumerate_manifest(const ManifestOptions& options,
                            const std::vector<AssetRecord>& assets,
                            const std::vector<TrajectoryTemplate>& templates);
Manifest enumerate_manifest(const ManifestOptions& options);

// Reconstructs the scene a composition describes by regenerating each
// template at the recorded frame grid and applying the recorded placement.
// The result is validated before being returned.
SceneComposition realize_scene(const Manifest& manifest,
                               const ManifestComposition& comp);

std::string serialize_manifest(const Manifest& manifest);
Manifest parse_manifest(std::string_view text);

}  // namespace trajkit

#endif  // TRAJKIT_MANIFEST_HPP_
