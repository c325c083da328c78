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

#ifndef TRAJKIT_SCENE_HPP_
#define TRAJKIT_SCENE_HPP_

#include <optional>
#include <string>
#include <vector>

#include "trajkit/pose.hpp"
#include "trajkit/rng.hpp"
#include "trajkit/trajectory.hpp"

namespace trajkit {

inline constexpr double kAnimalScaleFactor = 0.6;
inline constexpr double kMinClearanceM = 0.5;
inline constexpr int kPlacementRetries = 64;
inline constexpr int kMinEntities = 1;
inline constexpr int kMaxEntities = 3;

enum class EntityKind { human, animal };

const char* kind_name(EntityKind kind);
double scale_for_kind(EntityKind kind);

// One placed actor: an id unique within the scene, its text prompt, the
// render scale of the underlying asset, and a world-frame pose track.
struct SceneEntity {
  std::string entity_id;
  std::string prompt;
  double scale_factor = 1.0;
  PoseSequenced poses;
};

// 1-3 entities sharing a frame grid on the square stage.
struct SceneComposition {
  double stage_side = kStageSideM;
  std::string location_tag;
  std::vector<SceneEntity> entities;

  int frame_count() const;
  double fps() const;
};

// Enforces the composition contract: entity count in [1, 3], unique ids,
// one shared frame grid, every position inside the stage footprint, and
// pairwise center distance >= kMinClearanceM at every frame (with a small
// epsilon so canonically serialized scenes re-validate).
void validate_scene(const SceneComposition& scene);

// Smallest center-to-center distance between any entity pair over all
// frames; +infinity for single-entity scenes.
double min_pairwise_clearance(const SceneComposition& scene);

// Rigid stage placement of one canonical trajectory.
struct Placement {
  double yaw_rad = 0.0;
  double dx = 0.0;
  double dy = 0.0;

  Pose6d as_pose() const;
};

PoseSequenced apply_placement(const Placement& placement,
                              const PoseSequenced& canonical);

struct ComposeOptions {
  double stage_side = kStageSideM;
  double clearance = kMinClearanceM;
  int max_retries = kPlacementRetries;
};

// Draws seeded placements (yaw + offset) that keep each trajectory inside
// the stage and clear of the already-placed ones at every frame. Each
// trajectory gets `max_retries` draws; exhaustion raises a PlacementError
// naming the closest colliding pair. `ids` label the trajectories in that
// error.
std::vector<Placement> place_trajectories(
    const std::vector<const PoseSequenced*>& canonical,
    const std::vector<std::string>& ids, SeededRng& rng,
    const ComposeOptions& options = {});

struct ComposeEntitySpec {
  TrajectoryTemplate tmpl;
  EntityKind kind = EntityKind::human;
  // Optional; defaulted to e<index> and a kind-generic prompt when empty.
  std::string entity_id;
  std::string prompt;
};

// Generates each template at the shared frame grid, places all of them on
// the stage with a seeded retry loop, and returns a validated composition.
// Deterministic for a fixed seed.
SceneComposition compose_scene(const std::vector<ComposeEntitySpec>& specs,
                               int frames, double fps, std::uint64_t seed,
                               const std::string& location_tag = "",
                               const ComposeOptions& options = {});

}  // namespace trajkit

#endif  // TRAJKIT_SCENE_HPP_
