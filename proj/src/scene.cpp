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

#include "trajkit/scene.hpp"

#include <cmath>
#include <limits>
#include <set>

namespace trajkit {

namespace {

// Serialized scenes are quantized to 10 significant digits; re-validation
// must not reject a scene over that quantization.
constexpr double kBoundsEps = 1e-8;

struct XyBounds {
  double lo_x, hi_x, lo_y, hi_y;
};

XyBounds rotated_bounds(const PoseSequenced& seq, double yaw_rad) {
  const double c = std::cos(yaw_rad);
  const double s = std::sin(yaw_rad);
  XyBounds b{std::numeric_limits<double>::max(),
             std::numeric_limits<double>::lowest(),
             std::numeric_limits<double>::max(),
             std::numeric_limits<double>::lowest()};
  for (const auto& pose : seq.poses) {
    const double x = c * pose.translation.x() - s * pose.translation.y();
    const double y = s * pose.translation.x() + c * pose.translation.y();
    b.lo_x = std::min(b.lo_x, x);
    b.hi_x = std::max(b.hi_x, x);
    b.lo_y = std::min(b.lo_y, y);
    b.hi_y = std::max(b.hi_y, y);
  }
  return b;
}

// Closest synchronized approach between two placed tracks; also reports the
// frame at which it occurs.
double min_track_distance(const PoseSequenced& a, const PoseSequenced& b) {
  double best = std::numeric_limits<double>::max();
  for (std::size_t f = 0; f < a.poses.size(); ++f) {
    best = std::min(best,
                    (a.poses[f].translation - b.poses[f].translation).norm());
  }
  return best;
}

}  // namespace

const char* kind_name(EntityKind kind) {
  return kind == EntityKind::animal ? "animal" : "human";
}

double scale_for_kind(EntityKind kind) {
  return kind == EntityKind::animal ? kAnimalScaleFactor : 1.0;
}

int SceneComposition::frame_count() const {
  return entities.empty() ? 0 : entities.front().poses.frame_count();
}

double SceneComposition::fps() const {
  return entities.empty() ? 0.0 : entities.front().poses.fps;
}

void validate_scene(const SceneComposition& scene) {
  const int n = static_cast<int>(scene.entities.size());
  if (n < kMinEntities || n > kMaxEntities) {
    throw ValidationError("scene must hold between 1 and 3 entities, got " +
                          std::to_string(n));
  }
  if (!(scene.stage_side > 0.0)) {
    throw ValidationError("scene stage side must be positive");
  }
  std::set<std::string> ids;
  const double half = scene.stage_side / 2.0 + kBoundsEps;
  for (const auto& entity : scene.entities) {
    if (entity.entity_id.empty()) {
      throw ValidationError("scene entity has an empty id");
    }
    if (!ids.insert(entity.entity_id).second) {
      throw ValidationError("duplicate entity id '" + entity.entity_id + "'");
    }
    validate_sequence(entity.poses);
    if (entity.poses.frame_count() != scene.frame_count() ||
        entity.poses.fps != scene.fps()) {
      throw ValidationError("entity '" + entity.entity_id +
                            "' does not share the scene frame grid");
    }
    if (!(entity.scale_factor > 0.0)) {
      throw ValidationError("entity '" + entity.entity_id +
                            "' has non-positive scale factor");
    }
    for (const auto& pose : entity.poses.poses) {
      if (std::abs(pose.translation.x()) > half ||
          std::abs(pose.translation.y()) > half) {
        throw ValidationError("entity '" + entity.entity_id +
                              "' leaves the stage footprint");
      }
      if (orthonormality_error(pose.rotation) > kOrthonormalityTol) {
        throw ValidationError("entity '" + entity.entity_id +
                              "' carries a non-orthonormal rotation");
      }
    }
  }
  if (min_pairwise_clearance(scene) < kMinClearanceM - kBoundsEps) {
    throw ValidationError("scene entities come closer than the required " +
                          std::to_string(kMinClearanceM) + " m clearance");
  }
}

double min_pairwise_clearance(const SceneComposition& scene) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scene.entities.size(); ++i) {
    for (std::size_t j = i + 1; j < scene.entities.size(); ++j) {
      best = std::min(best, min_track_distance(scene.entities[i].poses,
                                               scene.entities[j].poses));
    }
  }
  return best;
}

Pose6d Placement::as_pose() const {
  return Pose6d::from_parts(rot_z(yaw_rad), Vec3<double>(dx, dy, 0.0),
                            "placement");
}

PoseSequenced apply_placement(const Placement& placement,
                              const PoseSequenced& canonical) {
  const Pose6d place = placement.as_pose();
  PoseSequenced out;
  out.fps = canonical.fps;
  out.poses.reserve(canonical.poses.size());
  for (const auto& pose : canonical.poses) {
    out.poses.push_back(compose(place, pose));
  }
  return out;
}

std::vector<Placement> place_trajectories(
    const std::vector<const PoseSequenced*>& canonical,
    const std::vector<std::string>& ids, SeededRng& rng,
    const ComposeOptions& options) {
  if (canonical.size() != ids.size()) {
    throw ValidationError("place_trajectories: ids/trajectories mismatch");
  }
  const double half = options.stage_side / 2.0;

  std::vector<Placement> placements;
  std::vector<PoseSequenced> placed;
  for (std::size_t i = 0; i < canonical.size(); ++i) {
    bool ok = false;
    // Track the worst offender for the error message if we give up.
    double closest = std::numeric_limits<double>::max();
    std::size_t closest_partner = 0;
    for (int attempt = 0; attempt < options.max_retries && !ok; ++attempt) {
      Placement p;
      p.yaw_rad = rng.uniform(0.0, 2.0 * M_PI);
      const XyBounds b = rotated_bounds(*canonical[i], p.yaw_rad);
      const double min_dx = -half - b.lo_x;
      const double max_dx = half - b.hi_x;
      const double min_dy = -half - b.lo_y;
      const double max_dy = half - b.hi_y;
      if (min_dx > max_dx || min_dy > max_dy) {
        continue;  // footprint does not fit the stage at this yaw
      }
      p.dx = rng.uniform(min_dx, max_dx);
      p.dy = rng.uniform(min_dy, max_dy);

      PoseSequenced candidate = apply_placement(p, *canonical[i]);
      ok = true;
      for (std::size_t j = 0; j < placed.size(); ++j) {
        const double dist = min_track_distance(candidate, placed[j]);
        if (dist < closest) {
          closest = dist;
          closest_partner = j;
        }
        if (dist < options.clearance) {
          ok = false;
          break;
        }
      }
      if (ok) {
        placements.push_back(p);
        placed.push_back(std::move(candidate));
      }
    }
    if (!ok) {
      const std::string& partner =
          placed.empty() ? ids[i] : ids[closest_partner];
      throw PlacementError(
          "could not place '" + ids[i] + "' after " +
              std::to_string(options.max_retries) + " attempts; closest " +
              "conflict with '" + partner + "' at " +
              std::to_string(closest) + " m",
          ids[i], partner);
    }
  }
  return placements;
}

SceneComposition compose_scene(const std::vector<ComposeEntitySpec>& specs,
                               int frames, double fps, std::uint64_t seed,
                               const std::string& location_tag,
                               const ComposeOptions& options) {
  const int n = static_cast<int>(specs.size());
  if (n < kMinEntities || n > kMaxEntities) {
    throw ValidationError("compose_scene takes 1 to 3 entities, got " +
                          std::to_string(n));
  }

  std::vector<PoseSequenced> canonical;
  std::vector<const PoseSequenced*> canonical_ptrs;
  std::vector<std::string> ids;
  canonical.reserve(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    canonical.push_back(generate_template(specs[i].tmpl, frames, fps));
    ids.push_back(specs[i].entity_id.empty() ? "e" + std::to_string(i)
                                             : specs[i].entity_id);
  }
  for (const auto& seq : canonical) canonical_ptrs.push_back(&seq);

  SeededRng rng(seed);
  const std::vector<Placement> placements =
      place_trajectories(canonical_ptrs, ids, rng, options);

  SceneComposition scene;
  scene.stage_side = options.stage_side;
  scene.location_tag = location_tag;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    SceneEntity entity;
    entity.entity_id = ids[i];
    entity.prompt = specs[i].prompt.empty()
                        ? (specs[i].kind == EntityKind::animal
                               ? "an animal moving through the scene"
                               : "a person moving through the scene")
                        : specs[i].prompt;
    entity.scale_factor = scale_for_kind(specs[i].kind);
    entity.poses = apply_placement(placements[i], canonical[i]);
    scene.entities.push_back(std::move(entity));
  }
  validate_scene(scene);
  return scene;
}

}  // namespace trajkit
