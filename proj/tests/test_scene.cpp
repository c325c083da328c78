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

#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "test_support.hpp"
#include "trajkit/error.hpp"
#include "trajkit/scene.hpp"
#include "trajkit/trajectory.hpp"

namespace trajkit {
namespace {

std::vector<ComposeEntitySpec> three_entity_specs() {
  return {{find_template("line_len2"), EntityKind::human, "", ""},
          {find_template("circle_r0.8_ccw"), EntityKind::animal, "", ""},
          {find_template("s_curve_r0.6_lr"), EntityKind::human, "", ""}};
}

PoseSequenced static_track_at(double x, double y, int frames) {
  PoseSequenced seq;
  for (int f = 0; f < frames; ++f) {
    seq.poses.push_back(Pose6d::from_parts(Mat3<double>::Identity(),
                                           Vec3<double>(x, y, 0.0)));
  }
  return seq;
}

TEST_SUITE("scene") {

TEST_CASE("composition is deterministic for a fixed seed") {
  const SceneComposition a = compose_scene(three_entity_specs(), 40, 20.0, 9);
  const SceneComposition b = compose_scene(three_entity_specs(), 40, 20.0, 9);
  REQUIRE(a.entities.size() == b.entities.size());
  for (std::size_t n = 0; n < a.entities.size(); ++n) {
    CHECK(a.entities[n].entity_id == b.entities[n].entity_id);
    for (std::size_t f = 0; f < a.entities[n].poses.poses.size(); ++f) {
      CHECK(testing::pose_diff(a.entities[n].poses.poses[f],
                               b.entities[n].poses.poses[f]) == 0.0);
    }
  }
  const SceneComposition c = compose_scene(three_entity_specs(), 40, 20.0, 10);
  CHECK((a.entities[0].poses.poses[0].translation -
         c.entities[0].poses.poses[0].translation)
            .norm() > 0.0);
}

TEST_CASE("composed scenes respect clearance and stage bounds") {
  for (const std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
    const SceneComposition scene =
        compose_scene(three_entity_specs(), 30, 20.0, seed);
    validate_scene(scene);
    CHECK(min_pairwise_clearance(scene) >= kMinClearanceM);
    for (const SceneEntity& entity : scene.entities) {
      for (const Pose6d& pose : entity.poses.poses) {
        CHECK(std::abs(pose.translation.x()) <= kStageSideM / 2.0 + 1e-9);
        CHECK(std::abs(pose.translation.y()) <= kStageSideM / 2.0 + 1e-9);
      }
    }
  }
}

TEST_CASE("animal entities get the reduced render scale") {
  const SceneComposition scene =
      compose_scene(three_entity_specs(), 20, 20.0, 3);
  CHECK(scene.entities[0].scale_factor == 1.0);
  CHECK(scene.entities[1].scale_factor == kAnimalScaleFactor);
  CHECK(scene.entities[2].scale_factor == 1.0);
}

TEST_CASE("placement applies yaw about z then the planar offset") {
  Placement placement;
  placement.yaw_rad = M_PI / 2.0;
  placement.dx = 1.0;
  placement.dy = -0.5;
  PoseSequenced canonical;
  canonical.poses.push_back(Pose6d::from_parts(Mat3<double>::Identity(),
                                               Vec3<double>(1.0, 0.0, 0.0)));
  const PoseSequenced placed = apply_placement(placement, canonical);
  // (1, 0, 0) rotates to (0, 1, 0), then shifts by (1, -0.5, 0).
  CHECK((placed.poses[0].translation - Vec3<double>(1.0, 0.5, 0.0)).norm() <
        1e-14);
  CHECK((placed.poses[0].rotation - rot_z(M_PI / 2.0)).cwiseAbs().maxCoeff() <
        1e-15);
}

TEST_CASE("placement equals rigid pose composition") {
  SeededRng rng(77);
  Placement placement;
  placement.yaw_rad = rng.uniform(-M_PI, M_PI);
  placement.dx = rng.uniform(-1.0, 1.0);
  placement.dy = rng.uniform(-1.0, 1.0);
  PoseSequenced canonical;
  for (int f = 0; f < 6; ++f) {
    canonical.poses.push_back(testing::random_pose(rng, 1.0));
  }
  const PoseSequenced placed = apply_placement(placement, canonical);
  for (int f = 0; f < 6; ++f) {
    const Pose6d oracle = compose(placement.as_pose(), canonical.poses[f]);
    CHECK(testing::pose_diff(placed.poses[f], oracle) < 1e-15);
  }
}

TEST_CASE("validation rejects contract violations") {
  SceneComposition scene;
  CHECK_THROWS_AS(validate_scene(scene), ValidationError);  // no entities

  SceneEntity entity;
  entity.entity_id = "e0";
  entity.prompt = "a walker";
  entity.poses = static_track_at(0.0, 0.0, 5);
  scene.entities = {entity, entity};  // duplicate id
  CHECK_THROWS_AS(validate_scene(scene), ValidationError);

  scene.entities[1].entity_id = "e1";
  scene.entities[1].poses = static_track_at(0.3, 0.0, 5);  // too close
  CHECK_THROWS_AS(validate_scene(scene), ValidationError);

  scene.entities[1].poses = static_track_at(3.0, 0.0, 5);  // off stage
  CHECK_THROWS_AS(validate_scene(scene), ValidationError);

  scene.entities[1].poses = static_track_at(1.0, 0.0, 4);  // frame mismatch
  CHECK_THROWS_AS(validate_scene(scene), ValidationError);

  scene.entities[1].poses = static_track_at(1.0, 0.0, 5);
  validate_scene(scene);  // now sound
  CHECK(min_pairwise_clearance(scene) == doctest::Approx(1.0));
}

TEST_CASE("single entity clearance is infinite") {
  SceneComposition scene;
  SceneEntity entity;
  entity.entity_id = "only";
  entity.prompt = "a lone walker";
  entity.poses = static_track_at(0.5, 0.5, 3);
  scene.entities.push_back(entity);
  CHECK(std::isinf(min_pairwise_clearance(scene)));
}

TEST_CASE("impossible packing raises a placement error naming entities") {
  ComposeOptions options;
  options.stage_side = 1.0;
  options.clearance = 2.0;  // cannot fit twice in a 1 m stage
  std::vector<ComposeEntitySpec> specs = {
      {find_template("static"), EntityKind::human, "left_walker", ""},
      {find_template("static"), EntityKind::human, "right_walker", ""}};
  try {
    compose_scene(specs, 5, 20.0, 1, "", options);
    FAIL("expected PlacementError");
  } catch (const PlacementError& e) {
    const std::string message = e.what();
    CHECK(message.find("left_walker") != std::string::npos);
    CHECK(message.find("right_walker") != std::string::npos);
  }
}

TEST_CASE("entity count limits are enforced") {
  std::vector<ComposeEntitySpec> specs(4, {find_template("static"),
                                           EntityKind::human, "", ""});
  CHECK_THROWS_AS(compose_scene(specs, 5, 20.0, 1), ValidationError);
  CHECK_THROWS_AS(compose_scene({}, 5, 20.0, 1), ValidationError);
}

}  // TEST_SUITE

}  // namespace
}  // namespace trajkit
