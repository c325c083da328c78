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

#include "doctest.h"
#include "test_support.hpp"
#include "trajkit/pose.hpp"
#include "trajkit/rng.hpp"

namespace trajkit {
namespace {

using testing::max_abs_diff;
using testing::pose_diff;
using testing::random_pose;
using testing::random_rotation;
using testing::to_homogeneous;

TEST_SUITE("pose") {

TEST_CASE("compose with identity is a no-op") {
  SeededRng rng(11);
  const Pose6d p = random_pose(rng);
  CHECK(pose_diff(compose(Pose6d::identity(), p), p) == 0.0);
  CHECK(pose_diff(compose(p, Pose6d::identity()), p) == 0.0);
}

TEST_CASE("compose of two quarter turns matches the hand-worked result") {
  const Pose6d step = Pose6d::from_parts(rot_z(M_PI / 2.0),
                                         Vec3<double>(1.0, 0.0, 0.0));
  const Pose6d result = compose(step, step);

  const Pose6d expected = Pose6d::from_parts(rot_z(M_PI),
                                             Vec3<double>(1.0, 1.0, 0.0));
  CHECK(pose_diff(result, expected) < 1e-15);
}

TEST_CASE("compose agrees with 4x4 homogeneous multiplication") {
  SeededRng rng(12);
  for (int i = 0; i < 200; ++i) {
    const Pose6d a = random_pose(rng);
    const Pose6d b = random_pose(rng);
    const Eigen::Matrix4d oracle = to_homogeneous(a) * to_homogeneous(b);
    CHECK(max_abs_diff(to_homogeneous(compose(a, b)), oracle) < 1e-13);
  }
}

TEST_CASE("compose is associative within floating-point slack") {
  SeededRng rng(13);
  for (int i = 0; i < 100; ++i) {
    const Pose6d a = random_pose(rng);
    const Pose6d b = random_pose(rng);
    const Pose6d c = random_pose(rng);
    CHECK(pose_diff(compose(compose(a, b), c), compose(a, compose(b, c))) <
          1e-8);
  }
}

TEST_CASE("invert of a quarter turn matches the hand-worked result") {
  const Pose6d p = Pose6d::from_parts(rot_z(M_PI / 2.0),
                                      Vec3<double>(1.0, 0.0, 0.0));
  const Pose6d inv = invert(p);
  CHECK(max_abs_diff(inv.rotation, rot_z(-M_PI / 2.0)) < 1e-15);
  CHECK((inv.translation - Vec3<double>(0.0, 1.0, 0.0)).norm() < 1e-15);
}

TEST_CASE("invert composes to identity and is an involution") {
  SeededRng rng(14);
  for (int i = 0; i < 100; ++i) {
    const Pose6d p = random_pose(rng);
    CHECK(pose_diff(compose(p, invert(p)), Pose6d::identity()) < 1e-9);
    CHECK(pose_diff(compose(invert(p), p), Pose6d::identity()) < 1e-9);
    CHECK(pose_diff(invert(invert(p)), p) < 1e-12);
  }
}

TEST_CASE("rotation angle of identical rotations is exactly zero") {
  SeededRng rng(15);
  const Mat3<double> r = random_rotation(rng);
  CHECK(rotation_angle_between_deg(r, r) == 0.0);
}

TEST_CASE("rotation angle ignores the shared frame") {
  // Rx(30) vs Rx(30) * Ry(45): the relative rotation is a pure 45-degree
  // turn whatever the common prefix is.
  const Mat3<double> a = rot_x(30.0 * kRadPerDeg);
  const Mat3<double> b = a * rot_y(45.0 * kRadPerDeg);
  CHECK(rotation_angle_between_deg(a, b) == doctest::Approx(45.0).epsilon(1e-9));
}

TEST_CASE("rotation angle reaches the antipode") {
  const Mat3<double> identity = Mat3<double>::Identity();
  CHECK(rotation_angle_between_deg(identity, rot_z(M_PI)) ==
        doctest::Approx(180.0).epsilon(1e-12));
}

TEST_CASE("rotation angle is symmetric and clamps roundoff") {
  SeededRng rng(16);
  for (int i = 0; i < 200; ++i) {
    const Mat3<double> a = random_rotation(rng);
    const Mat3<double> b = random_rotation(rng);
    const double ab = rotation_angle_between_deg(a, b);
    const double ba = rotation_angle_between_deg(b, a);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    CHECK(ab >= 0.0);
    CHECK(ab <= 180.0);
    // Independent oracle: quaternion geodesic angle.
    const Eigen::Quaterniond qa(a);
    const Eigen::Quaterniond qb(b);
    const double dot = std::min(1.0, std::abs(qa.dot(qb)));
    const double oracle = 2.0 * std::acos(dot) * kDegPerRad;
    CHECK(ab == doctest::Approx(oracle).epsilon(1e-7));
  }
}

TEST_CASE("align_first_frame removes a constant offset") {
  SeededRng rng(17);
  PoseSequenced reference;
  for (int f = 0; f < 10; ++f) {
    reference.poses.push_back(random_pose(rng));
  }
  PoseSequenced estimate = reference;
  const Vec3<double> offset(1.0, 2.0, 3.0);
  for (auto& pose : estimate.poses) pose.translation += offset;

  const PoseSequenced aligned = align_first_frame(estimate, reference);
  for (int f = 0; f < 10; ++f) {
    CHECK((aligned.poses[f].translation - reference.poses[f].translation)
              .norm() < 1e-12);
  }
  // Frame 0 must land on the reference exactly, not merely close.
  CHECK(aligned.poses[0].translation == reference.poses[0].translation);
}

TEST_CASE("align_first_frame leaves rotations untouched") {
  SeededRng rng(18);
  PoseSequenced reference;
  PoseSequenced estimate;
  for (int f = 0; f < 5; ++f) {
    reference.poses.push_back(random_pose(rng));
    estimate.poses.push_back(random_pose(rng));
  }
  const PoseSequenced aligned = align_first_frame(estimate, reference);
  for (int f = 0; f < 5; ++f) {
    CHECK(aligned.poses[f].rotation == estimate.poses[f].rotation);
  }
}

TEST_CASE("align_first_frame rejects mismatched frame counts") {
  PoseSequenced a;
  a.poses.assign(3, Pose6d::identity());
  PoseSequenced b;
  b.poses.assign(4, Pose6d::identity());
  CHECK_THROWS_AS(align_first_frame(a, b), ValidationError);
}

TEST_CASE("interpolate returns the endpoints bit-exactly") {
  SeededRng rng(19);
  const Pose6d a = random_pose(rng);
  const Pose6d b = random_pose(rng);
  CHECK(pose_diff(interpolate(a, b, 0.0), a) == 0.0);
  CHECK(pose_diff(interpolate(a, b, 1.0), b) == 0.0);
}

TEST_CASE("interpolate midpoint of a quarter turn is an eighth turn") {
  const Pose6d a = Pose6d::identity();
  const Pose6d b = Pose6d::from_parts(rot_z(M_PI / 2.0),
                                      Vec3<double>(2.0, 0.0, 4.0));
  const Pose6d mid = interpolate(a, b, 0.5);
  CHECK(max_abs_diff(mid.rotation, rot_z(M_PI / 4.0)) < 1e-12);
  CHECK((mid.translation - Vec3<double>(1.0, 0.0, 2.0)).norm() < 1e-15);
}

TEST_CASE("interpolate takes the shortest arc") {
  // 350 degrees is 10 degrees the short way round; the midpoint must sit at
  // -5 degrees, not at 175.
  const Pose6d a = Pose6d::identity();
  const Pose6d b =
      Pose6d::from_parts(rot_z(350.0 * kRadPerDeg), Vec3<double>::Zero());
  const Pose6d mid = interpolate(a, b, 0.5);
  CHECK(max_abs_diff(mid.rotation, rot_z(-5.0 * kRadPerDeg)) < 1e-12);
}

TEST_CASE("interpolate rejects parameters outside [0, 1]") {
  const Pose6d p = Pose6d::identity();
  CHECK_THROWS_AS(interpolate(p, p, -0.1), RangeError);
  CHECK_THROWS_AS(interpolate(p, p, 1.1), RangeError);
}

TEST_CASE("interpolate keeps rotations orthonormal") {
  SeededRng rng(20);
  for (int i = 0; i < 100; ++i) {
    const Pose6d a = random_pose(rng);
    const Pose6d b = random_pose(rng);
    const Pose6d mid = interpolate(a, b, rng.uniform());
    CHECK(orthonormality_error(mid.rotation) < 1e-9);
    CHECK(mid.rotation.determinant() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("from_parts rejects a clearly non-orthonormal matrix") {
  Mat3<double> bad = Mat3<double>::Identity();
  bad(0, 1) = 0.1;
  CHECK_THROWS_AS(Pose6d::from_parts(bad, Vec3<double>::Zero()),
                  ValidationError);
}

TEST_CASE("from_parts rejects reflections") {
  Mat3<double> reflection = Mat3<double>::Identity();
  reflection(2, 2) = -1.0;
  CHECK_THROWS_AS(Pose6d::from_parts(reflection, Vec3<double>::Zero()),
                  ValidationError);
}

TEST_CASE("from_parts repairs small drift back onto the rotation group") {
  SeededRng rng(21);
  const Mat3<double> r = random_rotation(rng);
  Mat3<double> drifted = r;
  drifted(0, 0) += 3e-8;
  drifted(1, 2) -= 2e-8;
  REQUIRE(orthonormality_error(drifted) > kOrthonormalityTol);
  const Pose6d repaired = Pose6d::from_parts(drifted, Vec3<double>::Zero());
  CHECK(orthonormality_error(repaired.rotation) < kOrthonormalityTol);
  CHECK(max_abs_diff(repaired.rotation, r) < 1e-6);
}

TEST_CASE("validate_sequence enforces frame count and fps") {
  PoseSequenced empty;
  CHECK_THROWS_AS(validate_sequence(empty), ValidationError);
  PoseSequenced bad_fps;
  bad_fps.poses.assign(2, Pose6d::identity());
  bad_fps.fps = 0.0;
  CHECK_THROWS_AS(validate_sequence(bad_fps), ValidationError);
}

}  // TEST_SUITE

}  // namespace
}  // namespace trajkit
