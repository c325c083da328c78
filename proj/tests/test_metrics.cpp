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

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "doctest.h"
#include "test_support.hpp"
#include "trajkit/error.hpp"
#include "trajkit/metrics.hpp"
#include "trajkit/rng.hpp"

namespace trajkit {
namespace {

PoseSequenced static_identity(int frames) {
  PoseSequenced seq;
  seq.fps = 20.0;
  seq.poses.assign(frames, Pose6d{});
  return seq;
}

Pose6d yaw_pose(double yaw_rad, const Eigen::Vector3d& t) {
  Pose6d pose;
  pose.rotation = Eigen::AngleAxisd(yaw_rad, Eigen::Vector3d::UnitZ())
                      .toRotationMatrix();
  pose.translation = t;
  return pose;
}

// Plain 4x4 homogeneous-matrix oracle. Alignment is translation-only by
// contract (a pure-translation matrix), so rotation error stays
// independent of where the estimate starts.
TrajectoryError brute_force_error(const PoseSequenced& est,
                                  const PoseSequenced& ref) {
  Eigen::Matrix4d align = Eigen::Matrix4d::Identity();
  align.block<3, 1>(0, 3) =
      ref.poses.front().translation - est.poses.front().translation;
  double trans_sum = 0.0;
  double rot_sum = 0.0;
  for (std::size_t f = 0; f < est.poses.size(); ++f) {
    const Eigen::Matrix4d aligned =
        align * testing::to_homogeneous(est.poses[f]);
    const Eigen::Matrix4d reference = testing::to_homogeneous(ref.poses[f]);
    trans_sum += (aligned.block<3, 1>(0, 3) - reference.block<3, 1>(0, 3))
                     .norm();
    const double cos_angle = std::clamp(
        ((est.poses[f].rotation * ref.poses[f].rotation.transpose()).trace() -
         1.0) /
            2.0,
        -1.0, 1.0);
    rot_sum += std::acos(cos_angle) * (180.0 / std::numbers::pi);
  }
  TrajectoryError out;
  out.trans_err_m = trans_sum / static_cast<double>(est.poses.size());
  out.rot_err_deg = rot_sum / static_cast<double>(est.poses.size());
  return out;
}

TEST_SUITE("metrics") {

TEST_CASE("constant drift averages to half the final offset") {
  // 0.1 m per frame over 11 frames: offsets 0.0 .. 1.0, mean 0.5.
  PoseSequenced est = static_identity(11);
  for (int f = 0; f < 11; ++f) {
    est.poses[f].translation = Eigen::Vector3d(0.1 * f, 0.0, 0.0);
  }
  const PoseSequenced ref = static_identity(11);
  const TrajectoryError error = trajectory_error(est, ref);
  CHECK(std::abs(error.trans_err_m - 0.5) < 1e-9);
  CHECK(std::abs(error.rot_err_deg) < 1e-9);
}

TEST_CASE("linear yaw ramp to 90 degrees averages to 45") {
  PoseSequenced est = static_identity(11);
  for (int f = 0; f < 11; ++f) {
    est.poses[f] = yaw_pose(9.0 * f * std::numbers::pi / 180.0,
                            Eigen::Vector3d::Zero());
  }
  const PoseSequenced ref = static_identity(11);
  const TrajectoryError error = trajectory_error(est, ref);
  CHECK(std::abs(error.rot_err_deg - 45.0) < 1e-9);
  CHECK(std::abs(error.trans_err_m) < 1e-9);
}

TEST_CASE("first-frame alignment removes a constant position offset") {
  PoseSequenced ref = static_identity(6);
  for (int f = 0; f < 6; ++f) {
    ref.poses[f] = yaw_pose(0.1 * f, Eigen::Vector3d(0.2 * f, 0.0, 0.1));
  }
  PoseSequenced est = ref;
  for (Pose6d& pose : est.poses) {
    pose.translation += Eigen::Vector3d(3.0, -2.0, 0.5);
  }
  const TrajectoryError shifted = trajectory_error(est, ref);
  CHECK(shifted.trans_err_m < 1e-12);
  CHECK(shifted.rot_err_deg < 1e-9);

  // Alignment is translation-only: a rotated world frame stays visible in
  // both scores instead of being silently compensated away.
  const Pose6d offset = yaw_pose(0.7, Eigen::Vector3d(3.0, -2.0, 0.5));
  PoseSequenced rotated = ref;
  for (Pose6d& pose : rotated.poses) {
    pose = compose(offset, pose);
  }
  const TrajectoryError turned = trajectory_error(rotated, ref);
  CHECK(turned.trans_err_m > 0.01);
  CHECK(std::abs(turned.rot_err_deg - 0.7 * 180.0 / std::numbers::pi) <
        1e-9);
}

TEST_CASE("matches the homogeneous-matrix oracle on random pairs") {
  SeededRng rng(404);
  for (int trial = 0; trial < 200; ++trial) {
    const int frames = 2 + rng.below(7);
    PoseSequenced est;
    PoseSequenced ref;
    est.fps = ref.fps = 20.0;
    for (int f = 0; f < frames; ++f) {
      est.poses.push_back(testing::random_pose(rng));
      ref.poses.push_back(testing::random_pose(rng));
    }
    const TrajectoryError fast = trajectory_error(est, ref);
    const TrajectoryError slow = brute_force_error(est, ref);
    CAPTURE(trial);
    CHECK(std::abs(fast.trans_err_m - slow.trans_err_m) < 1e-12);
    CHECK(std::abs(fast.rot_err_deg - slow.rot_err_deg) < 1e-12);
  }
}

TEST_CASE("rotation error is symmetric in its arguments") {
  SeededRng rng(77);
  PoseSequenced a;
  PoseSequenced b;
  a.fps = b.fps = 20.0;
  for (int f = 0; f < 5; ++f) {
    a.poses.push_back(testing::random_pose(rng));
    b.poses.push_back(testing::random_pose(rng));
  }
  CHECK(std::abs(rot_err(a, b) - rot_err(b, a)) < 1e-12);
}

TEST_CASE("identical trajectories score zero") {
  SeededRng rng(11);
  PoseSequenced seq;
  seq.fps = 20.0;
  for (int f = 0; f < 7; ++f) {
    seq.poses.push_back(testing::random_pose(rng));
  }
  const TrajectoryError error = trajectory_error(seq, seq);
  CHECK(error.trans_err_m < 1e-12);
  CHECK(error.rot_err_deg < 1e-9);
}

TEST_CASE("per-frame breakdowns average to the scalar scores") {
  SeededRng rng(21);
  PoseSequenced est;
  PoseSequenced ref;
  est.fps = ref.fps = 20.0;
  for (int f = 0; f < 9; ++f) {
    est.poses.push_back(testing::random_pose(rng));
    ref.poses.push_back(testing::random_pose(rng));
  }
  const TrajectoryError error = trajectory_error(est, ref);
  REQUIRE(error.per_frame_trans_m.size() == 9);
  REQUIRE(error.per_frame_rot_deg.size() == 9);
  double trans_mean = 0.0;
  double rot_mean = 0.0;
  for (int f = 0; f < 9; ++f) {
    trans_mean += error.per_frame_trans_m[f];
    rot_mean += error.per_frame_rot_deg[f];
  }
  trans_mean /= 9.0;
  rot_mean /= 9.0;
  CHECK(std::abs(trans_mean - error.trans_err_m) < 1e-12);
  CHECK(std::abs(rot_mean - error.rot_err_deg) < 1e-12);
  CHECK(error.per_frame_trans_m.front() < 1e-12);  // aligned first frame
}

TEST_CASE("mismatched or empty trajectories are rejected") {
  PoseSequenced five = static_identity(5);
  PoseSequenced six = static_identity(6);
  CHECK_THROWS_AS(trajectory_error(five, six), ValidationError);
  PoseSequenced empty;
  empty.fps = 20.0;
  CHECK_THROWS_AS(trajectory_error(empty, empty), ValidationError);
}

TEST_CASE("metric report serializes with canonical float formatting") {
  ClipEntityError row;
  row.clip_id = "c000001_cam03";
  row.entity_id = "fox";
  row.error.trans_err_m = 0.5;
  row.error.rot_err_deg = 45.0;
  const std::string csv = write_metric_report({row});
  CHECK(csv ==
        "clip_id,entity_id,trans_err_m,rot_err_deg\n"
        "c000001_cam03,fox,0.5,45\n");
}

TEST_CASE("keyword classes cover both population halves") {
  const std::vector<KeywordClass>& classes = default_keyword_classes();
  CHECK(classes.size() >= 60);
  bool has_man = false;
  bool has_fox = false;
  for (const KeywordClass& cls : classes) {
    if (cls.name == "man") has_man = true;
    if (cls.name == "fox") has_fox = true;
  }
  CHECK(has_man);
  CHECK(has_fox);
}

TEST_CASE("caption matching is whole-word and case-insensitive") {
  const std::map<std::string, int> histogram = entity_distribution({
      "a manager reviews the plan",   // "manager" must not count as "man"
      "a man and his dog",            // one man, one dog
      "Men marching in the rain",     // plural and capitalized
      "dog chases dog",               // duplicates count once per caption
  });
  CHECK(histogram.at("man") == 2);  // "a man" + "Men marching"
  CHECK(histogram.at("dog") == 2);  // two captions mention dogs
  CHECK(histogram.at("fox") == 0);
  // Every class is present even when unmentioned.
  CHECK(histogram.size() == default_keyword_classes().size());
}

TEST_CASE("histogram serializes in sorted class order") {
  const std::map<std::string, int> histogram = {
      {"dog", 3}, {"cat", 1}, {"fox", 0}};
  const std::string csv = write_histogram_csv(histogram);
  CHECK(csv ==
        "class,count\n"
        "cat,1\n"
        "dog,3\n"
        "fox,0\n");
}

}  // TEST_SUITE

}  // namespace
}  // namespace trajkit
