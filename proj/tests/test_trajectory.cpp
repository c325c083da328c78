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
#include <set>
#include <string>

#include "doctest.h"
#include "test_support.hpp"
#include "trajkit/error.hpp"
#include "trajkit/trajectory.hpp"

namespace trajkit {
namespace {

double yaw_deg_of(const Mat3<double>& r) {
  // Heading of the body +x axis in the ground plane.
  return kDegPerRad * std::atan2(r(1, 0), r(0, 0));
}

// Smallest absolute difference between two headings, in degrees.
double yaw_gap_deg(double a, double b) {
  double diff = std::fmod(std::abs(a - b), 360.0);
  return std::min(diff, 360.0 - diff);
}

TEST_SUITE("trajectory") {

TEST_CASE("library holds at least 96 distinct templates") {
  const auto& library = template_library();
  CHECK(library.size() >= 96);
  std::set<std::string> names;
  for (const TrajectoryTemplate& tmpl : library) {
    names.insert(tmpl.name);
  }
  CHECK(names.size() == library.size());
}

TEST_CASE("every template generates a valid in-stage sequence") {
  for (const TrajectoryTemplate& tmpl : template_library()) {
    CAPTURE(tmpl.name);
    const PoseSequenced seq = generate_template(tmpl, 33, 20.0);
    CHECK(seq.poses.size() == 33);
    validate_sequence(seq);
    for (const Pose6d& pose : seq.poses) {
      CHECK(std::abs(pose.translation.x()) <= kStageSideM / 2.0 + 1e-9);
      CHECK(std::abs(pose.translation.y()) <= kStageSideM / 2.0 + 1e-9);
    }
  }
}

TEST_CASE("moving templates advance at constant speed within 2%") {
  for (const TrajectoryTemplate& tmpl : template_library()) {
    if (tmpl.family == TemplateFamily::static_hold) continue;
    CAPTURE(tmpl.name);
    const PoseSequenced seq = generate_template(tmpl, 41, 20.0);
    double min_step = 1e300;
    double max_step = 0.0;
    double total = 0.0;
    for (std::size_t f = 0; f + 1 < seq.poses.size(); ++f) {
      const double step =
          (seq.poses[f + 1].translation - seq.poses[f].translation).norm();
      min_step = std::min(min_step, step);
      max_step = std::max(max_step, step);
      total += step;
    }
    const double mean = total / static_cast<double>(seq.poses.size() - 1);
    CHECK(max_step <= mean * 1.02);
    CHECK(min_step >= mean * 0.98);
  }
}

TEST_CASE("turn-back templates end 180 degrees from the start heading") {
  int seen = 0;
  for (const TrajectoryTemplate& tmpl : template_library()) {
    if (tmpl.family != TemplateFamily::turn_back_180) continue;
    CAPTURE(tmpl.name);
    ++seen;
    const PoseSequenced seq = generate_template(tmpl, 81, 20.0);
    const double start = yaw_deg_of(seq.poses.front().rotation);
    const double end = yaw_deg_of(seq.poses.back().rotation);
    CHECK(yaw_gap_deg(start + 180.0, end) <= 1.0);
  }
  CHECK(seen > 0);
}

TEST_CASE("orientation puts the body x axis along the tangent") {
  SeededRng rng(41);
  for (int i = 0; i < 100; ++i) {
    Vec3<double> tangent(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                         rng.uniform(-0.6, 0.6));
    if (tangent.norm() < 0.1) continue;
    const Mat3<double> r = orientation_from_tangent(tangent);
    CHECK(orthonormality_error(r) < 1e-12);
    CHECK(std::abs(r.determinant() - 1.0) < 1e-12);
    CHECK((r.col(0) - tangent.normalized()).norm() < 1e-12);
    // Roll-free: the body y axis stays horizontal.
    CHECK(std::abs(r(2, 1)) < 1e-12);
  }
}

TEST_CASE("flat tangents reduce to a pure yaw rotation") {
  const Mat3<double> r = orientation_from_tangent({0.0, 2.0, 0.0});
  CHECK((r - rot_z(M_PI / 2.0)).cwiseAbs().maxCoeff() < 1e-12);
  const Mat3<double> fwd = orientation_from_tangent({3.0, 0.0, 0.0});
  CHECK((fwd - Mat3<double>::Identity()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("degenerate tangent is rejected") {
  CHECK_THROWS_AS(orientation_from_tangent({0.0, 0.0, 1e-9}),
                  ValidationError);
}

TEST_CASE("static template holds its point with identity rotation") {
  const PoseSequenced seq =
      generate_template(find_template("static"), 10, 20.0);
  for (const Pose6d& pose : seq.poses) {
    CHECK(pose.translation.norm() == 0.0);
    CHECK((pose.rotation - Mat3<double>::Identity()).cwiseAbs().maxCoeff() ==
          0.0);
  }
}

TEST_CASE("generation is deterministic and validates its inputs") {
  const TrajectoryTemplate& tmpl = template_library()[5];
  const PoseSequenced a = generate_template(tmpl, 25, 20.0);
  const PoseSequenced b = generate_template(tmpl, 25, 20.0);
  REQUIRE(a.poses.size() == b.poses.size());
  for (std::size_t f = 0; f < a.poses.size(); ++f) {
    CHECK(testing::pose_diff(a.poses[f], b.poses[f]) == 0.0);
  }
  CHECK_THROWS_AS(generate_template(tmpl, 1, 20.0), ValidationError);
  CHECK_THROWS_AS(generate_template(tmpl, 25, 0.0), ValidationError);
}

TEST_CASE("line diagnostics report no heading change") {
  const PoseSequenced seq =
      generate_template(find_template("line_len3"), 30, 20.0);
  const TemplateDiagnostics diag = template_diagnostics(seq);
  CHECK(diag.max_yaw_step_deg < 1e-9);
  CHECK_FALSE(diag.exceeds_yaw_limit);
}

TEST_CASE("template lookup by unknown name fails") {
  CHECK_THROWS_AS(find_template("no_such_template"), ValidationError);
}

}  // TEST_SUITE

}  // namespace
}  // namespace trajkit
