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

#include "trajkit/trajectory.hpp"

#include <cmath>
#include <cstdio>
#include <mutex>

#include "trajkit/spline.hpp"

namespace trajkit {

namespace {

constexpr double kDegenerateTangentNorm = 1e-8;

std::string format_param(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", value);
  return buf;
}

Vec3<double> arc_point(const Vec3<double>& center, double radius,
                       double theta_rad, double side) {
  // Point on the circle of `radius` around `center`, parameterized so that
  // theta 0 sits at the arc's entry (origin-side) and the heading there is
  // +x. `side` is +1 for a left (counterclockwise) turn, -1 for right.
  return center + radius * Vec3<double>(std::sin(theta_rad),
                                        -side * std::cos(theta_rad), 0.0);
}

void append_point(std::vector<Vec3<double>>& points, const Vec3<double>& p) {
  // Skip exact repeats at section joints; a zero-length knot interval would
  // be rejected by the spline.
  if (!points.empty() && (points.back() - p).norm() < 1e-12) return;
  points.push_back(p);
}

// Shifts the control polygon so its bounding box is centered at the origin.
void recenter(std::vector<Vec3<double>>& points) {
  Vec3<double> lo = points.front();
  Vec3<double> hi = points.front();
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec3<double> center = 0.5 * (lo + hi);
  for (auto& p : points) p -= center;
}

std::vector<Vec3<double>> make_line(double length) {
  return {Vec3<double>(-length / 2.0, 0.0, 0.0),
          Vec3<double>(length / 2.0, 0.0, 0.0)};
}

// Arc starting at the origin heading +x, turning through `sweep_deg`.
std::vector<Vec3<double>> make_arc(double radius, double sweep_deg,
                                   double side) {
  const Vec3<double> center(0.0, side * radius, 0.0);
  const int steps = std::max(2, static_cast<int>(std::ceil(sweep_deg / 30.0)));
  std::vector<Vec3<double>> points;
  for (int k = 0; k <= steps; ++k) {
    const double theta = kRadPerDeg * sweep_deg * k / steps;
    append_point(points, arc_point(center, radius, theta, side));
  }
  recenter(points);
  return points;
}

// Quarter turn one way followed by a quarter turn the other way; the exit
// heading matches the entry heading, displaced diagonally.
std::vector<Vec3<double>> make_s_curve(double radius, double first_side) {
  std::vector<Vec3<double>> points;
  const Vec3<double> c1(0.0, first_side * radius, 0.0);
  for (int k = 0; k <= 3; ++k) {
    const double theta = kRadPerDeg * 90.0 * k / 3.0;
    append_point(points, arc_point(c1, radius, theta, first_side));
  }
  // The first arc ends heading +y (for a left turn); the second arc bends
  // back with mirrored curvature from that point.
  const Vec3<double> joint = points.back();
  const Vec3<double> exit_dir(std::cos(kRadPerDeg * 90.0 * first_side),
                              std::sin(kRadPerDeg * 90.0 * first_side), 0.0);
  const Vec3<double> normal(-exit_dir.y(), exit_dir.x(), 0.0);
  const Vec3<double> c2 = joint - first_side * radius * normal;
  for (int k = 1; k <= 3; ++k) {
    const double phi = kRadPerDeg * 90.0 * k / 3.0;
    // Rotate `joint` around c2 by -side * phi (opposite curvature).
    const Vec3<double> rel = joint - c2;
    const double cos_phi = std::cos(-first_side * phi);
    const double sin_phi = std::sin(-first_side * phi);
    append_point(points,
                 c2 + Vec3<double>(cos_phi * rel.x() - sin_phi * rel.y(),
                                   sin_phi * rel.x() + cos_phi * rel.y(),
                                   0.0));
  }
  recenter(points);
  return points;
}

std::vector<Vec3<double>> make_circle(double radius, double side) {
  const Vec3<double> center(0.0, side * radius, 0.0);
  std::vector<Vec3<double>> points;
  // k = 12 lands back on the start point: the loop closes with a
  // non-consecutive duplicate, which the spline allows.
  for (int k = 0; k <= 12; ++k) {
    append_point(points,
                 arc_point(center, radius, kRadPerDeg * 30.0 * k, side));
  }
  recenter(points);
  return points;
}

// Straight leg out, semicircular U-turn, straight leg back. The first and
// last chords are exactly antiparallel, so the generated first/last frame
// headings differ by 180 degrees.
std::vector<Vec3<double>> make_turn_back(double leg, double radius,
                                         double side) {
  std::vector<Vec3<double>> points;
  append_point(points, Vec3<double>(0.0, 0.0, 0.0));
  append_point(points, Vec3<double>(leg / 2.0, 0.0, 0.0));
  append_point(points, Vec3<double>(leg, 0.0, 0.0));
  const Vec3<double> center(leg, side * radius, 0.0);
  for (int k = 1; k <= 6; ++k) {
    append_point(points,
                 arc_point(center, radius, kRadPerDeg * 30.0 * k, side));
  }
  append_point(points, Vec3<double>(leg / 2.0, side * 2.0 * radius, 0.0));
  append_point(points, Vec3<double>(0.0, side * 2.0 * radius, 0.0));
  recenter(points);
  return points;
}

std::vector<Vec3<double>> make_inward_turn(double leg, double radius,
                                           double side) {
  std::vector<Vec3<double>> points;
  append_point(points, Vec3<double>(0.0, 0.0, 0.0));
  append_point(points, Vec3<double>(leg, 0.0, 0.0));
  const Vec3<double> center(leg, side * radius, 0.0);
  for (int k = 1; k <= 3; ++k) {
    append_point(points,
                 arc_point(center, radius, kRadPerDeg * 30.0 * k, side));
  }
  // After a 90-degree turn the heading is +/-y; finish with a straight leg.
  const Vec3<double> end = points.back();
  append_point(points, end + Vec3<double>(0.0, side * leg, 0.0));
  recenter(points);
  return points;
}

// Two tangent loops traversed with opposite handedness, crossing at the
// shared point with a continuous +x heading.
std::vector<Vec3<double>> make_figure_eight(double radius, double side) {
  std::vector<Vec3<double>> points;
  const Vec3<double> c1(0.0, side * radius, 0.0);
  for (int k = 0; k <= 12; ++k) {
    append_point(points,
                 arc_point(c1, radius, kRadPerDeg * 30.0 * k, side));
  }
  const Vec3<double> c2(0.0, -side * radius, 0.0);
  for (int k = 1; k <= 12; ++k) {
    append_point(points,
                 arc_point(c2, radius, kRadPerDeg * 30.0 * k, -side));
  }
  recenter(points);
  return points;
}

void push_template(std::vector<TrajectoryTemplate>& library, std::string name,
                   TemplateFamily family, std::vector<Vec3<double>> points) {
  TrajectoryTemplate tmpl;
  tmpl.name = std::move(name);
  tmpl.family = family;
  tmpl.control_points = std::move(points);
  library.push_back(std::move(tmpl));
}

std::vector<TrajectoryTemplate> build_library() {
  std::vector<TrajectoryTemplate> library;

  push_template(library, "static", TemplateFamily::static_hold,
                {Vec3<double>::Zero()});

  for (const double length : {0.75, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0}) {
    push_template(library, "line_len" + format_param(length),
                  TemplateFamily::line, make_line(length));
  }

  for (const double radius : {0.6, 0.9, 1.2, 1.5}) {
    for (const double sweep : {45.0, 90.0, 135.0, 180.0}) {
      for (const double side : {1.0, -1.0}) {
        push_template(library,
                      "arc_r" + format_param(radius) + "_sweep" +
                          format_param(sweep) +
                          (side > 0 ? "_ccw" : "_cw"),
                      TemplateFamily::arc, make_arc(radius, sweep, side));
      }
    }
  }

  for (const double radius : {0.5, 0.6, 0.8, 1.0, 1.25, 1.5}) {
    for (const double side : {1.0, -1.0}) {
      push_template(library,
                    "s_curve_r" + format_param(radius) +
                        (side > 0 ? "_lr" : "_rl"),
                    TemplateFamily::s_curve, make_s_curve(radius, side));
    }
  }

  for (const double radius : {0.5, 0.6, 0.8, 1.0, 1.25, 1.5}) {
    for (const double side : {1.0, -1.0}) {
      push_template(library,
                    "circle_r" + format_param(radius) +
                        (side > 0 ? "_ccw" : "_cw"),
                    TemplateFamily::circle, make_circle(radius, side));
    }
  }

  for (const double leg : {1.0, 1.5, 2.0}) {
    for (const double radius : {0.4, 0.6, 0.8}) {
      for (const double side : {1.0, -1.0}) {
        push_template(library,
                      "turn_back_180_len" + format_param(leg) + "_r" +
                          format_param(radius) +
                          (side > 0 ? "_ccw" : "_cw"),
                      TemplateFamily::turn_back_180,
                      make_turn_back(leg, radius, side));
      }
    }
  }

  for (const double leg : {1.0, 1.5, 2.0}) {
    for (const double radius : {0.5, 0.75}) {
      for (const double side : {1.0, -1.0}) {
        push_template(library,
                      "inward_turn_90_len" + format_param(leg) + "_r" +
                          format_param(radius) +
                          (side > 0 ? "_ccw" : "_cw"),
                      TemplateFamily::inward_turn_90,
                      make_inward_turn(leg, radius, side));
      }
    }
  }

  for (const double radius : {0.45, 0.55, 0.65, 0.8, 0.95}) {
    for (const double side : {1.0, -1.0}) {
      push_template(library,
                    "figure_eight_r" + format_param(radius) +
                        (side > 0 ? "_ccw" : "_cw"),
                    TemplateFamily::figure_eight,
                    make_figure_eight(radius, side));
    }
  }

  return library;
}

}  // namespace

const char* family_name(TemplateFamily family) {
  switch (family) {
    case TemplateFamily::line:
      return "line";
    case TemplateFamily::arc:
      return "arc";
    case TemplateFamily::s_curve:
      return "s_curve";
    case TemplateFamily::circle:
      return "circle";
    case TemplateFamily::turn_back_180:
      return "turn_back_180";
    case TemplateFamily::inward_turn_90:
      return "inward_turn_90";
    case TemplateFamily::figure_eight:
      return "figure_eight";
    case TemplateFamily::static_hold:
      return "static";
  }
  return "unknown";
}

Mat3<double> orientation_from_tangent(const Vec3<double>& tangent) {
  const double norm = tangent.norm();
  if (!(norm > kDegenerateTangentNorm)) {
    throw ValidationError(
        "orientation_from_tangent: tangent norm " + std::to_string(norm) +
        " is degenerate");
  }
  const double yaw = std::atan2(tangent.y(), tangent.x());
  const double pitch = std::asin(tangent.z() / norm);
  // Rz(yaw) * Ry(-pitch) maps body +x onto the tangent direction while the
  // body +y axis stays horizontal (roll zero, up +z).
  return rot_z(yaw) * rot_y(-pitch);
}

PoseSequenced generate_template(const TrajectoryTemplate& tmpl, int frames,
                                double fps) {
  if (frames < 2) {
    throw ValidationError("generate_template: need at least 2 frames, got " +
                          std::to_string(frames));
  }
  if (!(fps > 0.0)) {
    throw ValidationError("generate_template: fps must be positive");
  }
  if (tmpl.control_points.empty()) {
    throw ValidationError("generate_template: template '" + tmpl.name +
                          "' has no control points");
  }

  PoseSequenced seq;
  seq.fps = fps;
  seq.poses.reserve(frames);

  if (tmpl.family == TemplateFamily::static_hold) {
    Pose6d pose = Pose6d::identity();
    pose.translation = tmpl.control_points.front();
    seq.poses.assign(frames, pose);
    return seq;
  }

  bool all_coincident = true;
  for (const auto& p : tmpl.control_points) {
    if ((p - tmpl.control_points.front()).norm() > 1e-12) {
      all_coincident = false;
      break;
    }
  }
  if (all_coincident) {
    throw ValidationError("generate_template: template '" + tmpl.name +
                          "' has all control points coincident but is not "
                          "a static template");
  }

  const CatmullRom3d spline(tmpl.control_points);
  const double total = spline.total_length();

  Mat3<double> last_valid = Mat3<double>::Identity();
  for (int f = 0; f < frames; ++f) {
    const double s = total * static_cast<double>(f) /
                     static_cast<double>(frames - 1);
    const auto sample = spline.eval(spline.u_at_length(s));
    if (sample.tangent.norm() > kDegenerateTangentNorm) {
      last_valid = orientation_from_tangent(sample.tangent);
    }
    seq.poses.push_back(
        Pose6d::from_parts(last_valid, sample.position, "template pose"));
  }
  return seq;
}

TemplateDiagnostics template_diagnostics(const PoseSequenced& seq) {
  TemplateDiagnostics diag;
  for (std::size_t f = 1; f < seq.poses.size(); ++f) {
    const auto yaw_of = [](const Pose6d& p) {
      const Vec3<double> fwd = p.rotation.col(0);
      return std::atan2(fwd.y(), fwd.x()) * kDegPerRad;
    };
    double delta = yaw_of(seq.poses[f]) - yaw_of(seq.poses[f - 1]);
    while (delta > 180.0) delta -= 360.0;
    while (delta < -180.0) delta += 360.0;
    diag.max_yaw_step_deg = std::max(diag.max_yaw_step_deg, std::abs(delta));
  }
  diag.exceeds_yaw_limit = diag.max_yaw_step_deg > kMaxYawStepDeg;
  return diag;
}

const std::vector<TrajectoryTemplate>& template_library() {
  static const std::vector<TrajectoryTemplate> library = build_library();
  return library;
}

const TrajectoryTemplate& find_template(const std::string& name) {
  for (const auto& tmpl : template_library()) {
    if (tmpl.name == name) return tmpl;
  }
  throw ValidationError("unknown template '" + name + "'");
}

}  // namespace trajkit
