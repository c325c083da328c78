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

#ifndef TRAJKIT_TRAJECTORY_HPP_
#define TRAJKIT_TRAJECTORY_HPP_

#include <string>
#include <vector>

#include "trajkit/pose.hpp"

namespace trajkit {

// Square stage the canonical templates are authored for: side length in
// meters, centered at the origin, motion on the ground plane z = 0.
inline constexpr double kStageSideM = 5.0;

// Per-frame heading change beyond this is flagged by the diagnostics; it
// marks templates whose turn rate would look implausible at the given F.
inline constexpr double kMaxYawStepDeg = 30.0;

enum class TemplateFamily {
  line,
  arc,
  s_curve,
  circle,
  turn_back_180,
  inward_turn_90,
  figure_eight,
  static_hold,
};

const char* family_name(TemplateFamily family);

// Canonical-space motion recipe: a polyline of spline control points plus
// a nominal duration. Templates are unit-citizens of the library; scenes
// place them rigidly (yaw + offset) onto the stage.
struct TrajectoryTemplate {
  std::string name;
  TemplateFamily family = TemplateFamily::line;
  std::vector<Vec3<double>> control_points;
  double duration_s = 5.0;
};

// Heading-from-motion: yaw = atan2(t_y, t_x), pitch = asin(t_z / |t|),
// roll fixed to zero (up stays +z, forward is +x). Throws ValidationError
// for degenerate tangents with |t| <= 1e-8; callers fall back to the last
// valid orientation.
Mat3<double> orientation_from_tangent(const Vec3<double>& tangent);

// Samples the template into F poses at constant speed along the spline's
// arc length. Positions interpolate the spline; rotations face the local
// tangent. Static templates hold the first control point with identity
// rotation. Requires F >= 2 and fps > 0.
PoseSequenced generate_template(const TrajectoryTemplate& tmpl, int frames,
                                double fps);

struct TemplateDiagnostics {
  double max_yaw_step_deg = 0.0;
  bool exceeds_yaw_limit = false;
};

// Largest per-frame heading change of a generated sequence; `exceeds` is
// measured against kMaxYawStepDeg.
TemplateDiagnostics template_diagnostics(const PoseSequenced& seq);

// The built-in template catalog: a deterministic family-by-parameter grid
// (at least 96 distinct entries, all fitting the canonical stage). Built
// once, order stable across runs.
const std::vector<TrajectoryTemplate>& template_library();

// Looks a template up by name in the library; throws ValidationError when
// absent.
const TrajectoryTemplate& find_template(const std::string& name);

}  // namespace trajkit

#endif  // TRAJKIT_TRAJECTORY_HPP_
