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

#ifndef TRAJKIT_CAMERA_HPP_
#define TRAJKIT_CAMERA_HPP_

#include <string>
#include <vector>

#include "trajkit/pose.hpp"
#include "trajkit/scene.hpp"

namespace trajkit {

inline constexpr int kRigCameraCount = 12;
inline constexpr double kRigAzimuthStepDeg = 30.0;
inline constexpr double kRigRadiusM = 8.0;
inline constexpr double kRigHeightM = 2.0;
inline constexpr double kNearPlaneM = 0.01;
inline constexpr double kDefaultHfovDeg = 60.0;
inline constexpr int kImageWidthPx = 672;
inline constexpr int kImageHeightPx = 384;

struct Intrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = kImageWidthPx;
  int height = kImageHeightPx;
};

// Pinhole intrinsics for a 60-degree horizontal field of view at 672x384,
// square pixels, principal point at the image center.
Intrinsics default_intrinsics();

// Camera frame convention: +x right, +y down, +z forward (optical axis).
// `camera_to_world` maps camera-frame points into the world.
struct CameraModel {
  Pose6d camera_to_world;
  Intrinsics intrinsics;
};

// Places a camera at `eye` looking at `target` with world +z up. Throws
// ValidationError when the view direction is vertical (the up vector would
// be ambiguous).
CameraModel make_look_at_camera(const Vec3<double>& eye,
                                const Vec3<double>& target,
                                const Intrinsics& intrinsics);

// 12 inward-looking cameras on a circle: 30-degree azimuth steps, shared
// radius/height, all aimed at `look_at`.
struct CameraRig {
  Vec3<double> look_at = Vec3<double>::Zero();
  double radius = kRigRadiusM;
  double height = kRigHeightM;
  std::vector<double> azimuth_deg;
  std::vector<CameraModel> cameras;
};

CameraRig build_rig(const Vec3<double>& center = Vec3<double>::Zero(),
                    double radius = kRigRadiusM, double height = kRigHeightM,
                    const Intrinsics& intrinsics = default_intrinsics());

// Re-checks the rig contract: camera count, exact azimuth spacing, and
// optical axes passing through the look-at point within 1e-6 rad.
void validate_rig(const CameraRig& rig);

struct Projection {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
};

// Pinhole projection of a world point. Throws ValidationError when the
// point sits behind the near plane (depth <= 0.01 m). u/v may land outside
// the image rectangle; callers decide whether off-screen matters.
Projection project_point(const CameraModel& camera,
                         const Vec3<double>& world_point);

// Depth ordering of scene entities as seen from `camera` at `frame`:
// nearest first, ties broken by entity id so the order is stable under
// entity-list reordering. Entities behind the camera are excluded from the
// order and reported separately.
struct OcclusionOrder {
  std::vector<std::string> order;
  std::vector<std::string> behind_camera;
};

OcclusionOrder occlusion_order(const CameraModel& camera,
                               const SceneComposition& scene, int frame);

// One projected entity center: input row of the 2D track export.
struct TrackSample {
  int frame = 0;
  std::string entity_id;
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
};

// Projects every entity center at every frame through `camera`, in frame
// order with the scene's entity order within a frame.
std::vector<TrackSample> project_scene(const CameraModel& camera,
                                       const SceneComposition& scene);

// True when all four stage corners (and hence the whole convex stage
// footprint) project inside every camera's image rectangle in front of the
// near plane.
bool stage_in_all_frustums(const CameraRig& rig,
                           double stage_side = kStageSideM);

}  // namespace trajkit

#endif  // TRAJKIT_CAMERA_HPP_
