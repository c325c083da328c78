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

#include "trajkit/camera.hpp"

#include <algorithm>
#include <cmath>

namespace trajkit {

Intrinsics default_intrinsics() {
  Intrinsics intr;
  intr.width = kImageWidthPx;
  intr.height = kImageHeightPx;
  intr.fx = (intr.width / 2.0) / std::tan(kDefaultHfovDeg / 2.0 * kRadPerDeg);
  intr.fy = intr.fx;
  intr.cx = intr.width / 2.0;
  intr.cy = intr.height / 2.0;
  return intr;
}

CameraModel make_look_at_camera(const Vec3<double>& eye,
                                const Vec3<double>& target,
                                const Intrinsics& intrinsics) {
  const Vec3<double> forward_raw = target - eye;
  if (forward_raw.norm() < 1e-12) {
    throw ValidationError("look-at camera: eye and target coincide");
  }
  const Vec3<double> forward = forward_raw.normalized();
  const Vec3<double> up_world = Vec3<double>::UnitZ();
  const Vec3<double> right_raw = forward.cross(up_world);
  if (right_raw.norm() < 1e-9) {
    throw ValidationError(
        "look-at camera: view direction is vertical, up vector ambiguous");
  }
  const Vec3<double> right = right_raw.normalized();
  const Vec3<double> down = forward.cross(right);

  Mat3<double> rotation;
  rotation.col(0) = right;
  rotation.col(1) = down;
  rotation.col(2) = forward;

  CameraModel camera;
  camera.camera_to_world =
      Pose6d::from_parts(rotation, eye, "look-at camera rotation");
  camera.intrinsics = intrinsics;
  return camera;
}

CameraRig build_rig(const Vec3<double>& center, double radius, double height,
                    const Intrinsics& intrinsics) {
  if (!(radius > 0.0)) {
    throw ValidationError("rig radius must be positive");
  }
  CameraRig rig;
  rig.look_at = center;
  rig.radius = radius;
  rig.height = height;
  for (int k = 0; k < kRigCameraCount; ++k) {
    const double azimuth = kRigAzimuthStepDeg * k;
    const double az_rad = azimuth * kRadPerDeg;
    const Vec3<double> eye =
        center + Vec3<double>(radius * std::cos(az_rad),
                              radius * std::sin(az_rad), height);
    rig.azimuth_deg.push_back(azimuth);
    rig.cameras.push_back(make_look_at_camera(eye, center, intrinsics));
  }
  validate_rig(rig);
  return rig;
}

void validate_rig(const CameraRig& rig) {
  if (rig.cameras.size() != kRigCameraCount ||
      rig.azimuth_deg.size() != kRigCameraCount) {
    throw ValidationError("rig must hold exactly 12 cameras");
  }
  for (int k = 0; k < kRigCameraCount; ++k) {
    const double expected = kRigAzimuthStepDeg * k;
    if (rig.azimuth_deg[k] != expected) {
      throw ValidationError("rig azimuths must step by exactly 30 degrees");
    }
    const CameraModel& cam = rig.cameras[k];
    const Vec3<double> to_target =
        (rig.look_at - cam.camera_to_world.translation).normalized();
    // Normalized so the check measures direction only: a column whose norm
    // drifted by eps under serialization would otherwise read as a sqrt(eps)
    // aim error through acos.
    const Vec3<double> axis = cam.camera_to_world.rotation.col(2).normalized();
    const double cos_angle = std::clamp(axis.dot(to_target), -1.0, 1.0);
    if (std::acos(cos_angle) > 1e-6) {
      throw ValidationError("rig camera " + std::to_string(k) +
                            " does not aim at the look-at point");
    }
  }
}

Projection project_point(const CameraModel& camera,
                         const Vec3<double>& world_point) {
  const Vec3<double> p_cam =
      camera.camera_to_world.rotation.transpose() *
      (world_point - camera.camera_to_world.translation);
  if (!(p_cam.z() > kNearPlaneM)) {
    throw ValidationError(
        "point is behind the camera near plane (depth " +
        std::to_string(p_cam.z()) + " m)");
  }
  Projection proj;
  proj.depth = p_cam.z();
  proj.u = camera.intrinsics.cx + camera.intrinsics.fx * p_cam.x() / p_cam.z();
  proj.v = camera.intrinsics.cy + camera.intrinsics.fy * p_cam.y() / p_cam.z();
  return proj;
}

OcclusionOrder occlusion_order(const CameraModel& camera,
                               const SceneComposition& scene, int frame) {
  if (frame < 0 || frame >= scene.frame_count()) {
    throw RangeError("occlusion_order: frame " + std::to_string(frame) +
                     " is out of range");
  }
  struct Entry {
    double depth;
    std::string id;
  };
  std::vector<Entry> visible;
  OcclusionOrder result;
  for (const auto& entity : scene.entities) {
    const Vec3<double> center = entity.poses.poses[frame].translation;
    const double depth =
        (camera.camera_to_world.rotation.transpose() *
         (center - camera.camera_to_world.translation))
            .z();
    if (depth > kNearPlaneM) {
      visible.push_back({depth, entity.entity_id});
    } else {
      result.behind_camera.push_back(entity.entity_id);
    }
  }
  std::sort(visible.begin(), visible.end(), [](const Entry& a, const Entry& b) {
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id < b.id;
  });
  std::sort(result.behind_camera.begin(), result.behind_camera.end());
  for (const auto& entry : visible) result.order.push_back(entry.id);
  return result;
}

std::vector<TrackSample> project_scene(const CameraModel& camera,
                                       const SceneComposition& scene) {
  validate_scene(scene);
  std::vector<TrackSample> samples;
  samples.reserve(static_cast<std::size_t>(scene.frame_count()) *
                  scene.entities.size());
  for (int frame = 0; frame < scene.frame_count(); ++frame) {
    for (const auto& entity : scene.entities) {
      const Projection proj =
          project_point(camera, entity.poses.poses[frame].translation);
      samples.push_back(
          {frame, entity.entity_id, proj.u, proj.v, proj.depth});
    }
  }
  return samples;
}

bool stage_in_all_frustums(const CameraRig& rig, double stage_side) {
  const double half = stage_side / 2.0;
  const Vec3<double> corners[4] = {
      rig.look_at + Vec3<double>(half, half, 0.0),
      rig.look_at + Vec3<double>(half, -half, 0.0),
      rig.look_at + Vec3<double>(-half, half, 0.0),
      rig.look_at + Vec3<double>(-half, -half, 0.0),
  };
  for (const auto& camera : rig.cameras) {
    for (const auto& corner : corners) {
      Projection proj;
      try {
        proj = project_point(camera, corner);
      } catch (const ValidationError&) {
        return false;
      }
      if (proj.u < 0.0 || proj.u > camera.intrinsics.width ||
          proj.v < 0.0 || proj.v > camera.intrinsics.height) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace trajkit
