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

#ifndef TRAJKIT_POSE_HPP_
#define TRAJKIT_POSE_HPP_

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "trajkit/error.hpp"

namespace trajkit {

template <typename Scalar>
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

// Rotations constructed by arithmetic must satisfy this; anything between
// the two bounds is silently projected back onto SO(3), anything beyond the
// repair bound is rejected.
inline constexpr double kOrthonormalityTol = 1e-9;
inline constexpr double kOrthonormalityRepairTol = 1e-6;
// A matrix passing the orthonormality check can still show |det - 1| of
// ~1.5x the orthonormality bound, so the determinant gate must sit a little
// looser than kOrthonormalityTol or it would reject valid inputs.
inline constexpr double kDeterminantTol = 1e-8;

inline constexpr double kDegPerRad = 180.0 / M_PI;
inline constexpr double kRadPerDeg = M_PI / 180.0;

// Largest absolute entry of R^T R - I.
template <typename Scalar>
Scalar orthonormality_error(const Mat3<Scalar>& r) {
  return ((r.transpose() * r) - Mat3<Scalar>::Identity())
      .cwiseAbs()
      .maxCoeff();
}

// Nearest rotation in Frobenius norm (polar factor via SVD), with the
// reflection branch folded back to det +1.
template <typename Scalar>
Mat3<Scalar> project_to_rotation(const Mat3<Scalar>& m) {
  Eigen::JacobiSVD<Mat3<Scalar>> svd(
      m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3<Scalar> r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < Scalar(0)) {
    Mat3<Scalar> flip = Mat3<Scalar>::Identity();
    flip(2, 2) = Scalar(-1);
    r = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return r;
}

// Rigid transform: world_point = rotation * body_point + translation.
// Coordinate convention throughout the library: right-handed, +z up,
// body/forward axis +x. Units are meters.
template <typename Scalar>
struct Pose6 {
  Mat3<Scalar> rotation = Mat3<Scalar>::Identity();
  Vec3<Scalar> translation = Vec3<Scalar>::Zero();

  static Pose6 identity() { return Pose6{}; }

  // Validates the rotation before accepting it. `accept_tol` is the error
  // below which the matrix is kept bit-for-bit; between `accept_tol` and
  // the repair bound it is projected onto SO(3); beyond that, or for
  // reflections, a ValidationError naming `label` is thrown.
  static Pose6 from_parts(const Mat3<Scalar>& rotation,
                          const Vec3<Scalar>& translation,
                          std::string_view label = "rotation",
                          Scalar accept_tol = Scalar(kOrthonormalityTol)) {
    Mat3<Scalar> r = rotation;
    const Scalar err = orthonormality_error(r);
    if (!(err <= accept_tol)) {
      if (!(err <= Scalar(kOrthonormalityRepairTol))) {
        throw ValidationError(std::string(label) +
                              ": matrix is not orthonormal (max deviation " +
                              std::to_string(static_cast<double>(err)) + ")");
      }
      r = project_to_rotation(r);
    }
    const Scalar det = r.determinant();
    if (det < Scalar(0) ||
        std::abs(static_cast<double>(det) - 1.0) > kDeterminantTol) {
      throw ValidationError(std::string(label) +
                            ": determinant is " +
                            std::to_string(static_cast<double>(det)) +
                            ", expected +1");
    }
    return Pose6{r, translation};
  }
};

using Pose6d = Pose6<double>;

template <typename Scalar>
Mat3<Scalar> rot_x(Scalar angle_rad) {
  return Eigen::AngleAxis<Scalar>(angle_rad, Vec3<Scalar>::UnitX())
      .toRotationMatrix();
}

template <typename Scalar>
Mat3<Scalar> rot_y(Scalar angle_rad) {
  return Eigen::AngleAxis<Scalar>(angle_rad, Vec3<Scalar>::UnitY())
      .toRotationMatrix();
}

template <typename Scalar>
Mat3<Scalar> rot_z(Scalar angle_rad) {
  return Eigen::AngleAxis<Scalar>(angle_rad, Vec3<Scalar>::UnitZ())
      .toRotationMatrix();
}

// a then b in a's frame: world = a.R * (b.R * p + b.T) + a.T.
template <typename Scalar>
Pose6<Scalar> compose(const Pose6<Scalar>& a, const Pose6<Scalar>& b) {
  return Pose6<Scalar>::from_parts(
      a.rotation * b.rotation, a.rotation * b.translation + a.translation,
      "compose result");
}

template <typename Scalar>
Pose6<Scalar> invert(const Pose6<Scalar>& p) {
  Mat3<Scalar> rt = p.rotation.transpose();
  return Pose6<Scalar>::from_parts(rt, -(rt * p.translation),
                                   "invert result");
}

// Geodesic distance between two rotations, in degrees.
template <typename Scalar>
Scalar rotation_angle_between_deg(const Mat3<Scalar>& a,
                                  const Mat3<Scalar>& b) {
  // Identical orientations are zero by definition; the trace formula below
  // would amplify their orthonormality roundoff to ~sqrt(eps) instead.
  if ((a.array() == b.array()).all()) {
    return Scalar(0);
  }
  const Scalar cos_angle = std::clamp(
      ((a * b.transpose()).trace() - Scalar(1)) / Scalar(2), Scalar(-1),
      Scalar(1));
  return std::acos(cos_angle) * Scalar(kDegPerRad);
}

// Linear translation blend plus shortest-arc quaternion slerp. Endpoints are
// returned exactly (the matrix/quaternion round trip is not bit-exact, so
// s = 0 and s = 1 short-circuit).
template <typename Scalar>
Pose6<Scalar> interpolate(const Pose6<Scalar>& a, const Pose6<Scalar>& b,
                          Scalar s) {
  if (!(s >= Scalar(0) && s <= Scalar(1))) {
    throw RangeError("interpolate: parameter " +
                     std::to_string(static_cast<double>(s)) +
                     " is outside [0, 1]");
  }
  if (s == Scalar(0)) return a;
  if (s == Scalar(1)) return b;
  const Eigen::Quaternion<Scalar> qa(a.rotation);
  const Eigen::Quaternion<Scalar> qb(b.rotation);
  const Mat3<Scalar> r = qa.slerp(s, qb).toRotationMatrix();
  const Vec3<Scalar> t =
      (Scalar(1) - s) * a.translation + s * b.translation;
  return Pose6<Scalar>::from_parts(r, t, "interpolate result");
}

// Fixed-rate pose track. Frames are implicitly 0..F-1 at `fps`.
template <typename Scalar>
struct PoseSequence {
  Scalar fps = Scalar(20);
  std::vector<Pose6<Scalar>> poses;

  int frame_count() const { return static_cast<int>(poses.size()); }
};

using PoseSequenced = PoseSequence<double>;

template <typename Scalar>
void validate_sequence(const PoseSequence<Scalar>& seq) {
  if (seq.poses.empty()) {
    throw ValidationError("pose sequence must contain at least one frame");
  }
  if (!(seq.fps > Scalar(0))) {
    throw ValidationError("pose sequence fps must be positive, got " +
                          std::to_string(static_cast<double>(seq.fps)));
  }
}

// Shifts `estimate` so its first-frame position coincides with the first
// frame of `reference`. Rotations are untouched; only a translation offset
// is applied. The subtraction order makes frame 0 land on the reference
// bit-exactly.
template <typename Scalar>
PoseSequence<Scalar> align_first_frame(const PoseSequence<Scalar>& estimate,
                                       const PoseSequence<Scalar>& reference) {
  validate_sequence(estimate);
  validate_sequence(reference);
  if (estimate.frame_count() != reference.frame_count()) {
    throw ValidationError(
        "align_first_frame: frame counts differ (" +
        std::to_string(estimate.frame_count()) + " vs " +
        std::to_string(reference.frame_count()) + ")");
  }
  if (estimate.fps != reference.fps) {
    throw ValidationError("align_first_frame: fps differ");
  }
  PoseSequence<Scalar> out = estimate;
  // One precomputed offset: when the first frames already coincide the
  // shift is exactly zero and every translation passes through unchanged.
  const Vec3<Scalar> offset = reference.poses.front().translation -
                              estimate.poses.front().translation;
  for (auto& pose : out.poses) {
    pose.translation += offset;
  }
  return out;
}

}  // namespace trajkit

#endif  // TRAJKIT_POSE_HPP_
