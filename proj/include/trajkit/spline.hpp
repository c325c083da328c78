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

#ifndef TRAJKIT_SPLINE_HPP_
#define TRAJKIT_SPLINE_HPP_

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trajkit/error.hpp"
#include "trajkit/pose.hpp"

namespace trajkit {

// Centripetal Catmull-Rom spline through 3D control points, evaluated in
// cubic Hermite form. Knot spacing uses the centripetal exponent 0.5, which
// keeps the curve inside the control polygon and free of cusps. Per-knot
// tangents are the chord-gradient m_i = (P_{i+1} - P_{i-1}) / (t_{i+1} -
// t_{i-1}) with index-clamped neighbors at the ends, so the boundary
// tangents are the (nonzero) end-chord directions and the curve still
// interpolates every control point with C1 continuity.
template <typename Scalar>
class CatmullRom3 {
 public:
  using Point = Vec3<Scalar>;

  struct Sample {
    Point position;
    // Derivative of position with respect to the global parameter u.
    Point tangent;
  };

  explicit CatmullRom3(std::vector<Point> points, int samples_per_segment = 128)
      : points_(std::move(points)) {
    if (points_.size() < 2) {
      throw ValidationError("spline needs at least 2 control points, got " +
                            std::to_string(points_.size()));
    }
    knots_.resize(points_.size());
    knots_[0] = Scalar(0);
    for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
      const Scalar dist = (points_[i + 1] - points_[i]).norm();
      if (!(dist > Scalar(0))) {
        throw ValidationError(
            "spline control points " + std::to_string(i) + " and " +
            std::to_string(i + 1) + " coincide");
      }
      knots_[i + 1] = knots_[i] + std::sqrt(dist);
    }
    tangents_.resize(points_.size());
    const int last = static_cast<int>(points_.size()) - 1;
    for (int i = 0; i <= last; ++i) {
      const int prev = std::max(i - 1, 0);
      const int next = std::min(i + 1, last);
      tangents_[i] = (points_[next] - points_[prev]) /
                     (knots_[next] - knots_[prev]);
    }
    build_arc_length_table(samples_per_segment);
  }

  // Evaluates position and d(position)/du at u in [0, 1].
  Sample eval(Scalar u) const {
    if (!(u >= Scalar(0) && u <= Scalar(1))) {
      throw RangeError("spline parameter " +
                       std::to_string(static_cast<double>(u)) +
                       " is outside [0, 1]");
    }
    const Scalar t_range = knots_.back() - knots_.front();
    const Scalar t = knots_.front() + u * t_range;
    // Segment index such that t lies in [knots_[i], knots_[i+1]].
    int i = static_cast<int>(
        std::upper_bound(knots_.begin(), knots_.end(), t) - knots_.begin() -
        1);
    i = std::clamp(i, 0, static_cast<int>(points_.size()) - 2);

    const Scalar dt = knots_[i + 1] - knots_[i];
    const Scalar s = (t - knots_[i]) / dt;
    const Scalar s2 = s * s;
    const Scalar s3 = s2 * s;

    const Scalar h00 = Scalar(2) * s3 - Scalar(3) * s2 + Scalar(1);
    const Scalar h10 = s3 - Scalar(2) * s2 + s;
    const Scalar h01 = Scalar(-2) * s3 + Scalar(3) * s2;
    const Scalar h11 = s3 - s2;

    const Scalar dh00 = Scalar(6) * s2 - Scalar(6) * s;
    const Scalar dh10 = Scalar(3) * s2 - Scalar(4) * s + Scalar(1);
    const Scalar dh01 = Scalar(-6) * s2 + Scalar(6) * s;
    const Scalar dh11 = Scalar(3) * s2 - Scalar(2) * s;

    const Point& p0 = points_[i];
    const Point& p1 = points_[i + 1];
    const Point m0 = dt * tangents_[i];
    const Point m1 = dt * tangents_[i + 1];

    Sample out;
    out.position = h00 * p0 + h10 * m0 + h01 * p1 + h11 * m1;
    // d/du = d/ds * ds/dt * dt/du = (d/ds) / dt * t_range.
    out.tangent =
        (dh00 * p0 + dh10 * m0 + dh01 * p1 + dh11 * m1) * (t_range / dt);
    return out;
  }

  Scalar total_length() const { return lengths_.back(); }

  // Inverse of the cumulative arc length: the u whose arc length from the
  // start equals `s`. Piecewise-linear on the dense table, monotone.
  Scalar u_at_length(Scalar s) const {
    s = std::clamp(s, Scalar(0), total_length());
    const auto it = std::lower_bound(lengths_.begin(), lengths_.end(), s);
    if (it == lengths_.begin()) return u_grid_.front();
    const std::size_t hi = static_cast<std::size_t>(it - lengths_.begin());
    const std::size_t lo = hi - 1;
    const Scalar span = lengths_[hi] - lengths_[lo];
    if (!(span > Scalar(0))) return u_grid_[hi];
    const Scalar frac = (s - lengths_[lo]) / span;
    return u_grid_[lo] + frac * (u_grid_[hi] - u_grid_[lo]);
  }

  int segment_count() const { return static_cast<int>(points_.size()) - 1; }
  const std::vector<Point>& control_points() const { return points_; }

 private:
  void build_arc_length_table(int samples_per_segment) {
    const int n = std::max(segment_count() * samples_per_segment, 16);
    u_grid_.resize(n + 1);
    lengths_.resize(n + 1);
    u_grid_[0] = Scalar(0);
    lengths_[0] = Scalar(0);
    Point prev = points_.front();
    for (int k = 1; k <= n; ++k) {
      const Scalar u = Scalar(k) / Scalar(n);
      const Point pos = eval(u).position;
      u_grid_[k] = u;
      lengths_[k] = lengths_[k - 1] + (pos - prev).norm();
      prev = pos;
    }
  }

  std::vector<Point> points_;
  std::vector<Scalar> knots_;
  std::vector<Point> tangents_;
  std::vector<Scalar> u_grid_;
  std::vector<Scalar> lengths_;
};

using CatmullRom3d = CatmullRom3<double>;

// One-shot evaluation helper for callers that do not reuse the spline.
template <typename Scalar>
typename CatmullRom3<Scalar>::Sample eval_spline(
    const std::vector<Vec3<Scalar>>& points, Scalar u) {
  return CatmullRom3<Scalar>(points, /*samples_per_segment=*/16).eval(u);
}

}  // namespace trajkit

#endif  // TRAJKIT_SPLINE_HPP_
