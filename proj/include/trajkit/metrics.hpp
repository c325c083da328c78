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

#ifndef TRAJKIT_METRICS_HPP_
#define TRAJKIT_METRICS_HPP_

#include <map>
#include <string>
#include <vector>

#include "trajkit/pose.hpp"

namespace trajkit {

// Per-trajectory pose error. Translation is measured after anchoring the
// estimate's first frame onto the reference; rotation is the raw geodesic
// angle per frame, no alignment. Means over per-frame values.
struct TrajectoryError {
  double trans_err_m = 0.0;
  double rot_err_deg = 0.0;
  std::vector<double> per_frame_trans_m;
  std::vector<double> per_frame_rot_deg;
};

// Mean translation error in meters after first-frame alignment.
double trans_err(const PoseSequenced& estimate, const PoseSequenced& reference);

// Mean rotation error in degrees (geodesic angle, symmetric in arguments).
double rot_err(const PoseSequenced& estimate, const PoseSequenced& reference);

// Both metrics plus the per-frame breakdowns they average.
TrajectoryError trajectory_error(const PoseSequenced& estimate,
                                 const PoseSequenced& reference);

// One evaluated entity trajectory inside a named clip.
struct ClipEntityError {
  std::string clip_id;
  std::string entity_id;
  TrajectoryError error;
};

// CSV report, one row per (clip, entity):
// clip_id,entity_id,trans_err_m,rot_err_deg
std::string write_metric_report(const std::vector<ClipEntityError>& rows);

// Keyword class for caption histograms: a display name plus the lowercase
// word forms that count as a mention.
struct KeywordClass {
  std::string name;
  std::vector<std::string> keywords;
};

// Built-in taxonomy of at least 60 entity classes.
const std::vector<KeywordClass>& default_keyword_classes();

// Case-insensitive whole-word histogram over captions. A caption counts
// at most once per class no matter how many of its keywords match; every
// class appears in the result, zero included.
std::map<std::string, int> entity_distribution(
    const std::vector<std::string>& captions,
    const std::vector<KeywordClass>& classes = default_keyword_classes());

// CSV dump of a histogram, one "class,count" row per class, sorted by name.
std::string write_histogram_csv(const std::map<std::string, int>& histogram);

}  // namespace trajkit

#endif  // TRAJKIT_METRICS_HPP_
