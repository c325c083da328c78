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

#ifndef TRAJKIT_SERIALIZATION_HPP_
#define TRAJKIT_SERIALIZATION_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "trajkit/camera.hpp"
#include "trajkit/scene.hpp"

namespace trajkit {

// All canonical text documents share these rules: fixed field order, one
// record per line, space-separated tokens, every line newline-terminated,
// floats printed with 10 significant digits. Ten digits is the smallest
// count that keeps quantization error below the 1e-9 round-trip and
// orthonormality tolerances (9 digits measurably breaks both).
inline constexpr const char* kConventionToken = "right_handed_z_up_x_forward";

// Shortest %.10g rendering of `value`; parsing it back gives quantize_float.
std::string format_float(double value);

// The double that format_float's output parses back to. Idempotent.
double quantize_float(double value);

namespace detail {

// Forward cursor over a newline-terminated document. Lines are handed out
// without their terminator; a missing final newline is a parse error.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool at_end() const { return pos_ >= text_.size(); }
  std::size_t line_number() const { return line_no_; }

  // Next line, or throws ParseError mentioning `expectation` at EOF.
  std::string_view next_line(const std::string& expectation);

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

double parse_float_token(std::string_view token, std::size_t line_no);
long parse_int_token(std::string_view token, std::size_t line_no);
std::vector<std::string_view> split_tokens(std::string_view line);

}  // namespace detail

// Canonical scene document (.poseq): header, then per entity an id, a
// prompt, a render scale, and F rows of 12 floats (row-major rotation
// followed by translation). serialize_scene(parse_scene(s)) == s holds
// byte-for-byte for any document this serializer produced.
std::string serialize_scene(const SceneComposition& scene);
SceneComposition parse_scene(std::string_view text);

// 2D track export: "frame,entity_id,u,v,depth" header plus one row per
// projected sample.
std::string write_track_csv(const std::vector<TrackSample>& samples);

// Camera rig document: shared intrinsics plus per camera its azimuth and
// camera-to-world pose.
std::string write_rig_doc(const CameraRig& rig);
CameraRig parse_rig_doc(std::string_view text);

// Whole-file helpers; failures surface as IoError.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace trajkit

#endif  // TRAJKIT_SERIALIZATION_HPP_
