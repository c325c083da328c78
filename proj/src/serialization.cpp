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

#include "trajkit/serialization.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "trajkit/error.hpp"
#include "trajkit/pose.hpp"

namespace trajkit {

std::string format_float(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", value);
  return std::string(buf);
}

double quantize_float(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", value);
  return std::strtod(buf, nullptr);
}

namespace detail {

std::string_view LineReader::next_line(const std::string& expectation) {
  if (at_end()) {
    throw ParseError(line_no_ + 1,
                     "unexpected end of document, expected " + expectation);
  }
  const std::size_t nl = text_.find('\n', pos_);
  if (nl == std::string_view::npos) {
    throw ParseError(line_no_ + 1, "missing final newline");
  }
  std::string_view line = text_.substr(pos_, nl - pos_);
  pos_ = nl + 1;
  ++line_no_;
  return line;
}

double parse_float_token(std::string_view token, std::size_t line_no) {
  if (token.empty()) {
    throw ParseError(line_no, "empty numeric field");
  }
  std::string owned(token);
  // strtod accepts more than the canonical %.10g grammar (hex floats,
  // "inf", "nan", leading whitespace); reject those forms up front so the
  // value check below only ever sees plain decimal or scientific numbers.
  std::size_t digits = owned[0] == '+' || owned[0] == '-' ? 1 : 0;
  if (digits >= owned.size() ||
      !(owned[digits] == '.' ||
        std::isdigit(static_cast<unsigned char>(owned[digits])))) {
    throw ParseError(line_no, "malformed number '" + owned + "'");
  }
  if (owned.size() > digits + 1 && owned[digits] == '0' &&
      (owned[digits + 1] == 'x' || owned[digits + 1] == 'X')) {
    throw ParseError(line_no, "malformed number '" + owned + "'");
  }
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(owned.c_str(), &end);
  if (end != owned.c_str() + owned.size() || errno == ERANGE ||
      !std::isfinite(value)) {
    throw ParseError(line_no, "malformed number '" + owned + "'");
  }
  return value;
}

long parse_int_token(std::string_view token, std::size_t line_no) {
  if (token.empty()) {
    throw ParseError(line_no, "empty integer field");
  }
  std::string owned(token);
  errno = 0;
  char* end = nullptr;
  const long value = std::strtol(owned.c_str(), &end, 10);
  if (end != owned.c_str() + owned.size() || errno == ERANGE) {
    throw ParseError(line_no, "malformed integer '" + owned + "'");
  }
  return value;
}

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    const std::size_t space = line.find(' ', pos);
    if (space == std::string_view::npos) {
      tokens.push_back(line.substr(pos));
      break;
    }
    tokens.push_back(line.substr(pos, space - pos));
    pos = space + 1;
  }
  return tokens;
}

}  // namespace detail

namespace {

using detail::LineReader;
using detail::parse_float_token;
using detail::parse_int_token;
using detail::split_tokens;

// Writes the 12 pose floats (row-major rotation, then translation).
// Quantizing an orthonormal rotation can push its orthonormality error past
// the strict parse tolerance, so the writer checks the quantized matrix and
// falls back to quantizing a freshly projected rotation when needed. Both
// branches are fixpoints of quantization, which is what makes
// serialize(parse(s)) byte-identical.
void append_pose_line(std::string& out, const Pose6d& pose) {
  Mat3<double> rot = pose.rotation;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      rot(r, c) = quantize_float(rot(r, c));
    }
  }
  if (orthonormality_error(rot) > kOrthonormalityTol) {
    const Mat3<double> projected = project_to_rotation(pose.rotation);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        rot(r, c) = quantize_float(projected(r, c));
      }
    }
  }
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      out += format_float(rot(r, c));
      out += ' ';
    }
  }
  out += format_float(pose.translation.x());
  out += ' ';
  out += format_float(pose.translation.y());
  out += ' ';
  out += format_float(pose.translation.z());
  out += '\n';
}

// Field tokens (ids, location tags) may not contain separators.
void require_token(const std::string& value, const char* what) {
  if (value.empty()) {
    throw ValidationError(std::string(what) + " must be non-empty");
  }
  for (char ch : value) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      throw ValidationError(std::string(what) + " '" + value +
                            "' must not contain whitespace");
    }
  }
}

Pose6d parse_pose_line(std::string_view line, std::size_t line_no,
                       const std::string& label) {
  const auto tokens = split_tokens(line);
  if (tokens.size() != 12) {
    throw ParseError(line_no, "expected 12 pose values, got " +
                                  std::to_string(tokens.size()));
  }
  double v[12];
  for (int i = 0; i < 12; ++i) {
    v[i] = parse_float_token(tokens[static_cast<std::size_t>(i)], line_no);
  }
  Mat3<double> rot;
  rot << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
  const Vec3<double> trans(v[9], v[10], v[11]);
  return Pose6d::from_parts(rot, trans, label);
}

}  // namespace

std::string serialize_scene(const SceneComposition& scene) {
  validate_scene(scene);
  for (const SceneEntity& entity : scene.entities) {
    require_token(entity.entity_id, "entity id");
    if (entity.prompt.empty()) {
      throw ValidationError("entity '" + entity.entity_id +
                            "' has an empty prompt");
    }
  }
  if (!scene.location_tag.empty()) {
    require_token(scene.location_tag, "location tag");
  }

  std::string out;
  out += "poseq 1\n";
  out += "convention ";
  out += kConventionToken;
  out += '\n';
  out += "fps " + format_float(scene.fps()) + '\n';
  out += "frames " + std::to_string(scene.frame_count()) + '\n';
  out += "stage " + format_float(scene.stage_side) + '\n';
  if (!scene.location_tag.empty()) {
    out += "location " + scene.location_tag + '\n';
  }
  out += "entities " + std::to_string(scene.entities.size()) + '\n';
  for (const SceneEntity& entity : scene.entities) {
    out += "entity " + entity.entity_id + '\n';
    out += "prompt " + entity.prompt + '\n';
    out += "scale " + format_float(entity.scale_factor) + '\n';
    for (const Pose6d& pose : entity.poses.poses) {
      append_pose_line(out, pose);
    }
  }
  return out;
}

SceneComposition parse_scene(std::string_view text) {
  LineReader reader(text);

  if (reader.next_line("'poseq 1' header") != "poseq 1") {
    throw ParseError(reader.line_number(), "expected header 'poseq 1'");
  }
  const std::string convention_line =
      std::string("convention ") + kConventionToken;
  if (reader.next_line("convention line") != convention_line) {
    throw ParseError(reader.line_number(),
                     "expected '" + convention_line + "'");
  }

  SceneComposition scene;
  double fps = 0.0;
  long frames = 0;

  {
    const auto tokens = split_tokens(reader.next_line("fps line"));
    if (tokens.size() != 2 || tokens[0] != "fps") {
      throw ParseError(reader.line_number(), "expected 'fps <value>'");
    }
    fps = parse_float_token(tokens[1], reader.line_number());
    if (!(fps > 0.0)) {
      throw ValidationError("fps must be positive, got " + format_float(fps));
    }
  }
  {
    const auto tokens = split_tokens(reader.next_line("frames line"));
    if (tokens.size() != 2 || tokens[0] != "frames") {
      throw ParseError(reader.line_number(), "expected 'frames <count>'");
    }
    frames = parse_int_token(tokens[1], reader.line_number());
    if (frames < 1) {
      throw ValidationError("frame count must be at least 1, got " +
                            std::to_string(frames));
    }
  }
  {
    const auto tokens = split_tokens(reader.next_line("stage line"));
    if (tokens.size() != 2 || tokens[0] != "stage") {
      throw ParseError(reader.line_number(), "expected 'stage <side>'");
    }
    scene.stage_side = parse_float_token(tokens[1], reader.line_number());
  }

  // The location line is present exactly when the tag is non-empty.
  std::string_view line = reader.next_line("location or entities line");
  {
    const auto tokens = split_tokens(line);
    if (tokens.size() == 2 && tokens[0] == "location") {
      scene.location_tag = std::string(tokens[1]);
      line = reader.next_line("entities line");
    }
  }

  long entity_count = 0;
  {
    const auto tokens = split_tokens(line);
    if (tokens.size() != 2 || tokens[0] != "entities") {
      throw ParseError(reader.line_number(), "expected 'entities <count>'");
    }
    entity_count = parse_int_token(tokens[1], reader.line_number());
    if (entity_count < static_cast<long>(kMinEntities) ||
        entity_count > static_cast<long>(kMaxEntities)) {
      throw ValidationError("scene must contain between 1 and 3 entities, got " +
                            std::to_string(entity_count));
    }
  }

  for (long e = 0; e < entity_count; ++e) {
    SceneEntity entity;
    {
      const auto tokens = split_tokens(reader.next_line("entity line"));
      if (tokens.size() != 2 || tokens[0] != "entity" || tokens[1].empty()) {
        throw ParseError(reader.line_number(), "expected 'entity <id>'");
      }
      entity.entity_id = std::string(tokens[1]);
    }
    {
      const std::string_view prompt_line = reader.next_line("prompt line");
      constexpr std::string_view kPrefix = "prompt ";
      if (prompt_line.size() <= kPrefix.size() ||
          prompt_line.substr(0, kPrefix.size()) != kPrefix) {
        throw ParseError(reader.line_number(), "expected 'prompt <text>'");
      }
      entity.prompt = std::string(prompt_line.substr(kPrefix.size()));
    }
    {
      const auto tokens = split_tokens(reader.next_line("scale line"));
      if (tokens.size() != 2 || tokens[0] != "scale") {
        throw ParseError(reader.line_number(), "expected 'scale <factor>'");
      }
      entity.scale_factor = parse_float_token(tokens[1], reader.line_number());
    }
    entity.poses.fps = fps;
    entity.poses.poses.reserve(static_cast<std::size_t>(frames));
    for (long f = 0; f < frames; ++f) {
      const std::string_view pose_line = reader.next_line(
          "pose row " + std::to_string(f) + " of entity '" + entity.entity_id +
          "'");
      const std::string label =
          "entity '" + entity.entity_id + "' frame " + std::to_string(f);
      entity.poses.poses.push_back(
          parse_pose_line(pose_line, reader.line_number(), label));
    }
    scene.entities.push_back(std::move(entity));
  }

  if (!reader.at_end()) {
    throw ParseError(reader.line_number() + 1,
                     "unexpected trailing content after last entity");
  }

  validate_scene(scene);
  return scene;
}

std::string write_track_csv(const std::vector<TrackSample>& samples) {
  std::string out = "frame,entity_id,u,v,depth\n";
  for (const TrackSample& sample : samples) {
    out += std::to_string(sample.frame);
    out += ',';
    out += sample.entity_id;
    out += ',';
    out += format_float(sample.u);
    out += ',';
    out += format_float(sample.v);
    out += ',';
    out += format_float(sample.depth);
    out += '\n';
  }
  return out;
}

std::string write_rig_doc(const CameraRig& rig) {
  validate_rig(rig);
  const Intrinsics& intr = rig.cameras.front().intrinsics;
  std::string out;
  out += "rig 1\n";
  out += "convention ";
  out += kConventionToken;
  out += '\n';
  out += "center " + format_float(rig.look_at.x()) + ' ' +
         format_float(rig.look_at.y()) + ' ' + format_float(rig.look_at.z()) +
         '\n';
  out += "radius " + format_float(rig.radius) + '\n';
  out += "height " + format_float(rig.height) + '\n';
  out += "intrinsics " + format_float(intr.fx) + ' ' + format_float(intr.fy) +
         ' ' + format_float(intr.cx) + ' ' + format_float(intr.cy) + ' ' +
         std::to_string(intr.width) + ' ' + std::to_string(intr.height) + '\n';
  out += "cameras " + std::to_string(rig.cameras.size()) + '\n';
  for (std::size_t k = 0; k < rig.cameras.size(); ++k) {
    out += "camera " + std::to_string(k) + ' ' +
           format_float(rig.azimuth_deg[k]) + ' ';
    // Reuse the pose quantization rule, then strip the trailing newline the
    // helper appends so the camera line stays a single record.
    std::string pose_text;
    append_pose_line(pose_text, rig.cameras[k].camera_to_world);
    pose_text.pop_back();
    out += pose_text;
    out += '\n';
  }
  return out;
}

CameraRig parse_rig_doc(std::string_view text) {
  LineReader reader(text);

  if (reader.next_line("'rig 1' header") != "rig 1") {
    throw ParseError(reader.line_number(), "expected header 'rig 1'");
  }
  const std::string convention_line =
      std::string("convention ") + kConventionToken;
  if (reader.next_line("convention line") != convention_line) {
    throw ParseError(reader.line_number(),
                     "expected '" + convention_line + "'");
  }

  CameraRig rig;
  {
    const auto tokens = split_tokens(reader.next_line("center line"));
    if (tokens.size() != 4 || tokens[0] != "center") {
      throw ParseError(reader.line_number(), "expected 'center <x> <y> <z>'");
    }
    rig.look_at = Vec3<double>(parse_float_token(tokens[1], reader.line_number()),
                               parse_float_token(tokens[2], reader.line_number()),
                               parse_float_token(tokens[3], reader.line_number()));
  }
  {
    const auto tokens = split_tokens(reader.next_line("radius line"));
    if (tokens.size() != 2 || tokens[0] != "radius") {
      throw ParseError(reader.line_number(), "expected 'radius <m>'");
    }
    rig.radius = parse_float_token(tokens[1], reader.line_number());
  }
  {
    const auto tokens = split_tokens(reader.next_line("height line"));
    if (tokens.size() != 2 || tokens[0] != "height") {
      throw ParseError(reader.line_number(), "expected 'height <m>'");
    }
    rig.height = parse_float_token(tokens[1], reader.line_number());
  }
  Intrinsics intr;
  {
    const auto tokens = split_tokens(reader.next_line("intrinsics line"));
    if (tokens.size() != 7 || tokens[0] != "intrinsics") {
      throw ParseError(reader.line_number(),
                       "expected 'intrinsics <fx> <fy> <cx> <cy> <w> <h>'");
    }
    intr.fx = parse_float_token(tokens[1], reader.line_number());
    intr.fy = parse_float_token(tokens[2], reader.line_number());
    intr.cx = parse_float_token(tokens[3], reader.line_number());
    intr.cy = parse_float_token(tokens[4], reader.line_number());
    intr.width = static_cast<int>(parse_int_token(tokens[5], reader.line_number()));
    intr.height =
        static_cast<int>(parse_int_token(tokens[6], reader.line_number()));
  }
  long camera_count = 0;
  {
    const auto tokens = split_tokens(reader.next_line("cameras line"));
    if (tokens.size() != 2 || tokens[0] != "cameras") {
      throw ParseError(reader.line_number(), "expected 'cameras <count>'");
    }
    camera_count = parse_int_token(tokens[1], reader.line_number());
    if (camera_count != static_cast<long>(kRigCameraCount)) {
      throw ValidationError("rig must contain " +
                            std::to_string(kRigCameraCount) +
                            " cameras, got " + std::to_string(camera_count));
    }
  }
  for (long k = 0; k < camera_count; ++k) {
    const std::string_view cam_line =
        reader.next_line("camera row " + std::to_string(k));
    const auto tokens = split_tokens(cam_line);
    if (tokens.size() != 15 || tokens[0] != "camera") {
      throw ParseError(reader.line_number(),
                       "expected 'camera <index> <azimuth> <12 pose values>'");
    }
    const long index = parse_int_token(tokens[1], reader.line_number());
    if (index != k) {
      throw ParseError(reader.line_number(),
                       "camera rows out of order: expected index " +
                           std::to_string(k) + ", got " +
                           std::to_string(index));
    }
    rig.azimuth_deg.push_back(parse_float_token(tokens[2], reader.line_number()));
    double v[12];
    for (int i = 0; i < 12; ++i) {
      v[i] = parse_float_token(tokens[static_cast<std::size_t>(i + 3)],
                               reader.line_number());
    }
    Mat3<double> rot;
    rot << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
    CameraModel camera;
    camera.camera_to_world = Pose6d::from_parts(
        rot, Vec3<double>(v[9], v[10], v[11]),
        "camera " + std::to_string(k) + " extrinsics");
    camera.intrinsics = intr;
    rig.cameras.push_back(camera);
  }

  if (!reader.at_end()) {
    throw ParseError(reader.line_number() + 1,
                     "unexpected trailing content after last camera");
  }

  validate_rig(rig);
  return rig;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("could not open '" + path + "' for reading");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    throw IoError("read failure on '" + path + "'");
  }
  return buffer.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("could not open '" + path + "' for writing");
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) {
    throw IoError("write failure on '" + path + "'");
  }
}

}  // namespace trajkit
