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

#ifndef TRAJKIT_ERROR_HPP_
#define TRAJKIT_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace trajkit {

// Base class for all trajkit failures. Every subclass carries a stable kind
// string and a distinct process exit code so callers (and the CLI) can map
// failures to machine-readable classes without string matching.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "error"; }
  virtual int exit_code() const noexcept { return 1; }
};

// A value or object violates a documented contract (bad rotation matrix,
// frame-count mismatch, out-of-range entity count, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "validation"; }
  int exit_code() const noexcept override { return 3; }
};

// A numeric argument is outside its documented domain (interpolation
// parameter, budget larger than the achievable maximum, ...).
class RangeError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "range"; }
  int exit_code() const noexcept override { return 4; }
};

// A document could not be decoded. `line` is 1-based; 0 means the position
// is unknown.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  explicit ParseError(const std::string& what) : ParseError(0, what) {}
  const char* kind() const noexcept override { return "parse"; }
  int exit_code() const noexcept override { return 5; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Filesystem-level failure (missing file, unwritable path).
class IoError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "io"; }
  int exit_code() const noexcept override { return 6; }
};

// Scene placement gave up after the bounded retry budget. Carries the pair
// of entities that could not be separated.
class PlacementError : public Error {
 public:
  PlacementError(const std::string& what, std::string entity_a,
                 std::string entity_b)
      : Error(what),
        entity_a_(std::move(entity_a)),
        entity_b_(std::move(entity_b)) {}
  const char* kind() const noexcept override { return "placement"; }
  int exit_code() const noexcept override { return 7; }
  const std::string& entity_a() const noexcept { return entity_a_; }
  const std::string& entity_b() const noexcept { return entity_b_; }

 private:
  std::string entity_a_;
  std::string entity_b_;
};

// A computation produced non-finite values (NaN/Inf in an attention map,
// a denoiser output, ...).
class NumericError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "numeric"; }
  int exit_code() const noexcept override { return 8; }
};

}  // namespace trajkit

#endif  // TRAJKIT_ERROR_HPP_
