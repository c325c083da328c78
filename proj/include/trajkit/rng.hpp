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

#ifndef TRAJKIT_RNG_HPP_
#define TRAJKIT_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

#include "trajkit/error.hpp"

namespace trajkit {

// Seeded random stream with hand-rolled variate mapping. The standard
// <random> distributions are implementation-defined, which would break the
// byte-identical-rerun promise; everything here is pinned to the mt19937_64
// bit stream and plain libm, so a fixed seed reproduces the same doubles on
// a given platform regardless of standard library.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform in [0, n). The modulo bias is below n / 2^64 and irrelevant next
  // to the determinism requirement.
  int below(int n) {
    if (n <= 0) throw RangeError("SeededRng::below requires n > 0");
    return static_cast<int>(gen_() % static_cast<std::uint64_t>(n));
  }

  // Standard normal via Box-Muller; the spare value is cached so a fixed
  // seed yields a fixed sequence.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // 1 - uniform() lies in (0, 1], keeping the log argument positive.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// FNV-1a over the bytes of `text`. Used to derive stable per-token seeds for
// the pseudo-embedding tables.
inline std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (const char c : text) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 1099511628211ULL;
  }
  return hash;
}

}  // namespace trajkit

#endif  // TRAJKIT_RNG_HPP_
