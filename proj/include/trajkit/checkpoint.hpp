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

#ifndef TRAJKIT_CHECKPOINT_HPP_
#define TRAJKIT_CHECKPOINT_HPP_

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace trajkit {

// One named parameter tensor; vectors are stored as n x 1.
struct NamedTensor {
  std::string name;
  Eigen::MatrixXd values;
};

// Structured-text checkpoint: a count line, then per tensor a
// "tensor <name> <rows> <cols>" line followed by its rows. Same float
// rules as every other canonical document (10 significant digits), so
// serialize(parse(s)) is the byte identity.
std::string serialize_checkpoint(const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> parse_checkpoint(std::string_view text);

}  // namespace trajkit

#endif  // TRAJKIT_CHECKPOINT_HPP_
