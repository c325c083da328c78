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

#include "trajkit/checkpoint.hpp"

#include <set>

#include "trajkit/error.hpp"
#include "trajkit/serialization.hpp"

namespace trajkit {

namespace {

using detail::LineReader;
using detail::parse_float_token;
using detail::parse_int_token;
using detail::split_tokens;

void require_name(const std::string& name) {
  if (name.empty()) {
    throw ValidationError("tensor name must be non-empty");
  }
  for (char ch : name) {
    if (ch == ' ' || ch == '\n' || ch == '\t' || ch == '\r') {
      throw ValidationError("tensor name '" + name +
                            "' must not contain whitespace");
    }
  }
}

}  // namespace

std::string serialize_checkpoint(const std::vector<NamedTensor>& tensors) {
  std::set<std::string> names;
  for (const NamedTensor& tensor : tensors) {
    require_name(tensor.name);
    if (!names.insert(tensor.name).second) {
      throw ValidationError("duplicate tensor name '" + tensor.name + "'");
    }
    if (tensor.values.size() == 0) {
      throw ValidationError("tensor '" + tensor.name + "' is empty");
    }
    if (!tensor.values.allFinite()) {
      throw ValidationError("tensor '" + tensor.name +
                            "' contains non-finite values");
    }
  }

  std::string out;
  out += "ckpt 1\n";
  out += "tensors " + std::to_string(tensors.size()) + '\n';
  for (const NamedTensor& tensor : tensors) {
    out += "tensor " + tensor.name + ' ' +
           std::to_string(tensor.values.rows()) + ' ' +
           std::to_string(tensor.values.cols()) + '\n';
    for (Eigen::Index r = 0; r < tensor.values.rows(); ++r) {
      for (Eigen::Index c = 0; c < tensor.values.cols(); ++c) {
        if (c > 0) out += ' ';
        out += format_float(tensor.values(r, c));
      }
      out += '\n';
    }
  }
  return out;
}

std::vector<NamedTensor> parse_checkpoint(std::string_view text) {
  LineReader reader(text);
  if (reader.next_line("'ckpt 1' header") != "ckpt 1") {
    throw ParseError(reader.line_number(), "expected header 'ckpt 1'");
  }
  long count = 0;
  {
    const auto tokens = split_tokens(reader.next_line("tensors line"));
    if (tokens.size() != 2 || tokens[0] != "tensors") {
      throw ParseError(reader.line_number(), "expected 'tensors <count>'");
    }
    count = parse_int_token(tokens[1], reader.line_number());
    if (count < 0) {
      throw ParseError(reader.line_number(),
                       "tensor count must be non-negative");
    }
  }

  std::vector<NamedTensor> tensors;
  std::set<std::string> names;
  for (long i = 0; i < count; ++i) {
    const auto tokens = split_tokens(reader.next_line("tensor header"));
    if (tokens.size() != 4 || tokens[0] != "tensor") {
      throw ParseError(reader.line_number(),
                       "expected 'tensor <name> <rows> <cols>'");
    }
    NamedTensor tensor;
    tensor.name = std::string(tokens[1]);
    const long rows = parse_int_token(tokens[2], reader.line_number());
    const long cols = parse_int_token(tokens[3], reader.line_number());
    if (rows < 1 || cols < 1) {
      throw ParseError(reader.line_number(),
                       "tensor dimensions must be positive");
    }
    if (!names.insert(tensor.name).second) {
      throw ValidationError("duplicate tensor name '" + tensor.name + "'");
    }
    tensor.values.resize(rows, cols);
    for (long r = 0; r < rows; ++r) {
      const auto row_tokens = split_tokens(
          reader.next_line("row " + std::to_string(r) + " of tensor '" +
                           tensor.name + "'"));
      if (static_cast<long>(row_tokens.size()) != cols) {
        throw ParseError(reader.line_number(),
                         "expected " + std::to_string(cols) +
                             " values, got " +
                             std::to_string(row_tokens.size()));
      }
      for (long c = 0; c < cols; ++c) {
        tensor.values(r, c) = parse_float_token(
            row_tokens[static_cast<std::size_t>(c)], reader.line_number());
      }
    }
    tensors.push_back(std::move(tensor));
  }

  if (!reader.at_end()) {
    throw ParseError(reader.line_number() + 1,
                     "unexpected trailing content after last tensor");
  }
  return tensors;
}

}  // namespace trajkit
