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

#ifndef TRAJKIT_INJECTOR_HPP_
#define TRAJKIT_INJECTOR_HPP_

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trajkit/error.hpp"
#include "trajkit/pose.hpp"
#include "trajkit/rng.hpp"

namespace trajkit {

// Token matrices are rows-of-tokens by model width; linear maps apply on
// the right (Y = X * W). The pose encoder maps a flattened 12-float pose
// row to a width-D code; fused condition slabs hold one row per
// (entity, token-slot) pair; gated attention mixes them into the latent
// tokens behind a tanh gate that is exactly transparent at zero.

template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct InjectorDims {
  int d_model = 8;
  int max_tokens = 20;    // per-entity token budget (slab height)
  int max_entities = 3;
  int downsample = 4;     // temporal interval-sampling stride
};

template <typename Scalar>
struct PoseEncoderParams {
  MatX<Scalar> weight;  // 12 x D
  VecX<Scalar> bias;    // D
};

template <typename Scalar>
struct AttentionParams {
  MatX<Scalar> wq, wk, wv, wo;  // each D x D
};

template <typename Scalar>
struct InjectorParams {
  InjectorDims dims;
  PoseEncoderParams<Scalar> pose;
  AttentionParams<Scalar> attn;
  Scalar gate_gamma = Scalar(0);
};

// Low-rank update on a frozen right-multiplied weight: the effective map
// is W + alpha * A * B^T with A (in x r) and B (out x r).
template <typename Scalar>
struct LoraParams {
  MatX<Scalar> a;
  MatX<Scalar> b;
  Scalar alpha = Scalar(0);
};

template <typename Scalar>
struct LoraLinear {
  MatX<Scalar> weight;  // in x out
  LoraParams<Scalar> lora;
};

namespace detail {

template <typename Scalar>
void check_finite(const MatX<Scalar>& m, const char* context) {
  if (!m.allFinite()) {
    throw NumericError(std::string("non-finite values in ") + context);
  }
}

}  // namespace detail

// Whitespace token split; embeddings depend on the exact token strings.
inline std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && text[pos] == ' ') ++pos;
    if (pos >= text.size()) break;
    std::size_t end = pos;
    while (end < text.size() && text[end] != ' ') ++end;
    tokens.push_back(text.substr(pos, end - pos));
    pos = end;
  }
  return tokens;
}

// Stand-in for a frozen text encoder: each distinct token string maps to a
// fixed unit-norm D-vector drawn from a generator seeded by the token's
// hash. Deterministic across runs and entity orderings.
template <typename Scalar>
VecX<Scalar> embed_token(const std::string& token, int d_model) {
  SeededRng rng(fnv1a64(token));
  VecX<double> v(d_model);
  for (int i = 0; i < d_model; ++i) {
    v(i) = rng.normal();
  }
  const double norm = v.norm();
  // A zero draw from d independent normals has probability zero, but the
  // guard keeps the map total.
  if (norm > 0.0) {
    v /= norm;
  }
  return v.template cast<Scalar>();
}

// Stacked per-entity token slabs: N * max_tokens rows, zero rows past each
// prompt's length.
template <typename Scalar>
struct EntityTokens {
  MatX<Scalar> embeddings;        // (N * max_tokens) x D
  std::vector<int> token_counts;  // per entity
  int entity_count = 0;
};

template <typename Scalar>
EntityTokens<Scalar> encode_entities(const std::vector<std::string>& prompts,
                                     const InjectorDims& dims) {
  if (static_cast<int>(prompts.size()) > dims.max_entities) {
    throw ValidationError("at most " + std::to_string(dims.max_entities) +
                          " entity prompts are supported, got " +
                          std::to_string(prompts.size()));
  }
  EntityTokens<Scalar> out;
  out.entity_count = static_cast<int>(prompts.size());
  out.embeddings = MatX<Scalar>::Zero(out.entity_count * dims.max_tokens,
                                      dims.d_model);
  for (int n = 0; n < out.entity_count; ++n) {
    const std::vector<std::string> tokens =
        tokenize(prompts[static_cast<std::size_t>(n)]);
    if (static_cast<int>(tokens.size()) > dims.max_tokens) {
      throw ValidationError(
          "prompt " + std::to_string(n) + " has " +
          std::to_string(tokens.size()) + " tokens, limit is " +
          std::to_string(dims.max_tokens));
    }
    out.token_counts.push_back(static_cast<int>(tokens.size()));
    for (int l = 0; l < static_cast<int>(tokens.size()); ++l) {
      out.embeddings.row(n * dims.max_tokens + l) =
          embed_token<Scalar>(tokens[static_cast<std::size_t>(l)],
                              dims.d_model)
              .transpose();
    }
  }
  return out;
}

// Row-major flattening of [R | T]: r11..r33 then t1 t2 t3.
template <typename Scalar>
Eigen::Matrix<Scalar, 1, 12> flatten_pose(const Pose6<Scalar>& pose) {
  Eigen::Matrix<Scalar, 1, 12> flat;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      flat(0, 3 * r + c) = pose.rotation(r, c);
    }
  }
  flat(0, 9) = pose.translation.x();
  flat(0, 10) = pose.translation.y();
  flat(0, 11) = pose.translation.z();
  return flat;
}

// Frames kept by the temporal downsampler: 0, k, 2k, ... F-1 rounded down,
// giving 1 + (F-1)/k kept frames.
inline std::vector<int> frame_indices(int frames, int downsample) {
  if (frames < 1) {
    throw ValidationError("frame count must be at least 1, got " +
                          std::to_string(frames));
  }
  if (downsample < 1) {
    throw ValidationError("downsample factor must be at least 1, got " +
                          std::to_string(downsample));
  }
  std::vector<int> kept;
  for (int f = 0; f < frames; f += downsample) {
    kept.push_back(f);
  }
  return kept;
}

// Pose codes for one entity: a (F_kept x D) matrix, one row per kept frame.
template <typename Scalar>
MatX<Scalar> encode_poses(const PoseSequence<Scalar>& seq,
                          const PoseEncoderParams<Scalar>& params,
                          const InjectorDims& dims) {
  validate_sequence(seq);
  if (params.weight.rows() != 12 || params.weight.cols() != dims.d_model ||
      params.bias.size() != dims.d_model) {
    throw ValidationError("pose encoder weight must be 12 x d_model");
  }
  const std::vector<int> kept = frame_indices(seq.frame_count(),
                                              dims.downsample);
  MatX<Scalar> out(static_cast<Eigen::Index>(kept.size()), dims.d_model);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const Eigen::Matrix<Scalar, 1, 12> flat =
        flatten_pose(seq.poses[static_cast<std::size_t>(kept[i])]);
    out.row(static_cast<Eigen::Index>(i)) =
        flat * params.weight + params.bias.transpose();
  }
  detail::check_finite(out, "pose codes");
  return out;
}

// Fused condition slabs, one (N * max_tokens) x D matrix per kept frame:
// row (n, l) is the token embedding plus entity n's pose code at that
// frame. The pose code is added to every slot of the slab, padded slots
// included, so an empty prompt's slab carries pure pose rows.
template <typename Scalar>
struct FusedConditions {
  std::vector<MatX<Scalar>> frames;
  int entity_count = 0;
  int slab_rows = 0;  // rows per frame = entity_count * max_tokens
};

template <typename Scalar>
FusedConditions<Scalar> fuse_entity_pose(
    const EntityTokens<Scalar>& tokens,
    const std::vector<MatX<Scalar>>& pose_codes, const InjectorDims& dims) {
  if (static_cast<int>(pose_codes.size()) != tokens.entity_count) {
    throw ValidationError(
        "entity count mismatch: " + std::to_string(tokens.entity_count) +
        " prompts vs " + std::to_string(pose_codes.size()) +
        " pose sequences");
  }
  FusedConditions<Scalar> out;
  out.entity_count = tokens.entity_count;
  out.slab_rows = tokens.entity_count * dims.max_tokens;
  if (tokens.entity_count == 0) {
    return out;
  }
  const Eigen::Index kept = pose_codes.front().rows();
  for (const MatX<Scalar>& codes : pose_codes) {
    if (codes.rows() != kept || codes.cols() != dims.d_model) {
      throw ValidationError("pose code shapes differ between entities");
    }
  }
  for (Eigen::Index f = 0; f < kept; ++f) {
    MatX<Scalar> slab(out.slab_rows, dims.d_model);
    for (int n = 0; n < tokens.entity_count; ++n) {
      for (int l = 0; l < dims.max_tokens; ++l) {
        slab.row(n * dims.max_tokens + l) =
            tokens.embeddings.row(n * dims.max_tokens + l) +
            pose_codes[static_cast<std::size_t>(n)].row(f);
      }
    }
    out.frames.push_back(std::move(slab));
  }
  return out;
}

// Intermediate values of one gated-attention evaluation, kept for the
// hand-derived backward pass.
template <typename Scalar>
struct GatedAttentionCache {
  MatX<Scalar> t;        // (M + C) x D stacked input
  MatX<Scalar> q, k, v;  // projections (q from the M latent rows only)
  MatX<Scalar> prob;     // softmax rows, M x (M + C)
  MatX<Scalar> mixed;    // prob * v, M x D
  MatX<Scalar> out;      // mixed * wo, M x D
  Scalar gate = Scalar(0);  // tanh(gate_gamma)
};

// Full-path evaluation used by training and the gradient check: always
// computes the attention even at gamma = 0 so the gate's gradient is
// defined.
template <typename Scalar>
MatX<Scalar> gated_self_attention_cached(const MatX<Scalar>& x,
                                         const MatX<Scalar>& conditions,
                                         const AttentionParams<Scalar>& attn,
                                         Scalar gate_gamma,
                                         GatedAttentionCache<Scalar>* cache) {
  const Eigen::Index d = x.cols();
  if (attn.wq.rows() != d || attn.wq.cols() != d || attn.wk.rows() != d ||
      attn.wk.cols() != d || attn.wv.rows() != d || attn.wv.cols() != d ||
      attn.wo.rows() != d || attn.wo.cols() != d) {
    throw ValidationError("attention weights must be d_model x d_model");
  }
  if (conditions.size() != 0 && conditions.cols() != d) {
    throw ValidationError("condition width does not match latent width");
  }
  const Eigen::Index m = x.rows();
  const Eigen::Index c = conditions.rows();

  GatedAttentionCache<Scalar> local;
  local.t.resize(m + c, d);
  local.t.topRows(m) = x;
  if (c > 0) {
    local.t.bottomRows(c) = conditions;
  }

  // Truncation to the first M rows makes only the latent-row queries
  // observable, so queries are computed for those rows alone; keys and
  // values span the full stack.
  local.q = x * attn.wq;
  local.k = local.t * attn.wk;
  local.v = local.t * attn.wv;

  const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(d));
  MatX<Scalar> scores = (local.q * local.k.transpose()) * scale;
  local.prob.resizeLike(scores);
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    const Scalar row_max = scores.row(i).maxCoeff();
    VecX<Scalar> shifted =
        (scores.row(i).array() - row_max).exp().matrix().transpose();
    local.prob.row(i) = (shifted / shifted.sum()).transpose();
  }
  local.mixed = local.prob * local.v;
  local.out = local.mixed * attn.wo;
  local.gate = std::tanh(gate_gamma);

  MatX<Scalar> result = x + local.gate * local.out;
  detail::check_finite(result, "gated attention output");
  if (cache != nullptr) {
    *cache = std::move(local);
  }
  return result;
}

// Inference-path gated attention. At gamma = 0 the input is returned
// through a branch that performs no arithmetic on it, making the identity
// bit-exact.
template <typename Scalar>
MatX<Scalar> gated_self_attention(const MatX<Scalar>& x,
                                  const MatX<Scalar>& conditions,
                                  const AttentionParams<Scalar>& attn,
                                  Scalar gate_gamma) {
  if (gate_gamma == Scalar(0)) {
    return x;
  }
  return gated_self_attention_cached<Scalar>(x, conditions, attn, gate_gamma,
                                             nullptr);
}

// W + alpha * A * B^T. At alpha = 0 the frozen weights are returned
// without touching the low-rank factors.
template <typename Scalar>
MatX<Scalar> lora_merge(const MatX<Scalar>& w, const MatX<Scalar>& a,
                        const MatX<Scalar>& b, Scalar alpha) {
  if (a.rows() != w.rows() || b.rows() != w.cols() || a.cols() != b.cols()) {
    throw ValidationError(
        "LoRA shape mismatch: W " + std::to_string(w.rows()) + "x" +
        std::to_string(w.cols()) + ", A " + std::to_string(a.rows()) + "x" +
        std::to_string(a.cols()) + ", B " + std::to_string(b.rows()) + "x" +
        std::to_string(b.cols()));
  }
  if (alpha == Scalar(0)) {
    return w;
  }
  return w + alpha * (a * b.transpose());
}

// x * (W + alpha A B^T); the alpha = 0 path multiplies by the frozen
// weights directly so the output is bit-identical to the base map.
template <typename Scalar>
MatX<Scalar> lora_apply(const MatX<Scalar>& x, const LoraLinear<Scalar>& lin) {
  if (x.cols() != lin.weight.rows()) {
    throw ValidationError("LoRA input width does not match weight rows");
  }
  if (lin.lora.alpha == Scalar(0)) {
    return x * lin.weight;
  }
  return x * lora_merge<Scalar>(lin.weight, lin.lora.a, lin.lora.b,
                                lin.lora.alpha);
}

// Fresh injector: attention weights copied verbatim from the base block's
// 2D spatial attention, gate at zero (transparent), pose encoder seeded
// small-random. The copy + zero gate give the identity-at-initialization
// property.
template <typename Scalar>
InjectorParams<Scalar> init_injector(const AttentionParams<Scalar>& base_attn,
                                     const InjectorDims& dims,
                                     std::uint64_t seed) {
  InjectorParams<Scalar> params;
  params.dims = dims;
  params.attn = base_attn;
  params.gate_gamma = Scalar(0);
  SeededRng rng(seed);
  params.pose.weight.resize(12, dims.d_model);
  const double scale = 1.0 / std::sqrt(12.0);
  for (int r = 0; r < 12; ++r) {
    for (int c = 0; c < dims.d_model; ++c) {
      params.pose.weight(r, c) = static_cast<Scalar>(rng.normal() * scale);
    }
  }
  params.pose.bias = VecX<Scalar>::Zero(dims.d_model);
  return params;
}

}  // namespace trajkit

#endif  // TRAJKIT_INJECTOR_HPP_
