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

#ifndef TRAJKIT_DIT_BLOCK_HPP_
#define TRAJKIT_DIT_BLOCK_HPP_

#include <cmath>
#include <vector>

#include "trajkit/injector.hpp"

namespace trajkit {

// Latent video tokens: one (M x D) matrix per kept frame.
template <typename Scalar>
using LatentVideo = std::vector<MatX<Scalar>>;

enum class DitMode {
  no_injector,
  with_injector_after_2d,
  with_injector_after_3d,
};

template <typename Scalar>
struct DitBlockParams {
  VecX<Scalar> rms_gain_1, rms_gain_2, rms_gain_3;  // per-sublayer norms
  AttentionParams<Scalar> attn2d;  // per-frame spatial attention
  AttentionParams<Scalar> attn3d;  // joint attention over all frames
  MatX<Scalar> ffn_in;             // D x hidden
  LoraLinear<Scalar> ffn_out;      // hidden x D, LoRA-wrapped
  InjectorParams<Scalar> injector;
};

// Root-mean-square normalization per token row with a learned gain.
template <typename Scalar>
MatX<Scalar> rms_norm(const MatX<Scalar>& x, const VecX<Scalar>& gain,
                      Scalar eps = Scalar(1e-6)) {
  if (gain.size() != x.cols()) {
    throw ValidationError("RMS norm gain width does not match tokens");
  }
  MatX<Scalar> out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const Scalar ms = x.row(i).squaredNorm() / static_cast<Scalar>(x.cols());
    out.row(i) =
        (x.row(i) / std::sqrt(ms + eps)).cwiseProduct(gain.transpose());
  }
  return out;
}

// Timestep-to-scale map multiplying the normalized activations; smooth,
// deterministic, and 1 + 0 at t = 0.
template <typename Scalar>
Scalar time_scale(Scalar t) {
  return Scalar(1) + Scalar(0.5) * std::tanh(t / Scalar(500));
}

// Plain single-head self-attention over one token stack (residual is the
// caller's job).
template <typename Scalar>
MatX<Scalar> self_attention(const MatX<Scalar>& x,
                            const AttentionParams<Scalar>& attn) {
  // Reuses the gated-attention math with no condition rows and a fully
  // open gate; the returned delta is the pure attention output.
  GatedAttentionCache<Scalar> cache;
  gated_self_attention_cached<Scalar>(x, MatX<Scalar>(0, x.cols()), attn,
                                      Scalar(0), &cache);
  return cache.out;
}

// GELU via the error function.
template <typename Scalar>
MatX<Scalar> gelu(const MatX<Scalar>& x) {
  MatX<Scalar> out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const Scalar v = x(i);
    out(i) = Scalar(0.5) * v *
             (Scalar(1) + std::erf(v / std::sqrt(Scalar(2))));
  }
  return out;
}

// One pre-norm transformer block at toy scale: timestep-scaled RMS norm
// into per-frame 2D attention, optional injector, joint 3D attention over
// all frames' tokens, optional injector, then a LoRA-wrapped feed-forward.
// Every sublayer is residual. `conditions` must hold one slab per frame
// when an injector mode is active and conditions exist.
template <typename Scalar>
LatentVideo<Scalar> toy_dit_block(const LatentVideo<Scalar>& latent,
                                  const FusedConditions<Scalar>& conditions,
                                  Scalar timestep,
                                  const DitBlockParams<Scalar>& params,
                                  DitMode mode) {
  if (latent.empty()) {
    throw ValidationError("latent video must contain at least one frame");
  }
  const Eigen::Index d = latent.front().cols();
  const Eigen::Index m = latent.front().rows();
  for (const MatX<Scalar>& frame : latent) {
    if (frame.rows() != m || frame.cols() != d) {
      throw ValidationError("latent frames must share one token shape");
    }
  }
  const bool inject = mode != DitMode::no_injector;
  if (inject && !conditions.frames.empty() &&
      conditions.frames.size() != latent.size()) {
    throw ValidationError(
        "condition slab count does not match latent frame count");
  }
  const Scalar scale = time_scale(timestep);
  const MatX<Scalar> empty_slab(0, d);
  const auto slab_for = [&](std::size_t f) -> const MatX<Scalar>& {
    return conditions.frames.empty() ? empty_slab : conditions.frames[f];
  };

  LatentVideo<Scalar> h = latent;

  for (std::size_t f = 0; f < h.size(); ++f) {
    h[f] = h[f] + self_attention<Scalar>(
                      rms_norm<Scalar>(h[f], params.rms_gain_1) * scale,
                      params.attn2d);
  }
  if (mode == DitMode::with_injector_after_2d) {
    for (std::size_t f = 0; f < h.size(); ++f) {
      h[f] = gated_self_attention<Scalar>(h[f], slab_for(f),
                                          params.injector.attn,
                                          params.injector.gate_gamma);
    }
  }

  // 3D attention: all frames' tokens as one stack.
  {
    MatX<Scalar> all(static_cast<Eigen::Index>(h.size()) * m, d);
    for (std::size_t f = 0; f < h.size(); ++f) {
      all.middleRows(static_cast<Eigen::Index>(f) * m, m) = h[f];
    }
    const MatX<Scalar> delta = self_attention<Scalar>(
        rms_norm<Scalar>(all, params.rms_gain_2) * scale, params.attn3d);
    for (std::size_t f = 0; f < h.size(); ++f) {
      h[f] = h[f] + delta.middleRows(static_cast<Eigen::Index>(f) * m, m);
    }
  }
  if (mode == DitMode::with_injector_after_3d) {
    for (std::size_t f = 0; f < h.size(); ++f) {
      h[f] = gated_self_attention<Scalar>(h[f], slab_for(f),
                                          params.injector.attn,
                                          params.injector.gate_gamma);
    }
  }

  for (std::size_t f = 0; f < h.size(); ++f) {
    const MatX<Scalar> normed =
        rms_norm<Scalar>(h[f], params.rms_gain_3) * scale;
    h[f] = h[f] + lora_apply<Scalar>(gelu<Scalar>(normed * params.ffn_in),
                                     params.ffn_out);
    detail::check_finite(h[f], "DiT block output");
  }
  return h;
}

// Seeded toy parameters: small-random attention and FFN weights, unit
// gains, injector initialized from the 2D attention with the gate at zero.
template <typename Scalar>
DitBlockParams<Scalar> init_dit_block(const InjectorDims& dims, int hidden,
                                      std::uint64_t seed) {
  SeededRng rng(seed);
  const int d = dims.d_model;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  const auto random_matrix = [&](int rows, int cols) {
    MatX<Scalar> m(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        m(r, c) = static_cast<Scalar>(rng.normal() * scale);
      }
    }
    return m;
  };

  DitBlockParams<Scalar> params;
  params.rms_gain_1 = VecX<Scalar>::Ones(d);
  params.rms_gain_2 = VecX<Scalar>::Ones(d);
  params.rms_gain_3 = VecX<Scalar>::Ones(d);
  params.attn2d = {random_matrix(d, d), random_matrix(d, d),
                   random_matrix(d, d), random_matrix(d, d)};
  params.attn3d = {random_matrix(d, d), random_matrix(d, d),
                   random_matrix(d, d), random_matrix(d, d)};
  params.ffn_in = random_matrix(d, hidden);
  params.ffn_out.weight = random_matrix(hidden, d);
  params.ffn_out.lora.a = random_matrix(hidden, 2);
  params.ffn_out.lora.b = random_matrix(d, 2);
  params.ffn_out.lora.alpha = Scalar(0);
  params.injector = init_injector<Scalar>(params.attn2d, dims, seed ^ 0x9e3779b97f4a7c15ULL);
  return params;
}

}  // namespace trajkit

#endif  // TRAJKIT_DIT_BLOCK_HPP_
