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

#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "test_support.hpp"
#include "trajkit/error.hpp"
#include "trajkit/injector.hpp"

namespace trajkit {
namespace {

MatX<double> random_matrix(SeededRng& rng, int rows, int cols,
                           double scale = 0.5) {
  MatX<double> m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      m(r, c) = rng.normal() * scale;
    }
  }
  return m;
}

AttentionParams<double> random_attention(SeededRng& rng, int d) {
  return {random_matrix(rng, d, d), random_matrix(rng, d, d),
          random_matrix(rng, d, d), random_matrix(rng, d, d)};
}

// Plain reference implementation of the gated attention, written against
// the documented math rather than the library's code path: stack [x; C],
// project, scaled row-softmax over the latent-row queries, mix, gate.
MatX<double> reference_gated_attention(const MatX<double>& x,
                                       const MatX<double>& conditions,
                                       const AttentionParams<double>& attn,
                                       double gamma) {
  const Eigen::Index m = x.rows();
  const Eigen::Index d = x.cols();
  MatX<double> t(m + conditions.rows(), d);
  t.topRows(m) = x;
  if (conditions.rows() > 0) {
    t.bottomRows(conditions.rows()) = conditions;
  }
  const MatX<double> q = x * attn.wq;
  const MatX<double> k = t * attn.wk;
  const MatX<double> v = t * attn.wv;
  MatX<double> scores = q * k.transpose() / std::sqrt(double(d));
  MatX<double> prob(scores.rows(), scores.cols());
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    const double row_max = scores.row(i).maxCoeff();
    Eigen::ArrayXd e = (scores.row(i).array() - row_max).exp();
    prob.row(i) = (e / e.sum()).matrix();
  }
  return x + std::tanh(gamma) * (prob * v * attn.wo);
}

PoseSequence<double> simple_sequence(SeededRng& rng, int frames) {
  PoseSequence<double> seq;
  for (int f = 0; f < frames; ++f) {
    seq.poses.push_back(testing::random_pose(rng, 1.0));
  }
  return seq;
}

TEST_SUITE("injector") {

TEST_CASE("zero gate returns the latent tokens bit-exactly") {
  SeededRng rng(101);
  const InjectorDims dims;
  for (int i = 0; i < 25; ++i) {
    const MatX<double> x = random_matrix(rng, 6, dims.d_model);
    const MatX<double> conditions = random_matrix(rng, 10, dims.d_model);
    const AttentionParams<double> attn = random_attention(rng, dims.d_model);
    const MatX<double> out = gated_self_attention(x, conditions, attn, 0.0);
    CHECK(testing::max_abs_diff(out, x) == 0.0);
  }
}

TEST_CASE("cached full path agrees with the shortcut at the gate limit") {
  SeededRng rng(102);
  const InjectorDims dims;
  const MatX<double> x = random_matrix(rng, 4, dims.d_model);
  const MatX<double> conditions = random_matrix(rng, 6, dims.d_model);
  const AttentionParams<double> attn = random_attention(rng, dims.d_model);
  GatedAttentionCache<double> cache;
  const MatX<double> full =
      gated_self_attention_cached(x, conditions, attn, 0.0, &cache);
  CHECK(testing::max_abs_diff(full, x) < 1e-15);
  CHECK(cache.gate == 0.0);  // tanh(0) exactly
}

TEST_CASE("matches an independently written reference implementation") {
  SeededRng rng(103);
  const InjectorDims dims;
  for (const double gamma : {0.0, 0.2, -0.7, 1.5}) {
    const MatX<double> x = random_matrix(rng, 5, dims.d_model);
    const MatX<double> conditions = random_matrix(rng, 12, dims.d_model);
    const AttentionParams<double> attn = random_attention(rng, dims.d_model);
    GatedAttentionCache<double> cache;
    const MatX<double> out =
        gated_self_attention_cached(x, conditions, attn, gamma, &cache);
    const MatX<double> oracle =
        reference_gated_attention(x, conditions, attn, gamma);
    CHECK(testing::max_abs_diff(out, oracle) < 1e-12);
  }
}

TEST_CASE("attention rows are a probability distribution") {
  SeededRng rng(104);
  const InjectorDims dims;
  const MatX<double> x = random_matrix(rng, 5, dims.d_model);
  const MatX<double> conditions = random_matrix(rng, 9, dims.d_model);
  const AttentionParams<double> attn = random_attention(rng, dims.d_model);
  GatedAttentionCache<double> cache;
  gated_self_attention_cached(x, conditions, attn, 0.4, &cache);
  REQUIRE(cache.prob.rows() == 5);
  REQUIRE(cache.prob.cols() == 14);
  for (Eigen::Index i = 0; i < cache.prob.rows(); ++i) {
    CHECK(cache.prob.row(i).minCoeff() >= 0.0);
    CHECK(cache.prob.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("injection delta is linear in the gate activation") {
  SeededRng rng(105);
  const InjectorDims dims;
  const MatX<double> x = random_matrix(rng, 4, dims.d_model);
  const MatX<double> conditions = random_matrix(rng, 8, dims.d_model);
  const AttentionParams<double> attn = random_attention(rng, dims.d_model);
  const MatX<double> delta_a =
      (gated_self_attention(x, conditions, attn, 0.3) - x) / std::tanh(0.3);
  const MatX<double> delta_b =
      (gated_self_attention(x, conditions, attn, 1.1) - x) / std::tanh(1.1);
  CHECK(testing::max_abs_diff(delta_a, delta_b) < 1e-12);
}

TEST_CASE("empty conditions reduce to plain self attention") {
  SeededRng rng(106);
  const InjectorDims dims;
  const MatX<double> x = random_matrix(rng, 6, dims.d_model);
  const AttentionParams<double> attn = random_attention(rng, dims.d_model);
  const MatX<double> out =
      gated_self_attention(x, MatX<double>(), attn, 0.8);
  const MatX<double> oracle =
      reference_gated_attention(x, MatX<double>(0, dims.d_model), attn, 0.8);
  CHECK(testing::max_abs_diff(out, oracle) < 1e-12);
}

TEST_CASE("non-finite inputs raise a numeric error") {
  SeededRng rng(107);
  const InjectorDims dims;
  MatX<double> x = random_matrix(rng, 3, dims.d_model);
  const MatX<double> conditions = random_matrix(rng, 5, dims.d_model);
  const AttentionParams<double> attn = random_attention(rng, dims.d_model);
  x(1, 2) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(gated_self_attention(x, conditions, attn, 0.5),
                  NumericError);
}

TEST_CASE("token embeddings are deterministic unit vectors") {
  const InjectorDims dims;
  const VecX<double> a = embed_token<double>("fox", dims.d_model);
  const VecX<double> b = embed_token<double>("fox", dims.d_model);
  const VecX<double> c = embed_token<double>("dog", dims.d_model);
  CHECK((a - b).norm() == 0.0);
  CHECK((a - c).norm() > 0.1);
  CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("entity encoding pads each prompt to the token budget") {
  const InjectorDims dims;
  const EntityTokens<double> tokens =
      encode_entities<double>({"a red fox", "dog"}, dims);
  CHECK(tokens.entity_count == 2);
  REQUIRE(tokens.token_counts.size() == 2);
  CHECK(tokens.token_counts[0] == 3);
  CHECK(tokens.token_counts[1] == 1);
  REQUIRE(tokens.embeddings.rows() == 2 * dims.max_tokens);
  // Rows past each prompt's length stay zero.
  for (int l = 3; l < dims.max_tokens; ++l) {
    CHECK(tokens.embeddings.row(l).norm() == 0.0);
  }
  CHECK(tokens.embeddings.row(0).norm() == doctest::Approx(1.0));
  CHECK_THROWS_AS(
      encode_entities<double>({"a", "b", "c", "d"}, dims),
      ValidationError);
}

TEST_CASE("frame downsampling keeps every k-th index from zero") {
  CHECK(frame_indices(5, 4) == std::vector<int>{0, 4});
  CHECK(frame_indices(9, 4) == std::vector<int>{0, 4, 8});
  CHECK(frame_indices(10, 4) == std::vector<int>{0, 4, 8});
  CHECK(frame_indices(1, 4) == std::vector<int>{0});
  CHECK(frame_indices(3, 1) == std::vector<int>{0, 1, 2});
  CHECK_THROWS_AS(frame_indices(0, 4), ValidationError);
  CHECK_THROWS_AS(frame_indices(5, 0), ValidationError);
}

TEST_CASE("pose encoding is the documented affine map of the flat pose") {
  SeededRng rng(108);
  InjectorDims dims;
  dims.d_model = 12;
  PoseEncoderParams<double> params;
  params.weight = MatX<double>::Identity(12, 12);
  params.bias = VecX<double>::Zero(12);
  const PoseSequence<double> seq = simple_sequence(rng, 5);
  const MatX<double> codes = encode_poses(seq, params, dims);
  REQUIRE(codes.rows() == 2);  // frames 0 and 4
  const Eigen::Matrix<double, 1, 12> flat0 = flatten_pose(seq.poses[0]);
  const Eigen::Matrix<double, 1, 12> flat4 = flatten_pose(seq.poses[4]);
  CHECK((codes.row(0) - flat0).cwiseAbs().maxCoeff() == 0.0);
  CHECK((codes.row(1) - flat4).cwiseAbs().maxCoeff() == 0.0);

  params.bias = VecX<double>::Ones(12);
  const MatX<double> shifted = encode_poses(seq, params, dims);
  CHECK((shifted.row(0) - flat0).cwiseAbs().maxCoeff() ==
        doctest::Approx(1.0));
}

TEST_CASE("fused slabs add the pose code to every slot of its entity") {
  SeededRng rng(109);
  const InjectorDims dims;
  const EntityTokens<double> tokens =
      encode_entities<double>({"a red fox", "a tall man"}, dims);
  PoseEncoderParams<double> params;
  params.weight = random_matrix(rng, 12, dims.d_model);
  params.bias = random_matrix(rng, dims.d_model, 1).col(0);
  std::vector<MatX<double>> codes;
  codes.push_back(encode_poses(simple_sequence(rng, 5), params, dims));
  codes.push_back(encode_poses(simple_sequence(rng, 5), params, dims));

  const FusedConditions<double> fused =
      fuse_entity_pose(tokens, codes, dims);
  REQUIRE(fused.frames.size() == 2);
  CHECK(fused.slab_rows == 2 * dims.max_tokens);
  for (int f = 0; f < 2; ++f) {
    for (int n = 0; n < 2; ++n) {
      for (int l = 0; l < dims.max_tokens; ++l) {
        const Eigen::Index row = n * dims.max_tokens + l;
        const MatX<double> expected =
            tokens.embeddings.row(row) + codes[n].row(f);
        CHECK((fused.frames[f].row(row) - expected).cwiseAbs().maxCoeff() ==
              0.0);
      }
    }
  }
  // Padded slots carry the pure pose code.
  const Eigen::Index padded = dims.max_tokens - 1;
  CHECK((fused.frames[0].row(padded) - codes[0].row(0))
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("fusing zero entities yields an empty condition set") {
  const InjectorDims dims;
  const EntityTokens<double> tokens = encode_entities<double>({}, dims);
  const FusedConditions<double> fused =
      fuse_entity_pose(tokens, {}, dims);
  CHECK(fused.entity_count == 0);
  CHECK(fused.slab_rows == 0);
  CHECK(fused.frames.empty());
}

TEST_CASE("lora merge at alpha zero is the frozen weight, bit for bit") {
  SeededRng rng(110);
  const MatX<double> w = random_matrix(rng, 8, 8);
  const MatX<double> a = random_matrix(rng, 8, 2);
  const MatX<double> b = random_matrix(rng, 8, 2);
  const MatX<double> merged = lora_merge(w, a, b, 0.0);
  CHECK(testing::max_abs_diff(merged, w) == 0.0);
}

TEST_CASE("lora output is affine in alpha") {
  SeededRng rng(111);
  LoraLinear<double> lin;
  lin.weight = random_matrix(rng, 8, 6);
  lin.lora.a = random_matrix(rng, 8, 2);
  lin.lora.b = random_matrix(rng, 6, 2);
  const MatX<double> x = random_matrix(rng, 4, 8);

  const auto at_alpha = [&](double alpha) {
    LoraLinear<double> copy = lin;
    copy.lora.alpha = alpha;
    return lora_apply(x, copy);
  };
  const MatX<double> y0 = at_alpha(0.0);
  const MatX<double> y1 = at_alpha(0.4);
  const MatX<double> y2 = at_alpha(0.8);
  // Equal alpha steps must give equal output steps.
  CHECK(testing::max_abs_diff(y2 - y1, y1 - y0) < 1e-10);
  // And alpha = 0 passes through the frozen weight alone.
  CHECK(testing::max_abs_diff(y0, x * lin.weight) == 0.0);
}

TEST_CASE("initialized injector reuses the base attention with zero gate") {
  SeededRng rng(112);
  const InjectorDims dims;
  const AttentionParams<double> base = random_attention(rng, dims.d_model);
  const InjectorParams<double> params = init_injector(base, dims, 99);
  CHECK(params.gate_gamma == 0.0);
  CHECK(testing::max_abs_diff(params.attn.wq, base.wq) == 0.0);
  CHECK(testing::max_abs_diff(params.attn.wo, base.wo) == 0.0);
  CHECK(params.pose.weight.rows() == 12);
  CHECK(params.pose.weight.cols() == dims.d_model);
  // Same seed, same parameters.
  const InjectorParams<double> again = init_injector(base, dims, 99);
  CHECK(testing::max_abs_diff(params.pose.weight, again.pose.weight) == 0.0);
}

}  // TEST_SUITE

}  // namespace
}  // namespace trajkit
