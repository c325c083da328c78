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

#ifndef TRAJKIT_GRAD_CHECK_HPP_
#define TRAJKIT_GRAD_CHECK_HPP_

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "trajkit/dit_block.hpp"
#include "trajkit/injector.hpp"

namespace trajkit {

// Fixed toy batch for gradient verification. The loss runs the full
// injector path per kept frame: pose encoder -> entity-wise fusion ->
// gated self-attention on the latent tokens -> LoRA-wrapped linear head,
// then 0.5 * sum of squared errors against fixed targets.
template <typename Scalar>
struct ToyBatch {
  std::vector<std::string> prompts;
  std::vector<PoseSequence<Scalar>> pose_seqs;
  LatentVideo<Scalar> x;        // per kept frame, M x D
  LatentVideo<Scalar> targets;  // per kept frame, M x out-width
};

// Gradients for every trainable group in the toy setup.
template <typename Scalar>
struct InjectorGrads {
  MatX<Scalar> pose_weight;
  VecX<Scalar> pose_bias;
  MatX<Scalar> wq, wk, wv, wo;
  Scalar gate_gamma = Scalar(0);
  MatX<Scalar> head_weight;
  MatX<Scalar> lora_a, lora_b;
};

namespace detail {

template <typename Scalar>
void validate_batch(const ToyBatch<Scalar>& batch,
                    const InjectorParams<Scalar>& params,
                    const LoraLinear<Scalar>& head) {
  if (batch.pose_seqs.empty()) {
    throw ValidationError("toy batch needs at least one pose sequence");
  }
  const std::vector<int> kept = frame_indices(
      batch.pose_seqs.front().frame_count(), params.dims.downsample);
  if (batch.x.size() != kept.size() || batch.targets.size() != kept.size()) {
    throw ValidationError("latent/target frame count must equal the kept "
                          "frame count of the pose sequences");
  }
  for (std::size_t f = 0; f < batch.x.size(); ++f) {
    if (batch.x[f].cols() != params.dims.d_model ||
        batch.x[f].rows() != batch.x.front().rows() ||
        batch.targets[f].rows() != batch.x[f].rows() ||
        batch.targets[f].cols() != head.weight.cols()) {
      throw ValidationError("toy batch frame shapes are inconsistent");
    }
  }
}

}  // namespace detail

// Loss of the toy objective; pure in (batch, params, head).
template <typename Scalar>
Scalar forward_loss(const ToyBatch<Scalar>& batch,
                    const InjectorParams<Scalar>& params,
                    const LoraLinear<Scalar>& head) {
  detail::validate_batch(batch, params, head);
  const EntityTokens<Scalar> tokens =
      encode_entities<Scalar>(batch.prompts, params.dims);
  std::vector<MatX<Scalar>> codes;
  for (const PoseSequence<Scalar>& seq : batch.pose_seqs) {
    codes.push_back(encode_poses<Scalar>(seq, params.pose, params.dims));
  }
  const FusedConditions<Scalar> fused =
      fuse_entity_pose<Scalar>(tokens, codes, params.dims);
  const MatX<Scalar> w_eff = lora_merge<Scalar>(
      head.weight, head.lora.a, head.lora.b, head.lora.alpha);

  Scalar loss = Scalar(0);
  for (std::size_t f = 0; f < batch.x.size(); ++f) {
    // The cached (full-path) attention keeps the loss smooth in gamma even
    // at gamma = 0, where the inference shortcut would hide the gate.
    const MatX<Scalar> h = gated_self_attention_cached<Scalar>(
        batch.x[f], fused.frames[f], params.attn, params.gate_gamma, nullptr);
    const MatX<Scalar> y = h * w_eff;
    loss += Scalar(0.5) * (y - batch.targets[f]).squaredNorm();
  }
  return loss;
}

// Loss plus hand-derived gradients for every group. The backward pass
// mirrors the forward chain exactly: squared-error head, LoRA
// decomposition, output projection, value mixing, softmax Jacobian,
// scaled dot product, projections, fusion broadcast, pose encoder.
template <typename Scalar>
Scalar forward_backward(const ToyBatch<Scalar>& batch,
                        const InjectorParams<Scalar>& params,
                        const LoraLinear<Scalar>& head,
                        InjectorGrads<Scalar>* grads) {
  detail::validate_batch(batch, params, head);
  const InjectorDims& dims = params.dims;
  const int d = dims.d_model;
  const int n_entities = static_cast<int>(batch.pose_seqs.size());

  const EntityTokens<Scalar> tokens =
      encode_entities<Scalar>(batch.prompts, dims);
  std::vector<MatX<Scalar>> codes;
  for (const PoseSequence<Scalar>& seq : batch.pose_seqs) {
    codes.push_back(encode_poses<Scalar>(seq, params.pose, dims));
  }
  const FusedConditions<Scalar> fused =
      fuse_entity_pose<Scalar>(tokens, codes, dims);
  const MatX<Scalar> w_eff = lora_merge<Scalar>(
      head.weight, head.lora.a, head.lora.b, head.lora.alpha);

  InjectorGrads<Scalar> g;
  g.pose_weight = MatX<Scalar>::Zero(12, d);
  g.pose_bias = VecX<Scalar>::Zero(d);
  g.wq = MatX<Scalar>::Zero(d, d);
  g.wk = MatX<Scalar>::Zero(d, d);
  g.wv = MatX<Scalar>::Zero(d, d);
  g.wo = MatX<Scalar>::Zero(d, d);
  g.gate_gamma = Scalar(0);
  MatX<Scalar> d_w_eff =
      MatX<Scalar>::Zero(head.weight.rows(), head.weight.cols());
  // Per-entity pose-code gradients, accumulated over frames then pushed
  // through the (shared) pose encoder once.
  std::vector<MatX<Scalar>> d_codes(
      static_cast<std::size_t>(n_entities),
      MatX<Scalar>::Zero(codes.empty() ? 0 : codes.front().rows(), d));

  const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(d));
  Scalar loss = Scalar(0);

  for (std::size_t f = 0; f < batch.x.size(); ++f) {
    GatedAttentionCache<Scalar> cache;
    const MatX<Scalar> h = gated_self_attention_cached<Scalar>(
        batch.x[f], fused.frames[f], params.attn, params.gate_gamma, &cache);
    const MatX<Scalar> y = h * w_eff;
    const MatX<Scalar> dy = y - batch.targets[f];
    loss += Scalar(0.5) * dy.squaredNorm();

    d_w_eff += h.transpose() * dy;
    const MatX<Scalar> dh = dy * w_eff.transpose();

    // h = x + tanh(gamma) * out.
    const MatX<Scalar> dout = cache.gate * dh;
    g.gate_gamma += (Scalar(1) - cache.gate * cache.gate) *
                    cache.out.cwiseProduct(dh).sum();

    // out = mixed * wo.
    g.wo += cache.mixed.transpose() * dout;
    const MatX<Scalar> dmixed = dout * params.attn.wo.transpose();

    // mixed = prob * v.
    const MatX<Scalar> dprob = dmixed * cache.v.transpose();
    const MatX<Scalar> dv = cache.prob.transpose() * dmixed;

    // Row-wise softmax Jacobian: ds = p .* (dp - <dp, p>).
    MatX<Scalar> dscores(dprob.rows(), dprob.cols());
    for (Eigen::Index i = 0; i < dprob.rows(); ++i) {
      const Scalar dot = dprob.row(i).dot(cache.prob.row(i));
      dscores.row(i) = cache.prob.row(i).cwiseProduct(
          (dprob.row(i).array() - dot).matrix());
    }

    // scores = (q * k^T) * scale; q comes from the latent rows only.
    const MatX<Scalar> dq = dscores * cache.k * scale;
    const MatX<Scalar> dk = dscores.transpose() * cache.q * scale;

    g.wq += batch.x[f].transpose() * dq;
    g.wk += cache.t.transpose() * dk;
    g.wv += cache.t.transpose() * dv;

    // Back through the stack: condition rows feed the fusion; latent rows
    // are inputs and their gradients stop here.
    const MatX<Scalar> dt =
        dk * params.attn.wk.transpose() + dv * params.attn.wv.transpose();
    const Eigen::Index m = batch.x[f].rows();
    for (int n = 0; n < n_entities; ++n) {
      for (int l = 0; l < dims.max_tokens; ++l) {
        d_codes[static_cast<std::size_t>(n)].row(
            static_cast<Eigen::Index>(f)) +=
            dt.row(m + n * dims.max_tokens + l);
      }
    }
  }

  // Pose encoder: codes_n = flat_n * W + 1 b^T over kept frames.
  for (int n = 0; n < n_entities; ++n) {
    const std::vector<int> kept = frame_indices(
        batch.pose_seqs[static_cast<std::size_t>(n)].frame_count(),
        dims.downsample);
    MatX<Scalar> flat(static_cast<Eigen::Index>(kept.size()), 12);
    for (std::size_t i = 0; i < kept.size(); ++i) {
      flat.row(static_cast<Eigen::Index>(i)) = flatten_pose<Scalar>(
          batch.pose_seqs[static_cast<std::size_t>(n)]
              .poses[static_cast<std::size_t>(kept[i])]);
    }
    g.pose_weight += flat.transpose() * d_codes[static_cast<std::size_t>(n)];
    g.pose_bias +=
        d_codes[static_cast<std::size_t>(n)].colwise().sum().transpose();
  }

  // W_eff = W + alpha A B^T.
  g.head_weight = d_w_eff;
  g.lora_a = head.lora.alpha * d_w_eff * head.lora.b;
  g.lora_b = head.lora.alpha * d_w_eff.transpose() * head.lora.a;

  if (grads != nullptr) {
    *grads = std::move(g);
  }
  return loss;
}

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::map<std::string, double> group_max;
};

namespace detail {

// Flat parameter order shared by pack, unpack, and the finite-difference
// loop: pose weight, pose bias, wq, wk, wv, wo, gamma, head W, LoRA A, B.
template <typename Scalar>
std::vector<std::pair<std::string, Eigen::Index>> param_layout(
    const InjectorParams<Scalar>& params, const LoraLinear<Scalar>& head) {
  return {
      {"pose_weight", params.pose.weight.size()},
      {"pose_bias", params.pose.bias.size()},
      {"attn_wq", params.attn.wq.size()},
      {"attn_wk", params.attn.wk.size()},
      {"attn_wv", params.attn.wv.size()},
      {"attn_wo", params.attn.wo.size()},
      {"gate_gamma", 1},
      {"head_weight", head.weight.size()},
      {"lora_a", head.lora.a.size()},
      {"lora_b", head.lora.b.size()},
  };
}

template <typename Scalar>
Eigen::VectorXd pack_params(const InjectorParams<Scalar>& params,
                            const LoraLinear<Scalar>& head) {
  std::vector<double> flat;
  const auto push = [&flat](const MatX<Scalar>& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      flat.push_back(static_cast<double>(m(i)));
    }
  };
  push(params.pose.weight);
  push(params.pose.bias);
  push(params.attn.wq);
  push(params.attn.wk);
  push(params.attn.wv);
  push(params.attn.wo);
  flat.push_back(static_cast<double>(params.gate_gamma));
  push(head.weight);
  push(head.lora.a);
  push(head.lora.b);
  return Eigen::Map<Eigen::VectorXd>(flat.data(),
                                     static_cast<Eigen::Index>(flat.size()));
}

template <typename Scalar>
void unpack_params(const Eigen::VectorXd& flat, InjectorParams<Scalar>* params,
                   LoraLinear<Scalar>* head) {
  Eigen::Index pos = 0;
  const auto pull = [&flat, &pos](MatX<Scalar>& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      m(i) = static_cast<Scalar>(flat(pos++));
    }
  };
  pull(params->pose.weight);
  VecX<Scalar>& bias = params->pose.bias;
  for (Eigen::Index i = 0; i < bias.size(); ++i) {
    bias(i) = static_cast<Scalar>(flat(pos++));
  }
  pull(params->attn.wq);
  pull(params->attn.wk);
  pull(params->attn.wv);
  pull(params->attn.wo);
  params->gate_gamma = static_cast<Scalar>(flat(pos++));
  pull(head->weight);
  pull(head->lora.a);
  pull(head->lora.b);
}

template <typename Scalar>
Eigen::VectorXd pack_grads(const InjectorGrads<Scalar>& grads) {
  std::vector<double> flat;
  const auto push = [&flat](const MatX<Scalar>& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      flat.push_back(static_cast<double>(m(i)));
    }
  };
  push(grads.pose_weight);
  push(grads.pose_bias);
  push(grads.wq);
  push(grads.wk);
  push(grads.wv);
  push(grads.wo);
  flat.push_back(static_cast<double>(grads.gate_gamma));
  push(grads.head_weight);
  push(grads.lora_a);
  push(grads.lora_b);
  return Eigen::Map<Eigen::VectorXd>(flat.data(),
                                     static_cast<Eigen::Index>(flat.size()));
}

template <typename From, typename To>
ToyBatch<To> cast_batch(const ToyBatch<From>& batch) {
  ToyBatch<To> out;
  out.prompts = batch.prompts;
  for (const PoseSequence<From>& seq : batch.pose_seqs) {
    PoseSequence<To> cast_seq;
    cast_seq.fps = static_cast<To>(seq.fps);
    for (const Pose6<From>& pose : seq.poses) {
      Pose6<To> p;
      p.rotation = pose.rotation.template cast<To>();
      p.translation = pose.translation.template cast<To>();
      cast_seq.poses.push_back(p);
    }
    out.pose_seqs.push_back(std::move(cast_seq));
  }
  for (const MatX<From>& m : batch.x) {
    out.x.push_back(m.template cast<To>());
  }
  for (const MatX<From>& m : batch.targets) {
    out.targets.push_back(m.template cast<To>());
  }
  return out;
}

template <typename From, typename To>
InjectorParams<To> cast_params(const InjectorParams<From>& params) {
  InjectorParams<To> out;
  out.dims = params.dims;
  out.pose.weight = params.pose.weight.template cast<To>();
  out.pose.bias = params.pose.bias.template cast<To>();
  out.attn.wq = params.attn.wq.template cast<To>();
  out.attn.wk = params.attn.wk.template cast<To>();
  out.attn.wv = params.attn.wv.template cast<To>();
  out.attn.wo = params.attn.wo.template cast<To>();
  out.gate_gamma = static_cast<To>(params.gate_gamma);
  return out;
}

template <typename From, typename To>
LoraLinear<To> cast_head(const LoraLinear<From>& head) {
  LoraLinear<To> out;
  out.weight = head.weight.template cast<To>();
  out.lora.a = head.lora.a.template cast<To>();
  out.lora.b = head.lora.b.template cast<To>();
  out.lora.alpha = static_cast<To>(head.lora.alpha);
  return out;
}

}  // namespace detail

// Analytic gradients (in Scalar) against double-precision central finite
// differences with step 1e-5. Relative error uses the larger of the two
// magnitudes with a 1e-6 floor so near-zero gradients do not blow up the
// ratio.
template <typename Scalar>
GradCheckReport grad_check(const ToyBatch<Scalar>& batch,
                           const InjectorParams<Scalar>& params,
                           const LoraLinear<Scalar>& head,
                           double step = 1e-5) {
  InjectorGrads<Scalar> grads;
  forward_backward<Scalar>(batch, params, head, &grads);
  const Eigen::VectorXd analytic = detail::pack_grads<Scalar>(grads);

  const ToyBatch<double> batch_d = detail::cast_batch<Scalar, double>(batch);
  InjectorParams<double> params_d =
      detail::cast_params<Scalar, double>(params);
  LoraLinear<double> head_d = detail::cast_head<Scalar, double>(head);
  const Eigen::VectorXd theta = detail::pack_params<double>(params_d, head_d);

  GradCheckReport report;
  const auto layout = detail::param_layout<double>(params_d, head_d);
  Eigen::Index index = 0;
  for (const auto& [group, count] : layout) {
    double group_max = 0.0;
    for (Eigen::Index i = 0; i < count; ++i, ++index) {
      Eigen::VectorXd perturbed = theta;
      perturbed(index) = theta(index) + step;
      detail::unpack_params<double>(perturbed, &params_d, &head_d);
      const double loss_plus = forward_loss<double>(batch_d, params_d, head_d);
      perturbed(index) = theta(index) - step;
      detail::unpack_params<double>(perturbed, &params_d, &head_d);
      const double loss_minus =
          forward_loss<double>(batch_d, params_d, head_d);
      const double fd = (loss_plus - loss_minus) / (2.0 * step);
      const double a = analytic(index);
      const double denom = std::max({std::abs(a), std::abs(fd), 1e-6});
      const double rel = std::abs(a - fd) / denom;
      group_max = std::max(group_max, rel);
    }
    report.group_max[group] = group_max;
    report.max_rel_error = std::max(report.max_rel_error, group_max);
  }
  // Restore for the caller is unnecessary (copies), but leave params_d at
  // the unperturbed point for clarity.
  detail::unpack_params<double>(theta, &params_d, &head_d);
  return report;
}

// Standard toy instance: two entities, five source frames downsampled to
// two kept frames, four latent tokens of width 8, nonzero gate, LoRA at
// alpha = 0.4. Every trainable group participates in the loss.
template <typename Scalar>
struct GradCheckSetup {
  ToyBatch<Scalar> batch;
  InjectorParams<Scalar> params;
  LoraLinear<Scalar> head;
};

template <typename Scalar>
GradCheckSetup<Scalar> make_grad_check_setup(std::uint64_t seed) {
  const InjectorDims dims;
  SeededRng rng(seed);
  const auto random_matrix = [&rng](int rows, int cols, double s) {
    MatX<Scalar> m(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        m(r, c) = static_cast<Scalar>(rng.normal() * s);
      }
    }
    return m;
  };

  GradCheckSetup<Scalar> setup;
  setup.batch.prompts = {"a red fox", "a tall man walking"};
  const int frames = dims.downsample + 1;  // two kept frames: 0 and 4
  for (int n = 0; n < 2; ++n) {
    PoseSequence<Scalar> seq;
    seq.fps = Scalar(20);
    for (int f = 0; f < frames; ++f) {
      Pose6<Scalar> pose;
      const Scalar yaw = static_cast<Scalar>(rng.uniform(-1.0, 1.0));
      const Scalar pitch = static_cast<Scalar>(rng.uniform(-0.5, 0.5));
      pose.rotation = (rot_z<Scalar>(yaw) * rot_y<Scalar>(pitch));
      pose.translation =
          Vec3<Scalar>(static_cast<Scalar>(rng.uniform(-2.0, 2.0)),
                       static_cast<Scalar>(rng.uniform(-2.0, 2.0)),
                       static_cast<Scalar>(rng.uniform(0.0, 1.0)));
      seq.poses.push_back(pose);
    }
    setup.batch.pose_seqs.push_back(std::move(seq));
  }

  const int m_tokens = 4;
  const int kept = 2;
  for (int f = 0; f < kept; ++f) {
    setup.batch.x.push_back(random_matrix(m_tokens, dims.d_model, 0.5));
    setup.batch.targets.push_back(random_matrix(m_tokens, dims.d_model, 0.5));
  }

  const double w_scale = 1.0 / std::sqrt(static_cast<double>(dims.d_model));
  setup.params.dims = dims;
  setup.params.pose.weight = random_matrix(12, dims.d_model, w_scale);
  setup.params.pose.bias =
      random_matrix(dims.d_model, 1, 0.1).col(0);
  setup.params.attn.wq = random_matrix(dims.d_model, dims.d_model, w_scale);
  setup.params.attn.wk = random_matrix(dims.d_model, dims.d_model, w_scale);
  setup.params.attn.wv = random_matrix(dims.d_model, dims.d_model, w_scale);
  setup.params.attn.wo = random_matrix(dims.d_model, dims.d_model, w_scale);
  setup.params.gate_gamma = Scalar(0.3);

  setup.head.weight = random_matrix(dims.d_model, dims.d_model, w_scale);
  setup.head.lora.a = random_matrix(dims.d_model, 2, 0.3);
  setup.head.lora.b = random_matrix(dims.d_model, 2, 0.3);
  setup.head.lora.alpha = Scalar(0.4);
  return setup;
}

}  // namespace trajkit

#endif  // TRAJKIT_GRAD_CHECK_HPP_
