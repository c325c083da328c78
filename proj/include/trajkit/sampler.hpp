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

#ifndef TRAJKIT_SAMPLER_HPP_
#define TRAJKIT_SAMPLER_HPP_

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trajkit/dit_block.hpp"
#include "trajkit/error.hpp"
#include "trajkit/pose.hpp"
#include "trajkit/rng.hpp"

namespace trajkit {

// Denoising schedule and guidance knobs. Steps are counted in respaced
// indices with step 1 the noisiest; the conditioned branch runs for the
// first `annealed_steps` of them.
struct ScheduleConfig {
  int train_steps = 1000;
  int steps = 50;            // respaced DDIM step count
  double guidance_w = 12.5;  // CFG strength
  int annealed_steps = 25;   // conditioned steps (T_c), in respaced indices
  double alpha_lora = 0.4;   // adaptor scalar handed to the denoiser
  double beta_start = 1e-4;
  double beta_end = 0.02;
  double eta = 0.0;          // 0 = deterministic DDIM, > 0 adds ancestral noise
};

// Per-step coefficients in sampling order (noisiest first), satisfying
// alpha^2 + sigma^2 = 1 at every step.
struct SamplerSchedule {
  ScheduleConfig config;
  std::vector<int> train_indices;  // visited training timesteps
  Eigen::VectorXd alphas;
  Eigen::VectorXd sigmas;
};

// Linear-beta variance-preserving schedule respaced uniformly: training
// index floor(j * T / steps) for j = 0..steps-1, visited in reverse.
inline SamplerSchedule make_schedule(const ScheduleConfig& config) {
  if (config.train_steps < 1) {
    throw RangeError("train_steps must be at least 1");
  }
  if (config.steps < 1 || config.steps > config.train_steps) {
    throw RangeError("steps must be in [1, train_steps], got " +
                     std::to_string(config.steps));
  }
  if (config.annealed_steps < 0 || config.annealed_steps > config.steps) {
    throw RangeError("annealed_steps must be in [0, steps], got " +
                     std::to_string(config.annealed_steps));
  }
  if (!(config.beta_start > 0.0) || !(config.beta_end < 1.0) ||
      config.beta_start > config.beta_end) {
    throw RangeError("beta range must satisfy 0 < beta_start <= beta_end < 1");
  }
  if (config.eta < 0.0) {
    throw RangeError("eta must be non-negative");
  }

  const int t = config.train_steps;
  Eigen::VectorXd alpha_bar(t);
  double running = 1.0;
  for (int i = 0; i < t; ++i) {
    const double beta =
        t == 1 ? config.beta_start
               : config.beta_start +
                     (config.beta_end - config.beta_start) * i / (t - 1);
    running *= 1.0 - beta;
    alpha_bar(i) = running;
  }

  SamplerSchedule schedule;
  schedule.config = config;
  schedule.alphas.resize(config.steps);
  schedule.sigmas.resize(config.steps);
  for (int j = 0; j < config.steps; ++j) {
    const int kept = static_cast<int>(
        (static_cast<long long>(config.steps - 1 - j) * t) / config.steps);
    schedule.train_indices.push_back(kept);
    schedule.alphas(j) = std::sqrt(alpha_bar(kept));
    schedule.sigmas(j) = std::sqrt(1.0 - alpha_bar(kept));
  }
  return schedule;
}

// Classifier-free guidance: (1 + w) * conditioned - w * negative.
inline Eigen::VectorXd cfg_epsilon(const Eigen::VectorXd& eps_cond,
                                   const Eigen::VectorXd& eps_uncond,
                                   double w) {
  if (eps_cond.size() != eps_uncond.size()) {
    throw ValidationError("CFG branches must have the same shape");
  }
  return (1.0 + w) * eps_cond - w * eps_uncond;
}

// One text-described entity bound to its own pose sequence; the unit of
// conditioning.
struct EntityTrajectoryPair {
  std::string prompt;
  PoseSequenced poses;
};

// How the negative CFG branch is produced during conditioned steps:
// the plain base model, or the conditioned model fed static (frame-0
// repeated) trajectories.
enum class NegativeMode { uncond, static_pose };

// Abstract denoiser: a conditioned contract taking entity-trajectory
// pairs and the adaptor scalar, and a base text-only contract. Both must
// return a tensor shaped like x.
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual Eigen::VectorXd eps_conditioned(
      const Eigen::VectorXd& x, const std::string& text,
      const std::vector<EntityTrajectoryPair>& pairs, double alpha_lora) = 0;
  virtual Eigen::VectorXd eps_base(const Eigen::VectorXd& x,
                                   const std::string& text) = 0;
};

struct SampleResult {
  Eigen::VectorXd latent;  // final denoised estimate
  int conditioned_steps = 0;
  int base_steps = 0;
};

// Frame-0 repeated copies of each pair's trajectory, used as the negative
// condition in static_pose mode.
inline std::vector<EntityTrajectoryPair> static_pairs_of(
    const std::vector<EntityTrajectoryPair>& pairs) {
  std::vector<EntityTrajectoryPair> out;
  for (const EntityTrajectoryPair& pair : pairs) {
    if (pair.poses.poses.empty()) {
      throw ValidationError("entity trajectory must contain at least one "
                            "frame");
    }
    EntityTrajectoryPair fixed = pair;
    for (auto& pose : fixed.poses.poses) {
      pose = pair.poses.poses.front();
    }
    out.push_back(std::move(fixed));
  }
  return out;
}

// Annealed conditional sampling with classifier-free guidance. The first
// min(annealed_steps, steps) steps guide with the pose-conditioned model
// (negative branch per `negative_mode`), the rest with the base model and
// an empty negative prompt. The deterministic update is
// x <- alpha_next * x0_hat + sigma_next * eps_tilde with
// x0_hat = (x - sigma * eps_tilde) / alpha; eta > 0 swaps part of the
// direction term for fresh seeded noise. Returns the final x0_hat.
inline SampleResult annealed_sample(
    Denoiser& denoiser, const SamplerSchedule& schedule,
    const std::string& text, const std::vector<EntityTrajectoryPair>& pairs,
    NegativeMode negative_mode, std::uint64_t seed, Eigen::Index latent_dim) {
  if (pairs.size() > 3) {
    throw ValidationError("at most 3 entity-trajectory pairs are supported, "
                          "got " + std::to_string(pairs.size()));
  }
  if (latent_dim < 1) {
    throw RangeError("latent dimension must be positive");
  }
  const ScheduleConfig& config = schedule.config;

  SeededRng rng(seed);
  Eigen::VectorXd x(latent_dim);
  for (Eigen::Index i = 0; i < latent_dim; ++i) {
    x(i) = rng.normal();
  }

  std::vector<EntityTrajectoryPair> negative_pairs;
  if (negative_mode == NegativeMode::static_pose) {
    negative_pairs = static_pairs_of(pairs);
  }

  SampleResult result;
  Eigen::VectorXd x0_hat;
  for (int step = 0; step < config.steps; ++step) {
    const double alpha_t = schedule.alphas(step);
    const double sigma_t = schedule.sigmas(step);

    Eigen::VectorXd eps_tilde;
    if (step < config.annealed_steps) {
      const Eigen::VectorXd positive =
          denoiser.eps_conditioned(x, text, pairs, config.alpha_lora);
      const Eigen::VectorXd negative =
          negative_mode == NegativeMode::static_pose
              ? denoiser.eps_conditioned(x, text, negative_pairs,
                                         config.alpha_lora)
              : denoiser.eps_base(x, "");
      eps_tilde = cfg_epsilon(positive, negative, config.guidance_w);
      ++result.conditioned_steps;
    } else {
      const Eigen::VectorXd positive = denoiser.eps_base(x, text);
      const Eigen::VectorXd negative = denoiser.eps_base(x, "");
      eps_tilde = cfg_epsilon(positive, negative, config.guidance_w);
      ++result.base_steps;
    }
    if (!eps_tilde.allFinite()) {
      throw NumericError("denoiser returned non-finite values at step " +
                         std::to_string(step + 1));
    }

    x0_hat = (x - sigma_t * eps_tilde) / alpha_t;
    if (step + 1 < config.steps) {
      const double alpha_next = schedule.alphas(step + 1);
      const double sigma_next = schedule.sigmas(step + 1);
      if (config.eta == 0.0) {
        x = alpha_next * x0_hat + sigma_next * eps_tilde;
      } else {
        const double variance_ratio =
            std::max(0.0, (sigma_next * sigma_next) / (sigma_t * sigma_t) *
                              (1.0 - (alpha_t * alpha_t) /
                                         (alpha_next * alpha_next)));
        const double sigma_hat =
            std::min(config.eta * std::sqrt(variance_ratio), sigma_next);
        const double direction =
            std::sqrt(std::max(0.0, sigma_next * sigma_next -
                                        sigma_hat * sigma_hat));
        Eigen::VectorXd noise(latent_dim);
        for (Eigen::Index i = 0; i < latent_dim; ++i) {
          noise(i) = rng.normal();
        }
        x = alpha_next * x0_hat + direction * eps_tilde + sigma_hat * noise;
      }
    }
  }
  result.latent = x0_hat;
  return result;
}

// Linear toy denoiser eps(x) = k * x with separate conditioned and base
// gains; the DDIM recursion stays closed-form, which the tests exploit.
class ToyLinearDenoiser : public Denoiser {
 public:
  ToyLinearDenoiser(double k_conditioned, double k_base)
      : k_conditioned_(k_conditioned), k_base_(k_base) {}

  Eigen::VectorXd eps_conditioned(const Eigen::VectorXd& x,
                                  const std::string&,
                                  const std::vector<EntityTrajectoryPair>&,
                                  double) override {
    ++conditioned_calls_;
    return k_conditioned_ * x;
  }
  Eigen::VectorXd eps_base(const Eigen::VectorXd& x,
                           const std::string&) override {
    ++base_calls_;
    return k_base_ * x;
  }

  int conditioned_calls() const { return conditioned_calls_; }
  int base_calls() const { return base_calls_; }

 private:
  double k_conditioned_;
  double k_base_;
  int conditioned_calls_ = 0;
  int base_calls_ = 0;
};

// Denoiser backed by one toy DiT block. The latent vector is reshaped to
// `frames` frames of `tokens` width-D rows; conditioned calls push the
// pairs through the injector encoders, base calls run the block without
// the injector. The caption itself is not embedded (the toy block has no
// cross-attention); conditioning enters through the pose pairs only.
class ToyDitDenoiser : public Denoiser {
 public:
  ToyDitDenoiser(DitBlockParams<double> params, InjectorDims dims, int frames,
                 int tokens)
      : params_(std::move(params)),
        dims_(dims),
        frames_(frames),
        tokens_(tokens) {
    if (frames_ < 1 || tokens_ < 1) {
      throw ValidationError("latent geometry must be positive");
    }
  }

  Eigen::Index latent_dim() const {
    return static_cast<Eigen::Index>(frames_) * tokens_ * dims_.d_model;
  }

  Eigen::VectorXd eps_conditioned(
      const Eigen::VectorXd& x, const std::string&,
      const std::vector<EntityTrajectoryPair>& pairs,
      double alpha_lora) override {
    std::vector<std::string> prompts;
    std::vector<MatX<double>> codes;
    for (const EntityTrajectoryPair& pair : pairs) {
      prompts.push_back(pair.prompt);
      codes.push_back(encode_poses<double>(pair.poses, params_.injector.pose,
                                           dims_));
    }
    const EntityTokens<double> tokens = encode_entities<double>(prompts, dims_);
    FusedConditions<double> fused =
        fuse_entity_pose<double>(tokens, codes, dims_);
    if (!fused.frames.empty() &&
        static_cast<int>(fused.frames.size()) != frames_) {
      throw ValidationError(
          "pair trajectories downsample to " +
          std::to_string(fused.frames.size()) + " frames, latent has " +
          std::to_string(frames_));
    }
    DitBlockParams<double> params = params_;
    params.ffn_out.lora.alpha = alpha_lora;
    return flatten(toy_dit_block<double>(unflatten(x), fused, 0.0, params,
                                         DitMode::with_injector_after_2d));
  }

  Eigen::VectorXd eps_base(const Eigen::VectorXd& x,
                           const std::string&) override {
    return flatten(toy_dit_block<double>(unflatten(x),
                                         FusedConditions<double>{}, 0.0,
                                         params_, DitMode::no_injector));
  }

 private:
  LatentVideo<double> unflatten(const Eigen::VectorXd& x) const {
    if (x.size() != latent_dim()) {
      throw ValidationError("latent size " + std::to_string(x.size()) +
                            " does not match geometry " +
                            std::to_string(latent_dim()));
    }
    LatentVideo<double> frames;
    Eigen::Index pos = 0;
    for (int f = 0; f < frames_; ++f) {
      MatX<double> frame(tokens_, dims_.d_model);
      for (int r = 0; r < tokens_; ++r) {
        for (int c = 0; c < dims_.d_model; ++c) {
          frame(r, c) = x(pos++);
        }
      }
      frames.push_back(std::move(frame));
    }
    return frames;
  }

  Eigen::VectorXd flatten(const LatentVideo<double>& frames) const {
    Eigen::VectorXd x(latent_dim());
    Eigen::Index pos = 0;
    for (const MatX<double>& frame : frames) {
      for (Eigen::Index r = 0; r < frame.rows(); ++r) {
        for (Eigen::Index c = 0; c < frame.cols(); ++c) {
          x(pos++) = frame(r, c);
        }
      }
    }
    return x;
  }

  DitBlockParams<double> params_;
  InjectorDims dims_;
  int frames_;
  int tokens_;
};

}  // namespace trajkit

#endif  // TRAJKIT_SAMPLER_HPP_
