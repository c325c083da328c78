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

#include "doctest.h"
#include "test_support.hpp"
#include "trajkit/grad_check.hpp"

namespace trajkit {
namespace {

TEST_SUITE("grad_check") {

TEST_CASE("analytic gradients match finite differences in double") {
  const GradCheckSetup<double> setup = make_grad_check_setup<double>(7);
  const GradCheckReport report =
      grad_check<double>(setup.batch, setup.params, setup.head);
  CHECK(report.max_rel_error < 1e-5);
  // Every trainable group was exercised.
  REQUIRE(report.group_max.size() == 10);
  for (const auto& [group, value] : report.group_max) {
    CAPTURE(group);
    CHECK(value < 1e-5);
  }
}

TEST_CASE("float analytic gradients track double finite differences") {
  const GradCheckSetup<float> setup = make_grad_check_setup<float>(7);
  const GradCheckReport report =
      grad_check<float>(setup.batch, setup.params, setup.head);
  CHECK(report.max_rel_error < 1e-3);
}

TEST_CASE("backward pass reports the same loss as the forward pass") {
  const GradCheckSetup<double> setup = make_grad_check_setup<double>(11);
  InjectorGrads<double> grads;
  const double loss_fb =
      forward_backward<double>(setup.batch, setup.params, setup.head, &grads);
  const double loss_f =
      forward_loss<double>(setup.batch, setup.params, setup.head);
  CHECK(loss_fb == loss_f);
  CHECK(loss_f > 0.0);
}

TEST_CASE("no trainable group has an all-zero gradient") {
  const GradCheckSetup<double> setup = make_grad_check_setup<double>(13);
  InjectorGrads<double> grads;
  forward_backward<double>(setup.batch, setup.params, setup.head, &grads);
  CHECK(grads.pose_weight.cwiseAbs().maxCoeff() > 1e-12);
  CHECK(grads.pose_bias.cwiseAbs().maxCoeff() > 1e-12);
  CHECK(grads.wq.cwiseAbs().maxCoeff() > 1e-12);
  CHECK(grads.wk.cwiseAbs().maxCoeff() > 1e-12);
  CHECK(grads.wv.cwiseAbs().maxCoeff() > 1e-12);
  CHECK(grads.wo.cwiseAbs().maxCoeff() > 1e-12);
  CHECK(std::abs(grads.gate_gamma) > 1e-12);
  CHECK(grads.head_weight.cwiseAbs().maxCoeff() > 1e-12);
  CHECK(grads.lora_a.cwiseAbs().maxCoeff() > 1e-12);
  CHECK(grads.lora_b.cwiseAbs().maxCoeff() > 1e-12);
}

TEST_CASE("gate gradient stays defined when the gate sits at zero") {
  GradCheckSetup<double> setup = make_grad_check_setup<double>(17);
  setup.params.gate_gamma = 0.0;
  InjectorGrads<double> grads;
  forward_backward<double>(setup.batch, setup.params, setup.head, &grads);
  // tanh'(0) = 1, so the gate still feels the attention output.
  CHECK(std::abs(grads.gate_gamma) > 1e-12);

  const GradCheckReport report =
      grad_check<double>(setup.batch, setup.params, setup.head);
  CHECK(report.max_rel_error < 1e-5);
}

TEST_CASE("zero adaptor strength silences only the low-rank factors") {
  GradCheckSetup<double> setup = make_grad_check_setup<double>(19);
  setup.head.lora.alpha = 0.0;
  InjectorGrads<double> grads;
  forward_backward<double>(setup.batch, setup.params, setup.head, &grads);
  CHECK(grads.lora_a.cwiseAbs().maxCoeff() == 0.0);
  CHECK(grads.lora_b.cwiseAbs().maxCoeff() == 0.0);
  CHECK(grads.head_weight.cwiseAbs().maxCoeff() > 1e-12);
}

TEST_CASE("directional derivative agrees with the packed gradient") {
  const GradCheckSetup<double> setup = make_grad_check_setup<double>(23);
  InjectorGrads<double> grads;
  forward_backward<double>(setup.batch, setup.params, setup.head, &grads);
  const Eigen::VectorXd g = detail::pack_grads<double>(grads);

  InjectorParams<double> params = setup.params;
  LoraLinear<double> head = setup.head;
  const Eigen::VectorXd theta = detail::pack_params<double>(params, head);

  SeededRng rng(29);
  Eigen::VectorXd direction(theta.size());
  for (Eigen::Index i = 0; i < direction.size(); ++i) {
    direction(i) = rng.normal();
  }
  direction.normalize();

  const double h = 1e-6;
  detail::unpack_params<double>(theta + h * direction, &params, &head);
  const double plus = forward_loss<double>(setup.batch, params, head);
  detail::unpack_params<double>(theta - h * direction, &params, &head);
  const double minus = forward_loss<double>(setup.batch, params, head);
  const double fd = (plus - minus) / (2.0 * h);
  const double analytic = g.dot(direction);
  CHECK(fd == doctest::Approx(analytic).epsilon(1e-5));
}

TEST_CASE("pack and unpack are inverse up to the loss") {
  const GradCheckSetup<double> setup = make_grad_check_setup<double>(31);
  InjectorParams<double> params = setup.params;
  LoraLinear<double> head = setup.head;
  const Eigen::VectorXd theta = detail::pack_params<double>(params, head);
  detail::unpack_params<double>(theta, &params, &head);
  CHECK(forward_loss<double>(setup.batch, params, head) ==
        forward_loss<double>(setup.batch, setup.params, setup.head));
}

TEST_CASE("batch shape violations are rejected") {
  GradCheckSetup<double> setup = make_grad_check_setup<double>(37);
  setup.batch.prompts.pop_back();  // 1 prompt vs 2 pose sequences
  CHECK_THROWS_AS(
      forward_loss<double>(setup.batch, setup.params, setup.head),
      ValidationError);
}

}  // TEST_SUITE

}  // namespace
}  // namespace trajkit
