// Copyright 2026 The TRTC Beamforming Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "trtc/baseline.hpp"
#include "trtc/oracles.hpp"

namespace trtc {
namespace {

using testing::random_cvec;
using testing::random_in_ball;

TEST(ProjectedGradientOracle, ZeroLinearTermGivesZero) {
  EXPECT_EQ(projected_gradient_oracle(-1.0, CVec::Zero(4), 1.0).norm(), 0.0);
}

TEST(ProjectedGradientOracle, AgreesWithClosedForm) {
  std::mt19937_64 rng(30);
  std::normal_distribution<double> gauss;
  int interior = 0, boundary = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const double abar = -std::exp(1.5 * gauss(rng));
    const CVec b8 = random_cvec(rng, 3, std::exp(gauss(rng)));
    const double power = std::exp(gauss(rng));
    const double closed = ball_qp_objective(abar, b8, solve_ball_qp(abar, b8, power));
    const double iter = ball_qp_objective(abar, b8, projected_gradient_oracle(abar, b8, power));
    EXPECT_LE(std::abs(closed - iter), 1e-6 * (1.0 + std::abs(iter)));
    (b8.squaredNorm() <= power * abar * abar ? interior : boundary)++;
  }
  EXPECT_GT(interior, 20);
  EXPECT_GT(boundary, 20);
}

TEST(ProjectedGradientOracle, BoundaryIterateIsActive) {
  std::mt19937_64 rng(31);
  const CVec b8 = random_cvec(rng, 4, 10.0);
  const CVec x = projected_gradient_oracle(-0.5, b8, 2.0);
  EXPECT_NEAR(x.squaredNorm(), 2.0, 1e-8);
}

TEST(ProjectedGradientOracle, ReportsNonConvergence) {
  OracleSettings s;
  s.max_iters = 1;
  s.tolerance = 1e-300;
  std::mt19937_64 rng(32);
  EXPECT_THROW(projected_gradient_oracle(-1e-3, random_cvec(rng, 3), 1e6, s), OracleError);
  s.tolerance = 0.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  EXPECT_THROW(projected_gradient_oracle(1.0, CVec::Ones(2), 1.0), CurvatureError);
}

TEST(Baseline, PerUnitFeasibleImpliesSumPowerFeasible) {
  std::mt19937_64 rng(33);
  for (int N : {1, 4, 16}) {
    SystemConfig cfg = testing::small_config(2, 3, N);
    cfg.unit_power = 0.37;
    for (int rep = 0; rep < 1000; ++rep) {
      const BeamformerSet beams = random_feasible_init(cfg, rng);
      ASSERT_TRUE(per_unit_feasible(beams, cfg));
      EXPECT_TRUE(sum_power_feasible(beams, cfg));
    }
  }
}

TEST(Baseline, SingleUnitMatchesPerUnitRun) {
  std::mt19937_64 rng(34);
  for (int rep = 0; rep < 5; ++rep) {
    SystemConfig cfg = testing::small_config(2, 2, 1);
    const ChannelSet ch = testing::random_channels(cfg, rng);
    const BeamformerSet init = random_feasible_init(cfg, rng);
    const OptimizationResult a = run(ch, cfg, init);
    const OptimizationResult b = solve_sum_power_baseline(ch, cfg, init);
    EXPECT_NEAR(a.trace.final_objective(), b.trace.final_objective(), 1e-6);
  }
}

TEST(Baseline, IteratesStayInsideSumPowerBall) {
  SystemConfig cfg;
  cfg.num_units = 9;
  std::mt19937_64 rng(35);
  const ChannelSet ch = generate_channels(cfg, drop_users(cfg, rng), rng);
  const OptimizationResult r = solve_sum_power_baseline(ch, cfg);
  for (const auto& rec : r.trace.records) EXPECT_LE(rec.max_power_ratio, 1.0 + 1e-9);
  EXPECT_NO_THROW(check_feasible(r.beams, cfg, PowerConstraint::kSumPower));
}

}  // namespace
}  // namespace trtc
