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
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "trtc/optimizer.hpp"

namespace trtc {
namespace {

using testing::random_cvec;
using testing::small_config;

TEST(Squarem, UnitStepIsDoubleMap) {
  std::mt19937_64 rng(40);
  const CMat a = CMat::Random(3, 3) * 0.3;
  const CVec c = random_cvec(rng, 3, 0.1);
  const BlockMap map = [&](const CVec& x) -> CVec { return a * x + c; };
  const CVec x = random_cvec(rng, 3, 0.1);
  SquaremStep step = squarem_step(x, map, 100.0);
  step.state.tau = -1.0;
  EXPECT_TRUE(squarem_extrapolate(x, step.state, 100.0).isApprox(step.second, 1e-12));
}

TEST(Squarem, FixedPointReturnsInput) {
  const CVec x = CVec::Constant(2, Complex(0.3, -0.1));
  const BlockMap map = [](const CVec& v) { return v; };
  const SquaremStep step = squarem_step(x, map, 1.0);
  EXPECT_EQ(step.state.j1.norm(), 0.0);
  EXPECT_TRUE(step.candidate == x);
}

TEST(Squarem, CandidateIsProjected) {
  std::mt19937_64 rng(41);
  const BlockMap map = [](const CVec& v) -> CVec { return 1.8 * v + CVec::Constant(v.size(), 0.2); };
  for (int rep = 0; rep < 100; ++rep) {
    const CVec x = testing::random_in_ball(rng, 3, 0.5);
    const SquaremStep s = squarem_step(x, map, 0.5);
    EXPECT_LE(s.candidate.squaredNorm(), 0.5 * (1 + 1e-9));
    EXPECT_LE(s.state.tau, -1.0);
  }
}

TEST(Backtrack, AcceptsImprovingCandidate) {
  const CVec x = CVec::Zero(2);
  const BlockMap map = [](const CVec& v) -> CVec { return 0.5 * v + CVec::Ones(2) * 0.1; };
  const SquaremStep step = squarem_step(x, map, 10.0);
  const auto obj = [](const CVec& v) { return v.real().sum(); };
  const BacktrackResult r = backtrack(x, step, obj, obj(x), 10, 10.0);
  EXPECT_EQ(r.backtracks, 0);
  EXPECT_FALSE(r.rejected);
  EXPECT_TRUE(r.x == step.candidate);
}

TEST(Backtrack, AdversarialObjectiveNeverDecreases) {
  std::mt19937_64 rng(42);
  const BlockMap map = [](const CVec& v) -> CVec { return 0.9 * v + CVec::Ones(v.size()) * 0.05; };
  for (int rep = 0; rep < 100; ++rep) {
    const CVec x = testing::random_in_ball(rng, 2, 1.0);
    const CVec target = random_cvec(rng, 2);
    const auto obj = [&](const CVec& v) { return -(v - target).squaredNorm(); };
    const SquaremStep step = squarem_step(x, map, 1.0);
    const BacktrackResult r = backtrack(x, step, obj, obj(x), 10, 1.0);
    EXPECT_GE(obj(r.x), obj(x));
    if (r.rejected) {
      EXPECT_TRUE(r.x == x);
    }
  }
}

TEST(FixedPointMap, AscendsSmoothedBlockObjective) {
  std::mt19937_64 rng(43);
  for (int rep = 0; rep < 20; ++rep) {
    const SystemConfig cfg = small_config(2, 2, 3);
    const ChannelSet ch = testing::random_channels(cfg, rng);
    const BeamformerSet beams = random_feasible_init(cfg, rng);
    const AuxiliaryState aux = update_auxiliaries(ch, beams, cfg);
    const QuadraticCoefficients q = assemble_coefficients(ch, aux, cfg);
    for (int g = 0; g < 2; ++g)
      for (int n = 0; n < 3; ++n) {
        const SubvectorCoefficients sub = reduce_to_subvector(q, beams, g, n);
        const CVec x = beams.unit(g, n);
        const CVec fx = fixed_point_map(beams, aux, ch, cfg, g, n, 20.0);
        EXPECT_LE(fx.squaredNorm(), cfg.unit_power * (1 + 1e-12));
        EXPECT_GE(smoothed_objective(sub, fx, 20.0), smoothed_objective(sub, x, 20.0) - 1e-12);
      }
  }
}

TEST(FixedPointMap, ZeroChannelsKeepZeroBeams) {
  const SystemConfig cfg = small_config(2, 2, 2);
  const ChannelSet ch(2, 2, 2);
  const BeamformerSet beams(2, 2, 2);
  const AuxiliaryState aux = update_auxiliaries(ch, beams, cfg);
  EXPECT_EQ(fixed_point_map(beams, aux, ch, cfg, 0, 1, 20.0).norm(), 0.0);
}

TEST(Init, MatchedFilterMeetsEveryCapWithEquality) {
  SystemConfig cfg;
  std::mt19937_64 rng(44);
  const ChannelSet ch = generate_channels(cfg, drop_users(cfg, rng), rng);
  const BeamformerSet b = matched_filter_init(ch, cfg);
  for (int g = 0; g < cfg.num_cells; ++g)
    for (int n = 0; n < cfg.num_units; ++n)
      EXPECT_NEAR(b.unit_power(g, n) / cfg.unit_power, 1.0, 1e-12);
}

TEST(Run, MonotoneFeasibleAndDeterministic) {
  SystemConfig cfg;
  std::mt19937_64 rng(45);
  const ChannelSet ch = generate_channels(cfg, drop_users(cfg, rng), rng);
  const OptimizationResult a = run(ch, cfg);
  const OptimizationResult b = run(ch, cfg);
  ASSERT_GE(a.trace.records.size(), 2u);
  for (std::size_t i = 1; i < a.trace.records.size(); ++i)
    EXPECT_GE(a.trace.records[i].objective, a.trace.records[i - 1].objective);
  for (const auto& r : a.trace.records) EXPECT_LE(r.max_power_ratio, 1.0 + 1e-9);
  EXPECT_TRUE(a.beams == b.beams);
  EXPECT_EQ(a.trace.final_objective(), b.trace.final_objective());
  EXPECT_GT(a.trace.final_objective(), a.trace.records.front().objective);
}

TEST(Run, InfiniteToleranceStopsAfterOneIteration) {
  SystemConfig cfg;
  cfg.convergence_tol = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(46);
  const ChannelSet ch = generate_channels(cfg, drop_users(cfg, rng), rng);
  const OptimizationResult r = run(ch, cfg);
  EXPECT_EQ(r.trace.iterations(), 1);
  EXPECT_GT(r.trace.records[1].objective, r.trace.records[0].objective);
}

// Single user per cell, single cell: every unit should co-phase with the
// channel at full power, giving log(1 + P (sum_n |h_n|)^2 / sigma^2).
TEST(Run, SingleUserReachesAnalyticOptimum) {
  SystemConfig cfg = small_config(1, 1, 6);
  cfg.init = InitPolicy::kRandom;
  cfg.max_outer_iters = 3000;
  cfg.convergence_tol = 1e-12;
  std::mt19937_64 rng(47);
  const ChannelSet ch = testing::random_channels(cfg, rng);
  const OptimizationResult r = run(ch, cfg);
  const double l1 = ch(0, 0, 0).cwiseAbs().sum();
  const double optimum = std::log1p(cfg.unit_power * l1 * l1 / cfg.noise_power);
  EXPECT_NEAR(r.trace.final_objective(), optimum, 1e-4 * optimum);
}

TEST(Run, OracleSolverFollowsClosedFormPath) {
  SystemConfig cfg = small_config(2, 2, 3);
  cfg.max_outer_iters = 5;
  std::mt19937_64 rng(48);
  const ChannelSet ch = testing::random_channels(cfg, rng);
  OptimizerOptions closed;
  closed.accelerate = false;
  OptimizerOptions oracle = closed;
  oracle.solver = SubproblemSolver::kProjectedGradient;
  const OptimizationResult a = run(ch, cfg, std::nullopt, closed);
  const OptimizationResult b = run(ch, cfg, std::nullopt, oracle);
  ASSERT_EQ(a.trace.records.size(), b.trace.records.size());
  for (std::size_t i = 0; i < a.trace.records.size(); ++i)
    EXPECT_NEAR(a.trace.records[i].objective, b.trace.records[i].objective, 1e-6);
}

TEST(Run, UnacceleratedIsAlsoMonotone) {
  SystemConfig cfg;
  cfg.max_outer_iters = 10;
  std::mt19937_64 rng(49);
  const ChannelSet ch = generate_channels(cfg, drop_users(cfg, rng), rng);
  OptimizerOptions plain;
  plain.accelerate = false;
  const OptimizationResult r = run(ch, cfg, std::nullopt, plain);
  for (std::size_t i = 1; i < r.trace.records.size(); ++i)
    EXPECT_GE(r.trace.records[i].objective, r.trace.records[i - 1].objective);
}

TEST(Run, RejectsInfeasibleInit) {
  SystemConfig cfg = small_config(1, 2, 2);
  std::mt19937_64 rng(50);
  const ChannelSet ch = testing::random_channels(cfg, rng);
  BeamformerSet init(1, 2, 2);
  init.set_unit(0, 0, CVec::Constant(2, 5.0));
  EXPECT_THROW(run(ch, cfg, init), FeasibilityError);
}

}  // namespace
}  // namespace trtc
