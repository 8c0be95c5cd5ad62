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


#include <random>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "trtc/rate_metrics.hpp"

namespace trtc {
namespace {

using testing::random_beams;
using testing::random_channels;
using testing::small_config;

// Literal stacked form: user k's stream is E_k f with E_k the N x NK
// selection matrix, and user (g,k) sees TRTC i through h_{i,g,k}.
double sinr_by_selection(const ChannelSet& ch, const BeamformerSet& beams, double noise,
                         int g, int k) {
  const int G = beams.num_cells();
  const int K = beams.users_per_cell();
  const int N = beams.num_units();
  auto selector = [&](int j) {
    CMat e = CMat::Zero(N, static_cast<Eigen::Index>(N) * K);
    for (int n = 0; n < N; ++n) e(n, j * N + n) = 1.0;
    return e;
  };
  const double signal = std::norm((ch(g, g, k).adjoint() * selector(k) * beams.cell(g))(0, 0));
  double interference = 0.0;
  for (int i = 0; i < G; ++i)
    for (int j = 0; j < K; ++j) {
      if (i == g && j == k) continue;
      interference += std::norm((ch(i, g, k).adjoint() * selector(j) * beams.cell(i))(0, 0));
    }
  return signal / (interference + noise);
}

TEST(Sinr, MatchesSelectionMatrixForm) {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 20; ++rep) {
    const SystemConfig cfg = small_config(2, 2, 4);
    const ChannelSet ch = random_channels(cfg, rng);
    const BeamformerSet beams = random_beams(cfg, rng);
    for (int g = 0; g < 2; ++g)
      for (int k = 0; k < 2; ++k) {
        const double expected = sinr_by_selection(ch, beams, cfg.noise_power, g, k);
        EXPECT_NEAR(sinr(ch, beams, cfg, g, k), expected, 1e-12 * (1.0 + expected));
      }
  }
}

TEST(Sinr, OrthogonalChannelsHaveNoInterference) {
  SystemConfig cfg = small_config(1, 2, 2);
  ChannelSet ch(1, 2, 2);
  ch(0, 0, 0) << 1.0, 0.0;
  ch(0, 0, 1) << 0.0, 2.0;
  BeamformerSet beams(1, 2, 2);
  beams.user(0, 0) << 0.5, 0.0;
  beams.user(0, 1) << 0.0, 0.5;
  EXPECT_DOUBLE_EQ(sinr(ch, beams, cfg, 0, 0), 0.25);
  EXPECT_DOUBLE_EQ(sinr(ch, beams, cfg, 0, 1), 1.0);
}

TEST(Sinr, ZeroBeamsGiveZeroRate) {
  const SystemConfig cfg = small_config(2, 2, 3);
  std::mt19937_64 rng(2);
  const ChannelSet ch = random_channels(cfg, rng);
  const BeamformerSet beams(2, 2, 3);
  const RateReport r = rate_report(ch, beams, cfg);
  EXPECT_EQ(r.objective, 0.0);
}

TEST(RateReport, ObjectiveIsSumOfCellMinima) {
  std::mt19937_64 rng(3);
  const SystemConfig cfg = small_config(3, 3, 2);
  const ChannelSet ch = random_channels(cfg, rng);
  const BeamformerSet beams = random_beams(cfg, rng);
  const RateReport r = rate_report(ch, beams, cfg);
  double total = 0.0;
  for (int g = 0; g < 3; ++g) {
    double worst = 1e300;
    for (int k = 0; k < 3; ++k) {
      EXPECT_NEAR(r.rate[g][k], std::log(1.0 + r.sinr[g][k]), 1e-14);
      worst = std::min(worst, r.rate[g][k]);
    }
    EXPECT_EQ(r.cell_min[g], worst);
    EXPECT_EQ(r.rate[g][r.cell_min_user[g]], worst);
    total += worst;
  }
  EXPECT_NEAR(r.objective, total, 1e-14);
  EXPECT_NEAR(objective(ch, beams, cfg), total, 1e-14);
}

TEST(Feasibility, ReportsWorstUnit) {
  const SystemConfig cfg = small_config(2, 2, 3);
  BeamformerSet beams(2, 2, 3);
  beams.set_unit(1, 2, CVec::Constant(2, Complex(1.0, 0.0)));  // power 2 > 1
  try {
    check_feasible(beams, cfg);
    FAIL() << "expected FeasibilityError";
  } catch (const FeasibilityError& e) {
    EXPECT_EQ(e.cell(), 1);
    EXPECT_EQ(e.unit(), 2);
  }
  EXPECT_NO_THROW(check_feasible(beams, cfg, PowerConstraint::kSumPower));
  EXPECT_DOUBLE_EQ(max_power_ratio(beams, cfg), 2.0);
}

TEST(BeamformerSet, UnitViewRoundTrip) {
  const SystemConfig cfg = small_config(1, 3, 4);
  std::mt19937_64 rng(4);
  BeamformerSet beams = random_beams(cfg, rng);
  const CVec x = testing::random_cvec(rng, 3);
  beams.set_unit(0, 2, x);
  EXPECT_TRUE(beams.unit(0, 2) == x);
  for (int k = 0; k < 3; ++k) EXPECT_EQ(beams.cell(0)[k * 4 + 2], x[k]);
  EXPECT_NEAR(beams.unit_power(0, 2), x.squaredNorm(), 1e-15);
}

TEST(Units, NatsToBits) { EXPECT_NEAR(nats_to_bits(std::log(8.0)), 3.0, 1e-15); }

}  // namespace
}  // namespace trtc
