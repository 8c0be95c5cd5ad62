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
#include "trtc/fp_transform.hpp"

namespace trtc {
namespace {

using testing::random_beams;
using testing::random_channels;
using testing::rel_err;
using testing::small_config;

TEST(FpTransform, TightAtOptimalAuxiliaries) {
  std::mt19937_64 rng(10);
  for (int rep = 0; rep < 100; ++rep) {
    const SystemConfig cfg = small_config(2, 2, 4);
    const ChannelSet ch = random_channels(cfg, rng);
    const BeamformerSet beams = random_beams(cfg, rng);
    const AuxiliaryState aux = update_auxiliaries(ch, beams, cfg);
    for (int g = 0; g < 2; ++g)
      for (int k = 0; k < 2; ++k) {
        const double r = std::log1p(sinr(ch, beams, cfg, g, k));
        EXPECT_LE(rel_err(eval_transformed_rate(ch, beams, aux, cfg, g, k), r), 1e-10);
      }
  }
}

TEST(FpTransform, LowerBoundForAnyAuxiliaries) {
  std::mt19937_64 rng(11);
  std::exponential_distribution<double> expo(0.5);
  for (int rep = 0; rep < 200; ++rep) {
    const SystemConfig cfg = small_config(2, 2, 3);
    const ChannelSet ch = random_channels(cfg, rng);
    const BeamformerSet beams = random_beams(cfg, rng);
    AuxiliaryState aux(2, 2);
    for (auto& gm : aux.gamma) gm = expo(rng);
    for (auto& w : aux.omega) w = testing::random_cvec(rng, 1, 0.5)[0];
    for (int g = 0; g < 2; ++g)
      for (int k = 0; k < 2; ++k)
        EXPECT_LE(eval_transformed_rate(ch, beams, aux, cfg, g, k),
                  std::log1p(sinr(ch, beams, cfg, g, k)) + 1e-12);
  }
}

// Perturbing either auxiliary away from its closed form can only lower Rq.
TEST(FpTransform, ClosedFormAuxiliariesAreStationary) {
  std::mt19937_64 rng(12);
  const SystemConfig cfg = small_config(2, 2, 4);
  const ChannelSet ch = random_channels(cfg, rng);
  const BeamformerSet beams = random_beams(cfg, rng);
  const AuxiliaryState aux = update_auxiliaries(ch, beams, cfg);
  const double h = 1e-5;
  for (int g = 0; g < 2; ++g)
    for (int k = 0; k < 2; ++k) {
      auto at = [&](double dg, Complex dw) {
        AuxiliaryState a = aux;
        a.gamma_at(g, k) += dg;
        a.omega_at(g, k) += dw;
        return eval_transformed_rate(ch, beams, a, cfg, g, k);
      };
      const double base = at(0.0, 0.0);
      const double d_gamma = (at(h, 0.0) - at(-h, 0.0)) / (2 * h);
      const double d_re = (at(0.0, {h, 0.0}) - at(0.0, {-h, 0.0})) / (2 * h);
      const double d_im = (at(0.0, {0.0, h}) - at(0.0, {0.0, -h})) / (2 * h);
      EXPECT_NEAR(d_gamma, 0.0, 1e-6);
      EXPECT_NEAR(d_re, 0.0, 1e-6 * (1.0 + std::abs(base)));
      EXPECT_NEAR(d_im, 0.0, 1e-6 * (1.0 + std::abs(base)));
    }
}

TEST(FpTransform, QuadraticFormIdentity) {
  std::mt19937_64 rng(13);
  for (int inst = 0; inst < 10; ++inst) {
    const SystemConfig cfg = small_config(2, 2, 4);
    const ChannelSet ch = random_channels(cfg, rng);
    const BeamformerSet anchor = random_beams(cfg, rng);
    const AuxiliaryState aux = update_auxiliaries(ch, anchor, cfg);
    const QuadraticCoefficients q = assemble_coefficients(ch, aux, cfg);
    for (int pt = 0; pt < 100; ++pt) {
      const BeamformerSet beams = random_beams(cfg, rng);
      for (int g = 0; g < 2; ++g)
        for (int k = 0; k < 2; ++k)
          EXPECT_LE(rel_err(q.evaluate(beams, g, k),
                            eval_transformed_rate(ch, beams, aux, cfg, g, k)),
                    1e-10);
    }
  }
}

// B1 blocks written out densely: f_i^H B1 f_i with B1 = blkdiag(w w^H).
TEST(FpTransform, QuadraticTermMatchesDenseBlockDiagonal) {
  std::mt19937_64 rng(14);
  const SystemConfig cfg = small_config(2, 3, 3);
  const ChannelSet ch = random_channels(cfg, rng);
  const BeamformerSet beams = random_beams(cfg, rng);
  const AuxiliaryState aux = update_auxiliaries(ch, beams, cfg);
  const QuadraticCoefficients q = assemble_coefficients(ch, aux, cfg);
  for (int i = 0; i < 2; ++i)
    for (int g = 0; g < 2; ++g)
      for (int k = 0; k < 3; ++k) {
        const CVec w = std::abs(aux.omega_at(g, k)) * ch(i, g, k);
        CMat b1 = CMat::Zero(9, 9);
        for (int u = 0; u < 3; ++u) b1.block(u * 3, u * 3, 3, 3) = w * w.adjoint();
        const double dense = (beams.cell(i).adjoint() * b1 * beams.cell(i))(0, 0).real();
        EXPECT_NEAR(q.quadratic_term(beams, i, g, k), dense, 1e-12 * (1.0 + dense));
      }
}

TEST(FpTransform, ZeroSignalGivesZeroAuxiliaries) {
  const SystemConfig cfg = small_config(1, 2, 2);
  std::mt19937_64 rng(15);
  const ChannelSet ch = random_channels(cfg, rng);
  const BeamformerSet beams(1, 2, 2);
  const AuxiliaryState aux = update_auxiliaries(ch, beams, cfg);
  for (double gm : aux.gamma) EXPECT_EQ(gm, 0.0);
  for (Complex w : aux.omega) EXPECT_EQ(w, Complex(0.0));
}

}  // namespace
}  // namespace trtc
