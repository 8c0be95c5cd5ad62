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


// Conventional multi-antenna transceiver: one sum-power ball of radius
// sqrt(N * P_t) per cell, optimized by the same loop with a single block.

#pragma once

#include <optional>
#include <random>

#include "trtc/optimizer.hpp"

namespace trtc {

inline OptimizationResult solve_sum_power_baseline(const ChannelSet& channels,
                                                   const SystemConfig& cfg,
                                                   std::optional<BeamformerSet> init = std::nullopt,
                                                   OptimizerOptions options = {}) {
  options.constraint = PowerConstraint::kSumPower;
  return run(channels, cfg, std::move(init), options);
}

inline bool per_unit_feasible(const BeamformerSet& beams, const SystemConfig& cfg) {
  return max_power_ratio(beams, cfg, PowerConstraint::kPerUnit) <= 1.0 + kFeasibilitySlack;
}

inline bool sum_power_feasible(const BeamformerSet& beams, const SystemConfig& cfg) {
  return max_power_ratio(beams, cfg, PowerConstraint::kSumPower) <= 1.0 + kFeasibilitySlack;
}

}  // namespace trtc
