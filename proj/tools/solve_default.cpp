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


// Smallest end-to-end use of the library: one drop at the default setup,
// optimized with per-unit power caps and with the sum-power baseline.

#include <cstdio>

#include "trtc/trtc.hpp"

int main() {
  trtc::SystemConfig cfg;
  const trtc::ScenarioResult sc =
      trtc::run_scenario(cfg, 7, {trtc::Scheme::kTrtc, trtc::Scheme::kBaseline});
  for (const auto& o : sc.outcomes) {
    std::printf("%-8s sum-rate %.4f bps/Hz after %d iterations\n", trtc::scheme_name(o.scheme),
                trtc::nats_to_bits(o.report.objective), o.trace.iterations());
    for (std::size_t g = 0; g < o.report.rate.size(); ++g)
      for (std::size_t k = 0; k < o.report.rate[g].size(); ++k)
        std::printf("  cell %zu user %zu: %.4f bps/Hz\n", g, k,
                    trtc::nats_to_bits(o.report.rate[g][k]));
  }
  return 0;
}
