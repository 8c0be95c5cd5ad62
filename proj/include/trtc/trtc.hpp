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


// Umbrella header for the core library. Configuration file support lives in
// trtc/config_io.hpp and needs the trtc::io target.

#pragma once

#include "trtc/baseline.hpp"
#include "trtc/experiments.hpp"
#include "trtc/fp_transform.hpp"
#include "trtc/optimizer.hpp"
#include "trtc/oracles.hpp"
#include "trtc/rate_metrics.hpp"
#include "trtc/subproblem.hpp"
#include "trtc/system_model.hpp"
#include "trtc/types.hpp"
