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

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "trtc/system_model.hpp"
#include "trtc/types.hpp"

namespace trtc {

enum class PowerConstraint {
  kPerUnit,   // sum_k |f_g[k*N + n]|^2 <= P_t for every unit n
  kSumPower,  // ||f_g||^2 <= N * P_t (conventional transceiver)
};

// Relative slack absorbing projection round-off in feasibility checks.
inline constexpr double kFeasibilitySlack = 1e-9;

// Stacked beamformers, one length-N*K vector per cell in user-major layout:
// entries [k*N, (k+1)*N) belong to user k. The per-unit subvector of unit n
// gathers entry n of every user block.
class BeamformerSet {
 public:
  BeamformerSet() = default;
  BeamformerSet(int num_cells, int users_per_cell, int num_units)
      : users_(users_per_cell),
        units_(num_units),
        f_(num_cells, CVec::Zero(static_cast<Eigen::Index>(users_per_cell) *
                                 num_units)) {}

  int num_cells() const { return static_cast<int>(f_.size()); }
  int users_per_cell() const { return users_; }
  int num_units() const { return units_; }

  const CVec& cell(int g) const { return f_[g]; }
  CVec& cell(int g) { return f_[g]; }

  auto user(int g, int k) const { return f_[g].segment(k * units_, units_); }
  auto user(int g, int k) { return f_[g].segment(k * units_, units_); }

  CVec unit(int g, int n) const {
    CVec x(users_);
    for (int k = 0; k < users_; ++k) x[k] = f_[g][k * units_ + n];
    return x;
  }

  void set_unit(int g, int n, const CVec& x) {
    for (int k = 0; k < users_; ++k) f_[g][k * units_ + n] = x[k];
  }

  double unit_power(int g, int n) const {
    double p = 0.0;
    for (int k = 0; k < users_; ++k) p += std::norm(f_[g][k * units_ + n]);
    return p;
  }

  bool operator==(const BeamformerSet&) const = default;

 private:
  int users_ = 0;
  int units_ = 0;
  std::vector<CVec> f_;
};

struct RateReport {
  std::vector<std::vector<double>> sinr;  // [g][k]
  std::vector<std::vector<double>> rate;  // [g][k], nats
  std::vector<double> cell_min;           // [g], nats
  std::vector<int> cell_min_user;         // smallest index on ties
  double objective = 0.0;                 // sum_g min_k rate, nats
};

// h_{i,g,k}^H f_{i,j}: amplitude at user (g,k) of the stream TRTC i sends to
// its own user j.
inline Complex received_amplitude(const ChannelSet& channels,
                                  const BeamformerSet& beams, int i, int g,
                                  int k, int j) {
  return channels(i, g, k).dot(beams.user(i, j));
}

// Total received power at user (g,k) from every stream of every TRTC.
inline double total_received_power(const ChannelSet& channels,
                                   const BeamformerSet& beams, int g, int k) {
  double total = 0.0;
  for (int i = 0; i < beams.num_cells(); ++i)
    for (int j = 0; j < beams.users_per_cell(); ++j)
      total += std::norm(received_amplitude(channels, beams, i, g, k, j));
  return total;
}

inline double sinr(const ChannelSet& channels, const BeamformerSet& beams,
                   const SystemConfig& cfg, int g, int k) {
  double signal = 0.0;
  double interference = 0.0;
  for (int i = 0; i < beams.num_cells(); ++i) {
    for (int j = 0; j < beams.users_per_cell(); ++j) {
      const double p = std::norm(received_amplitude(channels, beams, i, g, k, j));
      if (i == g && j == k)
        signal = p;
      else
        interference += p;
    }
  }
  return signal / (interference + cfg.noise(g, k));
}

// Largest per-unit power (or per-cell power for kSumPower) over its limit.
inline double max_power_ratio(const BeamformerSet& beams,
                              const SystemConfig& cfg,
                              PowerConstraint constraint = PowerConstraint::kPerUnit) {
  double worst = 0.0;
  for (int g = 0; g < beams.num_cells(); ++g) {
    if (constraint == PowerConstraint::kSumPower) {
      worst = std::max(worst, beams.cell(g).squaredNorm() /
                                  (beams.num_units() * cfg.unit_power));
      continue;
    }
    for (int n = 0; n < beams.num_units(); ++n)
      worst = std::max(worst, beams.unit_power(g, n) / cfg.unit_power);
  }
  return worst;
}

inline void check_feasible(const BeamformerSet& beams, const SystemConfig& cfg,
                           PowerConstraint constraint = PowerConstraint::kPerUnit) {
  const double slack = 1.0 + kFeasibilitySlack;
  int worst_g = -1;
  int worst_n = -1;
  double worst_ratio = slack;
  double worst_power = 0.0;
  double limit = cfg.unit_power;
  for (int g = 0; g < beams.num_cells(); ++g) {
    if (constraint == PowerConstraint::kSumPower) {
      limit = beams.num_units() * cfg.unit_power;
      const double p = beams.cell(g).squaredNorm();
      if (p / limit > worst_ratio) {
        worst_ratio = p / limit;
        worst_g = g;
        worst_n = -1;
        worst_power = p;
      }
      continue;
    }
    for (int n = 0; n < beams.num_units(); ++n) {
      const double p = beams.unit_power(g, n);
      if (p / limit > worst_ratio) {
        worst_ratio = p / limit;
        worst_g = g;
        worst_n = n;
        worst_power = p;
      }
    }
  }
  if (worst_g >= 0) throw FeasibilityError(worst_g, worst_n, worst_power, limit);
}

// Rates without a feasibility check.
inline RateReport evaluate_rates(const ChannelSet& channels,
                                 const BeamformerSet& beams,
                                 const SystemConfig& cfg) {
  const int G = beams.num_cells();
  const int K = beams.users_per_cell();
  RateReport report;
  report.sinr.assign(G, std::vector<double>(K));
  report.rate.assign(G, std::vector<double>(K));
  report.cell_min.assign(G, 0.0);
  report.cell_min_user.assign(G, 0);
  for (int g = 0; g < G; ++g) {
    for (int k = 0; k < K; ++k) {
      report.sinr[g][k] = sinr(channels, beams, cfg, g, k);
      report.rate[g][k] = std::log1p(report.sinr[g][k]);
    }
    const auto it = std::min_element(report.rate[g].begin(), report.rate[g].end());
    report.cell_min[g] = *it;
    report.cell_min_user[g] = static_cast<int>(it - report.rate[g].begin());
    report.objective += report.cell_min[g];
  }
  return report;
}

inline RateReport rate_report(const ChannelSet& channels,
                              const BeamformerSet& beams,
                              const SystemConfig& cfg,
                              PowerConstraint constraint = PowerConstraint::kPerUnit) {
  check_feasible(beams, cfg, constraint);
  return evaluate_rates(channels, beams, cfg);
}

// Max-min objective sum_g min_k R_{g,k}, nats.
inline double objective(const ChannelSet& channels, const BeamformerSet& beams,
                        const SystemConfig& cfg) {
  double total = 0.0;
  for (int g = 0; g < beams.num_cells(); ++g) {
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < beams.users_per_cell(); ++k)
      worst = std::min(worst, std::log1p(sinr(channels, beams, cfg, g, k)));
    total += worst;
  }
  return total;
}

inline double nats_to_bits(double nats) { return nats / std::log(2.0); }

}  // namespace trtc
