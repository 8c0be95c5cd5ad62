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

// Scenario configuration, user drops and Rician channel generation for a
// multi-cell downlink where every cell is served by one transmissive-surface
// transceiver with N independently power-limited units.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "trtc/types.hpp"

namespace trtc {

enum class ArrayGeometry { kUla, kUpa };
enum class MuSchedule { kFixed, kGeometric };
enum class InitPolicy { kMatchedFilter, kRandom };

// All quantities are linear SI units. Decibel inputs are converted once, when
// a scenario file or CLI override is ingested (see config_io.hpp).
struct SystemConfig {
  int num_cells = 2;
  int users_per_cell = 2;
  int num_units = 16;

  double unit_power = 1e-2;  // P_t, W (10 dBm)
  double noise_power = 1e-11;  // W (-80 dBm), used when per_user_noise is empty
  std::vector<double> per_user_noise;  // optional, G*K entries, W

  double pathloss_ref = 1e-3;  // C0 at d0 = 1 m (-30 dB)
  double pathloss_exponent = 3.2;
  double rician_factor = 3.1622776601683795;  // 5 dB; +inf means pure LOS

  // Empty: TRTCs on a line, cell g at (g * site_spacing, 0, trtc_height).
  std::vector<Vec3> trtc_positions;
  double site_spacing = 140.0;
  double trtc_height = 4.5;
  double cell_radius = 100.0;
  double user_height = 1.5;
  ArrayGeometry array = ArrayGeometry::kUla;

  double smoothing_mu = 20.0;
  MuSchedule mu_schedule = MuSchedule::kFixed;
  double mu_growth = 1.5;
  double mu_max = 200.0;

  int max_outer_iters = 100;
  double convergence_tol = 1e-4;  // nats of objective improvement
  int max_backtracks = 10;
  std::uint64_t rng_seed = 1;
  InitPolicy init = InitPolicy::kMatchedFilter;

  double noise(int g, int k) const {
    return per_user_noise.empty() ? noise_power
                                  : per_user_noise[g * users_per_cell + k];
  }

  Vec3 trtc_position(int g) const {
    if (!trtc_positions.empty()) return trtc_positions[g];
    return {g * site_spacing, 0.0, trtc_height};
  }

  // Smoothing parameter used during outer iteration `iter` (0-based).
  double mu_at(int iter) const {
    if (mu_schedule == MuSchedule::kFixed) return smoothing_mu;
    return std::min(mu_max, smoothing_mu * std::pow(mu_growth, iter));
  }

  void validate() const {
    if (num_cells < 1) throw ConfigError("num_cells", "must be >= 1");
    if (users_per_cell < 1) throw ConfigError("users_per_cell", "must be >= 1");
    if (num_units < 1) throw ConfigError("num_units", "must be >= 1");
    if (!(unit_power > 0.0) || !std::isfinite(unit_power))
      throw ConfigError("unit_power_dBm", "unit power must be positive");
    if (!(noise_power > 0.0))
      throw ConfigError("noise_power_dBm", "noise power must be positive");
    if (!per_user_noise.empty()) {
      if (per_user_noise.size() !=
          static_cast<std::size_t>(num_cells * users_per_cell))
        throw ConfigError("noise_power_dBm",
                          "per-user list needs num_cells * users_per_cell entries");
      for (double s : per_user_noise)
        if (!(s > 0.0))
          throw ConfigError("noise_power_dBm", "noise power must be positive");
    }
    if (!(pathloss_ref > 0.0))
      throw ConfigError("pathloss_ref_dB", "reference gain must be positive");
    if (!std::isfinite(pathloss_exponent))
      throw ConfigError("pathloss_exponent", "must be finite");
    if (!(rician_factor >= 0.0))
      throw ConfigError("rician_factor_dB", "must be non-negative (linear)");
    if (!trtc_positions.empty() &&
        trtc_positions.size() != static_cast<std::size_t>(num_cells))
      throw ConfigError("trtc_positions", "needs exactly num_cells entries");
    if (!(cell_radius >= 0.0))
      throw ConfigError("cell_radius", "must be non-negative");
    if (array == ArrayGeometry::kUpa) {
      const int side = static_cast<int>(std::lround(std::sqrt(num_units)));
      if (side * side != num_units)
        throw ConfigError("array", "upa needs a perfect-square num_units");
    }
    if (!(smoothing_mu > 0.0))
      throw ConfigError("smoothing_mu", "must be positive");
    if (mu_schedule == MuSchedule::kGeometric &&
        (!(mu_growth >= 1.0) || !(mu_max >= smoothing_mu)))
      throw ConfigError("mu_schedule",
                        "geometric schedule needs mu_growth >= 1, mu_max >= smoothing_mu");
    if (max_outer_iters < 1)
      throw ConfigError("max_outer_iters", "must be >= 1");
    if (!(convergence_tol >= 0.0))
      throw ConfigError("convergence_tol", "must be non-negative");
    if (max_backtracks < 0)
      throw ConfigError("max_backtracks", "must be non-negative");
  }
};

// h[i][g][k]: length-N channel from the TRTC of cell i to user k of cell g.
class ChannelSet {
 public:
  ChannelSet() = default;
  ChannelSet(int num_cells, int users_per_cell, int num_units)
      : num_cells_(num_cells),
        users_(users_per_cell),
        units_(num_units),
        h_(static_cast<std::size_t>(num_cells) * num_cells * users_per_cell,
           CVec::Zero(num_units)) {}

  int num_cells() const { return num_cells_; }
  int users_per_cell() const { return users_; }
  int num_units() const { return units_; }

  const CVec& operator()(int i, int g, int k) const { return h_[index(i, g, k)]; }
  CVec& operator()(int i, int g, int k) { return h_[index(i, g, k)]; }

  bool operator==(const ChannelSet&) const = default;

 private:
  std::size_t index(int i, int g, int k) const {
    return (static_cast<std::size_t>(i) * num_cells_ + g) * users_ + k;
  }

  int num_cells_ = 0;
  int users_ = 0;
  int units_ = 0;
  std::vector<CVec> h_;
};

struct UserDrop {
  // positions[g][k]
  std::vector<std::vector<Vec3>> positions;
};

// C0 * (d / d0)^-alpha with d0 = 1 m.
inline double path_loss(double d, const SystemConfig& cfg) {
  if (!(d > 0.0)) throw InvalidDistanceError(d);
  return cfg.pathloss_ref * std::pow(d, -cfg.pathloss_exponent);
}

// Users uniform over the horizontal disk around their serving TRTC.
inline UserDrop drop_users(const SystemConfig& cfg, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  UserDrop drop;
  drop.positions.resize(cfg.num_cells);
  for (int g = 0; g < cfg.num_cells; ++g) {
    const Vec3 centre = cfg.trtc_position(g);
    drop.positions[g].resize(cfg.users_per_cell);
    for (int k = 0; k < cfg.users_per_cell; ++k) {
      const double r = cfg.cell_radius * std::sqrt(unit(rng));
      const double phi = 2.0 * std::numbers::pi * unit(rng);
      drop.positions[g][k] = {centre.x + r * std::cos(phi),
                              centre.y + r * std::sin(phi), cfg.user_height};
    }
  }
  return drop;
}

// Unit-modulus half-wavelength array response toward `direction` (unit
// vector). ULA elements lie along x; UPA elements on a sqrt(N) x sqrt(N) grid
// in the x-y plane. Element order matches the beamformer unit index.
inline CVec steering_vector(const SystemConfig& cfg, const Vec3& direction) {
  const int n_units = cfg.num_units;
  CVec a(n_units);
  constexpr double kPi = std::numbers::pi;
  if (cfg.array == ArrayGeometry::kUla) {
    for (int n = 0; n < n_units; ++n)
      a[n] = std::polar(1.0, -kPi * n * direction.x);
  } else {
    const int side = static_cast<int>(std::lround(std::sqrt(n_units)));
    for (int n = 0; n < n_units; ++n) {
      const int p = n % side;
      const int q = n / side;
      a[n] = std::polar(1.0, -kPi * (p * direction.x + q * direction.y));
    }
  }
  return a;
}

// Every (i, g, k) link draws its NLOS entries from its own stream derived from
// one draw of `rng`, entries in unit order. Two configs that differ only in
// num_units therefore share the leading entries of every channel.
inline ChannelSet generate_channels(const SystemConfig& cfg,
                                    const UserDrop& drop,
                                    std::mt19937_64& rng) {
  const int G = cfg.num_cells;
  const int K = cfg.users_per_cell;
  const int N = cfg.num_units;
  ChannelSet channels(G, K, N);
  const std::uint64_t base = rng();

  const double kappa = cfg.rician_factor;
  double los_weight = 1.0;
  double nlos_weight = 0.0;
  if (std::isfinite(kappa)) {
    los_weight = std::sqrt(kappa / (1.0 + kappa));
    nlos_weight = std::sqrt(1.0 / (1.0 + kappa));
  }

  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  for (int i = 0; i < G; ++i) {
    const Vec3 tx = cfg.trtc_position(i);
    for (int g = 0; g < G; ++g) {
      for (int k = 0; k < K; ++k) {
        const Vec3& rx = drop.positions[g][k];
        const double d = distance(tx, rx);
        const double amplitude = std::sqrt(path_loss(d, cfg));
        const Vec3 dir{(rx.x - tx.x) / d, (rx.y - tx.y) / d, (rx.z - tx.z) / d};
        const CVec los = steering_vector(cfg, dir);

        std::seed_seq seq{static_cast<std::uint32_t>(base),
                          static_cast<std::uint32_t>(base >> 32),
                          static_cast<std::uint32_t>(i),
                          static_cast<std::uint32_t>(g),
                          static_cast<std::uint32_t>(k)};
        std::mt19937_64 link_rng(seq);
        gauss.reset();
        CVec& h = channels(i, g, k);
        for (int n = 0; n < N; ++n) {
          const double re = gauss(link_rng);
          const double im = gauss(link_rng);
          h[n] = amplitude * (los_weight * los[n] + nlos_weight * Complex(re, im));
        }
      }
    }
  }
  return channels;
}

}  // namespace trtc
