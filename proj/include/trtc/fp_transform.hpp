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

// Fractional-programming reformulation of the per-user rate.
//
// With a Lagrangian-dual auxiliary gamma and a quadratic-transform auxiliary
// omega, the rate of user (g,k) is lower bounded by
//
//   Rq = log(1+gamma) - gamma + 2 sqrt(1+gamma) Re{conj(omega) h_ggk^H f_gk}
//        - |omega|^2 (sum_i sum_j |h_igk^H f_ij|^2 + sigma2_gk),
//
// which is tight at gamma = SINR and omega = sqrt(1+gamma) h_ggk^H f_gk / total.
// For fixed auxiliaries Rq is a concave quadratic in the beamformers:
//
//   Rq = -sum_i f_i^H B1_igk f_i + 2 Re{b1_gk^H f_g} + c1_gk,
//
// where B1_igk = blkdiag(w w^H, ..., w w^H) with w = |omega_gk| h_igk. Only w
// is stored.

#pragma once

#include <cmath>
#include <vector>

#include "trtc/rate_metrics.hpp"
#include "trtc/system_model.hpp"
#include "trtc/types.hpp"

namespace trtc {

struct AuxiliaryState {
  int users_per_cell = 0;
  std::vector<double> gamma;   // [g*K + k], >= 0
  std::vector<Complex> omega;  // [g*K + k]

  AuxiliaryState() = default;
  AuxiliaryState(int num_cells, int users)
      : users_per_cell(users),
        gamma(static_cast<std::size_t>(num_cells) * users, 0.0),
        omega(static_cast<std::size_t>(num_cells) * users, Complex(0.0)) {}

  double& gamma_at(int g, int k) { return gamma[g * users_per_cell + k]; }
  double gamma_at(int g, int k) const { return gamma[g * users_per_cell + k]; }
  Complex& omega_at(int g, int k) { return omega[g * users_per_cell + k]; }
  Complex omega_at(int g, int k) const { return omega[g * users_per_cell + k]; }
};

inline std::vector<double> update_gamma(const ChannelSet& channels,
                                        const BeamformerSet& beams,
                                        const SystemConfig& cfg) {
  const int G = beams.num_cells();
  const int K = beams.users_per_cell();
  std::vector<double> gamma(static_cast<std::size_t>(G) * K);
  for (int g = 0; g < G; ++g)
    for (int k = 0; k < K; ++k) gamma[g * K + k] = sinr(channels, beams, cfg, g, k);
  return gamma;
}

inline std::vector<Complex> update_omega(const ChannelSet& channels,
                                         const BeamformerSet& beams,
                                         const std::vector<double>& gamma,
                                         const SystemConfig& cfg) {
  const int G = beams.num_cells();
  const int K = beams.users_per_cell();
  std::vector<Complex> omega(static_cast<std::size_t>(G) * K);
  for (int g = 0; g < G; ++g) {
    for (int k = 0; k < K; ++k) {
      const Complex desired = received_amplitude(channels, beams, g, g, k, k);
      const double denom = total_received_power(channels, beams, g, k) + cfg.noise(g, k);
      omega[g * K + k] = std::sqrt(1.0 + gamma[g * K + k]) * desired / denom;
    }
  }
  return omega;
}

inline AuxiliaryState update_auxiliaries(const ChannelSet& channels,
                                         const BeamformerSet& beams,
                                         const SystemConfig& cfg) {
  AuxiliaryState aux(beams.num_cells(), beams.users_per_cell());
  aux.gamma = update_gamma(channels, beams, cfg);
  aux.omega = update_omega(channels, beams, aux.gamma, cfg);
  return aux;
}

inline double eval_transformed_rate(const ChannelSet& channels,
                                    const BeamformerSet& beams,
                                    const AuxiliaryState& aux,
                                    const SystemConfig& cfg, int g, int k) {
  const double gamma = aux.gamma_at(g, k);
  const Complex omega = aux.omega_at(g, k);
  const Complex desired = received_amplitude(channels, beams, g, g, k, k);
  const double total = total_received_power(channels, beams, g, k) + cfg.noise(g, k);
  return std::log1p(gamma) - gamma +
         2.0 * std::sqrt(1.0 + gamma) * (std::conj(omega) * desired).real() -
         std::norm(omega) * total;
}

// sum_g min_k Rq_{g,k}: the objective the auxiliary update ascends.
inline double transformed_objective(const ChannelSet& channels,
                                    const BeamformerSet& beams,
                                    const AuxiliaryState& aux,
                                    const SystemConfig& cfg) {
  double total = 0.0;
  for (int g = 0; g < beams.num_cells(); ++g) {
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < beams.users_per_cell(); ++k)
      worst = std::min(worst, eval_transformed_rate(channels, beams, aux, cfg, g, k));
    total += worst;
  }
  return total;
}

class QuadraticCoefficients {
 public:
  QuadraticCoefficients() = default;
  QuadraticCoefficients(int num_cells, int users_per_cell, int num_units)
      : G_(num_cells),
        K_(users_per_cell),
        N_(num_units),
        c1_(static_cast<std::size_t>(G_) * K_, 0.0),
        b1_(static_cast<std::size_t>(G_) * K_,
            CVec::Zero(static_cast<Eigen::Index>(K_) * N_)),
        weighted_(static_cast<std::size_t>(G_) * G_ * K_, CVec::Zero(N_)) {}

  int num_cells() const { return G_; }
  int users_per_cell() const { return K_; }
  int num_units() const { return N_; }

  double& c1(int g, int k) { return c1_[g * K_ + k]; }
  double c1(int g, int k) const { return c1_[g * K_ + k]; }

  // Length N*K, supported on user k's block.
  CVec& b1(int g, int k) { return b1_[g * K_ + k]; }
  const CVec& b1(int g, int k) const { return b1_[g * K_ + k]; }

  // Rank-one factor of every diagonal block of B1_{i,g,k}:
  // |omega_gk| h_igk, so block j of B1_{i,g,k} is w w^H for all j.
  CVec& weighted_channel(int i, int g, int k) {
    return weighted_[(static_cast<std::size_t>(i) * G_ + g) * K_ + k];
  }
  const CVec& weighted_channel(int i, int g, int k) const {
    return weighted_[(static_cast<std::size_t>(i) * G_ + g) * K_ + k];
  }

  // f_i^H B1_{i,g,k} f_i.
  double quadratic_term(const BeamformerSet& beams, int i, int g, int k) const {
    const CVec& w = weighted_channel(i, g, k);
    double q = 0.0;
    for (int u = 0; u < K_; ++u) q += std::norm(w.dot(beams.user(i, u)));
    return q;
  }

  // -sum_i f_i^H B1_{i,g,k} f_i + 2 Re{b1^H f_g} + c1.
  double evaluate(const BeamformerSet& beams, int g, int k) const {
    double value = c1(g, k) + 2.0 * b1(g, k).dot(beams.cell(g)).real();
    for (int i = 0; i < G_; ++i) value -= quadratic_term(beams, i, g, k);
    return value;
  }

 private:
  int G_ = 0;
  int K_ = 0;
  int N_ = 0;
  std::vector<double> c1_;
  std::vector<CVec> b1_;
  std::vector<CVec> weighted_;
};

inline QuadraticCoefficients assemble_coefficients(const ChannelSet& channels,
                                                   const AuxiliaryState& aux,
                                                   const SystemConfig& cfg) {
  const int G = channels.num_cells();
  const int K = channels.users_per_cell();
  const int N = channels.num_units();
  QuadraticCoefficients coeffs(G, K, N);
  for (int g = 0; g < G; ++g) {
    for (int k = 0; k < K; ++k) {
      const double gamma = aux.gamma_at(g, k);
      const Complex omega = aux.omega_at(g, k);
      coeffs.c1(g, k) = std::log1p(gamma) - gamma - std::norm(omega) * cfg.noise(g, k);
      coeffs.b1(g, k).segment(k * N, N) = std::sqrt(1.0 + gamma) * omega * channels(g, g, k);
      for (int i = 0; i < G; ++i)
        coeffs.weighted_channel(i, g, k) = std::abs(omega) * channels(i, g, k);
    }
  }
  return coeffs;
}

}  // namespace trtc
