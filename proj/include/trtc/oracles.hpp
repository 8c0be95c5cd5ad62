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

// Iterative and dense-matrix cross-checks for the closed-form block update.
// Neither is used on the production path of the closed-form solver.

#pragma once

#include <cmath>
#include <span>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "trtc/subproblem.hpp"
#include "trtc/types.hpp"

namespace trtc {

struct OracleSettings {
  double initial_step = 1.0;
  double shrink = 0.5;
  double armijo = 1e-4;
  int max_iters = 200000;
  // Stop once the gradient mapping falls below tolerance * ||grad at 0||.
  double tolerance = 1e-9;

  void validate() const {
    if (!(tolerance > 0.0)) throw std::invalid_argument("oracle tolerance must be > 0");
    if (!(shrink > 0.0 && shrink < 1.0))
      throw std::invalid_argument("oracle shrink must be in (0, 1)");
    if (!(initial_step > 0.0)) throw std::invalid_argument("oracle step must be > 0");
  }
};

struct OracleResult {
  CVec x;
  int iterations = 0;
};

inline CVec project_to_ball(const CVec& x, double power) {
  const double norm2 = x.squaredNorm();
  if (norm2 <= power) return x;
  return std::sqrt(power / norm2) * x;
}

// Projected gradient ascent with Armijo backtracking along the projection arc
// for max abar ||x||^2 + 2 Re{b8^H x} over ||x||^2 <= power. Does not use the
// isotropic structure of the objective beyond evaluating it.
inline OracleResult projected_gradient_oracle_detailed(double abar, const CVec& b8,
                                                       double power,
                                                       const OracleSettings& settings = {}) {
  settings.validate();
  if (!(abar < 0.0)) throw CurvatureError(abar);
  OracleResult result;
  result.x = CVec::Zero(b8.size());
  const double scale = 2.0 * b8.norm();
  if (scale == 0.0) return result;

  CVec& x = result.x;
  double fx = ball_qp_objective(abar, b8, x);
  for (int it = 0; it < settings.max_iters; ++it) {
    const CVec grad = 2.0 * (abar * x + b8);  // real gradient in C^K form
    double step = settings.initial_step;
    CVec candidate;
    double fc = 0.0;
    for (;;) {
      candidate = project_to_ball(x + step * grad, power);
      fc = ball_qp_objective(abar, b8, candidate);
      const double predicted = grad.dot(candidate - x).real();
      if (fc >= fx + settings.armijo * predicted) break;
      step *= settings.shrink;
      if (step < 1e-300) break;
    }
    const double mapping = (candidate - x).norm() / step;
    x = std::move(candidate);
    fx = fc;
    result.iterations = it + 1;
    if (mapping <= settings.tolerance * scale) return result;
  }
  throw OracleError("projected gradient oracle did not converge", x);
}

inline CVec projected_gradient_oracle(double abar, const CVec& b8, double power,
                                      const OracleSettings& settings = {}) {
  return projected_gradient_oracle_detailed(abar, b8, power, settings).x;
}

namespace detail {

inline CMat dense_curvature(const SubvectorTerm& t) {
  const int m = t.block_dim();
  const int K = t.users();
  CMat q = CMat::Zero(static_cast<Eigen::Index>(K) * m, static_cast<Eigen::Index>(K) * m);
  const CMat outer = t.direction * t.direction.adjoint();
  for (int u = 0; u < K; ++u) q.block(u * m, u * m, m, m) = t.b2[u] * outer;
  return q;
}

inline CVec augment(const CVec& d) {
  CVec a(2 * d.size());
  a << d, d.conjugate();
  return a;
}

}  // namespace detail

// Second-derivative matrix of the smoothed per-cell objective along a segment:
// at x = f0 + tau (ftilde - f0) and fhat = ftilde - f0,
//   d^2/dtau^2 softmin_k Rb_k(x) = [fhat; conj(fhat)]^H Psi [fhat; conj(fhat)].
// Dense, O((2Km)^2) memory; intended for certification only.
inline CMat build_psi_oracle(std::span<const SubvectorTerm> terms, double mu,
                             const CVec& f0, const CVec& ftilde, double tau) {
  const CVec x = f0 + tau * (ftilde - f0);
  const RVec h = softmin_weights(term_values(terms, x), mu);
  const Eigen::Index dim = x.size();
  CMat psi = CMat::Zero(2 * dim, 2 * dim);
  CVec mean_d = CVec::Zero(2 * dim);
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const double hk = h[static_cast<Eigen::Index>(k)];
    const CMat q = detail::dense_curvature(terms[k]);
    psi.topLeftCorner(dim, dim) -= hk * q;
    psi.bottomRightCorner(dim, dim) -= hk * q.conjugate();
    const CVec d = detail::augment(terms[k].gradient(x));
    psi -= mu * hk * d * d.adjoint();
    mean_d += hk * d;
  }
  psi += mu * mean_d * mean_d.adjoint();
  return psi;
}

inline double psi_lambda_min(const CMat& psi) {
  const CMat sym = 0.5 * (psi + psi.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace trtc
