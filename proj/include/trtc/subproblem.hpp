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

// Block update machinery for the beamformer of one cell.
//
// With the auxiliaries and every other block frozen, the transformed rate of
// user (j,k) is a concave quadratic in the optimized block x of cell g:
//
//   Rb_{j,k}(x) = -x^H Q_{j,k} x + 2 Re{b5_{j,k}^H x} + c5_{j,k},
//   Q_{j,k}     = blkdiag_u(b2_{j,k}[u] v v^H),  ||v|| = 1.
//
// For a per-unit block (entry n of every user's beamformer) v = [1] and Q is
// the diagonal diag(b2). For the whole-cell block used by the sum-power
// baseline v = h_{g,j,k} / ||h_{g,j,k}||.
//
// The per-cell minimum over k is smoothed with a soft-min, minorized by an
// isotropic quadratic (curvature alpha < 0) around the current block, and
// the resulting ball-constrained QP is solved in closed form.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "trtc/fp_transform.hpp"
#include "trtc/rate_metrics.hpp"
#include "trtc/types.hpp"

namespace trtc {

// Floor on the surrogate curvature so the interior QP solution is defined.
inline constexpr double kMaxCurvature = -1e-12;

struct SubvectorTerm {
  RVec b2;         // per-user curvature, length K, >= 0
  CVec direction;  // length m, unit norm
  CVec b3;         // coupling with the frozen entries of the same blocks
  CVec b4;         // linear term restricted to the block
  CVec b5;         // b4 - b3
  double c1_tilde = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
  double c5 = 0.0;  // c1_tilde - c3 + c4

  int users() const { return static_cast<int>(b2.size()); }
  int block_dim() const { return static_cast<int>(direction.size()); }

  // Q x
  CVec apply_curvature(const CVec& x) const {
    const int m = block_dim();
    CVec out(x.size());
    for (int u = 0; u < users(); ++u) {
      const Complex proj = direction.dot(x.segment(u * m, m));
      out.segment(u * m, m) = b2[u] * proj * direction;
    }
    return out;
  }

  double curvature_form(const CVec& x) const {
    const int m = block_dim();
    double q = 0.0;
    for (int u = 0; u < users(); ++u)
      q += b2[u] * std::norm(direction.dot(x.segment(u * m, m)));
    return q;
  }

  // lambda_max(Q)
  double curvature_max() const { return b2.size() ? b2.maxCoeff() : 0.0; }

  double value(const CVec& x) const {
    return -curvature_form(x) + 2.0 * b5.dot(x).real() + c5;
  }

  // Wirtinger gradient d/dx^*: b5 - Q x. The directional derivative along
  // delta is 2 Re{gradient^H delta}.
  CVec gradient(const CVec& x) const { return b5 - apply_curvature(x); }
};

struct SubvectorCoefficients {
  int cell = 0;
  int unit = -1;  // -1: whole-cell block
  int num_cells = 0;
  int users = 0;
  std::vector<SubvectorTerm> terms;  // [j*K + k]

  int dim() const {
    return terms.empty() ? 0 : users * terms.front().block_dim();
  }
  const SubvectorTerm& term(int j, int k) const { return terms[j * users + k]; }
  std::span<const SubvectorTerm> cell_terms(int j) const {
    return {terms.data() + static_cast<std::size_t>(j) * users,
            static_cast<std::size_t>(users)};
  }
};

namespace detail {

// c1_tilde: c1 of user (j,k) plus every contribution of the frozen cells
// i != g (and, for j != g, the linear term of cell j's own beamformer).
inline double frozen_cell_constant(const QuadraticCoefficients& coeffs,
                                   const BeamformerSet& beams, int g, int j,
                                   int k) {
  double c = coeffs.c1(j, k);
  if (j != g) c += 2.0 * coeffs.b1(j, k).dot(beams.cell(j)).real();
  for (int i = 0; i < coeffs.num_cells(); ++i)
    if (i != g) c -= coeffs.quadratic_term(beams, i, j, k);
  return c;
}

}  // namespace detail

// Coefficients of Rb_{j,k} as a function of the per-unit subvector
// x = (f_g[u*N + n])_u, derived from the rank-one blocks of B1:
//   |w^H f_gu|^2 = |w_n|^2 |x_u|^2 + 2 Re{conj(x_u) w_n s_u} + |s_u|^2,
//   s_u = sum_{z != n} conj(w_z) f_g[u*N + z].
inline SubvectorCoefficients reduce_to_subvector(const QuadraticCoefficients& coeffs,
                                                 const BeamformerSet& beams,
                                                 int g, int n) {
  const int G = coeffs.num_cells();
  const int K = coeffs.users_per_cell();
  const int N = coeffs.num_units();
  SubvectorCoefficients sub;
  sub.cell = g;
  sub.unit = n;
  sub.num_cells = G;
  sub.users = K;
  sub.terms.resize(static_cast<std::size_t>(G) * K);
  const CVec& f = beams.cell(g);

  for (int j = 0; j < G; ++j) {
    for (int k = 0; k < K; ++k) {
      SubvectorTerm& t = sub.terms[j * K + k];
      const CVec& w = coeffs.weighted_channel(g, j, k);
      const Complex wn = w[n];
      t.direction = CVec::Ones(1);
      t.b2 = RVec::Constant(K, std::norm(wn));
      t.b3.resize(K);
      t.b4.resize(K);
      t.c3 = 0.0;
      t.c4 = 0.0;
      const bool own_cell = (j == g);
      for (int u = 0; u < K; ++u) {
        Complex s(0.0);
        for (int z = 0; z < N; ++z)
          if (z != n) s += std::conj(w[z]) * f[u * N + z];
        t.b3[u] = wn * s;
        t.c3 += std::norm(s);
        if (own_cell) {
          const CVec& b1 = coeffs.b1(g, k);
          t.b4[u] = b1[u * N + n];
          Complex frozen(0.0);
          for (int z = 0; z < N; ++z)
            if (z != n) frozen += std::conj(b1[u * N + z]) * f[u * N + z];
          t.c4 += 2.0 * frozen.real();
        } else {
          t.b4[u] = Complex(0.0);
        }
      }
      t.b5 = t.b4 - t.b3;
      t.c1_tilde = detail::frozen_cell_constant(coeffs, beams, g, j, k);
      t.c5 = t.c1_tilde - t.c3 + t.c4;
    }
  }
  return sub;
}

// Whole-cell block (sum-power baseline): x = f_g, no frozen entries.
inline SubvectorCoefficients reduce_to_cell(const QuadraticCoefficients& coeffs,
                                            const BeamformerSet& beams, int g) {
  const int G = coeffs.num_cells();
  const int K = coeffs.users_per_cell();
  const int N = coeffs.num_units();
  SubvectorCoefficients sub;
  sub.cell = g;
  sub.unit = -1;
  sub.num_cells = G;
  sub.users = K;
  sub.terms.resize(static_cast<std::size_t>(G) * K);
  for (int j = 0; j < G; ++j) {
    for (int k = 0; k < K; ++k) {
      SubvectorTerm& t = sub.terms[j * K + k];
      const CVec& w = coeffs.weighted_channel(g, j, k);
      const double norm2 = w.squaredNorm();
      t.b2 = RVec::Constant(K, norm2);
      // A scalar direction is a pure phase that cancels in v v^H.
      if (N == 1) {
        t.direction = CVec::Ones(1);
      } else if (norm2 > 0.0) {
        t.direction = w / std::sqrt(norm2);
      } else {
        t.direction = CVec::Zero(N);
        t.direction[0] = 1.0;
      }
      t.b3 = CVec::Zero(static_cast<Eigen::Index>(K) * N);
      t.b4 = (j == g) ? coeffs.b1(g, k) : CVec::Zero(static_cast<Eigen::Index>(K) * N);
      t.b5 = t.b4;
      t.c3 = 0.0;
      t.c4 = 0.0;
      t.c1_tilde = detail::frozen_cell_constant(coeffs, beams, g, j, k);
      t.c5 = t.c1_tilde;
    }
  }
  return sub;
}

// -(1/mu) log sum_k exp(-mu v_k), shifted by min(v).
inline double softmin(std::span<const double> values, double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("softmin needs mu > 0");
  const double lo = *std::min_element(values.begin(), values.end());
  double acc = 0.0;
  for (double v : values) acc += std::exp(-mu * (v - lo));
  return lo - std::log(acc) / mu;
}

// Normalized exp(-mu v_k); mu == 0 gives uniform weights.
inline RVec softmin_weights(std::span<const double> values, double mu) {
  const auto K = static_cast<Eigen::Index>(values.size());
  if (mu == 0.0) return RVec::Constant(K, 1.0 / static_cast<double>(K));
  if (!(mu > 0.0)) throw std::invalid_argument("softmin_weights needs mu >= 0");
  const double lo = *std::min_element(values.begin(), values.end());
  RVec w(K);
  for (Eigen::Index k = 0; k < K; ++k) w[k] = std::exp(-mu * (values[k] - lo));
  return w / w.sum();
}

inline std::vector<double> term_values(std::span<const SubvectorTerm> terms,
                                       const CVec& x) {
  std::vector<double> v;
  v.reserve(terms.size());
  for (const SubvectorTerm& t : terms) v.push_back(t.value(x));
  return v;
}

// Smoothed minimum over the users of one cell.
inline double smoothed_value(std::span<const SubvectorTerm> terms, const CVec& x,
                             double mu) {
  return softmin(term_values(terms, x), mu);
}

// sum_j softmin_k Rb_{j,k}(x)
inline double smoothed_objective(const SubvectorCoefficients& sub, const CVec& x,
                                 double mu) {
  double total = 0.0;
  for (int j = 0; j < sub.num_cells; ++j) total += smoothed_value(sub.cell_terms(j), x, mu);
  return total;
}

// sum_j min_k Rb_{j,k}(x)
inline double hard_objective(const SubvectorCoefficients& sub, const CVec& x) {
  double total = 0.0;
  for (int j = 0; j < sub.num_cells; ++j) {
    const auto v = term_values(sub.cell_terms(j), x);
    total += *std::min_element(v.begin(), v.end());
  }
  return total;
}

struct CurvatureBound {
  double alpha = kMaxCurvature;
  RVec tc;  // per user
};

// alpha = -max_k lambda_max(Q_k) - 2 mu max_k tc_k, where
// tc_k = lambda_max(Q_k Q_k^H) P + ||b5_k||^2 + 2 sqrt(P) ||Q_k b5_k||
// bounds ||b5_k - Q_k x||^2 over the ball ||x||^2 <= P.
inline CurvatureBound mm_alpha(std::span<const SubvectorTerm> terms, double mu,
                               double power) {
  CurvatureBound out;
  out.tc.resize(static_cast<Eigen::Index>(terms.size()));
  double max_lambda = 0.0;
  double max_tc = 0.0;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const SubvectorTerm& t = terms[k];
    const double lambda = t.curvature_max();
    const double tc = lambda * lambda * power + t.b5.squaredNorm() +
                      2.0 * std::sqrt(power) * t.apply_curvature(t.b5).norm();
    out.tc[static_cast<Eigen::Index>(k)] = tc;
    max_lambda = std::max(max_lambda, lambda);
    max_tc = std::max(max_tc, tc);
  }
  out.alpha = std::min(-max_lambda - 2.0 * mu * max_tc, kMaxCurvature);
  return out;
}

struct LinearTerms {
  CVec b7;  // tangent-matching gradient at the expansion point
  CVec b6;  // b7 - alpha f0
  double c6 = 0.0;
};

// Linear and constant parts of the minorant
//   c6 + 2 Re{b6^H x} + alpha ||x||^2
//   = S(f0) + 2 Re{b7^H (x - f0)} + alpha ||x - f0||^2.
inline LinearTerms mm_linear(std::span<const SubvectorTerm> terms,
                             const RVec& weights, double alpha, const CVec& f0,
                             double mu) {
  LinearTerms out;
  out.b7 = CVec::Zero(f0.size());
  for (std::size_t k = 0; k < terms.size(); ++k)
    out.b7 += weights[static_cast<Eigen::Index>(k)] * terms[k].gradient(f0);
  out.b6 = out.b7 - alpha * f0;
  out.c6 = smoothed_value(terms, f0, mu) - 2.0 * out.b7.dot(f0).real() +
           alpha * f0.squaredNorm();
  return out;
}

struct CellSurrogate {
  RVec weights;
  double alpha = kMaxCurvature;
  RVec tc;
  CVec b7;
  CVec b6;
  double c6 = 0.0;
};

struct MMSurrogate {
  std::vector<CellSurrogate> cells;
  double abar = 0.0;  // sum_j alpha_j
  CVec b8;            // sum_j b6_j
  double c7 = 0.0;    // sum_j c6_j

  double value(const CVec& x) const {
    return c7 + 2.0 * b8.dot(x).real() + abar * x.squaredNorm();
  }
};

inline MMSurrogate build_surrogate(const SubvectorCoefficients& sub, const CVec& f0,
                                   double mu, double power) {
  MMSurrogate s;
  s.cells.resize(sub.num_cells);
  s.b8 = CVec::Zero(f0.size());
  for (int j = 0; j < sub.num_cells; ++j) {
    const auto terms = sub.cell_terms(j);
    CellSurrogate& c = s.cells[j];
    c.weights = softmin_weights(term_values(terms, f0), mu);
    const CurvatureBound bound = mm_alpha(terms, mu, power);
    c.alpha = bound.alpha;
    c.tc = bound.tc;
    LinearTerms lin = mm_linear(terms, c.weights, c.alpha, f0, mu);
    c.b7 = std::move(lin.b7);
    c.b6 = std::move(lin.b6);
    c.c6 = lin.c6;
    s.abar += c.alpha;
    s.b8 += c.b6;
    s.c7 += c.c6;
  }
  return s;
}

// abar ||x||^2 + 2 Re{b8^H x}
inline double ball_qp_objective(double abar, const CVec& b8, const CVec& x) {
  return abar * x.squaredNorm() + 2.0 * b8.dot(x).real();
}

// argmax abar ||x||^2 + 2 Re{b8^H x} s.t. ||x||^2 <= power.
inline CVec solve_ball_qp(double abar, const CVec& b8, double power) {
  if (!(abar < 0.0)) throw CurvatureError(abar);
  const double norm2 = b8.squaredNorm();
  if (norm2 == 0.0) return CVec::Zero(b8.size());
  if (norm2 <= power * abar * abar) return -b8 / abar;
  return std::sqrt(power / norm2) * b8;
}

}  // namespace trtc
