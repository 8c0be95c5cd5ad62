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

// Outer block-coordinate-ascent loop.
//
// Each outer iteration refreshes the auxiliaries once, then sweeps the blocks
// of every cell in order (units 0..N-1 under per-unit constraints, a single
// whole-cell block under the sum-power constraint). A block update applies
// the MM fixed-point map twice, extrapolates with a squared-extrapolation
// step, projects onto the block's power ball and backtracks on the true
// max-min objective so that it never decreases.

#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "trtc/fp_transform.hpp"
#include "trtc/oracles.hpp"
#include "trtc/rate_metrics.hpp"
#include "trtc/subproblem.hpp"
#include "trtc/system_model.hpp"
#include "trtc/types.hpp"

namespace trtc {

enum class SubproblemSolver { kClosedForm, kProjectedGradient };

struct IterationRecord;

struct OptimizerOptions {
  PowerConstraint constraint = PowerConstraint::kPerUnit;
  SubproblemSolver solver = SubproblemSolver::kClosedForm;
  OracleSettings oracle;
  bool accelerate = true;
  // Called with (abar, b8, power) for every ball QP solved.
  std::function<void(double, const CVec&, double)> on_subproblem;
  // Called after the initial point and after every outer iteration.
  std::function<void(const BeamformerSet&, const IterationRecord&)> on_iteration;
};

struct IterationRecord {
  int iteration = 0;  // 0 is the initial point
  double objective = 0.0;  // nats
  std::vector<std::vector<double>> rates;  // [g][k], nats
  double wall_ms = 0.0;  // cumulative since start of run()
  int backtracks = 0;
  int rejected_blocks = 0;  // blocks left unchanged by the monotonicity guard
  double aux_ascent = 0.0;  // transformed objective gain from the auxiliary update
  double max_power_ratio = 0.0;
  double mu = 0.0;
};

struct IterationTrace {
  std::vector<IterationRecord> records;
  bool converged = false;

  int iterations() const { return records.empty() ? 0 : records.back().iteration; }
  double final_objective() const { return records.empty() ? 0.0 : records.back().objective; }
};

struct OptimizationResult {
  BeamformerSet beams;
  IterationTrace trace;
};

struct AccelState {
  CVec j1;
  CVec j2;
  double tau = -1.0;
  int backtrack_count = 0;
};

using BlockMap = std::function<CVec(const CVec&)>;

// Below this norm of the second difference the extrapolation is skipped.
inline constexpr double kSecondDifferenceFloor = 1e-14;

struct SquaremStep {
  CVec first;      // F(x)
  CVec second;     // F(F(x))
  CVec candidate;  // projected extrapolation
  AccelState state;
};

inline CVec squarem_extrapolate(const CVec& x, const AccelState& s, double power) {
  return project_to_ball(x - 2.0 * s.tau * s.j1 + s.tau * s.tau * s.j2, power);
}

// Two map applications and one extrapolated candidate. The step factor is
// tau = -||j1|| / ||j2||, capped at -1 so the candidate never falls short of
// the plain double step F(F(x)) (tau = -1).
inline SquaremStep squarem_step(const CVec& x, const BlockMap& map, double power) {
  SquaremStep out;
  out.first = map(x);
  out.second = map(out.first);
  out.state.j1 = out.first - x;
  out.state.j2 = out.second - out.first - out.state.j1;
  const double n2 = out.state.j2.norm();
  if (n2 < kSecondDifferenceFloor) {
    out.state.tau = -1.0;
    out.candidate = out.second;
    return out;
  }
  out.state.tau = std::min(-out.state.j1.norm() / n2, -1.0);
  out.candidate = squarem_extrapolate(x, out.state, power);
  return out;
}

struct BacktrackResult {
  CVec x;
  int backtracks = 0;
  bool rejected = false;
};

// Halves the extrapolation toward tau = -1 while the true objective drops.
// Falls back to F(F(x)), then to x itself, so the objective never decreases.
inline BacktrackResult backtrack(const CVec& x_old, const SquaremStep& step,
                                 const std::function<double(const CVec&)>& objective_fn,
                                 double objective_old, int max_backtracks,
                                 double power) {
  BacktrackResult out;
  AccelState s = step.state;
  CVec candidate = step.candidate;
  auto improves = [&](const CVec& c) { return objective_fn(c) >= objective_old; };
  bool ok = improves(candidate);
  while (!ok && s.backtrack_count < max_backtracks && s.tau < -1.0) {
    s.tau = (s.tau - 1.0) / 2.0;
    ++s.backtrack_count;
    candidate = squarem_extrapolate(x_old, s, power);
    ok = improves(candidate);
  }
  out.backtracks = s.backtrack_count;
  if (ok) {
    out.x = std::move(candidate);
    return out;
  }
  if (improves(step.second)) {
    out.x = step.second;
    return out;
  }
  out.x = x_old;
  out.rejected = true;
  return out;
}

namespace detail {

inline CVec get_block(const BeamformerSet& beams, int g, int unit) {
  return unit < 0 ? beams.cell(g) : beams.unit(g, unit);
}

inline void set_block(BeamformerSet& beams, int g, int unit, const CVec& x) {
  if (unit < 0)
    beams.cell(g) = x;
  else
    beams.set_unit(g, unit, x);
}

inline double block_power(const SystemConfig& cfg, PowerConstraint c) {
  return c == PowerConstraint::kPerUnit ? cfg.unit_power
                                        : cfg.num_units * cfg.unit_power;
}

}  // namespace detail

// One MM step on a reduced block: surrogate at x, then the ball QP.
inline CVec apply_block_map(const SubvectorCoefficients& sub, const CVec& x, double mu,
                            double power, const OptimizerOptions& options = {}) {
  const MMSurrogate s = build_surrogate(sub, x, mu, power);
  if (options.on_subproblem) options.on_subproblem(s.abar, s.b8, power);
  if (options.solver == SubproblemSolver::kProjectedGradient)
    return projected_gradient_oracle(s.abar, s.b8, power, options.oracle);
  return solve_ball_qp(s.abar, s.b8, power);
}

// F applied to per-unit block (g, n) of `beams` (n = -1: whole cell) with the
// auxiliaries `aux`.
inline CVec fixed_point_map(const BeamformerSet& beams, const AuxiliaryState& aux,
                            const ChannelSet& channels, const SystemConfig& cfg,
                            int g, int n, double mu,
                            PowerConstraint constraint = PowerConstraint::kPerUnit) {
  const QuadraticCoefficients coeffs = assemble_coefficients(channels, aux, cfg);
  const SubvectorCoefficients sub = n < 0 ? reduce_to_cell(coeffs, beams, g)
                                          : reduce_to_subvector(coeffs, beams, g, n);
  return apply_block_map(sub, detail::get_block(beams, g, n), mu,
                         detail::block_power(cfg, constraint));
}

// Phase-aligned matched filter: every unit splits P_t equally over the users
// and each entry takes the phase of the serving channel.
inline BeamformerSet matched_filter_init(const ChannelSet& channels,
                                         const SystemConfig& cfg) {
  const int G = channels.num_cells();
  const int K = channels.users_per_cell();
  const int N = channels.num_units();
  BeamformerSet beams(G, K, N);
  const double amplitude = std::sqrt(cfg.unit_power / K);
  for (int g = 0; g < G; ++g)
    for (int k = 0; k < K; ++k)
      for (int n = 0; n < N; ++n) {
        const Complex h = channels(g, g, k)[n];
        beams.user(g, k)[n] =
            std::abs(h) > 0.0 ? amplitude * h / std::abs(h) : Complex(amplitude);
      }
  return beams;
}

// Random feasible point: every unit subvector has an isotropic direction and
// a power drawn uniformly in [0, P_t].
inline BeamformerSet random_feasible_init(const SystemConfig& cfg, std::mt19937_64& rng) {
  const int K = cfg.users_per_cell;
  BeamformerSet beams(cfg.num_cells, K, cfg.num_units);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int g = 0; g < cfg.num_cells; ++g)
    for (int n = 0; n < cfg.num_units; ++n) {
      CVec x(K);
      for (int k = 0; k < K; ++k) x[k] = Complex(gauss(rng), gauss(rng));
      x *= std::sqrt(cfg.unit_power * unit(rng)) / x.norm();
      beams.set_unit(g, n, x);
    }
  return beams;
}

inline BeamformerSet initial_beamformers(const ChannelSet& channels,
                                         const SystemConfig& cfg) {
  if (cfg.init == InitPolicy::kRandom) {
    std::mt19937_64 rng(cfg.rng_seed ^ 0x9e3779b97f4a7c15ULL);
    return random_feasible_init(cfg, rng);
  }
  return matched_filter_init(channels, cfg);
}

inline OptimizationResult run(const ChannelSet& channels, const SystemConfig& cfg,
                              std::optional<BeamformerSet> init = std::nullopt,
                              const OptimizerOptions& options = {}) {
  cfg.validate();
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  };

  OptimizationResult result;
  BeamformerSet& beams = result.beams;
  beams = init ? std::move(*init) : initial_beamformers(channels, cfg);
  check_feasible(beams, cfg, options.constraint);

  const int G = cfg.num_cells;
  const double power = detail::block_power(cfg, options.constraint);
  const int blocks_per_cell =
      options.constraint == PowerConstraint::kPerUnit ? cfg.num_units : 1;

  auto record = [&](int iteration, double obj) {
    IterationRecord r;
    r.iteration = iteration;
    r.objective = obj;
    r.rates = evaluate_rates(channels, beams, cfg).rate;
    r.max_power_ratio = max_power_ratio(beams, cfg, options.constraint);
    r.wall_ms = elapsed_ms();
    return r;
  };

  AuxiliaryState aux(G, cfg.users_per_cell);
  double current = objective(channels, beams, cfg);
  result.trace.records.push_back(record(0, current));
  if (options.on_iteration) options.on_iteration(beams, result.trace.records.back());

  for (int t = 0; t < cfg.max_outer_iters; ++t) {
    const double mu = cfg.mu_at(t);
    const double fp_before = transformed_objective(channels, beams, aux, cfg);
    aux = update_auxiliaries(channels, beams, cfg);
    const double fp_after = transformed_objective(channels, beams, aux, cfg);
    const QuadraticCoefficients coeffs = assemble_coefficients(channels, aux, cfg);

    int backtracks = 0;
    int rejected = 0;
    const double previous = current;
    for (int g = 0; g < G; ++g) {
      for (int b = 0; b < blocks_per_cell; ++b) {
        const int unit = options.constraint == PowerConstraint::kPerUnit ? b : -1;
        const SubvectorCoefficients sub =
            unit < 0 ? reduce_to_cell(coeffs, beams, g)
                     : reduce_to_subvector(coeffs, beams, g, unit);
        const CVec x_old = detail::get_block(beams, g, unit);
        const BlockMap map = [&](const CVec& x) {
          return apply_block_map(sub, x, mu, power, options);
        };
        const auto true_objective = [&](const CVec& x) {
          detail::set_block(beams, g, unit, x);
          const double value = objective(channels, beams, cfg);
          detail::set_block(beams, g, unit, x_old);
          return value;
        };

        CVec x_new;
        if (options.accelerate) {
          const SquaremStep step = squarem_step(x_old, map, power);
          BacktrackResult bt = backtrack(x_old, step, true_objective, current,
                                         cfg.max_backtracks, power);
          backtracks += bt.backtracks;
          rejected += bt.rejected ? 1 : 0;
          x_new = std::move(bt.x);
        } else {
          x_new = map(x_old);
          if (!(true_objective(x_new) >= current)) {
            x_new = x_old;
            ++rejected;
          }
        }
        detail::set_block(beams, g, unit, x_new);
        current = objective(channels, beams, cfg);
      }
    }

    if (!std::isfinite(current)) throw NumericalError("objective became non-finite");
    IterationRecord r = record(t + 1, current);
    r.backtracks = backtracks;
    r.rejected_blocks = rejected;
    r.aux_ascent = fp_after - fp_before;
    r.mu = mu;
    result.trace.records.push_back(std::move(r));
    if (options.on_iteration) options.on_iteration(beams, result.trace.records.back());

    if (current - previous < cfg.convergence_tol) {
      result.trace.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace trtc
