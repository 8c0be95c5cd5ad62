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


// Monte-Carlo scenarios, parameter sweeps and runtime benchmarks.

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "trtc/baseline.hpp"
#include "trtc/optimizer.hpp"
#include "trtc/oracles.hpp"

namespace trtc {

enum class Scheme { kTrtc, kBaseline };

inline const char* scheme_name(Scheme s) { return s == Scheme::kTrtc ? "trtc" : "baseline"; }

inline Scheme parse_scheme(const std::string& s) {
  if (s == "trtc") return Scheme::kTrtc;
  if (s == "baseline") return Scheme::kBaseline;
  throw ConfigError("sweep.schemes", "unknown scheme '" + s + "' (trtc | baseline)");
}

inline const std::vector<std::string>& sweepable_params() {
  static const std::vector<std::string> params{"unit_power_dBm",    "users_per_cell",
                                               "cell_radius",       "num_cells",
                                               "pathloss_exponent", "num_units"};
  return params;
}

struct SweepSpec {
  std::string param = "unit_power_dBm";
  std::vector<double> values{10.0};
  int trials = 100;
  std::vector<Scheme> schemes{Scheme::kTrtc, Scheme::kBaseline};
  std::string output;  // empty: stdout

  void validate() const {
    if (std::find(sweepable_params().begin(), sweepable_params().end(), param) ==
        sweepable_params().end())
      throw ConfigError("sweep.param", "cannot sweep '" + param + "'");
    if (values.empty()) throw ConfigError("sweep.values", "value list is empty");
    if (trials < 1) throw ConfigError("sweep.trials", "must be >= 1");
    if (schemes.empty()) throw ConfigError("sweep.schemes", "scheme list is empty");
  }
};

// Sets a sweepable parameter in user units (dBm for power).
inline void set_sweep_param(SystemConfig& cfg, const std::string& param, double value) {
  auto as_count = [&](double v) {
    if (v != std::floor(v) || v < 1.0 || v > 1e6)
      throw ConfigError(param, "expected a positive integer value");
    return static_cast<int>(v);
  };
  if (param == "unit_power_dBm") cfg.unit_power = dbm_to_watt(value);
  else if (param == "users_per_cell") cfg.users_per_cell = as_count(value);
  else if (param == "cell_radius") cfg.cell_radius = value;
  else if (param == "num_cells") cfg.num_cells = as_count(value);
  else if (param == "pathloss_exponent") cfg.pathloss_exponent = value;
  else if (param == "num_units") cfg.num_units = as_count(value);
  else throw ConfigError("sweep.param", "cannot sweep '" + param + "'");
}

struct SchemeOutcome {
  Scheme scheme = Scheme::kTrtc;
  RateReport report;
  IterationTrace trace;
  BeamformerSet beams;
  double wall_ms = 0.0;
};

struct ScenarioResult {
  std::uint64_t seed = 0;
  ChannelSet channels;
  std::vector<SchemeOutcome> outcomes;  // in the requested scheme order
};

// Drop users and draw channels from `seed` alone.
inline ChannelSet scenario_channels(const SystemConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const UserDrop drop = drop_users(cfg, rng);
  return generate_channels(cfg, drop, rng);
}

inline ScenarioResult run_scenario(SystemConfig cfg, std::uint64_t seed,
                                   const std::vector<Scheme>& schemes = {Scheme::kTrtc}) {
  cfg.rng_seed = seed;
  cfg.validate();
  ScenarioResult out;
  out.seed = seed;
  out.channels = scenario_channels(cfg, seed);
  for (Scheme s : schemes) {
    SchemeOutcome o;
    o.scheme = s;
    const auto start = std::chrono::steady_clock::now();
    OptimizationResult r = s == Scheme::kTrtc ? run(out.channels, cfg)
                                              : solve_sum_power_baseline(out.channels, cfg);
    o.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                          start).count();
    const PowerConstraint c =
        s == Scheme::kTrtc ? PowerConstraint::kPerUnit : PowerConstraint::kSumPower;
    o.report = rate_report(out.channels, r.beams, cfg, c);
    o.trace = std::move(r.trace);
    o.beams = std::move(r.beams);
    out.outcomes.push_back(std::move(o));
  }
  return out;
}

struct TrialRecord {
  double value = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::kTrtc;
  double sumrate_bps_hz = 0.0;
  int iterations = 0;
  double ms = 0.0;
};

struct SweepRow {
  std::string sweep_param;
  double value = 0.0;
  Scheme scheme = Scheme::kTrtc;
  int trial_count = 0;
  double mean_sumrate_bps_hz = 0.0;
  double std_sumrate = 0.0;  // sample standard deviation, 0 for one trial
  double mean_iters = 0.0;
  double mean_ms_per_solve = 0.0;
};

struct SweepOptions {
  int threads = 0;      // 0: hardware concurrency
  bool timing = true;   // false: the ms column is written as 0
  std::ostream* log = nullptr;  // one line per finished point
};

struct SweepResult {
  std::vector<SweepRow> rows;       // value-major, then scheme order
  std::vector<TrialRecord> trials;  // value-major, trial, scheme
};

// Runs `work(i)` for i in [0, count) on a pool of threads; rethrows the first
// exception after all workers stop.
template <typename Work>
void parallel_for(int count, int threads, Work&& work) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::max(1, std::min(threads, count));
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        work(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
}

// Trial t of every swept value and scheme uses seed cfg.rng_seed + t, so user
// drops and fading are shared wherever dimensions allow.
inline SweepResult run_sweep(const SweepSpec& spec, const SystemConfig& base,
                             const SweepOptions& options = {}) {
  spec.validate();
  std::vector<SystemConfig> configs;
  for (double v : spec.values) {
    SystemConfig cfg = base;
    set_sweep_param(cfg, spec.param, v);
    cfg.validate();
    configs.push_back(cfg);
  }

  const int S = static_cast<int>(spec.schemes.size());
  const int points = static_cast<int>(spec.values.size());
  SweepResult result;
  result.trials.resize(static_cast<std::size_t>(points) * spec.trials * S);
  std::vector<std::atomic<int>> remaining(points);
  for (auto& r : remaining) r.store(spec.trials);
  std::mutex log_mutex;

  parallel_for(points * spec.trials, options.threads, [&](int job) {
    const int p = job / spec.trials;
    const int t = job % spec.trials;
    const std::uint64_t seed = base.rng_seed + static_cast<std::uint64_t>(t);
    const ScenarioResult sc = run_scenario(configs[p], seed, spec.schemes);
    for (int s = 0; s < S; ++s) {
      const SchemeOutcome& o = sc.outcomes[s];
      TrialRecord& rec = result.trials[(static_cast<std::size_t>(p) * spec.trials + t) * S + s];
      rec.value = spec.values[p];
      rec.trial = t;
      rec.seed = seed;
      rec.scheme = o.scheme;
      rec.sumrate_bps_hz = nats_to_bits(o.report.objective);
      rec.iterations = o.trace.iterations();
      rec.ms = options.timing ? o.wall_ms : 0.0;
    }
    if (remaining[p].fetch_sub(1) == 1 && options.log) {
      std::lock_guard<std::mutex> lock(log_mutex);
      *options.log << spec.param << " = " << spec.values[p] << " done (" << spec.trials
                   << " trials)\n";
    }
  });

  for (int p = 0; p < points; ++p) {
    for (int s = 0; s < S; ++s) {
      SweepRow row;
      row.sweep_param = spec.param;
      row.value = spec.values[p];
      row.scheme = spec.schemes[s];
      row.trial_count = spec.trials;
      double sum = 0.0;
      double iters = 0.0;
      double ms = 0.0;
      for (int t = 0; t < spec.trials; ++t) {
        const TrialRecord& rec =
            result.trials[(static_cast<std::size_t>(p) * spec.trials + t) * S + s];
        sum += rec.sumrate_bps_hz;
        iters += rec.iterations;
        ms += rec.ms;
      }
      row.mean_sumrate_bps_hz = sum / spec.trials;
      double ss = 0.0;
      for (int t = 0; t < spec.trials; ++t) {
        const double d =
            result.trials[(static_cast<std::size_t>(p) * spec.trials + t) * S + s].sumrate_bps_hz -
            row.mean_sumrate_bps_hz;
        ss += d * d;
      }
      row.std_sumrate = spec.trials > 1 ? std::sqrt(ss / (spec.trials - 1)) : 0.0;
      row.mean_iters = iters / spec.trials;
      row.mean_ms_per_solve = ms / spec.trials;
      result.rows.push_back(row);
    }
  }
  return result;
}

inline constexpr const char* kSweepCsvHeader =
    "sweep_param,value,scheme,trial_count,mean_sumrate_bps_hz,std_sumrate,mean_iters,"
    "mean_ms_per_solve";

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.sweep_param << ',' << format_number(r.value) << ',' << scheme_name(r.scheme) << ','
        << r.trial_count << ',' << format_number(r.mean_sumrate_bps_hz) << ','
        << format_number(r.std_sumrate) << ',' << format_number(r.mean_iters) << ','
        << format_number(r.mean_ms_per_solve) << '\n';
  }
}

inline void write_trials_csv(std::ostream& out, const std::string& param,
                             const std::vector<TrialRecord>& trials) {
  out << "sweep_param,value,scheme,trial,seed,sumrate_bps_hz,iters,ms\n";
  for (const auto& t : trials) {
    out << param << ',' << format_number(t.value) << ',' << scheme_name(t.scheme) << ','
        << t.trial << ',' << t.seed << ',' << format_number(t.sumrate_bps_hz) << ','
        << t.iterations << ',' << format_number(t.ms) << '\n';
  }
}

struct SubproblemInstance {
  double abar = 0.0;
  CVec b8;
  double power = 0.0;
};

struct BenchReport {
  int trials = 0;
  int instances_per_trial = 0;
  double closed_form_ms = 0.0;  // median per trial, whole instance batch
  double oracle_ms = 0.0;
  double speedup = 0.0;
  double max_rel_gap = 0.0;  // largest objective gap between the two paths
  double end_to_end_closed_ms = 0.0;  // median full run() time
  double end_to_end_oracle_ms = 0.0;
  double end_to_end_speedup = 0.0;
};

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Subproblems (abar, b8, P_t) met by the closed-form solver during one run.
inline std::vector<SubproblemInstance> harvest_subproblems(const ChannelSet& channels,
                                                           const SystemConfig& cfg,
                                                           std::size_t limit) {
  std::vector<SubproblemInstance> out;
  OptimizerOptions options;
  options.on_subproblem = [&](double abar, const CVec& b8, double power) {
    if (out.size() < limit) out.push_back({abar, b8, power});
  };
  run(channels, cfg, std::nullopt, options);
  return out;
}

// Timing of the two subproblem paths on the instances met by one run per
// trial. With end_to_end set, the full optimizer is also timed with each path.
inline BenchReport bench_runtime(const SystemConfig& cfg, int trials,
                                 std::size_t instances_per_trial = 256,
                                 bool end_to_end = true) {
  if (trials < 3) throw ConfigError("--trials", "bench needs at least 3 trials");
  cfg.validate();
  using Clock = std::chrono::steady_clock;
  auto ms_since = [](Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  };

  BenchReport report;
  report.trials = trials;
  std::vector<double> closed, oracle, e2e_closed, e2e_oracle;
  for (int t = 0; t < trials; ++t) {
    SystemConfig c = cfg;
    c.rng_seed = cfg.rng_seed + static_cast<std::uint64_t>(t);
    const ChannelSet channels = scenario_channels(c, c.rng_seed);
    const auto instances = harvest_subproblems(channels, c, instances_per_trial);
    report.instances_per_trial = static_cast<int>(instances.size());

    std::vector<CVec> a(instances.size()), b(instances.size());
    auto t0 = Clock::now();
    for (std::size_t i = 0; i < instances.size(); ++i)
      a[i] = solve_ball_qp(instances[i].abar, instances[i].b8, instances[i].power);
    closed.push_back(ms_since(t0));

    t0 = Clock::now();
    for (std::size_t i = 0; i < instances.size(); ++i)
      b[i] = projected_gradient_oracle(instances[i].abar, instances[i].b8, instances[i].power);
    oracle.push_back(ms_since(t0));

    for (std::size_t i = 0; i < instances.size(); ++i) {
      const auto& in = instances[i];
      const double fa = ball_qp_objective(in.abar, in.b8, a[i]);
      const double fb = ball_qp_objective(in.abar, in.b8, b[i]);
      report.max_rel_gap = std::max(report.max_rel_gap, std::abs(fa - fb) / (1.0 + std::abs(fb)));
    }

    if (end_to_end) {
      t0 = Clock::now();
      run(channels, c);
      e2e_closed.push_back(ms_since(t0));
      OptimizerOptions options;
      options.solver = SubproblemSolver::kProjectedGradient;
      t0 = Clock::now();
      run(channels, c, std::nullopt, options);
      e2e_oracle.push_back(ms_since(t0));
    }
  }
  report.closed_form_ms = median(closed);
  report.oracle_ms = median(oracle);
  report.speedup = report.closed_form_ms > 0.0 ? report.oracle_ms / report.closed_form_ms : 0.0;
  if (end_to_end) {
    report.end_to_end_closed_ms = median(e2e_closed);
    report.end_to_end_oracle_ms = median(e2e_oracle);
    report.end_to_end_speedup = report.end_to_end_closed_ms > 0.0
                                    ? report.end_to_end_oracle_ms / report.end_to_end_closed_ms
                                    : 0.0;
  }
  return report;
}

}  // namespace trtc
