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


// trtc: solve, sweep, bench and selftest front end.
//
// Exit codes: 0 success, 1 I/O or unexpected error, 2 configuration error,
// 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI/CLI11.hpp>

#include "trtc/config_io.hpp"
#include "trtc/trtc.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::string out;
  std::vector<std::string> sets;
  int threads = -1;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "TOML or JSON configuration file");
  app->add_option("--seed", f.seed, "Base RNG seed (overrides config)");
  app->add_option("--trials", f.trials, "Trials per point (overrides config)");
  app->add_option("--out", f.out, "Output path");
  app->add_option("--set", f.sets, "Override a config key: key=value (repeatable)");
  app->add_option("--threads", f.threads, "Worker threads, 0 for all cores");
}

trtc::RunConfig load(const CommonFlags& f) {
  trtc::Json doc = f.config.empty() ? trtc::Json::object() : trtc::load_config_document(f.config);
  for (const auto& s : f.sets) trtc::apply_override(doc, s);
  trtc::RunConfig rc = trtc::config_from_json(doc);
  if (f.seed) rc.system.rng_seed = *f.seed;
  if (f.trials) rc.sweep.trials = *f.trials;
  if (!f.out.empty()) rc.sweep.output = f.out;
  if (f.threads >= 0) rc.threads = f.threads;
  rc.system.validate();
  return rc;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_.open(path, std::ios::binary);
    if (!file_) throw std::runtime_error("cannot open output file " + path);
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

int cmd_solve(const CommonFlags& f, const std::string& scheme_text) {
  const trtc::RunConfig rc = load(f);
  const trtc::Scheme scheme = trtc::parse_scheme(scheme_text);
  const trtc::ScenarioResult sc = trtc::run_scenario(rc.system, rc.system.rng_seed, {scheme});
  const auto& o = sc.outcomes.front();

  std::fprintf(stderr, "%s: sum-rate %.6f bps/Hz, %d iterations, %s, %.1f ms\n",
               trtc::scheme_name(scheme), trtc::nats_to_bits(o.report.objective),
               o.trace.iterations(), o.trace.converged ? "converged" : "iteration cap",
               o.wall_ms);
  for (std::size_t g = 0; g < o.report.rate.size(); ++g)
    for (std::size_t k = 0; k < o.report.rate[g].size(); ++k)
      std::fprintf(stderr, "  cell %zu user %zu: %.6f bps/Hz (SINR %.4g)\n", g, k,
                   trtc::nats_to_bits(o.report.rate[g][k]), o.report.sinr[g][k]);

  Output out(f.out);
  std::ostream& os = out.stream();
  os << "iteration,objective_nats,sumrate_bps_hz,backtracks,rejected_blocks,aux_ascent,mu,"
        "max_power_ratio\n";
  for (const auto& r : o.trace.records) {
    os << r.iteration << ',' << trtc::format_number(r.objective) << ','
       << trtc::format_number(trtc::nats_to_bits(r.objective)) << ',' << r.backtracks << ','
       << r.rejected_blocks << ',' << trtc::format_number(r.aux_ascent) << ','
       << trtc::format_number(r.mu) << ',' << trtc::format_number(r.max_power_ratio) << '\n';
  }
  return kExitOk;
}

int cmd_sweep(const CommonFlags& f, bool no_timing, const std::string& trials_out) {
  const trtc::RunConfig rc = load(f);
  trtc::SweepOptions options;
  options.threads = rc.threads;
  options.timing = !no_timing;
  options.log = &std::cerr;
  const trtc::SweepResult result = trtc::run_sweep(rc.sweep, rc.system, options);
  Output out(rc.sweep.output);
  trtc::write_sweep_csv(out.stream(), result.rows);
  if (!trials_out.empty()) {
    Output t(trials_out);
    trtc::write_trials_csv(t.stream(), rc.sweep.param, result.trials);
  }
  return kExitOk;
}

int cmd_bench(const CommonFlags& f, std::size_t instances, bool skip_end_to_end) {
  const trtc::RunConfig rc = load(f);
  const int trials = f.trials ? *f.trials : 10;
  const trtc::BenchReport r =
      trtc::bench_runtime(rc.system, trials, instances, !skip_end_to_end);
  Output out(f.out);
  std::ostream& os = out.stream();
  os << "metric,value\n"
     << "num_units," << rc.system.num_units << '\n'
     << "trials," << r.trials << '\n'
     << "instances_per_trial," << r.instances_per_trial << '\n'
     << "closed_form_ms_median," << trtc::format_number(r.closed_form_ms) << '\n'
     << "oracle_ms_median," << trtc::format_number(r.oracle_ms) << '\n'
     << "subproblem_speedup," << trtc::format_number(r.speedup) << '\n'
     << "max_rel_objective_gap," << trtc::format_number(r.max_rel_gap) << '\n';
  if (!skip_end_to_end) {
    os << "end_to_end_closed_ms_median," << trtc::format_number(r.end_to_end_closed_ms) << '\n'
       << "end_to_end_oracle_ms_median," << trtc::format_number(r.end_to_end_oracle_ms) << '\n'
       << "end_to_end_speedup," << trtc::format_number(r.end_to_end_speedup) << '\n';
  }
  return kExitOk;
}

bool report(const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  return ok;
}

int cmd_selftest(const CommonFlags& f) {
  const trtc::RunConfig rc = load(f);
  bool ok = true;
  std::mt19937_64 rng(rc.system.rng_seed);

  {
    trtc::SystemConfig cfg = rc.system;
    cfg.num_units = 4;
    const trtc::ChannelSet ch = trtc::scenario_channels(cfg, rc.system.rng_seed);
    const trtc::BeamformerSet beams = trtc::random_feasible_init(cfg, rng);
    const trtc::AuxiliaryState aux = trtc::update_auxiliaries(ch, beams, cfg);
    double worst = 0.0;
    for (int g = 0; g < cfg.num_cells; ++g)
      for (int k = 0; k < cfg.users_per_cell; ++k) {
        const double r = std::log1p(trtc::sinr(ch, beams, cfg, g, k));
        const double q = trtc::eval_transformed_rate(ch, beams, aux, cfg, g, k);
        worst = std::max(worst, std::abs(q - r) / std::max(1.0, std::abs(r)));
      }
    ok &= report("fp-tightness", worst <= 1e-10, "max rel gap " + trtc::format_number(worst));
  }

  {
    std::normal_distribution<double> gauss;
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      trtc::CVec b8(3);
      for (auto& z : b8) z = {gauss(rng), gauss(rng)};
      const double abar = -std::exp(2.0 * gauss(rng));
      const double power = std::exp(gauss(rng));
      const double fa = trtc::ball_qp_objective(abar, b8, trtc::solve_ball_qp(abar, b8, power));
      const double fb =
          trtc::ball_qp_objective(abar, b8, trtc::projected_gradient_oracle(abar, b8, power));
      worst = std::max(worst, std::abs(fa - fb) / (1.0 + std::abs(fb)));
    }
    ok &= report("ball-qp-vs-oracle", worst <= 1e-6, "max rel gap " + trtc::format_number(worst));
  }

  {
    trtc::SystemConfig cfg = rc.system;
    cfg.max_outer_iters = std::min(cfg.max_outer_iters, 10);
    const trtc::ScenarioResult sc = trtc::run_scenario(cfg, cfg.rng_seed);
    const auto& recs = sc.outcomes.front().trace.records;
    bool monotone = true;
    double worst_ratio = 0.0;
    for (std::size_t i = 0; i < recs.size(); ++i) {
      if (i > 0 && recs[i].objective < recs[i - 1].objective) monotone = false;
      worst_ratio = std::max(worst_ratio, recs[i].max_power_ratio);
    }
    ok &= report("monotone-run", monotone, std::to_string(recs.size() - 1) + " iterations");
    ok &= report("feasible-run", worst_ratio <= 1.0 + trtc::kFeasibilitySlack,
                 "max power ratio " + trtc::format_number(worst_ratio));
  }
  return ok ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Max-min fair beamforming for TRTC multi-cell downlinks"};
  app.require_subcommand(1);

  CommonFlags solve_flags, sweep_flags, bench_flags, self_flags;
  std::string scheme = "trtc";
  bool no_timing = false;
  std::string trials_out;
  std::size_t instances = 256;
  bool skip_e2e = false;

  CLI::App* solve = app.add_subcommand("solve", "Optimize one drop and print the trace as CSV");
  add_common(solve, solve_flags);
  solve->add_option("--scheme", scheme, "trtc or baseline");

  CLI::App* sweep = app.add_subcommand("sweep", "Monte-Carlo parameter sweep to CSV");
  add_common(sweep, sweep_flags);
  sweep->add_flag("--no-timing", no_timing, "Write 0 in the timing column");
  sweep->add_option("--trials-out", trials_out, "Also write per-trial rows to this path");

  CLI::App* bench = app.add_subcommand("bench", "Closed-form vs oracle subproblem timing");
  add_common(bench, bench_flags);
  bench->add_option("--instances", instances, "Subproblems timed per trial");
  bench->add_flag("--skip-end-to-end", skip_e2e, "Time subproblems only");

  CLI::App* self = app.add_subcommand("selftest", "Quick internal consistency checks");
  add_common(self, self_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*solve) return cmd_solve(solve_flags, scheme);
    if (*sweep) return cmd_sweep(sweep_flags, no_timing, trials_out);
    if (*bench) return cmd_bench(bench_flags, instances, skip_e2e);
    if (*self) return cmd_selftest(self_flags);
  } catch (const trtc::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const trtc::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  }
  return kExitOk;
}
