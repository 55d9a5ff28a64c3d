/*
 Copyright 2026 The stoc authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stoc/io.hpp"
#include "stoc/kkt_oracle.hpp"
#include "stoc/problems.hpp"
#include "stoc/solver.hpp"

namespace stoc {

/// One CLI invocation: which registered problem to run, scalar overrides,
/// and which artifacts to emit. A non-empty bench_N switches to the
/// pass-time scaling benchmark instead of a solve.
struct RunConfig {
  std::string problem = "example1";
  std::string config_path;
  std::optional<int> N;
  std::optional<double> tol;
  std::optional<int> max_iters;
  std::optional<double> gamma;
  std::vector<double> t_init;
  std::string out_dir = ".";
  bool oracle_check = false;
  bool emit_trajectory = false;
  std::vector<int> bench_N;
};

namespace detail {

inline void merge_config_file(RunConfig& cfg) {
  if (cfg.config_path.empty()) return;
  std::ifstream in(cfg.config_path);
  if (!in) {
    throw std::runtime_error("cannot open config file " + cfg.config_path);
  }
  nlohmann::json j = nlohmann::json::parse(in);
  // explicit flags win over file values
  if (j.contains("problem") && cfg.problem == "example1") {
    cfg.problem = j["problem"].get<std::string>();
  }
  if (j.contains("N") && !cfg.N) cfg.N = j["N"].get<int>();
  if (j.contains("tol") && !cfg.tol) cfg.tol = j["tol"].get<double>();
  if (j.contains("max_iters") && !cfg.max_iters) {
    cfg.max_iters = j["max_iters"].get<int>();
  }
  if (j.contains("gamma") && !cfg.gamma) cfg.gamma = j["gamma"].get<double>();
  if (j.contains("t_init") && cfg.t_init.empty()) {
    cfg.t_init = j["t_init"].get<std::vector<double>>();
  }
  if (j.contains("out") && cfg.out_dir == ".") {
    cfg.out_dir = j["out"].get<std::string>();
  }
}

inline void write_file(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << s;
}

inline std::int64_t median_ns(std::vector<std::int64_t>& samples) {
  std::sort(samples.begin(), samples.end());
  return samples[samples.size() / 2];
}

}  // namespace detail

/// Median backward+forward pass time per horizon length, on the given
/// problem's model linearized at its default guess. Dense solves of the
/// same systems are timed alongside for N <= 64 as the contrast case.
struct ScalingEntry {
  int N = 0;
  int reps = 0;
  std::int64_t median_pass_ns = 0;
  std::int64_t median_dense_ns = 0;  // 0 when not measured
};

struct ScalingTable {
  std::vector<ScalingEntry> entries;
  double loglog_slope = 0.0;
};

inline ScalingTable bench_scaling(const std::string& problem_name,
                                  const std::vector<int>& n_list,
                                  int reps = 100, int dense_cap = 64) {
  const RegisteredProblem& reg = registered_problem(problem_name);
  ScalingTable table;
  for (int n : n_list) {
    ProblemSpec spec = reg.make();
    spec.N = n;
    const Iterate guess = make_initial_iterate(spec, reg.default_t_init);
    const GridLayout grid = build_grid(spec, reg.default_t_init);
    const StageData sd = linearize(spec, grid, guess);

    using clock = std::chrono::steady_clock;
    std::vector<std::int64_t> pass_ns;
    pass_ns.reserve(static_cast<std::size_t>(reps));
    double sink = 0.0;
    for (int r = 0; r < reps; ++r) {
      const auto t0 = clock::now();
      const RiccatiFactors rf = backward_pass(sd);
      const Direction d = forward_pass(sd, rf);
      const auto t1 = clock::now();
      sink += d.dx.back()(0);
      pass_ns.push_back(
          std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0)
              .count());
    }
    ScalingEntry e;
    e.N = n;
    e.reps = reps;
    e.median_pass_ns = detail::median_ns(pass_ns);
    if (n <= dense_cap) {
      const DenseKkt kkt = assemble(sd);
      std::vector<std::int64_t> dense_ns;
      const int dense_reps = std::max(5, reps / 5);
      for (int r = 0; r < dense_reps; ++r) {
        const auto t0 = clock::now();
        const Direction d = solve_dense(kkt);
        const auto t1 = clock::now();
        sink += d.dx.back()(0);
        dense_ns.push_back(
            std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0)
                .count());
      }
      e.median_dense_ns = detail::median_ns(dense_ns);
    }
    if (!std::isfinite(sink)) throw std::runtime_error("bench produced NaN");
    table.entries.push_back(e);
  }
  // least-squares slope of log(time) vs log(N)
  if (table.entries.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(table.entries.size());
    for (const auto& e : table.entries) {
      const double lx = std::log(static_cast<double>(e.N));
      const double ly = std::log(static_cast<double>(e.median_pass_ns));
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    table.loglog_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return table;
}

inline std::string scaling_csv(const ScalingTable& t) {
  std::string out = "N,reps,median_pass_ns,median_dense_ns,loglog_slope\n";
  for (const auto& e : t.entries) {
    out += std::to_string(e.N) + "," + std::to_string(e.reps) + "," +
           std::to_string(e.median_pass_ns) + "," +
           std::to_string(e.median_dense_ns) + "," +
           format_double(t.loglog_slope) + "\n";
  }
  return out;
}

/// Executes one configured run and writes convergence.csv / summary.json
/// (and trajectory.csv / scaling.csv when requested) into cfg.out_dir.
/// Returns 0 on success; nonzero when the solve did not converge, with the
/// diagnostic recorded in summary.json either way.
inline int run(RunConfig cfg) {
  detail::merge_config_file(cfg);
  namespace fs = std::filesystem;
  const fs::path out_dir(cfg.out_dir);
  fs::create_directories(out_dir);

  nlohmann::json summary;
  summary["schema_version"] = 1;
  summary["problem"] = cfg.problem;

  if (!cfg.bench_N.empty()) {
    const ScalingTable table =
        bench_scaling(cfg.problem, cfg.bench_N);
    detail::write_file(out_dir / "scaling.csv", scaling_csv(table));
    summary["mode"] = "bench";
    summary["loglog_slope"] = table.loglog_slope;
    auto& entries = summary["entries"] = nlohmann::json::array();
    for (const auto& e : table.entries) {
      entries.push_back({{"N", e.N},
                         {"reps", e.reps},
                         {"median_pass_ns", e.median_pass_ns},
                         {"median_dense_ns", e.median_dense_ns}});
    }
    detail::write_file(out_dir / "summary.json", summary.dump(2) + "\n");
    return 0;
  }

  const RegisteredProblem& reg = registered_problem(cfg.problem);
  ProblemSpec spec = reg.make();
  if (cfg.N) spec.N = *cfg.N;
  const std::vector<double> t_init =
      cfg.t_init.empty() ? reg.default_t_init : cfg.t_init;
  if (static_cast<int>(t_init.size()) != spec.num_switches()) {
    throw std::invalid_argument("t_init: expected " +
                                std::to_string(spec.num_switches()) +
                                " switch times");
  }
  const Iterate guess = make_initial_iterate(spec, t_init);

  SolverConfig scfg;
  if (cfg.tol) scfg.tol = *cfg.tol;
  if (cfg.max_iters) scfg.max_iters = *cfg.max_iters;
  if (cfg.gamma) scfg.gamma_ftb = *cfg.gamma;

  std::vector<double> oracle_dev;
  if (cfg.oracle_check) {
    if (spec.N > 64) {
      throw std::invalid_argument(
          "--oracle-check solves a dense system per iteration and is "
          "limited to N <= 64 (got N = " +
          std::to_string(spec.N) + ")");
    }
    scfg.observer = [&oracle_dev](const IterationInfo& info) {
      const DenseKkt kkt = assemble(info.sd);
      const Direction dense = solve_dense(kkt);
      oracle_dev.push_back(direction_deviation(info.dir, dense));
    };
  }

  const auto t0 = std::chrono::steady_clock::now();
  const Solution sol = solve(spec, guess, scfg);
  const auto t1 = std::chrono::steady_clock::now();
  const std::int64_t total_ns =
      std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();

  detail::write_file(out_dir / "convergence.csv",
                     log_csv(sol.log, cfg.oracle_check ? &oracle_dev : nullptr));
  if (cfg.emit_trajectory) {
    detail::write_file(out_dir / "trajectory.csv",
                       trajectory_csv(spec, sol.grid, sol.iterate));
  }

  summary["mode"] = "solve";
  summary["N"] = spec.N;
  summary["status"] = to_string(sol.status);
  summary["detail"] = sol.detail;
  summary["iterations"] = sol.iterations;
  summary["opt_error"] = sol.opt_error;
  summary["t_s"] = sol.iterate.switch_times();
  auto& is = summary["i_s"] = nlohmann::json::array();
  for (const auto& sw : sol.grid.switches) is.push_back(sw.index);
  summary["total_ns"] = total_ns;
  summary["per_iteration_ns"] =
      sol.iterations > 0 ? total_ns / sol.iterations : total_ns;
  if (cfg.oracle_check && !oracle_dev.empty()) {
    summary["oracle_max_deviation"] =
        *std::max_element(oracle_dev.begin(), oracle_dev.end());
  }
  detail::write_file(out_dir / "summary.json", summary.dump(2) + "\n");

  return sol.status == SolveStatus::Converged ? 0 : 1;
}

}  // namespace stoc
