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
#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "stoc/grid.hpp"
#include "stoc/iterate.hpp"
#include "stoc/riccati.hpp"
#include "stoc/transcription.hpp"

namespace stoc {

/// Per-iteration view handed to SolverConfig::observer after the direction
/// has been computed and the step size chosen, before the update.
struct IterationInfo {
  int iter;
  double opt_error;
  double alpha;
  const StageData& sd;
  const RiccatiFactors& rf;
  const Direction& dir;
  const Iterate& it;
  const GridLayout& grid;
};

struct SolverConfig {
  double tol = 1e-8;
  int max_iters = 200;
  double gamma_ftb = 0.995;  // fraction-to-boundary parameter, in (0,1)
  std::vector<std::array<double, 2>> t_bounds;  // override; empty = use spec
  double regularization = 0.0;  // shift added to input-block Hessians
  int verbosity = 0;
  std::function<void(const IterationInfo&)> observer;
};

struct IterationRecord {
  int iter = 0;
  double opt_error = 0.0;
  double alpha = 0.0;
  std::vector<double> t_s;
  std::vector<int> i_s;
  std::int64_t backward_ns = 0;
  std::int64_t forward_ns = 0;
};

struct ConvergenceLog {
  std::vector<IterationRecord> records;
};

enum class SolveStatus { Converged, MaxIters, AssumptionViolated };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::MaxIters: return "MaxIters";
    case SolveStatus::AssumptionViolated: return "AssumptionViolated";
  }
  return "Unknown";
}

struct Solution {
  Iterate iterate;
  GridLayout grid;
  SolveStatus status = SolveStatus::MaxIters;
  std::string detail;
  int iterations = 0;
  double opt_error = 0.0;
  ConvergenceLog log;
};

/// Largest step in (0, 1] keeping every switching instant a gamma-fraction
/// away from its bounds: for each moving t, alpha is capped at
/// gamma*(t - t_min)/(-dt) when dt < 0 and gamma*(t_max - t)/dt when dt > 0.
inline double fraction_to_boundary(const std::vector<double>& t,
                                   const std::vector<double>& dt,
                                   const std::vector<std::array<double, 2>>& bounds,
                                   double gamma) {
  double alpha = 1.0;
  for (std::size_t s = 0; s < t.size(); ++s) {
    if (dt[s] < 0.0) {
      alpha = std::min(alpha, gamma * (t[s] - bounds[s][0]) / (-dt[s]));
    } else if (dt[s] > 0.0) {
      alpha = std::min(alpha, gamma * (bounds[s][1] - t[s]) / dt[s]);
    }
  }
  return alpha;
}

/// it + alpha * d over every primal, dual, and switching-time variable.
inline Iterate update_iterate(const Iterate& it, const Direction& d,
                              double alpha) {
  Iterate out = it;
  for (std::size_t i = 0; i < out.x.size(); ++i) out.x[i] += alpha * d.dx[i];
  for (std::size_t i = 0; i < out.u.size(); ++i) out.u[i] += alpha * d.du[i];
  for (std::size_t i = 0; i < out.lambda.size(); ++i) {
    out.lambda[i] += alpha * d.dlambda[i];
  }
  for (std::size_t j = 0; j < out.switches.size(); ++j) {
    out.switches[j].x += alpha * d.switches[j].dx;
    out.switches[j].u += alpha * d.switches[j].du;
    out.switches[j].lambda += alpha * d.switches[j].dlambda;
    out.switches[j].t += alpha * d.switches[j].dt;
  }
  return out;
}

/// Re-places every switch on the grid after a switching-time update. The
/// switch-node variables ride along unchanged; only indices/offsets move.
/// Throws GridError if two switches land in one interval.
inline GridLayout migrate_switch_stage(const GridLayout& grid,
                                       const Iterate& it) {
  return detail::layout_switches(grid.t0, grid.dt, grid.N, it.switch_times());
}

namespace detail {

inline std::vector<std::array<double, 2>> resolve_bounds(
    const ProblemSpec& spec, const SolverConfig& cfg) {
  if (!cfg.t_bounds.empty()) {
    require(static_cast<int>(cfg.t_bounds.size()) == spec.num_switches(),
            "config: one bound pair per switch required");
    return cfg.t_bounds;
  }
  std::vector<std::array<double, 2>> b;
  b.reserve(static_cast<std::size_t>(spec.num_switches()));
  for (int s = 0; s < spec.num_switches(); ++s) {
    b.push_back(switch_bounds(spec, s));
  }
  return b;
}

}  // namespace detail

/// Newton iteration on the transcribed optimality system: linearize, run
/// the backward/forward Riccati passes, pick the fraction-to-boundary step,
/// update, and re-place the switches on the grid; stops when the residual
/// norm drops to cfg.tol. Negative curvature surfaces as
/// SolveStatus::AssumptionViolated with the iteration index in `detail`.
inline Solution solve(const ProblemSpec& spec, const Iterate& guess,
                      const SolverConfig& cfg) {
  validate(spec);
  check_dimensions(spec, guess);
  detail::require(cfg.tol > 0.0, "config: tol must be positive");
  detail::require(cfg.gamma_ftb > 0.0 && cfg.gamma_ftb < 1.0,
                  "config: gamma_ftb must lie in (0,1)");
  const auto bounds = detail::resolve_bounds(spec, cfg);
  for (int s = 0; s < spec.num_switches(); ++s) {
    const double t = guess.switches[static_cast<std::size_t>(s)].t;
    detail::require(t > bounds[static_cast<std::size_t>(s)][0] &&
                        t < bounds[static_cast<std::size_t>(s)][1],
                    "guess: switch time must lie strictly inside its bounds");
  }

  using clock = std::chrono::steady_clock;
  Solution sol;
  sol.iterate = guess;
  sol.grid = build_grid(spec, guess.switch_times());

  for (int k = 0; k < cfg.max_iters; ++k) {
    const Residuals res = compute_residuals(spec, sol.grid, sol.iterate);
    const double err = opt_error(res);
    if (err <= cfg.tol) {
      sol.status = SolveStatus::Converged;
      sol.iterations = k;
      sol.opt_error = err;
      return sol;
    }

    StageData sd = linearize(spec, sol.grid, sol.iterate);
    RiccatiFactors rf;
    Direction dir;
    std::int64_t backward_ns = 0;
    std::int64_t forward_ns = 0;
    try {
      auto tb0 = clock::now();
      rf = backward_pass(sd, cfg.regularization);
      auto tb1 = clock::now();
      dir = forward_pass(sd, rf);
      auto tb2 = clock::now();
      backward_ns =
          std::chrono::duration_cast<std::chrono::nanoseconds>(tb1 - tb0)
              .count();
      forward_ns =
          std::chrono::duration_cast<std::chrono::nanoseconds>(tb2 - tb1)
              .count();
    } catch (const AssumptionViolation& e) {
      sol.status = SolveStatus::AssumptionViolated;
      sol.detail = std::string(e.what()) + " (iteration " + std::to_string(k) + ")";
      sol.iterations = k;
      sol.opt_error = err;
      return sol;
    }

    std::vector<double> dts;
    dts.reserve(dir.switches.size());
    for (const auto& s : dir.switches) dts.push_back(s.dt);
    const double alpha =
        fraction_to_boundary(sol.iterate.switch_times(), dts, bounds,
                             cfg.gamma_ftb);

    IterationRecord rec;
    rec.iter = k;
    rec.opt_error = err;
    rec.alpha = alpha;
    rec.t_s = sol.iterate.switch_times();
    for (const auto& sw : sol.grid.switches) rec.i_s.push_back(sw.index);
    rec.backward_ns = backward_ns;
    rec.forward_ns = forward_ns;
    sol.log.records.push_back(std::move(rec));

    if (cfg.observer) {
      cfg.observer(
          IterationInfo{k, err, alpha, sd, rf, dir, sol.iterate, sol.grid});
    }

    sol.iterate = update_iterate(sol.iterate, dir, alpha);
    try {
      sol.grid = migrate_switch_stage(sol.grid, sol.iterate);
    } catch (const GridError& e) {
      sol.status = SolveStatus::AssumptionViolated;
      sol.detail = std::string(e.what()) + " (iteration " + std::to_string(k) + ")";
      sol.iterations = k + 1;
      sol.opt_error = err;
      return sol;
    }
  }

  sol.status = SolveStatus::MaxIters;
  sol.iterations = cfg.max_iters;
  sol.opt_error = opt_error(compute_residuals(spec, sol.grid, sol.iterate));
  return sol;
}

}  // namespace stoc
