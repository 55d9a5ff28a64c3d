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

// End-to-end acceptance suite. Each criterion prints exactly one line:
//   [PASS|FAIL] criterion N: <what was measured>
// and the process exits nonzero if any criterion failed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "stoc/derivative_check.hpp"
#include "stoc/kkt_oracle.hpp"
#include "stoc/problems.hpp"
#include "stoc/solver.hpp"
#include "support/random_instances.hpp"

using namespace stoc;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& text) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
              text.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

struct RunInstrumentation {
  double max_p_asymmetry = 0.0;
  double min_xi_tilde = std::numeric_limits<double>::infinity();
  bool bounds_ok = true;
  double max_dir_at_zero_residual = -1.0;

  void observe(const IterationInfo& info,
               const std::vector<std::array<double, 2>>& bounds) {
    for (const auto& P : info.rf.P) {
      const double scale = 1.0 + P.cwiseAbs().maxCoeff();
      max_p_asymmetry = std::max(
          max_p_asymmetry,
          (P - P.transpose()).cwiseAbs().maxCoeff() / scale);
    }
    for (const auto& f : info.rf.sw) {
      const double scale = 1.0 + f.P_post.cwiseAbs().maxCoeff();
      max_p_asymmetry = std::max(
          max_p_asymmetry,
          (f.P_post - f.P_post.transpose()).cwiseAbs().maxCoeff() / scale);
      min_xi_tilde = std::min(min_xi_tilde, f.xi_tilde);
    }
    for (std::size_t s = 0; s < info.it.switches.size(); ++s) {
      const double t = info.it.switches[s].t;
      if (!(t > bounds[s][0] && t < bounds[s][1])) bounds_ok = false;
    }
  }
};

std::int64_t median_pass_ns(const StageData& sd, int reps) {
  using clock = std::chrono::steady_clock;
  std::vector<std::int64_t> samples;
  samples.reserve(static_cast<std::size_t>(reps));
  double sink = 0.0;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = clock::now();
    const RiccatiFactors rf = backward_pass(sd);
    const Direction d = forward_pass(sd, rf);
    const auto t1 = clock::now();
    sink += d.dx.back()(0);
    samples.push_back(
        std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
  }
  if (!std::isfinite(sink)) std::abort();
  std::sort(samples.begin(), samples.end());
  return samples[samples.size() / 2];
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

int main() {
  // --- criterion 1: example 1 reproduction -------------------------------
  Solution sol1;
  RunInstrumentation instr1;
  {
    const ProblemSpec spec = make_example1();
    const Iterate guess = make_initial_iterate(spec, {1.0});
    SolverConfig cfg;
    cfg.observer = [&](const IterationInfo& info) {
      instr1.observe(info, {{{spec.t0, spec.tf}}});
    };
    const auto t0 = std::chrono::steady_clock::now();
    sol1 = solve(spec, guess, cfg);
    const auto t1 = std::chrono::steady_clock::now();
    const double seconds = std::chrono::duration<double>(t1 - t0).count();
    const double ts = sol1.iterate.switches[0].t;
    const bool pass = sol1.status == SolveStatus::Converged &&
                      sol1.opt_error <= 1e-8 &&
                      std::abs(ts - 0.1919) <= 2e-3 && sol1.iterations >= 11 &&
                      sol1.iterations <= 23 && seconds < 1.0;
    report(1, pass,
           "example 1: status " + std::string(to_string(sol1.status)) +
               ", t_1 = " + fmt(ts) + " (0.1919 +- 2e-3), " +
               std::to_string(sol1.iterations) + " iterations (17 +- 6), " +
               "opt_error = " + fmt(sol1.opt_error) + ", " + fmt(seconds) +
               " s (< 1 s)");
  }

  // --- criterion 2: example 2 reproduction -------------------------------
  {
    const ProblemSpec spec = make_example2();
    const Iterate guess = make_initial_iterate(spec, {0.5, 1.0});
    SolverConfig cfg;
    cfg.max_iters = 120;
    const auto t0 = std::chrono::steady_clock::now();
    const Solution sol = solve(spec, guess, cfg);
    const auto t1 = std::chrono::steady_clock::now();
    const double per_iter_ms =
        std::chrono::duration<double, std::milli>(t1 - t0).count() /
        std::max(1, sol.iterations);
    const double ts1 = sol.iterate.switches[0].t;
    const double ts2 = sol.iterate.switches[1].t;
    const bool pass = sol.status == SolveStatus::Converged &&
                      std::abs(ts1 - 0.2335) <= 5e-3 &&
                      std::abs(ts2 - 1.0179) <= 5e-3 &&
                      sol.iterations <= 100 && per_iter_ms < 20.0;
    report(2, pass,
           "example 2: status " + std::string(to_string(sol.status)) +
               ", t_1 = " + fmt(ts1) + " (0.2335 +- 5e-3), t_2 = " + fmt(ts2) +
               " (1.0179 +- 5e-3), " + std::to_string(sol.iterations) +
               " iterations (<= 100), " + fmt(per_iter_ms) +
               " ms/iteration (< 20)");
  }

  // --- criterion 3: oracle equivalence on 50 seeded instances ------------
  double worst_dev = 0.0;
  double instance_p_asym = 0.0;
  double instance_min_xi = std::numeric_limits<double>::infinity();
  bool xi_all_positive = true;
  {
    const int nx_opts[] = {2, 4};
    const int nu_opts[] = {1, 2};
    int produced = 0;
    std::uint64_t seed = 1;
    while (produced < 50) {
      testing::InstanceParams p;
      p.nx = nx_opts[produced % 2];
      p.nu = nu_opts[(produced / 2) % 2];
      p.N = 5 + (produced * 7) % 21;  // 5..25
      p.num_switches = produced % 3;  // 0, 1, 2
      p.seed = seed++;
      StageData sd;
      try {
        sd = testing::accepted_instance(p);
      } catch (const std::exception&) {
        continue;
      }
      RiccatiFactors rf;
      try {
        rf = backward_pass(sd);
      } catch (const AssumptionViolation&) {
        xi_all_positive = false;  // PD reduced Hessian must not abort
        ++produced;
        continue;
      }
      for (const auto& P : rf.P) {
        const double scale = 1.0 + P.cwiseAbs().maxCoeff();
        instance_p_asym =
            std::max(instance_p_asym,
                     (P - P.transpose()).cwiseAbs().maxCoeff() / scale);
      }
      for (const auto& f : rf.sw) {
        instance_min_xi = std::min(instance_min_xi, f.xi_tilde);
        if (!(f.xi_tilde > 0.0)) xi_all_positive = false;
      }
      const Direction d = forward_pass(sd, rf);
      const Direction dense = solve_dense(assemble(sd));
      worst_dev = std::max(worst_dev, direction_deviation(d, dense));
      ++produced;
    }
    const bool pass = xi_all_positive && worst_dev <= 1e-9;
    report(3, pass,
           "50 random switched-LQ instances: max Riccati-vs-dense deviation "
           "= " + fmt(worst_dev) + " (<= 1e-9), all xi_tilde > 0: " +
               (xi_all_positive ? "yes" : "no"));
  }

  // --- criterion 4: quadratic tail convergence on example 1 --------------
  {
    std::vector<double> errs;
    for (const auto& r : sol1.log.records) errs.push_back(r.opt_error);
    errs.push_back(sol1.opt_error);
    bool pass = sol1.status == SolveStatus::Converged && errs.size() >= 4;
    double worst_c = 0.0;
    if (pass) {
      const std::size_t n = errs.size();
      for (std::size_t i = n - 4; i + 1 < n; ++i) {
        const auto& rec = sol1.log.records[i];
        const bool full_step = rec.alpha == 1.0;
        const bool same_stage =
            i + 1 < sol1.log.records.size()
                ? sol1.log.records[i].i_s == sol1.log.records[i + 1].i_s
                : rec.i_s[0] == sol1.grid.switches[0].index;
        if (!full_step || !same_stage) {
          pass = false;
          break;
        }
        const double c = errs[i + 1] / (errs[i] * errs[i]);
        worst_c = std::max(worst_c, c);
        if (!(c < 1e4)) pass = false;
      }
    }
    report(4, pass,
           "example 1 tail: err_{k+1} <= C err_k^2 over the last 3 "
           "full-step iterations, C = " + fmt(worst_c) + " (< 1e4)");
  }

  // --- criterion 5: linear scaling of the passes --------------------------
  {
    const RegisteredProblem& reg = registered_problem("example1");
    std::vector<int> n_list = {200, 400, 800, 1600};
    std::vector<std::int64_t> medians;
    for (int n : n_list) {
      ProblemSpec spec = reg.make();
      spec.N = n;
      const Iterate guess = make_initial_iterate(spec, reg.default_t_init);
      const GridLayout grid = build_grid(spec, reg.default_t_init);
      const StageData sd = linearize(spec, grid, guess);
      medians.push_back(median_pass_ns(sd, 101));
    }
    const double r1600_800 =
        static_cast<double>(medians[3]) / static_cast<double>(medians[2]);
    const double r1600_200 =
        static_cast<double>(medians[3]) / static_cast<double>(medians[0]);
    const bool pass = r1600_800 <= 2.5 && r1600_200 <= 10.0;
    report(5, pass,
           "median pass time N=200/400/800/1600: " +
               std::to_string(medians[0]) + "/" + std::to_string(medians[1]) +
               "/" + std::to_string(medians[2]) + "/" +
               std::to_string(medians[3]) + " ns; 1600/800 = " +
               fmt(r1600_800) + " (<= 2.5), 1600/200 = " + fmt(r1600_200) +
               " (<= 10)");
  }

  // --- criterion 6: property suite ----------------------------------------
  {
    // P symmetry and xi positivity across the instrumented example-1 run and
    // the randomized suite; bounds feasibility on every logged iterate
    RunInstrumentation instr2;
    const ProblemSpec spec2 = make_example2();
    SolverConfig cfg2;
    cfg2.max_iters = 120;
    cfg2.observer = [&](const IterationInfo& info) {
      instr2.observe(info, {{{spec2.t0, spec2.tf}, {spec2.t0, spec2.tf}}});
    };
    const Solution sol2 =
        solve(spec2, make_initial_iterate(spec2, {0.5, 1.0}), cfg2);

    // zero-residual instance maps to the zero direction
    testing::InstanceParams pz;
    pz.N = 9;
    pz.num_switches = 1;
    pz.seed = 8;
    pz.residual_scale = 0.0;
    const StageData sdz = testing::random_stage_data(pz);
    const Direction dz = forward_pass(sdz, backward_pass(sdz));

    // FD validation of both example models
    double fd_worst = 0.0;
    {
      const Vec x = (Vec(2) << 0.3, -0.7).finished();
      const Vec u = (Vec(1) << 0.2).finished();
      const Vec lambda = (Vec(2) << 0.6, -0.4).finished();
      for (const auto& r : check_derivatives(make_example1(), x, u, lambda, 1e-5)) {
        fd_worst = std::max(fd_worst, r.max_error());
      }
      for (const auto& r : check_derivatives(make_example2(), x, u, lambda, 1e-5)) {
        fd_worst = std::max(fd_worst, r.max_error());
      }
    }

    const double p_asym = std::max({instr1.max_p_asymmetry,
                                    instr2.max_p_asymmetry, instance_p_asym});
    const double min_xi = std::min(
        {instr1.min_xi_tilde, instr2.min_xi_tilde, instance_min_xi});
    const bool pass = p_asym <= 1e-10 && min_xi > 0.0 && instr1.bounds_ok &&
                      instr2.bounds_ok && sol2.status == SolveStatus::Converged &&
                      dz.max_abs() <= 1e-12 && fd_worst <= 1e-6;
    report(6, pass,
           "properties: max P asymmetry = " + fmt(p_asym) +
               " (<= 1e-10), min xi_tilde = " + fmt(min_xi) +
               " (> 0), bounds strictly kept: " +
               ((instr1.bounds_ok && instr2.bounds_ok) ? "yes" : "no") +
               ", zero-residual direction = " + fmt(dz.max_abs()) +
               " (<= 1e-12), FD validation = " + fmt(fd_worst) + " (<= 1e-6)");
  }

  // --- criterion 7: saddle detection on the bad example-2 guess ----------
  {
    const ProblemSpec spec = make_example2();
    const Iterate guess = make_initial_iterate(spec, {1.0, 2.0});
    SolverConfig cfg;
    cfg.max_iters = 400;
    const Solution sol = solve(spec, guess, cfg);
    bool pass = false;
    std::string what;
    if (sol.status == SolveStatus::AssumptionViolated) {
      pass = true;
      what = "AssumptionViolated (" + sol.detail + ")";
    } else if (sol.status == SolveStatus::Converged) {
      const StageData sd = linearize(spec, sol.grid, sol.iterate);
      const double min_eig = reduced_hessian_min_eig(assemble(sd));
      pass = min_eig <= 0.0;
      what = "Converged to a stationary point with reduced-Hessian min "
             "eigenvalue " + fmt(min_eig) + " (<= 0 certifies a saddle)";
    } else {
      what = "MaxIters without a diagnosis";
    }
    report(7, pass, "bad guess [1.0, 2.0]: " + what);
  }

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
