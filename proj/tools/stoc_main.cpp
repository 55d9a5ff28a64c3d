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

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stoc/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Optimal control of switched systems: Newton iteration with a "
      "switch-aware Riccati recursion"};

  stoc::RunConfig cfg;
  int n_override = 0;
  double tol_override = 0.0;
  int max_iters_override = 0;
  double gamma_override = 0.0;

  app.add_option("--problem", cfg.problem,
                 "registered problem name (example1, example2)");
  app.add_option("--config", cfg.config_path, "JSON config file");
  auto* n_opt = app.add_option("--N", n_override, "shooting interval count");
  auto* tol_opt = app.add_option("--tol", tol_override, "optimality tolerance");
  auto* mi_opt =
      app.add_option("--max-iters", max_iters_override, "iteration cap");
  auto* g_opt = app.add_option("--gamma", gamma_override,
                               "fraction-to-boundary parameter in (0,1)");
  app.add_option("--t-init", cfg.t_init,
                 "initial switching instants (comma separated)")
      ->delimiter(',');
  app.add_option("--out", cfg.out_dir, "output directory");
  app.add_flag("--oracle-check", cfg.oracle_check,
               "cross-check every Newton direction against a dense KKT "
               "solve (N <= 64)");
  app.add_flag("--emit-trajectory", cfg.emit_trajectory,
               "write trajectory.csv");
  app.add_option("--bench-scaling", cfg.bench_N,
                 "run the pass-time scaling benchmark over these horizon "
                 "lengths instead of solving")
      ->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  if (*n_opt) cfg.N = n_override;
  if (*tol_opt) cfg.tol = tol_override;
  if (*mi_opt) cfg.max_iters = max_iters_override;
  if (*g_opt) cfg.gamma = gamma_override;

  try {
    return stoc::run(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
