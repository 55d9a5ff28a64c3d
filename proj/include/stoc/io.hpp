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

#include <charconv>
#include <cstdio>
#include <string>
#include <vector>

#include "stoc/grid.hpp"
#include "stoc/iterate.hpp"
#include "stoc/solver.hpp"

namespace stoc {

/// Shortest decimal string that round-trips the double exactly.
inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

/// Convergence log as CSV. Columns: iter, opt_error, alpha, one t_s_k and
/// is_k column per switch, pass timings, and optionally a per-iteration
/// oracle deviation column.
inline std::string log_csv(const ConvergenceLog& log,
                           const std::vector<double>* oracle_dev = nullptr) {
  const std::size_t S =
      log.records.empty() ? 0 : log.records.front().t_s.size();
  std::string out = "iter,opt_error,alpha";
  for (std::size_t s = 1; s <= S; ++s) out += ",t_s_" + std::to_string(s);
  for (std::size_t s = 1; s <= S; ++s) out += ",is_" + std::to_string(s);
  out += ",t_backward_ns,t_forward_ns";
  if (oracle_dev) out += ",oracle_dev";
  out += "\n";
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    const auto& r = log.records[i];
    out += std::to_string(r.iter) + "," + format_double(r.opt_error) + "," +
           format_double(r.alpha);
    for (double t : r.t_s) out += "," + format_double(t);
    for (int idx : r.i_s) out += "," + std::to_string(idx);
    out += "," + std::to_string(r.backward_ns) + "," +
           std::to_string(r.forward_ns);
    if (oracle_dev) out += "," + format_double((*oracle_dev)[i]);
    out += "\n";
  }
  return out;
}

/// Convergence log as JSON lines, one record per line.
inline std::string log_json_lines(const ConvergenceLog& log) {
  std::string out;
  for (const auto& r : log.records) {
    out += "{\"iter\":" + std::to_string(r.iter) +
           ",\"opt_error\":" + format_double(r.opt_error) +
           ",\"alpha\":" + format_double(r.alpha) + ",\"t_s\":[";
    for (std::size_t s = 0; s < r.t_s.size(); ++s) {
      out += (s ? "," : "") + format_double(r.t_s[s]);
    }
    out += "],\"i_s\":[";
    for (std::size_t s = 0; s < r.i_s.size(); ++s) {
      out += (s ? "," : "") + std::to_string(r.i_s[s]);
    }
    out += "],\"backward_ns\":" + std::to_string(r.backward_ns) +
           ",\"forward_ns\":" + std::to_string(r.forward_ns) + "}\n";
  }
  return out;
}

/// Trajectory as CSV: one row per shooting node plus one per switch node,
/// in time order. Columns t, x1..xnx, u1..unu; the terminal row leaves the
/// input columns empty.
inline std::string trajectory_csv(const ProblemSpec& spec,
                                  const GridLayout& grid, const Iterate& it) {
  const int nx = spec.model.nx;
  const int nu = spec.model.nu;
  std::string out = "t";
  for (int i = 1; i <= nx; ++i) out += ",x" + std::to_string(i);
  for (int i = 1; i <= nu; ++i) out += ",u" + std::to_string(i);
  out += "\n";
  auto row = [&](double t, const Vec& x, const Vec* u) {
    out += format_double(t);
    for (int c = 0; c < nx; ++c) out += "," + format_double(x(c));
    for (int c = 0; c < nu; ++c) out += u ? "," + format_double((*u)(c)) : ",";
    out += "\n";
  };
  for (int i = 0; i < grid.N; ++i) {
    const std::size_t ui = static_cast<std::size_t>(i);
    row(grid.t0 + i * grid.dt, it.x[ui], &it.u[ui]);
    const int j = grid.switch_at(i);
    if (j >= 0) {
      const auto& sp = it.switches[static_cast<std::size_t>(j)];
      row(sp.t, sp.x, &sp.u);
    }
  }
  row(grid.tf(), it.x[static_cast<std::size_t>(grid.N)], nullptr);
  return out;
}

}  // namespace stoc
