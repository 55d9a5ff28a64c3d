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

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "stoc/model.hpp"

namespace stoc {

/// Grid construction failure: unordered switch times or two switches
/// landing in one interval.
struct GridError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Placement of one switch on the shooting grid: the switch happens inside
/// interval `index` (between nodes index and index+1), `offset` seconds
/// after node `index`, offset in [0, dt).
struct SwitchStage {
  int index = 0;
  double offset = 0.0;
};

/// Uniform shooting grid over [t0, t0 + N*dt] plus per-switch placement.
struct GridLayout {
  int N = 0;
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<SwitchStage> switches;

  double tf() const { return t0 + N * dt; }

  /// Ordinal of the switch inside interval `stage`, or -1.
  int switch_at(int stage) const {
    for (std::size_t j = 0; j < switches.size(); ++j) {
      if (switches[j].index == stage) return static_cast<int>(j);
    }
    return -1;
  }

  /// Subsystem-sequence phase active on the pre-switch part of `stage`.
  int phase_of(int stage) const {
    int phase = 0;
    for (const auto& sw : switches) {
      if (sw.index < stage) ++phase;
    }
    return phase;
  }
};

namespace detail {

inline GridLayout layout_switches(double t0, double dt, int N,
                                  const std::vector<double>& times) {
  GridLayout g;
  g.N = N;
  g.t0 = t0;
  g.dt = dt;
  g.switches.reserve(times.size());
  const double tf = t0 + N * dt;
  int prev_index = -1;
  double prev_time = t0 - 1.0;
  for (double ts : times) {
    if (!(ts >= t0 && ts <= tf)) {
      throw GridError("switch time " + std::to_string(ts) +
                      " outside horizon [" + std::to_string(t0) + ", " +
                      std::to_string(tf) + "]");
    }
    if (!(ts > prev_time)) {
      throw GridError("switch times must be strictly increasing");
    }
    int idx = static_cast<int>(std::floor((ts - t0) / dt));
    if (idx > N - 1) idx = N - 1;
    if (idx < 0) idx = 0;
    double off = ts - t0 - idx * dt;
    // floating point can put off just outside [0, dt); renormalize
    if (off < 0.0 && idx > 0) {
      --idx;
      off = ts - t0 - idx * dt;
    }
    if (off >= dt && idx < N - 1) {
      ++idx;
      off = ts - t0 - idx * dt;
    }
    if (idx <= prev_index) {
      throw GridError(
          "two switches fall in shooting interval " + std::to_string(idx) +
          "; the grid cannot separate them (increase N)");
    }
    g.switches.push_back({idx, off});
    prev_index = idx;
    prev_time = ts;
  }
  return g;
}

}  // namespace detail

/// Places each switching instant on the shooting grid of `spec`.
/// Throws GridError on unordered times or an interval collision.
inline GridLayout build_grid(const ProblemSpec& spec,
                             const std::vector<double>& switch_times) {
  if (static_cast<int>(switch_times.size()) != spec.num_switches()) {
    throw std::invalid_argument("build_grid: expected " +
                                std::to_string(spec.num_switches()) +
                                " switch times, got " +
                                std::to_string(switch_times.size()));
  }
  return detail::layout_switches(spec.t0, spec.dt(), spec.N, switch_times);
}

}  // namespace stoc
