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

#include <stdexcept>
#include <vector>

#include "stoc/model.hpp"

namespace stoc {

/// Extra optimization variables attached to one switch: the state/input
/// just after the switch, the multiplier of the pre-switch dynamics
/// constraint, and the switching instant itself.
struct SwitchPoint {
  Vec x;
  Vec u;
  Vec lambda;
  double t = 0.0;
};

/// Full primal-dual point: states/inputs/costates at every shooting node
/// plus one SwitchPoint per switch.
struct Iterate {
  std::vector<Vec> x;       // 0..N
  std::vector<Vec> u;       // 0..N-1
  std::vector<Vec> lambda;  // 0..N
  std::vector<SwitchPoint> switches;

  std::vector<double> switch_times() const {
    std::vector<double> t;
    t.reserve(switches.size());
    for (const auto& s : switches) t.push_back(s.t);
    return t;
  }
};

/// Newton direction; mirrors Iterate, plus a time direction per switch.
struct Direction {
  std::vector<Vec> dx;
  std::vector<Vec> du;
  std::vector<Vec> dlambda;
  struct SwitchDirection {
    Vec dx;
    Vec du;
    Vec dlambda;
    double dt = 0.0;
  };
  std::vector<SwitchDirection> switches;

  double max_abs() const {
    double m = 0.0;
    auto upd = [&m](const Vec& v) {
      if (v.size() > 0) m = std::max(m, v.cwiseAbs().maxCoeff());
    };
    for (const auto& v : dx) upd(v);
    for (const auto& v : du) upd(v);
    for (const auto& v : dlambda) upd(v);
    for (const auto& s : switches) {
      upd(s.dx);
      upd(s.du);
      upd(s.dlambda);
      m = std::max(m, std::abs(s.dt));
    }
    return m;
  }
};

/// Constant-trajectory starting point: every state at x_init, inputs zero,
/// costates zero, switching instants as given.
inline Iterate make_initial_iterate(const ProblemSpec& spec,
                                    const std::vector<double>& t_init) {
  if (static_cast<int>(t_init.size()) != spec.num_switches()) {
    throw std::invalid_argument("make_initial_iterate: expected " +
                                std::to_string(spec.num_switches()) +
                                " switch times");
  }
  const int nx = spec.model.nx;
  const int nu = spec.model.nu;
  Iterate it;
  it.x.assign(static_cast<std::size_t>(spec.N + 1), spec.x_init);
  it.u.assign(static_cast<std::size_t>(spec.N), Vec::Zero(nu));
  it.lambda.assign(static_cast<std::size_t>(spec.N + 1), Vec::Zero(nx));
  it.switches.reserve(t_init.size());
  for (double t : t_init) {
    it.switches.push_back({spec.x_init, Vec::Zero(nu), Vec::Zero(nx), t});
  }
  return it;
}

inline void check_dimensions(const ProblemSpec& spec, const Iterate& it) {
  using detail::require;
  const std::size_t n = static_cast<std::size_t>(spec.N);
  require(it.x.size() == n + 1 && it.u.size() == n && it.lambda.size() == n + 1,
          "iterate: trajectory length mismatch");
  require(static_cast<int>(it.switches.size()) == spec.num_switches(),
          "iterate: switch count mismatch");
  for (const auto& v : it.x) {
    require(v.size() == spec.model.nx, "iterate: state dimension");
  }
  for (const auto& v : it.u) {
    require(v.size() == spec.model.nu, "iterate: input dimension");
  }
  for (const auto& v : it.lambda) {
    require(v.size() == spec.model.nx, "iterate: costate dimension");
  }
  for (const auto& s : it.switches) {
    require(s.x.size() == spec.model.nx && s.u.size() == spec.model.nu &&
                s.lambda.size() == spec.model.nx,
            "iterate: switch point dimension");
  }
  for (std::size_t j = 1; j < it.switches.size(); ++j) {
    require(it.switches[j - 1].t < it.switches[j].t,
            "iterate: switch times must be strictly increasing");
  }
}

}  // namespace stoc
