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

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stoc/types.hpp"

namespace stoc {

/// One mode of a switched system: continuous dynamics x' = f(x,u), running
/// cost L(x,u), terminal cost phi(x), and their exact first/second
/// derivatives. All callables must be pure functions; the solver
/// re-evaluates them at arbitrary points and may do so concurrently.
///
/// Derivative conventions (column-gradient): f_x = df/dx (nx by nx),
/// f_u = df/du (nx by nu), cost_x = dL/dx as a column (nx), cost_xu =
/// d(cost_x)/du (nx by nu). lf_* are second derivatives of lambda'f(x,u)
/// with respect to (x,u) for a fixed multiplier lambda.
struct Subsystem {
  std::function<Vec(const Vec&, const Vec&)> f;
  std::function<Mat(const Vec&, const Vec&)> f_x;
  std::function<Mat(const Vec&, const Vec&)> f_u;

  std::function<double(const Vec&, const Vec&)> cost;
  std::function<Vec(const Vec&, const Vec&)> cost_x;
  std::function<Vec(const Vec&, const Vec&)> cost_u;
  std::function<Mat(const Vec&, const Vec&)> cost_xx;
  std::function<Mat(const Vec&, const Vec&)> cost_xu;
  std::function<Mat(const Vec&, const Vec&)> cost_uu;

  std::function<Mat(const Vec&, const Vec&, const Vec&)> lf_xx;
  std::function<Mat(const Vec&, const Vec&, const Vec&)> lf_xu;
  std::function<Mat(const Vec&, const Vec&, const Vec&)> lf_uu;

  std::function<double(const Vec&)> terminal;
  std::function<Vec(const Vec&)> terminal_x;
  std::function<Mat(const Vec&)> terminal_xx;
};

/// A switched system: state/input dimensions and the subsystem list.
/// Subsystems are addressed by 0-based index.
struct SwitchedModel {
  int nx = 0;
  int nu = 0;
  std::vector<Subsystem> subsystems;

  int num_subsystems() const { return static_cast<int>(subsystems.size()); }

  const Subsystem& at(int q) const {
    if (q < 0 || q >= num_subsystems()) {
      throw std::out_of_range("subsystem index " + std::to_string(q) +
                              " out of range [0, " +
                              std::to_string(num_subsystems()) + ")");
    }
    return subsystems[static_cast<std::size_t>(q)];
  }
};

/// H_q(x,u,lambda) = L_q(x,u) + lambda' f_q(x,u).
inline double eval_hamiltonian(const SwitchedModel& m, int q, const Vec& x,
                               const Vec& u, const Vec& lambda) {
  const Subsystem& s = m.at(q);
  if (x.size() != m.nx || lambda.size() != m.nx || u.size() != m.nu) {
    throw std::invalid_argument("eval_hamiltonian: dimension mismatch");
  }
  return s.cost(x, u) + lambda.dot(s.f(x, u));
}

inline Vec hamiltonian_x(const Subsystem& s, const Vec& x, const Vec& u,
                         const Vec& lambda) {
  return s.cost_x(x, u) + s.f_x(x, u).transpose() * lambda;
}

inline Vec hamiltonian_u(const Subsystem& s, const Vec& x, const Vec& u,
                         const Vec& lambda) {
  return s.cost_u(x, u) + s.f_u(x, u).transpose() * lambda;
}

inline Mat hamiltonian_xx(const Subsystem& s, const Vec& x, const Vec& u,
                          const Vec& lambda) {
  return s.cost_xx(x, u) + s.lf_xx(x, u, lambda);
}

inline Mat hamiltonian_xu(const Subsystem& s, const Vec& x, const Vec& u,
                          const Vec& lambda) {
  return s.cost_xu(x, u) + s.lf_xu(x, u, lambda);
}

inline Mat hamiltonian_uu(const Subsystem& s, const Vec& x, const Vec& u,
                          const Vec& lambda) {
  return s.cost_uu(x, u) + s.lf_uu(x, u, lambda);
}

/// Fixed-sequence switched OCP on [t0, tf]: minimize terminal plus running
/// cost over states, inputs, and the switching instants between consecutive
/// entries of `sequence`. `t_bounds` (one [min,max] per switch) may be left
/// empty, in which case slightly interior defaults are used so the
/// fraction-to-boundary step rule stays well posed.
struct ProblemSpec {
  SwitchedModel model;
  double t0 = 0.0;
  double tf = 1.0;
  int N = 0;
  std::vector<int> sequence;
  Vec x_init;
  std::vector<std::array<double, 2>> t_bounds;

  int num_switches() const { return static_cast<int>(sequence.size()) - 1; }
  double dt() const { return (tf - t0) / N; }
};

/// Resolved bounds for switch s: explicit if given, else [t0+d, tf-d] with
/// d = 1e-3*dt so a bound is never exactly a horizon endpoint.
inline std::array<double, 2> switch_bounds(const ProblemSpec& spec, int s) {
  if (!spec.t_bounds.empty()) {
    return spec.t_bounds.at(static_cast<std::size_t>(s));
  }
  const double delta = 1e-3 * spec.dt();
  return {spec.t0 + delta, spec.tf - delta};
}

namespace detail {

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline double sym_error(const Mat& m) {
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

}  // namespace detail

/// Checks dimensional consistency of all callables and symmetry of the
/// supplied Hessians at one probe point. Throws std::invalid_argument.
inline void validate_model(const SwitchedModel& m, const Vec& x, const Vec& u) {
  using detail::require;
  require(m.nx >= 1 && m.nu >= 1, "model: nx and nu must be positive");
  require(m.num_subsystems() >= 1, "model: at least one subsystem required");
  require(x.size() == m.nx && u.size() == m.nu,
          "validate_model: probe point dimension mismatch");
  const Vec lambda = Vec::Ones(m.nx);
  for (int q = 0; q < m.num_subsystems(); ++q) {
    const Subsystem& s = m.subsystems[static_cast<std::size_t>(q)];
    const std::string tag = "subsystem " + std::to_string(q) + ": ";
    require(bool(s.f) && bool(s.f_x) && bool(s.f_u) && bool(s.cost) &&
                bool(s.cost_x) && bool(s.cost_u) && bool(s.cost_xx) &&
                bool(s.cost_xu) && bool(s.cost_uu) && bool(s.lf_xx) &&
                bool(s.lf_xu) && bool(s.lf_uu) && bool(s.terminal) &&
                bool(s.terminal_x) && bool(s.terminal_xx),
            tag + "missing callable");
    require(s.f(x, u).size() == m.nx, tag + "f dimension");
    require(s.f_x(x, u).rows() == m.nx && s.f_x(x, u).cols() == m.nx,
            tag + "f_x dimension");
    require(s.f_u(x, u).rows() == m.nx && s.f_u(x, u).cols() == m.nu,
            tag + "f_u dimension");
    require(s.cost_x(x, u).size() == m.nx, tag + "cost_x dimension");
    require(s.cost_u(x, u).size() == m.nu, tag + "cost_u dimension");
    const Mat lxx = s.cost_xx(x, u);
    const Mat lxu = s.cost_xu(x, u);
    const Mat luu = s.cost_uu(x, u);
    require(lxx.rows() == m.nx && lxx.cols() == m.nx, tag + "cost_xx dimension");
    require(lxu.rows() == m.nx && lxu.cols() == m.nu, tag + "cost_xu dimension");
    require(luu.rows() == m.nu && luu.cols() == m.nu, tag + "cost_uu dimension");
    const Mat hxx = s.lf_xx(x, u, lambda);
    const Mat huu = s.lf_uu(x, u, lambda);
    require(detail::sym_error(lxx) <= 1e-12, tag + "cost_xx not symmetric");
    require(detail::sym_error(luu) <= 1e-12, tag + "cost_uu not symmetric");
    require(detail::sym_error(hxx) <= 1e-12, tag + "lf_xx not symmetric");
    require(detail::sym_error(huu) <= 1e-12, tag + "lf_uu not symmetric");
    require(s.terminal_x(x).size() == m.nx, tag + "terminal_x dimension");
    require(detail::sym_error(s.terminal_xx(x)) <= 1e-12,
            tag + "terminal_xx not symmetric");
  }
}

/// Validates the full problem definition (horizon, sequence, bounds).
inline void validate(const ProblemSpec& spec) {
  using detail::require;
  require(spec.t0 < spec.tf, "spec: t0 < tf required");
  const int m = static_cast<int>(spec.sequence.size());
  require(m >= 1, "spec: empty switching sequence");
  require(spec.N >= m, "spec: N must be at least the number of phases");
  for (int q : spec.sequence) {
    require(q >= 0 && q < spec.model.num_subsystems(),
            "spec: sequence entry out of range");
  }
  require(spec.x_init.size() == spec.model.nx, "spec: x_init dimension");
  if (!spec.t_bounds.empty()) {
    require(static_cast<int>(spec.t_bounds.size()) == spec.num_switches(),
            "spec: one bound pair per switch required");
    for (const auto& b : spec.t_bounds) {
      require(spec.t0 <= b[0] && b[0] < b[1] && b[1] <= spec.tf,
              "spec: switch bounds must satisfy t0 <= min < max <= tf");
    }
  }
  validate_model(spec.model, spec.x_init, Vec::Zero(spec.model.nu));
}

}  // namespace stoc
