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
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "stoc/model.hpp"

namespace stoc {

/// A registered benchmark problem: the spec plus a default switching-time
/// guess.
struct RegisteredProblem {
  std::function<ProblemSpec()> make;
  std::vector<double> default_t_init;
};

namespace detail {

inline Subsystem quadratic_tracking_subsystem(const Mat& A, const Vec& b,
                                              const Vec& x_ref) {
  // dynamics A x + b u (single input), stage cost on x2 tracking plus u,
  // quadratic terminal tracking cost
  Subsystem s;
  s.f = [A, b](const Vec& x, const Vec& u) -> Vec { return A * x + b * u(0); };
  s.f_x = [A](const Vec&, const Vec&) -> Mat { return A; };
  s.f_u = [b](const Vec&, const Vec&) -> Mat { return b; };
  s.cost = [x_ref](const Vec& x, const Vec& u) {
    const double e = x(1) - x_ref(1);
    return 0.5 * e * e + 0.5 * u(0) * u(0);
  };
  s.cost_x = [x_ref](const Vec& x, const Vec&) -> Vec {
    Vec g = Vec::Zero(2);
    g(1) = x(1) - x_ref(1);
    return g;
  };
  s.cost_u = [](const Vec&, const Vec& u) -> Vec { return u; };
  s.cost_xx = [](const Vec&, const Vec&) -> Mat {
    Mat h = Mat::Zero(2, 2);
    h(1, 1) = 1.0;
    return h;
  };
  s.cost_xu = [](const Vec&, const Vec&) -> Mat { return Mat::Zero(2, 1); };
  s.cost_uu = [](const Vec&, const Vec&) -> Mat { return Mat::Identity(1, 1); };
  s.lf_xx = [](const Vec&, const Vec&, const Vec&) -> Mat {
    return Mat::Zero(2, 2);
  };
  s.lf_xu = [](const Vec&, const Vec&, const Vec&) -> Mat {
    return Mat::Zero(2, 1);
  };
  s.lf_uu = [](const Vec&, const Vec&, const Vec&) -> Mat {
    return Mat::Zero(1, 1);
  };
  s.terminal = [x_ref](const Vec& x) { return 0.5 * (x - x_ref).squaredNorm(); };
  s.terminal_x = [x_ref](const Vec& x) -> Vec { return x - x_ref; };
  s.terminal_xx = [](const Vec&) -> Mat { return Mat::Identity(2, 2); };
  return s;
}

}  // namespace detail

/// Two linear subsystems on [0, 2] with one switch; tracks x_ref = (4, 2).
inline ProblemSpec make_example1() {
  const Vec x_ref = (Vec(2) << 4.0, 2.0).finished();
  Mat A1(2, 2), A2(2, 2);
  A1 << 0.6, 1.2, -0.8, 3.4;
  A2 << 4.0, 3.0, -1.0, 0.0;
  Vec b1(2), b2(2);
  b1 << 1.0, 1.0;
  b2 << 2.0, -1.0;

  ProblemSpec spec;
  spec.model.nx = 2;
  spec.model.nu = 1;
  spec.model.subsystems = {
      detail::quadratic_tracking_subsystem(A1, b1, x_ref),
      detail::quadratic_tracking_subsystem(A2, b2, x_ref)};
  spec.t0 = 0.0;
  spec.tf = 2.0;
  spec.N = 175;
  spec.sequence = {0, 1};
  spec.x_init = (Vec(2) << 2.0, 3.0).finished();
  spec.t_bounds = {{spec.t0, spec.tf}};
  return spec;
}

namespace detail {

// All three modes share the tracking costs; only the vector fields differ.
// sx/cx select which state feeds the sin/cos input channels, sgn flips the
// drift of the whole field.
inline Subsystem trig_coupled_subsystem(int mode, const Vec& x_ref) {
  Subsystem s;
  switch (mode) {
    case 0:
      s.f = [](const Vec& x, const Vec& u) -> Vec {
        Vec v(2);
        v << x(0) + u(0) * std::sin(x(0)), -x(1) - u(0) * std::cos(x(1));
        return v;
      };
      s.f_x = [](const Vec& x, const Vec& u) -> Mat {
        Mat m = Mat::Zero(2, 2);
        m(0, 0) = 1.0 + u(0) * std::cos(x(0));
        m(1, 1) = -1.0 + u(0) * std::sin(x(1));
        return m;
      };
      s.f_u = [](const Vec& x, const Vec&) -> Mat {
        Mat m(2, 1);
        m << std::sin(x(0)), -std::cos(x(1));
        return m;
      };
      s.lf_xx = [](const Vec& x, const Vec& u, const Vec& lam) -> Mat {
        Mat m = Mat::Zero(2, 2);
        m(0, 0) = -lam(0) * u(0) * std::sin(x(0));
        m(1, 1) = lam(1) * u(0) * std::cos(x(1));
        return m;
      };
      s.lf_xu = [](const Vec& x, const Vec&, const Vec& lam) -> Mat {
        Mat m(2, 1);
        m << lam(0) * std::cos(x(0)), lam(1) * std::sin(x(1));
        return m;
      };
      break;
    case 1:
      s.f = [](const Vec& x, const Vec& u) -> Vec {
        Vec v(2);
        v << x(1) + u(0) * std::sin(x(1)), -x(0) - u(0) * std::cos(x(0));
        return v;
      };
      s.f_x = [](const Vec& x, const Vec& u) -> Mat {
        Mat m = Mat::Zero(2, 2);
        m(0, 1) = 1.0 + u(0) * std::cos(x(1));
        m(1, 0) = -1.0 + u(0) * std::sin(x(0));
        return m;
      };
      s.f_u = [](const Vec& x, const Vec&) -> Mat {
        Mat m(2, 1);
        m << std::sin(x(1)), -std::cos(x(0));
        return m;
      };
      s.lf_xx = [](const Vec& x, const Vec& u, const Vec& lam) -> Mat {
        Mat m = Mat::Zero(2, 2);
        m(0, 0) = lam(1) * u(0) * std::cos(x(0));
        m(1, 1) = -lam(0) * u(0) * std::sin(x(1));
        return m;
      };
      s.lf_xu = [](const Vec& x, const Vec&, const Vec& lam) -> Mat {
        Mat m(2, 1);
        m << lam(1) * std::sin(x(0)), lam(0) * std::cos(x(1));
        return m;
      };
      break;
    case 2:
      s.f = [](const Vec& x, const Vec& u) -> Vec {
        Vec v(2);
        v << -x(0) - u(0) * std::sin(x(0)), x(1) + u(0) * std::cos(x(1));
        return v;
      };
      s.f_x = [](const Vec& x, const Vec& u) -> Mat {
        Mat m = Mat::Zero(2, 2);
        m(0, 0) = -1.0 - u(0) * std::cos(x(0));
        m(1, 1) = 1.0 - u(0) * std::sin(x(1));
        return m;
      };
      s.f_u = [](const Vec& x, const Vec&) -> Mat {
        Mat m(2, 1);
        m << -std::sin(x(0)), std::cos(x(1));
        return m;
      };
      s.lf_xx = [](const Vec& x, const Vec& u, const Vec& lam) -> Mat {
        Mat m = Mat::Zero(2, 2);
        m(0, 0) = lam(0) * u(0) * std::sin(x(0));
        m(1, 1) = -lam(1) * u(0) * std::cos(x(1));
        return m;
      };
      s.lf_xu = [](const Vec& x, const Vec&, const Vec& lam) -> Mat {
        Mat m(2, 1);
        m << -lam(0) * std::cos(x(0)), -lam(1) * std::sin(x(1));
        return m;
      };
      break;
    default:
      throw std::invalid_argument("trig_coupled_subsystem: bad mode");
  }
  s.cost = [x_ref](const Vec& x, const Vec& u) {
    return 0.5 * (x - x_ref).squaredNorm() + u.squaredNorm();
  };
  s.cost_x = [x_ref](const Vec& x, const Vec&) -> Vec { return x - x_ref; };
  s.cost_u = [](const Vec&, const Vec& u) -> Vec { return 2.0 * u; };
  s.cost_xx = [](const Vec&, const Vec&) -> Mat { return Mat::Identity(2, 2); };
  s.cost_xu = [](const Vec&, const Vec&) -> Mat { return Mat::Zero(2, 1); };
  s.cost_uu = [](const Vec&, const Vec&) -> Mat {
    return 2.0 * Mat::Identity(1, 1);
  };
  s.lf_uu = [](const Vec&, const Vec&, const Vec&) -> Mat {
    return Mat::Zero(1, 1);
  };
  s.terminal = [x_ref](const Vec& x) { return 0.5 * (x - x_ref).squaredNorm(); };
  s.terminal_x = [x_ref](const Vec& x) -> Vec { return x - x_ref; };
  s.terminal_xx = [](const Vec&) -> Mat { return Mat::Identity(2, 2); };
  return s;
}

}  // namespace detail

/// Three nonlinear subsystems on [0, 3] with two switches; tracks (1, -1).
inline ProblemSpec make_example2() {
  const Vec x_ref = (Vec(2) << 1.0, -1.0).finished();
  ProblemSpec spec;
  spec.model.nx = 2;
  spec.model.nu = 1;
  spec.model.subsystems = {detail::trig_coupled_subsystem(0, x_ref),
                           detail::trig_coupled_subsystem(1, x_ref),
                           detail::trig_coupled_subsystem(2, x_ref)};
  spec.t0 = 0.0;
  spec.tf = 3.0;
  spec.N = 220;
  spec.sequence = {0, 1, 2};
  spec.x_init = (Vec(2) << 2.0, 3.0).finished();
  spec.t_bounds = {{spec.t0, spec.tf}, {spec.t0, spec.tf}};
  return spec;
}

inline const std::map<std::string, RegisteredProblem>& problem_registry() {
  static const std::map<std::string, RegisteredProblem> registry = {
      {"example1", {make_example1, {1.0}}},
      {"example2", {make_example2, {0.5, 1.0}}},
  };
  return registry;
}

inline const RegisteredProblem& registered_problem(const std::string& name) {
  const auto& reg = problem_registry();
  auto it = reg.find(name);
  if (it == reg.end()) {
    std::string names;
    for (const auto& [n, _] : reg) names += (names.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown problem '" + name +
                                "' (registered: " + names + ")");
  }
  return it->second;
}

}  // namespace stoc
