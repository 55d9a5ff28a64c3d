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
#include <stdexcept>
#include <vector>

#include "stoc/model.hpp"

namespace stoc {

/// Max elementwise discrepancy between each user-supplied derivative block
/// and its central finite difference, for one subsystem. Jacobians and cost
/// gradients are differenced from values; Hessian blocks are differenced
/// from the user's first derivatives.
struct DerivativeReport {
  double f_x = 0.0;
  double f_u = 0.0;
  double cost_x = 0.0;
  double cost_u = 0.0;
  double cost_xx = 0.0;
  double cost_xu = 0.0;
  double cost_uu = 0.0;
  double lf_xx = 0.0;
  double lf_xu = 0.0;
  double lf_uu = 0.0;
  double terminal_x = 0.0;
  double terminal_xx = 0.0;

  double max_error() const {
    return std::max({f_x, f_u, cost_x, cost_u, cost_xx, cost_xu, cost_uu,
                     lf_xx, lf_xu, lf_uu, terminal_x, terminal_xx});
  }
};

namespace detail {

template <typename F>
Mat fd_jacobian_x(const F& fn, const Vec& x, const Vec& u, int rows, double h) {
  Mat J(rows, x.size());
  for (int j = 0; j < x.size(); ++j) {
    Vec xp = x, xm = x;
    xp(j) += h;
    xm(j) -= h;
    J.col(j) = (Vec(fn(xp, u)) - Vec(fn(xm, u))) / (2.0 * h);
  }
  return J;
}

template <typename F>
Mat fd_jacobian_u(const F& fn, const Vec& x, const Vec& u, int rows, double h) {
  Mat J(rows, u.size());
  for (int j = 0; j < u.size(); ++j) {
    Vec up = u, um = u;
    up(j) += h;
    um(j) -= h;
    J.col(j) = (Vec(fn(x, up)) - Vec(fn(x, um))) / (2.0 * h);
  }
  return J;
}

template <typename F>
Vec fd_gradient_x(const F& fn, const Vec& x, const Vec& u, double h) {
  Vec g(x.size());
  for (int j = 0; j < x.size(); ++j) {
    Vec xp = x, xm = x;
    xp(j) += h;
    xm(j) -= h;
    g(j) = (fn(xp, u) - fn(xm, u)) / (2.0 * h);
  }
  return g;
}

template <typename F>
Vec fd_gradient_u(const F& fn, const Vec& x, const Vec& u, double h) {
  Vec g(u.size());
  for (int j = 0; j < u.size(); ++j) {
    Vec up = u, um = u;
    up(j) += h;
    um(j) -= h;
    g(j) = (fn(x, up) - fn(x, um)) / (2.0 * h);
  }
  return g;
}

inline double block_error(const Mat& a, const Mat& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace detail

/// Central-difference validation of one subsystem's derivatives at (x,u)
/// with multiplier lambda and step h.
inline DerivativeReport check_subsystem_derivatives(const SwitchedModel& m,
                                                    int q, const Vec& x,
                                                    const Vec& u,
                                                    const Vec& lambda,
                                                    double h) {
  if (h <= 0.0) throw std::invalid_argument("check_derivatives: h > 0 required");
  const Subsystem& s = m.at(q);
  DerivativeReport r;
  using namespace detail;

  r.f_x = block_error(s.f_x(x, u), fd_jacobian_x(s.f, x, u, m.nx, h));
  r.f_u = block_error(s.f_u(x, u), fd_jacobian_u(s.f, x, u, m.nx, h));
  r.cost_x = block_error(s.cost_x(x, u), fd_gradient_x(s.cost, x, u, h));
  r.cost_u = block_error(s.cost_u(x, u), fd_gradient_u(s.cost, x, u, h));
  r.cost_xx =
      block_error(s.cost_xx(x, u), fd_jacobian_x(s.cost_x, x, u, m.nx, h));
  r.cost_xu =
      block_error(s.cost_xu(x, u), fd_jacobian_u(s.cost_x, x, u, m.nx, h));
  r.cost_uu =
      block_error(s.cost_uu(x, u), fd_jacobian_u(s.cost_u, x, u, m.nu, h));

  auto lf_x = [&](const Vec& xx, const Vec& uu) -> Vec {
    return s.f_x(xx, uu).transpose() * lambda;
  };
  auto lf_u = [&](const Vec& xx, const Vec& uu) -> Vec {
    return s.f_u(xx, uu).transpose() * lambda;
  };
  r.lf_xx = block_error(s.lf_xx(x, u, lambda), fd_jacobian_x(lf_x, x, u, m.nx, h));
  r.lf_xu = block_error(s.lf_xu(x, u, lambda), fd_jacobian_u(lf_x, x, u, m.nx, h));
  r.lf_uu = block_error(s.lf_uu(x, u, lambda), fd_jacobian_u(lf_u, x, u, m.nu, h));

  auto term = [&](const Vec& xx, const Vec&) { return s.terminal(xx); };
  auto term_x = [&](const Vec& xx, const Vec&) -> Vec { return s.terminal_x(xx); };
  r.terminal_x = block_error(s.terminal_x(x), fd_gradient_x(term, x, u, h));
  r.terminal_xx =
      block_error(s.terminal_xx(x), fd_jacobian_x(term_x, x, u, m.nx, h));
  return r;
}

/// Validates every subsystem referenced by the problem. Report only; never
/// throws for large discrepancies.
inline std::vector<DerivativeReport> check_derivatives(const ProblemSpec& spec,
                                                       const Vec& x,
                                                       const Vec& u,
                                                       const Vec& lambda,
                                                       double h) {
  std::vector<DerivativeReport> out;
  out.reserve(spec.model.subsystems.size());
  for (int q = 0; q < spec.model.num_subsystems(); ++q) {
    out.push_back(check_subsystem_derivatives(spec.model, q, x, u, lambda, h));
  }
  return out;
}

/// Fills every missing derivative callable of `s` with a central finite
/// difference of step h. Prototyping aid; exact derivatives stay preferred
/// and nothing is replaced if already set.
inline Subsystem with_fd_derivatives(Subsystem s, int nx, int nu, double h) {
  using namespace detail;
  if (!s.f || !s.cost || !s.terminal) {
    throw std::invalid_argument("with_fd_derivatives: f, cost, terminal required");
  }
  const auto f = s.f;
  const auto cost = s.cost;
  const auto terminal = s.terminal;
  if (!s.f_x) {
    s.f_x = [f, nx, h](const Vec& x, const Vec& u) {
      return fd_jacobian_x(f, x, u, nx, h);
    };
  }
  if (!s.f_u) {
    s.f_u = [f, nx, h](const Vec& x, const Vec& u) {
      return fd_jacobian_u(f, x, u, nx, h);
    };
  }
  if (!s.cost_x) {
    s.cost_x = [cost, h](const Vec& x, const Vec& u) {
      return fd_gradient_x(cost, x, u, h);
    };
  }
  if (!s.cost_u) {
    s.cost_u = [cost, h](const Vec& x, const Vec& u) {
      return fd_gradient_u(cost, x, u, h);
    };
  }
  const auto cost_x = s.cost_x;
  const auto cost_u = s.cost_u;
  if (!s.cost_xx) {
    s.cost_xx = [cost_x, nx, h](const Vec& x, const Vec& u) {
      return fd_jacobian_x(cost_x, x, u, nx, h);
    };
  }
  if (!s.cost_xu) {
    s.cost_xu = [cost_x, nx, h](const Vec& x, const Vec& u) {
      return fd_jacobian_u(cost_x, x, u, nx, h);
    };
  }
  if (!s.cost_uu) {
    s.cost_uu = [cost_u, nu, h](const Vec& x, const Vec& u) {
      return fd_jacobian_u(cost_u, x, u, nu, h);
    };
  }
  const auto f_x = s.f_x;
  const auto f_u = s.f_u;
  if (!s.lf_xx) {
    s.lf_xx = [f_x, nx, h](const Vec& x, const Vec& u, const Vec& lam) {
      auto g = [&](const Vec& xx, const Vec& uu) -> Vec {
        return f_x(xx, uu).transpose() * lam;
      };
      return fd_jacobian_x(g, x, u, nx, h);
    };
  }
  if (!s.lf_xu) {
    s.lf_xu = [f_x, nx, h](const Vec& x, const Vec& u, const Vec& lam) {
      auto g = [&](const Vec& xx, const Vec& uu) -> Vec {
        return f_x(xx, uu).transpose() * lam;
      };
      return fd_jacobian_u(g, x, u, nx, h);
    };
  }
  if (!s.lf_uu) {
    s.lf_uu = [f_u, nu, h](const Vec& x, const Vec& u, const Vec& lam) {
      auto g = [&](const Vec& xx, const Vec& uu) -> Vec {
        return f_u(xx, uu).transpose() * lam;
      };
      return fd_jacobian_u(g, x, u, nu, h);
    };
  }
  if (!s.terminal_x) {
    s.terminal_x = [terminal, h](const Vec& x) -> Vec {
      auto g = [&](const Vec& xx, const Vec&) { return terminal(xx); };
      return fd_gradient_x(g, x, Vec(), h);
    };
  }
  const auto terminal_x = s.terminal_x;
  if (!s.terminal_xx) {
    s.terminal_xx = [terminal_x, nx, h](const Vec& x) {
      auto g = [&](const Vec& xx, const Vec&) -> Vec { return terminal_x(xx); };
      return fd_jacobian_x(g, x, Vec(), nx, h);
    };
  }
  return s;
}

}  // namespace stoc
