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
#include <cmath>
#include <vector>

#include "stoc/grid.hpp"
#include "stoc/iterate.hpp"
#include "stoc/model.hpp"

namespace stoc {

/// Residuals of the first-order optimality system at an iterate, evaluated
/// with forward-Euler transcription. `dynamics[i]` is the defect leaving
/// node i; at a switch interval it is the node-to-switch defect and the
/// switch-to-next-node defect lives in `switches[j].dynamics`. `stat_x` /
/// `stat_u` are the costate / input stationarity residuals, `stat_x[N]`
/// the terminal one. `switches[j].hamiltonian` is the Hamiltonian
/// continuity defect across switch j, the stationarity residual of its
/// switching instant.
struct Residuals {
  Vec initial;
  std::vector<Vec> dynamics;  // 0..N-1
  std::vector<Vec> stat_x;    // 0..N
  std::vector<Vec> stat_u;    // 0..N-1
  struct SwitchResiduals {
    Vec dynamics;
    Vec stat_x;
    Vec stat_u;
    double hamiltonian = 0.0;
  };
  std::vector<SwitchResiduals> switches;

  double squared_norm() const {
    double s = initial.squaredNorm();
    for (const auto& v : dynamics) s += v.squaredNorm();
    for (const auto& v : stat_x) s += v.squaredNorm();
    for (const auto& v : stat_u) s += v.squaredNorm();
    for (const auto& sw : switches) {
      s += sw.dynamics.squaredNorm() + sw.stat_x.squaredNorm() +
           sw.stat_u.squaredNorm() + sw.hamiltonian * sw.hamiltonian;
    }
    return s;
  }
};

/// l2 norm of all optimality residual blocks stacked.
inline double opt_error(const Residuals& r) {
  return std::sqrt(r.squared_norm());
}

/// Coefficients of one linearized stage. A absorbs the identity of the
/// Euler step: A = I + f_x*h, B = f_u*h, Q** = (second derivatives of H)*h.
/// xbar/lx/lu are the residuals the linearization was taken at.
struct StageBlocks {
  Mat Qxx, Qxu, Quu;
  Mat A, B;
  Vec xbar, lx, lu;
};

/// Switch-interval extras: the post-switch node blocks plus the couplings
/// of both half-stages to the switching-time direction. `pre` quantities
/// attach to the shooting stage the switch lives in (its blocks sit in
/// StageData::stage[index], scaled by the pre-switch sliver); `post`
/// quantities attach to the inserted switch node (scaled by the remainder
/// of the interval). hbar is the Hamiltonian continuity residual.
struct SwitchBlocks {
  StageBlocks post;
  Vec hx_pre, hu_pre, f_pre;
  Vec hx_post, hu_post, f_post;
  double hbar = 0.0;
};

/// Stage-wise Newton-system coefficients for a whole horizon.
struct StageData {
  int nx = 0;
  int nu = 0;
  GridLayout grid;
  Vec x0bar;
  std::vector<StageBlocks> stage;  // 0..N-1; switch stages hold pre blocks
  std::vector<SwitchBlocks> sw;    // one per switch
  Mat QxxN;
  Vec lxN;
};

namespace detail {

inline void check_grid_matches(const GridLayout& g, const Iterate& it) {
  require(g.switches.size() == it.switches.size(),
          "grid/iterate switch count mismatch");
  for (std::size_t j = 0; j < g.switches.size(); ++j) {
    const double rel = g.switches[j].index * g.dt + g.switches[j].offset -
                       (it.switches[j].t - g.t0);
    require(std::abs(rel) <= 1e-9 * (1.0 + std::abs(g.tf() - g.t0)),
            "grid layout inconsistent with iterate switch times");
  }
}

// Pre-switch sliver length, kept away from {0, dt} so neither half-stage
// degenerates (zero-length halves make the input Hessian singular).
inline double clamped_offset(const GridLayout& g, int j) {
  const double eps = 1e-8 * g.dt;
  return std::clamp(g.switches[static_cast<std::size_t>(j)].offset, eps,
                    g.dt - eps);
}

}  // namespace detail

/// Evaluates every optimality-condition residual at `it`.
inline Residuals compute_residuals(const ProblemSpec& spec,
                                   const GridLayout& grid, const Iterate& it) {
  check_dimensions(spec, it);
  detail::check_grid_matches(grid, it);
  const int N = grid.N;
  const double dt = grid.dt;
  const SwitchedModel& m = spec.model;

  Residuals r;
  r.initial = it.x[0] - spec.x_init;
  r.dynamics.resize(static_cast<std::size_t>(N));
  r.stat_x.resize(static_cast<std::size_t>(N + 1));
  r.stat_u.resize(static_cast<std::size_t>(N));
  r.switches.resize(grid.switches.size());

  int phase = 0;
  for (int i = 0; i < N; ++i) {
    const std::size_t ui = static_cast<std::size_t>(i);
    const int j = grid.switch_at(i);
    if (j < 0) {
      const Subsystem& s = m.at(spec.sequence[static_cast<std::size_t>(phase)]);
      const Vec& x = it.x[ui];
      const Vec& u = it.u[ui];
      const Vec& ln = it.lambda[ui + 1];
      r.dynamics[ui] = x + s.f(x, u) * dt - it.x[ui + 1];
      r.stat_x[ui] = hamiltonian_x(s, x, u, ln) * dt + ln - it.lambda[ui];
      r.stat_u[ui] = hamiltonian_u(s, x, u, ln) * dt;
    } else {
      const std::size_t uj = static_cast<std::size_t>(j);
      const Subsystem& s1 = m.at(spec.sequence[static_cast<std::size_t>(phase)]);
      const Subsystem& s2 =
          m.at(spec.sequence[static_cast<std::size_t>(phase + 1)]);
      const SwitchPoint& sp = it.switches[uj];
      const double h1 = grid.switches[uj].offset;
      const double h2 = dt - h1;
      const Vec& x = it.x[ui];
      const Vec& u = it.u[ui];
      const Vec& ln = it.lambda[ui + 1];
      r.dynamics[ui] = x + s1.f(x, u) * h1 - sp.x;
      r.stat_x[ui] = hamiltonian_x(s1, x, u, sp.lambda) * h1 + sp.lambda -
                     it.lambda[ui];
      r.stat_u[ui] = hamiltonian_u(s1, x, u, sp.lambda) * h1;
      auto& sr = r.switches[uj];
      sr.dynamics = sp.x + s2.f(sp.x, sp.u) * h2 - it.x[ui + 1];
      sr.stat_x = hamiltonian_x(s2, sp.x, sp.u, ln) * h2 + ln - sp.lambda;
      sr.stat_u = hamiltonian_u(s2, sp.x, sp.u, ln) * h2;
      sr.hamiltonian = eval_hamiltonian(m, spec.sequence[static_cast<std::size_t>(phase)], x, u, sp.lambda) -
                       eval_hamiltonian(m, spec.sequence[static_cast<std::size_t>(phase + 1)], sp.x, sp.u, ln);
      ++phase;
    }
  }
  const Subsystem& last = m.at(spec.sequence.back());
  r.stat_x[static_cast<std::size_t>(N)] =
      last.terminal_x(it.x[static_cast<std::size_t>(N)]) -
      it.lambda[static_cast<std::size_t>(N)];
  return r;
}

namespace detail {

inline StageBlocks make_stage_blocks(const Subsystem& s, const Vec& x,
                                     const Vec& u, const Vec& lambda_next,
                                     const Vec& lambda_here, const Vec& x_next,
                                     double h, int nx) {
  StageBlocks b;
  b.Qxx = hamiltonian_xx(s, x, u, lambda_next) * h;
  b.Qxu = hamiltonian_xu(s, x, u, lambda_next) * h;
  b.Quu = hamiltonian_uu(s, x, u, lambda_next) * h;
  b.A = Mat::Identity(nx, nx) + s.f_x(x, u) * h;
  b.B = s.f_u(x, u) * h;
  b.xbar = x + s.f(x, u) * h - x_next;
  b.lx = hamiltonian_x(s, x, u, lambda_next) * h + lambda_next - lambda_here;
  b.lu = hamiltonian_u(s, x, u, lambda_next) * h;
  return b;
}

}  // namespace detail

/// Builds all Newton-system coefficients at `it`. For a switch interval the
/// pre-switch offset is clamped into [eps, dt-eps] (eps = 1e-8*dt); the
/// stored residual constants use the same clamped lengths so the linear
/// model is internally consistent.
inline StageData linearize(const ProblemSpec& spec, const GridLayout& grid,
                           const Iterate& it) {
  check_dimensions(spec, it);
  detail::check_grid_matches(grid, it);
  const int N = grid.N;
  const double dt = grid.dt;
  const SwitchedModel& m = spec.model;

  StageData sd;
  sd.nx = m.nx;
  sd.nu = m.nu;
  sd.grid = grid;
  sd.x0bar = it.x[0] - spec.x_init;
  sd.stage.resize(static_cast<std::size_t>(N));
  sd.sw.resize(grid.switches.size());

  int phase = 0;
  for (int i = 0; i < N; ++i) {
    const std::size_t ui = static_cast<std::size_t>(i);
    const int j = grid.switch_at(i);
    if (j < 0) {
      const Subsystem& s = m.at(spec.sequence[static_cast<std::size_t>(phase)]);
      sd.stage[ui] =
          detail::make_stage_blocks(s, it.x[ui], it.u[ui], it.lambda[ui + 1],
                                    it.lambda[ui], it.x[ui + 1], dt, m.nx);
    } else {
      const std::size_t uj = static_cast<std::size_t>(j);
      const Subsystem& s1 = m.at(spec.sequence[static_cast<std::size_t>(phase)]);
      const Subsystem& s2 =
          m.at(spec.sequence[static_cast<std::size_t>(phase + 1)]);
      const SwitchPoint& sp = it.switches[uj];
      const double h1 = detail::clamped_offset(grid, j);
      const double h2 = dt - h1;
      sd.stage[ui] = detail::make_stage_blocks(s1, it.x[ui], it.u[ui],
                                               sp.lambda, it.lambda[ui], sp.x,
                                               h1, m.nx);
      auto& sw = sd.sw[uj];
      sw.post = detail::make_stage_blocks(s2, sp.x, sp.u, it.lambda[ui + 1],
                                          sp.lambda, it.x[ui + 1], h2, m.nx);
      sw.hx_pre = hamiltonian_x(s1, it.x[ui], it.u[ui], sp.lambda);
      sw.hu_pre = hamiltonian_u(s1, it.x[ui], it.u[ui], sp.lambda);
      sw.f_pre = s1.f(it.x[ui], it.u[ui]);
      sw.hx_post = hamiltonian_x(s2, sp.x, sp.u, it.lambda[ui + 1]);
      sw.hu_post = hamiltonian_u(s2, sp.x, sp.u, it.lambda[ui + 1]);
      sw.f_post = s2.f(sp.x, sp.u);
      sw.hbar = (s1.cost(it.x[ui], it.u[ui]) + sp.lambda.dot(sw.f_pre)) -
                (s2.cost(sp.x, sp.u) + it.lambda[ui + 1].dot(sw.f_post));
      ++phase;
    }
  }
  const Subsystem& last = m.at(spec.sequence.back());
  const Vec& xN = it.x[static_cast<std::size_t>(N)];
  sd.QxxN = last.terminal_xx(xN);
  sd.lxN = last.terminal_x(xN) - it.lambda[static_cast<std::size_t>(N)];
  return sd;
}

}  // namespace stoc
