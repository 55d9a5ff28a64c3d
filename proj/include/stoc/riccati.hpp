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

#include <Eigen/Cholesky>
#include <stdexcept>
#include <string>
#include <vector>

#include "stoc/transcription.hpp"

namespace stoc {

/// The backward pass found negative curvature: the current point cannot be
/// a strict local minimum (indefinite reduced Hessian), so the recursion
/// has no meaningful continuation.
struct AssumptionViolation : std::runtime_error {
  enum class Kind { CholeskyFailure, NonpositiveXi };

  AssumptionViolation(Kind k, int idx, const std::string& what_arg)
      : std::runtime_error(what_arg), kind(k), index(idx) {}

  Kind kind;
  int index;  // stage for CholeskyFailure, switch ordinal for NonpositiveXi
};

/// Value-function factors of the backward pass. Per stage: cost-to-go
/// Hessian P and offset z (costate model dlambda_i = P_i dx_i - z_i) and
/// the input feedback/feedforward K, k. Per switch: the eliminated
/// post-switch node gains plus the switching-time elimination scalars;
/// xi_tilde is the curvature of the reduced problem in the switching-time
/// direction and is positive on every successful pass.
struct SwitchFactors {
  Mat P_post;
  Vec z_post;
  Mat K_post;
  Vec k_post;
  Vec T_post;          // input sensitivity of the post node to dt
  Vec psi_x_post, psi_u_post;
  Vec Gamma_post;      // costate sensitivity of the post node to dt
  double xi = 0.0;
  double eta = 0.0;
  Vec T_pre;
  Vec psi_x_pre, psi_u_pre;
  Vec Gamma_pre;
  double xi_tilde = 0.0;
  double eta_tilde = 0.0;
};

struct RiccatiFactors {
  std::vector<Mat> P;  // 0..N
  std::vector<Vec> z;  // 0..N
  std::vector<Mat> K;  // 0..N-1
  std::vector<Vec> k;  // 0..N-1
  std::vector<SwitchFactors> sw;
};

namespace detail {

struct StageElim {
  Mat F, H, G, K, P;
  Vec k, z;
  Eigen::LLT<Mat> chol;
};

// Eliminates (du_i, dlambda_next) of one stage against the next value
// function: K = -G^{-1}H', k = -G^{-1}(B'(P+ xbar - z+) + lu),
// P = F - K'GK, z = A'(z+ - P+ xbar) - lx - Hk.
inline StageElim eliminate_stage(const StageBlocks& b, const Mat& P_next,
                                 const Vec& z_next, double reg, int stage) {
  StageElim e;
  const Mat AtP = b.A.transpose() * P_next;
  e.F = b.Qxx + AtP * b.A;
  e.H = b.Qxu + AtP * b.B;
  e.G = b.Quu + b.B.transpose() * P_next * b.B;
  if (reg > 0.0) e.G.diagonal().array() += reg;
  e.G = 0.5 * (e.G + e.G.transpose()).eval();
  e.chol.compute(e.G);
  if (e.chol.info() != Eigen::Success) {
    throw AssumptionViolation(
        AssumptionViolation::Kind::CholeskyFailure, stage,
        "input-block Hessian not positive definite at stage " +
            std::to_string(stage) + " (stationary point is not a minimum)");
  }
  e.K = -e.chol.solve(e.H.transpose());
  e.k = -e.chol.solve(b.B.transpose() * (P_next * b.xbar - z_next) + b.lu);
  e.P = e.F + e.H * e.K;  // == F - K'GK
  e.P = 0.5 * (e.P + e.P.transpose()).eval();
  e.z = b.A.transpose() * (z_next - P_next * b.xbar) - b.lx - e.H * e.k;
  return e;
}

}  // namespace detail

/// Backward value-function recursion over the horizon, with the two-step
/// switch-interval elimination at every switch stage: first the post-switch
/// node is folded into (P_post, z_post) together with its switching-time
/// couplings (T, Gamma, xi, eta), then the pre-switch half-stage is
/// eliminated and the switching-time direction itself is removed, leaving a
/// rank-one-corrected P at the switch stage. Cost is linear in N.
///
/// `reg` adds reg*I to every input-block Hessian before factorization;
/// zero (the default) is the plain Newton recursion.
///
/// Throws AssumptionViolation when an input-block factorization fails or
/// the switching-time curvature xi_tilde is nonpositive.
inline RiccatiFactors backward_pass(const StageData& sd, double reg = 0.0) {
  const int N = sd.grid.N;
  RiccatiFactors rf;
  rf.P.resize(static_cast<std::size_t>(N + 1));
  rf.z.resize(static_cast<std::size_t>(N + 1));
  rf.K.resize(static_cast<std::size_t>(N));
  rf.k.resize(static_cast<std::size_t>(N));
  rf.sw.resize(sd.sw.size());

  rf.P[static_cast<std::size_t>(N)] = 0.5 * (sd.QxxN + sd.QxxN.transpose());
  rf.z[static_cast<std::size_t>(N)] = -sd.lxN;

  for (int i = N - 1; i >= 0; --i) {
    const std::size_t ui = static_cast<std::size_t>(i);
    const int j = sd.grid.switch_at(i);
    if (j < 0) {
      auto e = detail::eliminate_stage(sd.stage[ui], rf.P[ui + 1],
                                       rf.z[ui + 1], reg, i);
      rf.K[ui] = std::move(e.K);
      rf.k[ui] = std::move(e.k);
      rf.P[ui] = std::move(e.P);
      rf.z[ui] = std::move(e.z);
      continue;
    }

    const std::size_t uj = static_cast<std::size_t>(j);
    const SwitchBlocks& sw = sd.sw[uj];
    SwitchFactors& f = rf.sw[uj];

    // post-switch node against the value function at node i+1
    auto ep = detail::eliminate_stage(sw.post, rf.P[ui + 1], rf.z[ui + 1],
                                      reg, i);
    const Vec Pf_post = rf.P[ui + 1] * sw.f_post;
    f.psi_x_post = sw.hx_post + sw.post.A.transpose() * Pf_post;
    f.psi_u_post = sw.hu_post + sw.post.B.transpose() * Pf_post;
    f.T_post = -ep.chol.solve(f.psi_u_post);
    f.Gamma_post = f.psi_x_post + ep.K.transpose() * f.psi_u_post;
    f.xi = sw.f_post.dot(Pf_post) + f.psi_u_post.dot(f.T_post);
    f.eta = sw.hbar - sw.f_post.dot(rf.P[ui + 1] * sw.post.xbar - rf.z[ui + 1]) -
            f.psi_u_post.dot(ep.k);
    f.K_post = std::move(ep.K);
    f.k_post = std::move(ep.k);
    f.P_post = std::move(ep.P);
    f.z_post = std::move(ep.z);

    // pre-switch half-stage against (P_post, z_post), then eliminate dt
    auto ee = detail::eliminate_stage(sd.stage[ui], f.P_post, f.z_post, reg, i);
    const Vec coupling = f.P_post * sw.f_pre - f.Gamma_post;
    f.psi_x_pre = sw.hx_pre + sd.stage[ui].A.transpose() * coupling;
    f.psi_u_pre = sw.hu_pre + sd.stage[ui].B.transpose() * coupling;
    f.T_pre = -ee.chol.solve(f.psi_u_pre);
    f.Gamma_pre = f.psi_x_pre + ee.K.transpose() * f.psi_u_pre;
    f.xi_tilde = f.xi - 2.0 * f.Gamma_post.dot(sw.f_pre) +
                 sw.f_pre.dot(f.P_post * sw.f_pre) +
                 f.psi_u_pre.dot(f.T_pre);
    if (!(f.xi_tilde > 0.0)) {
      throw AssumptionViolation(
          AssumptionViolation::Kind::NonpositiveXi, j,
          "switching-time curvature " + std::to_string(f.xi_tilde) +
              " is not positive at switch " + std::to_string(j) +
              " (stationary point is not a minimum)");
    }
    f.eta_tilde = f.eta - f.Gamma_post.dot(sd.stage[ui].xbar) +
                  sw.f_pre.dot(f.P_post * sd.stage[ui].xbar - f.z_post) +
                  f.psi_u_pre.dot(ee.k);

    rf.K[ui] = std::move(ee.K);
    rf.k[ui] = std::move(ee.k);
    rf.P[ui] = ee.P - (f.Gamma_pre * f.Gamma_pre.transpose()) / f.xi_tilde;
    rf.P[ui] = 0.5 * (rf.P[ui] + rf.P[ui].transpose()).eval();
    rf.z[ui] = ee.z + f.Gamma_pre * (f.eta_tilde / f.xi_tilde);
  }
  return rf;
}

/// Forward substitution: rolls the Newton direction out from dx0. At a
/// switch stage the switching-time direction comes first, then the
/// half-stage updates on both sides of the switch node.
inline Direction forward_pass(const StageData& sd, const RiccatiFactors& rf,
                              const Vec& dx0) {
  const int N = sd.grid.N;
  Direction d;
  d.dx.resize(static_cast<std::size_t>(N + 1));
  d.du.resize(static_cast<std::size_t>(N));
  d.dlambda.resize(static_cast<std::size_t>(N + 1));
  d.switches.resize(sd.sw.size());

  d.dx[0] = dx0;
  for (int i = 0; i < N; ++i) {
    const std::size_t ui = static_cast<std::size_t>(i);
    const int j = sd.grid.switch_at(i);
    if (j < 0) {
      d.du[ui] = rf.K[ui] * d.dx[ui] + rf.k[ui];
      d.dlambda[ui] = rf.P[ui] * d.dx[ui] - rf.z[ui];
      d.dx[ui + 1] = sd.stage[ui].A * d.dx[ui] + sd.stage[ui].B * d.du[ui] +
                     sd.stage[ui].xbar;
      continue;
    }
    const std::size_t uj = static_cast<std::size_t>(j);
    const SwitchBlocks& sw = sd.sw[uj];
    const SwitchFactors& f = rf.sw[uj];
    auto& dsw = d.switches[uj];
    dsw.dt = -(f.Gamma_pre.dot(d.dx[ui]) + f.eta_tilde) / f.xi_tilde;
    d.du[ui] = rf.K[ui] * d.dx[ui] + rf.k[ui] + f.T_pre * dsw.dt;
    d.dlambda[ui] = rf.P[ui] * d.dx[ui] - rf.z[ui];
    dsw.dx = sd.stage[ui].A * d.dx[ui] + sd.stage[ui].B * d.du[ui] +
             sw.f_pre * dsw.dt + sd.stage[ui].xbar;
    dsw.du = f.K_post * dsw.dx + f.k_post - f.T_post * dsw.dt;
    dsw.dlambda = f.P_post * dsw.dx - f.z_post - f.Gamma_post * dsw.dt;
    d.dx[ui + 1] = sw.post.A * dsw.dx + sw.post.B * dsw.du -
                   sw.f_post * dsw.dt + sw.post.xbar;
  }
  d.dlambda[static_cast<std::size_t>(N)] =
      rf.P[static_cast<std::size_t>(N)] * d.dx[static_cast<std::size_t>(N)] -
      rf.z[static_cast<std::size_t>(N)];
  return d;
}

/// Forward pass started from the initial-state condition dx0 = -x0bar.
inline Direction forward_pass(const StageData& sd, const RiccatiFactors& rf) {
  return forward_pass(sd, rf, -sd.x0bar);
}

}  // namespace stoc
