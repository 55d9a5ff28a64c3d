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

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <stdexcept>
#include <vector>

#include "stoc/riccati.hpp"
#include "stoc/transcription.hpp"

namespace stoc {

struct SingularKkt : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RankDeficientJacobian : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Row/column offsets of the dense KKT ordering: all primal variables
/// (shooting states, inputs, then per-switch state/input/time), followed by
/// all multipliers (shooting costates, then per-switch costates).
struct KktIndexMap {
  int nx = 0, nu = 0, N = 0, S = 0;

  int x(int i) const { return i * nx; }
  int u(int i) const { return (N + 1) * nx + i * nu; }
  int sx(int j) const { return (N + 1) * nx + N * nu + j * (nx + nu + 1); }
  int su(int j) const { return sx(j) + nx; }
  int st(int j) const { return sx(j) + nx + nu; }
  int primal_dim() const { return (N + 1) * nx + N * nu + S * (nx + nu + 1); }
  int lam(int i) const { return primal_dim() + i * nx; }
  int slam(int j) const { return primal_dim() + (N + 1) * nx + j * nx; }
  int dual_dim() const { return (N + 1 + S) * nx; }
  int dim() const { return primal_dim() + dual_dim(); }
};

/// Whole-horizon Newton system as one symmetric dense matrix: M v + c = 0.
struct DenseKkt {
  Mat M;
  Vec c;
  KktIndexMap map;
};

/// Stacks every linearized optimality condition of `sd` into a dense
/// symmetric system. Row order mirrors the column (variable) order; the
/// initial-state row is negated to preserve symmetry. Intended as the
/// small-N correctness oracle for the Riccati path, not a solve path.
inline DenseKkt assemble(const StageData& sd) {
  DenseKkt k;
  k.map = {sd.nx, sd.nu, sd.grid.N, static_cast<int>(sd.sw.size())};
  const KktIndexMap& ix = k.map;
  const int nx = sd.nx;
  const int nu = sd.nu;
  const int N = sd.grid.N;
  k.M = Mat::Zero(ix.dim(), ix.dim());
  k.c = Vec::Zero(ix.dim());
  const Mat I = Mat::Identity(nx, nx);

  // initial-state row (negated so M stays symmetric)
  k.M.block(ix.lam(0), ix.x(0), nx, nx) = -I;
  k.c.segment(ix.lam(0), nx) = -sd.x0bar;

  for (int i = 0; i < N; ++i) {
    const StageBlocks& b = sd.stage[static_cast<std::size_t>(i)];
    const int j = sd.grid.switch_at(i);
    const int lam_next = (j < 0) ? ix.lam(i + 1) : ix.slam(j);

    // stationarity wrt x_i and u_i
    k.M.block(ix.x(i), ix.x(i), nx, nx) += b.Qxx;
    k.M.block(ix.x(i), ix.u(i), nx, nu) += b.Qxu;
    k.M.block(ix.x(i), lam_next, nx, nx) += b.A.transpose();
    k.M.block(ix.x(i), ix.lam(i), nx, nx) -= I;
    k.c.segment(ix.x(i), nx) += b.lx;
    k.M.block(ix.u(i), ix.x(i), nu, nx) += b.Qxu.transpose();
    k.M.block(ix.u(i), ix.u(i), nu, nu) += b.Quu;
    k.M.block(ix.u(i), lam_next, nu, nx) += b.B.transpose();
    k.c.segment(ix.u(i), nu) += b.lu;

    // dynamics row leaving node i
    k.M.block(lam_next, ix.x(i), nx, nx) += b.A;
    k.M.block(lam_next, ix.u(i), nx, nu) += b.B;
    k.c.segment(lam_next, nx) += b.xbar;

    if (j < 0) {
      k.M.block(ix.lam(i + 1), ix.x(i + 1), nx, nx) -= I;
      continue;
    }

    const SwitchBlocks& sw = sd.sw[static_cast<std::size_t>(j)];
    k.M.block(ix.slam(j), ix.sx(j), nx, nx) -= I;
    k.M.block(ix.slam(j), ix.st(j), nx, 1) += sw.f_pre;
    k.M.block(ix.x(i), ix.st(j), nx, 1) += sw.hx_pre;
    k.M.block(ix.u(i), ix.st(j), nu, 1) += sw.hu_pre;

    // stationarity wrt the post-switch node variables
    k.M.block(ix.sx(j), ix.sx(j), nx, nx) += sw.post.Qxx;
    k.M.block(ix.sx(j), ix.su(j), nx, nu) += sw.post.Qxu;
    k.M.block(ix.sx(j), ix.lam(i + 1), nx, nx) += sw.post.A.transpose();
    k.M.block(ix.sx(j), ix.slam(j), nx, nx) -= I;
    k.M.block(ix.sx(j), ix.st(j), nx, 1) -= sw.hx_post;
    k.c.segment(ix.sx(j), nx) += sw.post.lx;
    k.M.block(ix.su(j), ix.sx(j), nu, nx) += sw.post.Qxu.transpose();
    k.M.block(ix.su(j), ix.su(j), nu, nu) += sw.post.Quu;
    k.M.block(ix.su(j), ix.lam(i + 1), nu, nx) += sw.post.B.transpose();
    k.M.block(ix.su(j), ix.st(j), nu, 1) -= sw.hu_post;
    k.c.segment(ix.su(j), nu) += sw.post.lu;

    // Hamiltonian-continuity row (stationarity wrt the switching instant)
    k.M.block(ix.st(j), ix.x(i), 1, nx) += sw.hx_pre.transpose();
    k.M.block(ix.st(j), ix.u(i), 1, nu) += sw.hu_pre.transpose();
    k.M.block(ix.st(j), ix.slam(j), 1, nx) += sw.f_pre.transpose();
    k.M.block(ix.st(j), ix.sx(j), 1, nx) -= sw.hx_post.transpose();
    k.M.block(ix.st(j), ix.su(j), 1, nu) -= sw.hu_post.transpose();
    k.M.block(ix.st(j), ix.lam(i + 1), 1, nx) -= sw.f_post.transpose();
    k.c(ix.st(j)) += sw.hbar;

    // dynamics row leaving the switch node
    k.M.block(ix.lam(i + 1), ix.sx(j), nx, nx) += sw.post.A;
    k.M.block(ix.lam(i + 1), ix.su(j), nx, nu) += sw.post.B;
    k.M.block(ix.lam(i + 1), ix.st(j), nx, 1) -= sw.f_post;
    k.M.block(ix.lam(i + 1), ix.x(i + 1), nx, nx) -= I;
    k.c.segment(ix.lam(i + 1), nx) += sw.post.xbar;
  }

  // terminal stationarity
  k.M.block(ix.x(N), ix.x(N), nx, nx) += sd.QxxN;
  k.M.block(ix.x(N), ix.lam(N), nx, nx) -= I;
  k.c.segment(ix.x(N), nx) += sd.lxN;
  return k;
}

/// Pivoted dense solve of the assembled system; the correctness oracle.
inline Direction solve_dense(const DenseKkt& k) {
  Eigen::FullPivLU<Mat> lu(k.M);
  if (!lu.isInvertible()) {
    throw SingularKkt("dense KKT matrix is singular");
  }
  const Vec v = lu.solve(-k.c);
  const KktIndexMap& ix = k.map;
  Direction d;
  d.dx.resize(static_cast<std::size_t>(ix.N + 1));
  d.du.resize(static_cast<std::size_t>(ix.N));
  d.dlambda.resize(static_cast<std::size_t>(ix.N + 1));
  d.switches.resize(static_cast<std::size_t>(ix.S));
  for (int i = 0; i <= ix.N; ++i) {
    d.dx[static_cast<std::size_t>(i)] = v.segment(ix.x(i), ix.nx);
    d.dlambda[static_cast<std::size_t>(i)] = v.segment(ix.lam(i), ix.nx);
  }
  for (int i = 0; i < ix.N; ++i) {
    d.du[static_cast<std::size_t>(i)] = v.segment(ix.u(i), ix.nu);
  }
  for (int j = 0; j < ix.S; ++j) {
    auto& s = d.switches[static_cast<std::size_t>(j)];
    s.dx = v.segment(ix.sx(j), ix.nx);
    s.du = v.segment(ix.su(j), ix.nu);
    s.dlambda = v.segment(ix.slam(j), ix.nx);
    s.dt = v(ix.st(j));
  }
  return d;
}

/// Smallest eigenvalue of the Hessian restricted to the constraint
/// nullspace. Positive iff the current Newton model satisfies second-order
/// sufficiency; used to certify xi_tilde positivity and to classify saddle
/// points. Throws RankDeficientJacobian if the constraints are degenerate.
inline double reduced_hessian_min_eig(const DenseKkt& k) {
  const int p = k.map.primal_dim();
  const int c = k.map.dual_dim();
  const Mat H = k.M.topLeftCorner(p, p);
  const Mat G = k.M.block(p, 0, c, p);
  Eigen::FullPivLU<Mat> lu(G);
  if (lu.rank() < c) {
    throw RankDeficientJacobian("constraint Jacobian is rank deficient");
  }
  const Mat Z = lu.kernel();
  if (Z.cols() == 0) {
    return std::numeric_limits<double>::infinity();
  }
  Eigen::HouseholderQR<Mat> qr(Z);
  const Mat Q = qr.householderQ() * Mat::Identity(p, Z.cols());
  const Mat R = Q.transpose() * H * Q;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (R + R.transpose()));
  return es.eigenvalues().minCoeff();
}

/// Max-norm relative deviation between two directions; the oracle metric.
inline double direction_deviation(const Direction& a, const Direction& b) {
  double dev = 0.0;
  double scale = 1.0 + b.max_abs();
  auto upd = [&](const Vec& u, const Vec& v) {
    if (u.size() > 0) dev = std::max(dev, (u - v).cwiseAbs().maxCoeff());
  };
  for (std::size_t i = 0; i < a.dx.size(); ++i) upd(a.dx[i], b.dx[i]);
  for (std::size_t i = 0; i < a.du.size(); ++i) upd(a.du[i], b.du[i]);
  for (std::size_t i = 0; i < a.dlambda.size(); ++i) {
    upd(a.dlambda[i], b.dlambda[i]);
  }
  for (std::size_t j = 0; j < a.switches.size(); ++j) {
    upd(a.switches[j].dx, b.switches[j].dx);
    upd(a.switches[j].du, b.switches[j].du);
    upd(a.switches[j].dlambda, b.switches[j].dlambda);
    dev = std::max(dev, std::abs(a.switches[j].dt - b.switches[j].dt));
  }
  return dev / scale;
}

/// Max residual of the stacked linearized system at a given direction,
/// scaled by (1 + max coefficient magnitude).
inline double linear_system_residual(const DenseKkt& k, const Direction& d) {
  const KktIndexMap& ix = k.map;
  Vec v = Vec::Zero(ix.dim());
  for (int i = 0; i <= ix.N; ++i) {
    v.segment(ix.x(i), ix.nx) = d.dx[static_cast<std::size_t>(i)];
    v.segment(ix.lam(i), ix.nx) = d.dlambda[static_cast<std::size_t>(i)];
  }
  for (int i = 0; i < ix.N; ++i) {
    v.segment(ix.u(i), ix.nu) = d.du[static_cast<std::size_t>(i)];
  }
  for (int j = 0; j < ix.S; ++j) {
    const auto& s = d.switches[static_cast<std::size_t>(j)];
    v.segment(ix.sx(j), ix.nx) = s.dx;
    v.segment(ix.su(j), ix.nu) = s.du;
    v.segment(ix.slam(j), ix.nx) = s.dlambda;
    v(ix.st(j)) = s.dt;
  }
  const double coeff = k.M.cwiseAbs().maxCoeff();
  return (k.M * v + k.c).cwiseAbs().maxCoeff() / (1.0 + coeff);
}

}  // namespace stoc
