// Copyright (c) 2026 mfmfe contributors
// SPDX-License-Identifier: Apache-2.0
#include "mfmfe/solver.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <stdexcept>

namespace mfmfe {

FactorizedBlocks factorize_blocks(const BlockDiagonalMatrix& A) {
  FactorizedBlocks out;
  out.llt.reserve(A.blocks.size());
  for (std::size_t b = 0; b < A.blocks.size(); ++b) {
    out.llt.emplace_back(A.blocks[b]);
    if (out.llt.back().info() != Eigen::Success)
      throw std::runtime_error("elimination error: mass block " +
                               std::to_string(b) + " is not SPD");
  }
  return out;
}

ReducedSystem reduce(const FactorizedBlocks& A, const NodeBlocks& blocks,
                     const SparseMatrix& B, const Eigen::VectorXd& G,
                     const Eigen::VectorXd& F) {
  // Row-major transpose gives cheap per-velocity-dof access to B's columns.
  const Eigen::SparseMatrix<double, Eigen::RowMajor> Bt = B.transpose();

  ReducedSystem sys;
  sys.rhs = F;
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<int> pcols;
  std::vector<int> pcol_pos(B.rows(), -1);
  for (std::size_t b = 0; b < blocks.blocks.size(); ++b) {
    const auto& dofs = blocks.blocks[b];
    const int nb = static_cast<int>(dofs.size());
    // union of coupled pressure dofs
    pcols.clear();
    for (int i = 0; i < nb; ++i)
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(
               Bt, dofs[i]);
           it; ++it)
        if (pcol_pos[it.col()] == -1) {
          pcol_pos[it.col()] = static_cast<int>(pcols.size());
          pcols.push_back(static_cast<int>(it.col()));
        }
    const int np = static_cast<int>(pcols.size());
    if (np == 0) continue;
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(nb, np);
    Eigen::VectorXd g(nb);
    for (int i = 0; i < nb; ++i) {
      g[i] = G[dofs[i]];
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(
               Bt, dofs[i]);
           it; ++it)
        R(i, pcol_pos[it.col()]) = it.value();
    }
    // S_local = (L^-1 R)^T (L^-1 R) is symmetric by construction
    const Eigen::MatrixXd Y = A.llt[b].matrixL().solve(R);
    const Eigen::MatrixXd Sloc = Y.transpose() * Y;
    const Eigen::VectorXd y = A.llt[b].solve(g);
    for (int i = 0; i < np; ++i) {
      sys.rhs[pcols[i]] -= R.col(i).dot(y);
      for (int j = 0; j < np; ++j)
        trip.emplace_back(pcols[i], pcols[j], Sloc(i, j));
    }
    for (int p : pcols) pcol_pos[p] = -1;
  }
  sys.S.resize(B.rows(), B.rows());
  sys.S.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

int pcg(const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& apply,
        const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& precond,
        const Eigen::VectorXd& b, Eigen::VectorXd& x, double tol, int maxit,
        double* relres) {
  const double bnorm = b.norm();
  x = Eigen::VectorXd::Zero(b.size());
  if (bnorm == 0.0) {
    if (relres) *relres = 0.0;
    return 0;
  }
  Eigen::VectorXd r = b;  // x = 0 start
  Eigen::VectorXd z(b.size()), q(b.size());
  precond(r, z);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  int it = 0;
  for (; it < maxit; ++it) {
    if (r.norm() <= tol * bnorm) break;
    apply(p, q);
    const double alpha = rz / p.dot(q);
    x += alpha * p;
    r -= alpha * q;
    precond(r, z);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  if (relres) *relres = r.norm() / bnorm;
  return it;
}

std::pair<Eigen::VectorXd, SolveStats> solve_cg(const SparseMatrix& S,
                                                const Eigen::VectorXd& rhs,
                                                double tol, int maxit) {
  Eigen::VectorXd diag_inv(S.rows());
  for (int i = 0; i < S.rows(); ++i) {
    const double d = S.coeff(i, i);
    diag_inv[i] = d > 0.0 ? 1.0 / d : 1.0;
  }
  SolveStats stats;
  Eigen::VectorXd P;
  stats.iterations = pcg(
      [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) { out = S * v; },
      [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
        out = diag_inv.asDiagonal() * v;
      },
      rhs, P, tol, maxit, &stats.relative_residual);
  stats.converged = stats.relative_residual <= tol;
  if (!stats.converged)
    throw std::runtime_error("solve_cg: convergence failure after " +
                             std::to_string(stats.iterations) + " iterations");
  return {P, stats};
}

Eigen::VectorXd recover_velocity(const FactorizedBlocks& A,
                                 const NodeBlocks& blocks, const SparseMatrix& B,
                                 const Eigen::VectorXd& G, const Eigen::VectorXd& P) {
  const Eigen::VectorXd BtP = B.transpose() * P;
  Eigen::VectorXd U(G.size());
  Eigen::VectorXd loc;
  for (std::size_t b = 0; b < blocks.blocks.size(); ++b) {
    const auto& dofs = blocks.blocks[b];
    loc.resize(dofs.size());
    for (std::size_t i = 0; i < dofs.size(); ++i)
      loc[i] = G[dofs[i]] + BtP[dofs[i]];
    loc = A.llt[b].solve(loc);
    for (std::size_t i = 0; i < dofs.size(); ++i) U[dofs[i]] = loc[i];
  }
  return U;
}

RtSolution solve_rt_schur(const SparseMatrix& A, const SparseMatrix& B,
                          const Eigen::VectorXd& G, const Eigen::VectorXd& F,
                          double tol, int maxit) {
  Eigen::VectorXd adiag_inv(A.rows());
  for (int i = 0; i < A.rows(); ++i) adiag_inv[i] = 1.0 / A.coeff(i, i);
  const auto jacobi = [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
    out = adiag_inv.asDiagonal() * v;
  };
  const double inner_tol = 1e-2 * tol;
  const int inner_maxit = 20000;
  const auto apply_Ainv = [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
    const int it = pcg(
        [&](const Eigen::VectorXd& w, Eigen::VectorXd& o) { o = A * w; }, jacobi,
        v, out, inner_tol, inner_maxit, nullptr);
    if (it >= inner_maxit)
      throw std::runtime_error("solve_rt_schur: inner CG did not converge");
  };

  // Preconditioner Stilde = B diag(A)^{-1} B^T, factored once.
  SparseMatrix Stilde = B * adiag_inv.asDiagonal() * SparseMatrix(B.transpose());
  Eigen::SimplicialLLT<SparseMatrix> prec(Stilde);
  if (prec.info() != Eigen::Success)
    throw std::runtime_error("solve_rt_schur: preconditioner factorization failed");

  Eigen::VectorXd AinvG;
  apply_Ainv(G, AinvG);
  const Eigen::VectorXd rhs = F - B * AinvG;

  RtSolution sol;
  Eigen::VectorXd t, z;
  sol.stats.iterations = pcg(
      [&](const Eigen::VectorXd& p, Eigen::VectorXd& out) {
        t = B.transpose() * p;
        apply_Ainv(t, z);
        out = B * z;
      },
      [&](const Eigen::VectorXd& r, Eigen::VectorXd& out) { out = prec.solve(r); },
      rhs, sol.P, tol, maxit, &sol.stats.relative_residual);
  sol.stats.converged = sol.stats.relative_residual <= tol;
  if (!sol.stats.converged)
    throw std::runtime_error("solve_rt_schur: outer PCG convergence failure");

  const Eigen::VectorXd gb = G + B.transpose() * sol.P;
  apply_Ainv(gb, sol.U);
  return sol;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> solve_saddle_dense(
    const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::VectorXd& G,
    const Eigen::VectorXd& F) {
  const int nv = static_cast<int>(A.rows());
  const int np = static_cast<int>(B.rows());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nv + np, nv + np);
  M.topLeftCorner(nv, nv) = A;
  M.topRightCorner(nv, np) = -B.transpose();
  M.bottomLeftCorner(np, nv) = B;
  Eigen::VectorXd rhs(nv + np);
  rhs << G, F;
  const Eigen::VectorXd sol = M.partialPivLu().solve(rhs);
  return {sol.head(nv), sol.tail(np)};
}

Eigen::MatrixXd dense_from_blocks(const BlockDiagonalMatrix& A,
                                  const NodeBlocks& blocks, int n) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t b = 0; b < A.blocks.size(); ++b) {
    const auto& dofs = blocks.blocks[b];
    for (std::size_t i = 0; i < dofs.size(); ++i)
      for (std::size_t j = 0; j < dofs.size(); ++j)
        out(dofs[i], dofs[j]) = A.blocks[b](i, j);
  }
  return out;
}

}  // namespace mfmfe
