// Copyright (c) 2026 mfmfe contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>

#include "mfmfe/assembly.hpp"

namespace mfmfe {

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
  double assemble_seconds = 0.0;
  double solve_seconds = 0.0;
  bool converged = true;
};

/// Cholesky factor per node block; failure identifies the offending node
/// block (the blocks are SPD for SPD K).
struct FactorizedBlocks {
  std::vector<Eigen::LLT<Eigen::MatrixXd>> llt;
};
FactorizedBlocks factorize_blocks(const BlockDiagonalMatrix& A);

/// Cell-based SPD pressure system S = B A^{-1} B^T, rhs = F - B A^{-1} G,
/// obtained by block-local velocity elimination.
struct ReducedSystem {
  SparseMatrix S;
  Eigen::VectorXd rhs;
};
ReducedSystem reduce(const FactorizedBlocks& A, const NodeBlocks& blocks,
                     const SparseMatrix& B, const Eigen::VectorXd& G,
                     const Eigen::VectorXd& F);

/// Preconditioned conjugate gradients; `apply` is the SPD operator and
/// `precond` an SPD preconditioner application. Returns iterations taken.
int pcg(const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& apply,
        const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& precond,
        const Eigen::VectorXd& b, Eigen::VectorXd& x, double tol, int maxit,
        double* relres);

/// Jacobi-preconditioned CG on the reduced pressure system.
std::pair<Eigen::VectorXd, SolveStats> solve_cg(const SparseMatrix& S,
                                                const Eigen::VectorXd& rhs,
                                                double tol, int maxit);

/// Back substitution U = A^{-1}(G + B^T P), block by block.
Eigen::VectorXd recover_velocity(const FactorizedBlocks& A,
                                 const NodeBlocks& blocks, const SparseMatrix& B,
                                 const Eigen::VectorXd& G, const Eigen::VectorXd& P);

/// Schur-complement solve of the RT saddle system: outer PCG on
/// S = B A^{-1} B^T with inner CG applications of A^{-1} and the
/// preconditioner [B diag(A)^{-1} B^T]^{-1} (sparse Cholesky).
struct RtSolution {
  Eigen::VectorXd P;
  Eigen::VectorXd U;
  SolveStats stats;
};
RtSolution solve_rt_schur(const SparseMatrix& A, const SparseMatrix& B,
                          const Eigen::VectorXd& G, const Eigen::VectorXd& F,
                          double tol, int maxit);

/// Dense solve of the full saddle system [A, -B^T; B, 0][U;P] = [G;F];
/// test oracle for the reduced path on small instances.
std::pair<Eigen::VectorXd, Eigen::VectorXd> solve_saddle_dense(
    const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::VectorXd& G,
    const Eigen::VectorXd& F);

/// Dense assembly of the block-diagonal mass matrix (small instances only).
Eigen::MatrixXd dense_from_blocks(const BlockDiagonalMatrix& A,
                                  const NodeBlocks& blocks, int n);

}  // namespace mfmfe
