// Copyright (c) 2026 mfmfe contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "mfmfe/cases.hpp"
#include "mfmfe/postprocess.hpp"

namespace mfmfe {

/// Relative errors of one run plus observed rates between refinement levels.
struct ErrorRecord {
  int level = 0;
  double h = 0.0;
  double err_u = 0.0;      // L2 velocity
  double err_div = 0.0;    // L2 divergence
  double err_p = 0.0;      // L2 pressure
  double err_pG = 0.0;     // discrete Gauss-point norm |||p - p_h|||
  double err_qp = 0.0;     // ||Q_h p - p_h||
  double err_pstar = 0.0;  // postprocessed pressure
  double rate_u = 0.0, rate_div = 0.0, rate_p = 0.0;
  double rate_pG = 0.0, rate_qp = 0.0, rate_pstar = 0.0;
  int cg_iters = 0;
  double assemble_s = 0.0, solve_s = 0.0;
};

/// One method's discrete solution with the objects needed to evaluate it.
struct DiscreteSolution {
  Eigen::VectorXd U;
  Eigen::VectorXd P;
  const VectorElement* elem = nullptr;
  const TensorLagrange* pressure = nullptr;
  const DofMap* dofmap = nullptr;
};

/// All error norms of the convergence studies. L2 norms use the tensor
/// Gauss rule with `quad_points` points per axis (default order+3); the
/// discrete norm |||.||| samples the k-point Gauss lattice. All errors are
/// relative.
ErrorRecord error_norms(const Mesh& mesh, const DiscreteSolution& sol,
                        const PostprocessedPressure* pstar,
                        const ManufacturedCase& mcase, int quad_points,
                        const GeometryCache* quad_geom = nullptr,
                        const RuleND* quad_rule = nullptr);

/// Pairwise observed rates log(e_{l-1}/e_l) / log(h_{l-1}/h_l); the first
/// record keeps rate 0. Throws on inconsistent level ordering.
void fill_rates(std::vector<ErrorRecord>& records);

/// Least-squares slope of log e against log h.
double least_squares_rate(const std::vector<double>& h,
                          const std::vector<double>& e);

}  // namespace mfmfe
