// Copyright (c) 2026 mfmfe contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mfmfe/assembly.hpp"

namespace mfmfe {

/// Elementwise postprocessed pressure in Q^k: cell means match p_h and the
/// gradient weakly matches -K^{-1} u_h, giving O(h^{k+1}) accuracy.
struct PostprocessedPressure {
  TensorLagrange basis;                   // Q^k Lagrange at Gauss points
  std::vector<Eigen::VectorXd> cell;      // coefficients per cell
};

/// `k` is the target polynomial order of p_h^* (Q^k), one above the
/// pressure space W^{k-1}.
PostprocessedPressure postprocess(const Mesh& mesh, const VectorElement& elem,
                                  const TensorLagrange& pressure,
                                  const DofMap& dofmap,
                                  const CoefficientField& field,
                                  const Eigen::VectorXd& U,
                                  const Eigen::VectorXd& P, int k,
                                  const GeometryCache& quad_geom,
                                  const RuleND& quad_rule);

}  // namespace mfmfe
