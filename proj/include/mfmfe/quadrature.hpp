// Copyright (c) 2026 mfmfe contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <vector>

namespace mfmfe {

/// One-dimensional quadrature rule on the canonical interval [-1,1].
/// Weights are positive and sum to 2; points are strictly increasing.
struct Rule1D {
  std::vector<double> points;
  std::vector<double> weights;
  int exactness_degree = 0;
};

/// Gauss-Lobatto rule with n >= 2 points: endpoints +-1 plus the roots of
/// the derivative of the Legendre polynomial of degree n-1.
/// Exact for polynomials of degree <= 2n-3.
Rule1D gauss_lobatto_rule(int n);

/// Legendre-Gauss rule with n >= 1 points, exact for degree <= 2n-1.
Rule1D gauss_rule(int n);

/// Affine image of a rule on [a,b]; weights scale by (b-a)/2.
Rule1D map_rule(const Rule1D& rule, double a, double b);

/// Tensor-product rule on [-1,1]^d (or the image interval used to build the
/// 1D rule). Nodes are ordered lexicographically with the LAST axis fastest:
/// node index = (i_1 * n + i_2) * n + ... + i_d.
struct RuleND {
  int dim = 0;
  int points_per_axis = 0;
  std::vector<std::array<double, 3>> nodes;  // first `dim` entries used
  std::vector<double> weights;               // product of 1D weights

  int size() const { return static_cast<int>(weights.size()); }
};

RuleND tensor_rule(const Rule1D& rule, int d);

}  // namespace mfmfe
