// Copyright (c) 2026 mfmfe contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "mfmfe/legendre.hpp"
#include "mfmfe/mesh.hpp"
#include "mfmfe/quadrature.hpp"

namespace mfmfe {

/// A vector-valued polynomial written as signed monomials per component.
struct MonomialTerm {
  struct Part {
    double coef;
    std::array<int, 3> exps;
  };
  std::array<std::vector<Part>, 3> comp;
};

/// Spanning set of a vector polynomial space on [0,1]^dim.
struct PolySpan {
  int dim = 0;
  std::vector<MonomialTerm> terms;
  int size() const { return static_cast<int>(terms.size()); }
};

/// Curl bubbles that enhance RT_{k-1} so that each velocity component spans
/// Q^k and the DOFs can sit at tensor Gauss-Lobatto points.
PolySpan build_bubble_span(int k, int d);

/// Raviart-Thomas span of order k >= 0: per component, Q^k + Q^k * x_own,
/// dimension d (k+1)^(d-1) (k+2).
PolySpan build_rt_span(int k, int d);

/// Degree-of-freedom metadata shared by both velocity elements.
struct DofInfo {
  int facet = -1;                // -1 for interior DOFs
  std::array<int, 2> fpos{0, 0}; // lattice position on the facet (free axes)
  int axis = -1;                 // vector component of a point-value DOF
  int node = -1;                 // lattice node id (nodal element only)
  double trace_sign = 0.0;       // nhat_facet . e_axis, facet DOFs only
};

/// A velocity element on [0,1]^dim: span, unisolvent DOFs, ready-to-evaluate
/// basis with analytic divergences.
class VectorElement {
 public:
  int dim = 0;
  int order = 0;        // k for the enhanced element, r for RT_r
  int n_dofs = 0;
  int facet_points = 0; // facet-lattice points per axis
  PolySpan span;
  std::vector<DofInfo> dofs;
  std::vector<VectorPoly> basis;
  std::vector<TensorPoly> basis_div;
  std::vector<Point> nodes;          // Gauss-Lobatto nodes (nodal element only)
  std::vector<double> node_weights;  // tensor GL weights on [0,1]^d

  double point_vandermonde_cond = 0.0;
  double moment_vandermonde_cond = 0.0;  // enhanced element only

  /// d x n_dofs matrix of basis values at a reference point.
  Eigen::MatrixXd eval_values(const Point& xhat) const;
  /// Analytic divergences of all basis vectors at a reference point.
  Eigen::VectorXd eval_divergence(const Point& xhat) const;

  /// Reference point on facet f for facet-lattice coordinates q (in the
  /// facet's point set: GL for the nodal element, Gauss for RT).
  Point facet_point(int facet, const std::array<int, 2>& q) const;
  int facet_pos_index(const std::array<int, 2>& q) const {
    return dim == 2 ? q[0] : q[0] * facet_points + q[1];
  }
  /// Local DOF ids of the facet-normal DOFs of a facet, indexed by
  /// facet_pos_index.
  const std::vector<int>& facet_dofs(int facet) const { return facet_dofs_[facet]; }

 private:
  friend VectorElement build_nodal_basis(int, int);
  friend VectorElement build_rt_element(int, int);
  std::array<std::vector<int>, 6> facet_dofs_;
  std::vector<double> facet_point_coords_;  // 1d facet lattice on [0,1]
};

/// Enhanced Raviart-Thomas element V^k = RT_{k-1} (+) bubbles with nodal
/// DOFs: the d vector components at the (k+1)^d tensor Gauss-Lobatto points,
/// ordered node-major / direction-minor. Throws if the generalized
/// Vandermonde is numerically singular (condition > 1e12).
VectorElement build_nodal_basis(int k, int d);

/// RT_r element for the comparison method; facet DOFs are normal components
/// at (r+1)^(d-1) tensor Gauss points per facet, interior DOFs are moments
/// against P^{r-1}(x_c) (x) Q^r(others) per component c.
VectorElement build_rt_element(int r, int d);

/// Tensor-product Lagrange basis at per-axis nodes on [0,1].
class TensorLagrange {
 public:
  TensorLagrange() = default;
  TensorLagrange(int dim, std::vector<double> nodes1d);

  int dim() const { return dim_; }
  int points_per_axis() const { return static_cast<int>(nodes_.size()); }
  int size() const { return size_; }
  Point node(int i) const;

  void values(const Point& xhat, Eigen::VectorXd& out) const;
  /// Reference gradients, d x size.
  void gradients(const Point& xhat, Eigen::MatrixXd& out) const;

 private:
  void line_values(double x, std::vector<double>& v,
                   std::vector<double>* dv) const;
  int dim_ = 0;
  int size_ = 0;
  std::vector<double> nodes_;
};

/// Pressure space Q^{k-1} as Lagrange functions at k Gauss points per axis,
/// so coefficients are point values at the Gauss lattice.
TensorLagrange build_pressure_basis(int k, int d);

/// Q^k Lagrange basis at k+1 Gauss points per axis (postprocessing space).
TensorLagrange build_qk_lagrange(int k, int d);

/// Exact L2(reference facet / cell) projector onto RT_r defined through the
/// classical RT moment DOFs; test-oracle machinery for the quadrature
/// orthogonality property.
class RtProjector {
 public:
  RtProjector(int r, int d);
  /// Project a vector polynomial (given with >= r+2 Legendre coefficients
  /// per axis) onto RT_r.
  VectorPoly project(const VectorPoly& q) const;

 private:
  int r_, d_, n_;
  std::vector<VectorPoly> ortho_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  Eigen::MatrixXd moments_of(const VectorPoly& q) const;
  Eigen::VectorXd moment_vector(const VectorPoly& q) const;
};

/// max_{basis q, v in Q^{k-1}(R^d)} |(q - Pi_RT^{k-1} q, v)_Qhat| with the
/// (k+1)-point tensor Gauss-Lobatto rule; zero for an exact implementation.
double quadrature_orthogonality_residual(const VectorElement& elem);

/// Residual of the divergence of every basis vector against its L2
/// projection onto Q^{k-1}; zero when div V^k = Q^{k-1} holds.
double divergence_space_residual(const VectorElement& elem);

/// Rank check rank[RT_{k-1} | bubbles] = dim RT_{k-1} + dim bubbles,
/// returned as the ratio of smallest to largest singular value of the
/// orthonormalized span (positive iff direct sum).
double span_direct_sum_gap(int k, int d);

/// Basis values/divergences cached at a fixed set of reference points.
struct BasisCache {
  std::array<Eigen::MatrixXd, 3> values;  // [axis](point, dof)
  Eigen::MatrixXd divergence;             // (point, dof)
};
BasisCache cache_basis(const VectorElement& elem, const std::vector<Point>& pts);

}  // namespace mfmfe
