// Copyright (c) 2026 mfmfe contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <iosfwd>

#include "mfmfe/dofmap.hpp"
#include "mfmfe/mesh.hpp"
#include "mfmfe/reference_element.hpp"

namespace mfmfe {

/// Problem data: permeability K(x) (SPD), source f(x), Dirichlet datum g(x).
struct CoefficientField {
  int dim = 2;
  std::function<void(const Point&, double K[3][3])> K;
  std::function<double(const Point&)> f;
  std::function<double(const Point&)> g;
};

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Velocity mass matrix of the quadrature bilinear form: SPD blocks keyed by
/// the global Gauss-Lobatto node. Couplings across distinct nodes vanish by
/// construction and are never stored.
struct BlockDiagonalMatrix {
  std::vector<Eigen::MatrixXd> blocks;  // aligned with NodeBlocks::blocks
  int total_dim = 0;
};

/// Inverse of the mapped permeability at one reference point:
/// Kcal^{-1} = (1/J) DF^T Khat^{-1} DF  (with Kcal = J DF^{-1} Khat DF^{-T}).
/// Throws if K at the mapped point is not SPD.
Eigen::MatrixXd mapped_permeability_inverse(const MapData& m,
                                            const CoefficientField& field,
                                            int dim);

BlockDiagonalMatrix assemble_mass_blocks(const Mesh& mesh,
                                         const VectorElement& elem,
                                         const DofMap& dofmap,
                                         const NodeBlocks& blocks,
                                         const CoefficientField& field,
                                         const GeometryCache& node_geom);

/// B[w, v] = (div v, w) assembled on the reference cell; geometry factors
/// cancel under the Piola transformation. Rows: pressure, cols: velocity.
SparseMatrix assemble_div(const Mesh& mesh, const VectorElement& elem,
                          const TensorLagrange& pressure, const DofMap& dofmap);

/// L2(reference facet) projection of g onto the Legendre basis of degree
/// <= k-1 per axis; coefficients returned in Legendre order.
Eigen::VectorXd project_dirichlet_facet(const CellGeometry& geom, int local_facet,
                                        const std::function<double(const Point&)>& g,
                                        int k, int quad_points);

/// Velocity right-hand side G[v] = -<R_h^{k-1} g, v.n>_GammaD and pressure
/// right-hand side F[w] = (f, w). `project_g` selects the boundary-datum
/// projection used by the MFMFE method; the RT comparison pairs g directly
/// (equivalent, since RT normal traces already lie in the projection space).
struct RhsVectors {
  Eigen::VectorXd G;
  Eigen::VectorXd F;
};
RhsVectors assemble_rhs(const Mesh& mesh, const VectorElement& elem,
                        const TensorLagrange& pressure, const DofMap& dofmap,
                        const CoefficientField& field,
                        const GeometryCache& quad_geom, const RuleND& quad_rule,
                        const Eigen::MatrixXd& pressure_values, bool project_g);

/// Exact-quadrature mass matrix for the RT comparison method.
SparseMatrix assemble_rt_mass(const Mesh& mesh, const VectorElement& rt,
                              const DofMap& dofmap, const CoefficientField& field,
                              const GeometryCache& quad_geom,
                              const RuleND& quad_rule, const BasisCache& rt_values);

/// Pressure-basis values at a set of reference points (row per point).
Eigen::MatrixXd cache_pressure(const TensorLagrange& pressure,
                               const std::vector<Point>& pts);

/// Reference points of a tensor rule as a point list.
std::vector<Point> rule_points(const RuleND& rule);

/// Triplet text export (row col value per line) for external inspection.
void write_triplets(std::ostream& os, const SparseMatrix& A);
void write_blocks(std::ostream& os, const BlockDiagonalMatrix& A,
                  const NodeBlocks& blocks);

}  // namespace mfmfe
