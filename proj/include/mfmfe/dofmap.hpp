// Copyright (c) 2026 mfmfe contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "mfmfe/mesh.hpp"
#include "mfmfe/reference_element.hpp"

namespace mfmfe {

/// Lattice correspondence between the two parametrizations of an interior
/// facet, derived from matching corner vertex ids.
struct FacetTransform {
  bool swap = false;                  // 3d only: exchange the two free axes
  std::array<bool, 2> flip{false, false};
  std::array<int, 2> apply(const std::array<int, 2>& q, int npts, int dim) const;
};

struct FacetTransforms {
  std::vector<FacetTransform> owner_to_neighbor;
  std::vector<FacetTransform> neighbor_to_owner;
};

FacetTransforms compute_facet_transforms(const Mesh& mesh);

enum class DofClass : int { kFacetShared = 0, kBoundaryNormal = 1, kLocal = 2 };

/// Global numbering of velocity and pressure unknowns. Facet DOFs on
/// interior facets are shared between the two adjacent cells; the global
/// value stores the first-numbered cell's local coefficient and the other
/// cell applies the recorded sign. DOFs on Neumann facets are removed
/// (local id maps to -1).
struct DofMap {
  int n_velocity = 0;
  int n_pressure = 0;
  int pressure_per_cell = 0;
  int n_constrained = 0;
  int n_shared = 0;
  std::vector<std::vector<int>> cell_gdof;      // [cell][local dof]
  std::vector<std::vector<double>> cell_sign;   // [cell][local dof]
  std::vector<DofClass> dof_class;              // [global velocity dof]
  FacetTransforms transforms;

  int pressure_dof(int cell, int local) const {
    return cell * pressure_per_cell + local;
  }

  /// Local velocity coefficients of one cell from a global vector
  /// (signs applied; constrained DOFs read as zero).
  Eigen::VectorXd gather_cell(int cell, const Eigen::VectorXd& U) const;
  /// Local pressure coefficients of one cell.
  Eigen::VectorXd gather_pressure(int cell, const Eigen::VectorXd& P) const;
};

DofMap build_dof_map(const Mesh& mesh, const VectorElement& elem,
                     int pressure_per_cell);

/// Disjoint partition of the unconstrained velocity DOFs into blocks keyed
/// by the physical Gauss-Lobatto quadrature node, built by gluing cell-local
/// nodes across interior facets. Only defined for the nodal element.
struct NodeBlocks {
  enum Kind : int { kVertex = 0, kEdge = 1, kFacet = 2, kInterior = 3 };
  std::vector<std::vector<int>> blocks;   // member global dofs
  std::vector<int> kind;                  // per block
  std::vector<int> dof_block;             // gdof -> block
  std::vector<int> dof_block_pos;         // gdof -> index within block
  std::vector<std::vector<int>> cell_node_block;  // [cell][node] -> block
};

NodeBlocks build_node_blocks(const Mesh& mesh, const VectorElement& elem,
                             const DofMap& dofmap);

}  // namespace mfmfe
