// Copyright (c) 2026 mfmfe contributors
// SPDX-License-Identifier: Apache-2.0
#include "mfmfe/dofmap.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mfmfe {

std::array<int, 2> FacetTransform::apply(const std::array<int, 2>& q, int npts,
                                         int dim) const {
  if (dim == 2) return {flip[0] ? npts - 1 - q[0] : q[0], 0};
  std::array<int, 2> t = swap ? std::array<int, 2>{q[1], q[0]} : q;
  if (flip[0]) t[0] = npts - 1 - t[0];
  if (flip[1]) t[1] = npts - 1 - t[1];
  return t;
}

FacetTransforms compute_facet_transforms(const Mesh& mesh) {
  FacetTransforms out;
  out.owner_to_neighbor.resize(mesh.facets.size());
  out.neighbor_to_owner.resize(mesh.facets.size());

  auto derive = [&](const std::vector<int>& from, const std::vector<int>& to) {
    // Corner lists are in lattice order of the free axes (2 points per axis).
    FacetTransform t;
    if (mesh.dim == 2) {
      if (from[0] == to[0] && from[1] == to[1]) {
        t.flip[0] = false;
      } else if (from[0] == to[1] && from[1] == to[0]) {
        t.flip[0] = true;
      } else {
        throw std::runtime_error("facet transform: corner mismatch");
      }
      return t;
    }
    for (int swap = 0; swap < 2; ++swap)
      for (int f0 = 0; f0 < 2; ++f0)
        for (int f1 = 0; f1 < 2; ++f1) {
          FacetTransform cand;
          cand.swap = swap != 0;
          cand.flip = {f0 != 0, f1 != 0};
          bool ok = true;
          for (int c = 0; c < 4 && ok; ++c) {
            const std::array<int, 2> q{c / 2, c % 2};
            const std::array<int, 2> p = cand.apply(q, 2, 3);
            ok = to[p[0] * 2 + p[1]] == from[c];
          }
          if (ok) return cand;
        }
    throw std::runtime_error("facet transform: corner mismatch");
  };

  for (std::size_t i = 0; i < mesh.facets.size(); ++i) {
    const auto& fa = mesh.facets[i];
    if (fa.neighbor == -1) continue;
    const auto vo = mesh.facet_vertices(fa.owner, fa.owner_facet);
    const auto vn = mesh.facet_vertices(fa.neighbor, fa.neighbor_facet);
    out.owner_to_neighbor[i] = derive(vo, vn);
    out.neighbor_to_owner[i] = derive(vn, vo);
  }
  return out;
}

Eigen::VectorXd DofMap::gather_cell(int cell, const Eigen::VectorXd& U) const {
  const auto& g = cell_gdof[cell];
  Eigen::VectorXd out(g.size());
  for (std::size_t l = 0; l < g.size(); ++l)
    out[l] = g[l] < 0 ? 0.0 : cell_sign[cell][l] * U[g[l]];
  return out;
}

Eigen::VectorXd DofMap::gather_pressure(int cell, const Eigen::VectorXd& P) const {
  return P.segment(static_cast<Eigen::Index>(cell) * pressure_per_cell,
                   pressure_per_cell);
}

DofMap build_dof_map(const Mesh& mesh, const VectorElement& elem,
                     int pressure_per_cell) {
  DofMap map;
  map.pressure_per_cell = pressure_per_cell;
  map.n_pressure = mesh.n_cells() * pressure_per_cell;
  map.transforms = compute_facet_transforms(mesh);
  map.cell_gdof.assign(mesh.n_cells(), std::vector<int>(elem.n_dofs, -2));
  map.cell_sign.assign(mesh.n_cells(), std::vector<double>(elem.n_dofs, 0.0));

  const double tol = 1e-10 * mesh.mesh_size();
  int next = 0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    for (int l = 0; l < elem.n_dofs; ++l) {
      if (map.cell_gdof[c][l] != -2) continue;  // set from the other side
      const DofInfo& info = elem.dofs[l];
      if (info.facet < 0) {
        map.cell_gdof[c][l] = next;
        map.cell_sign[c][l] = 1.0;
        map.dof_class.push_back(DofClass::kLocal);
        ++next;
        continue;
      }
      const int fid = mesh.cell_facets[c][info.facet];
      const Mesh::Facet& fa = mesh.facets[fid];
      if (fa.neighbor == -1) {
        if (fa.tag == BoundaryTag::kNeumann) {
          map.cell_gdof[c][l] = -1;  // u.n = 0 strongly, removed from system
          ++map.n_constrained;
          continue;
        }
        map.cell_gdof[c][l] = next;
        map.cell_sign[c][l] = 1.0;
        map.dof_class.push_back(DofClass::kBoundaryNormal);
        ++next;
        continue;
      }
      // interior facet: number here, assign the partner on the other side
      const bool is_owner = fa.owner == c;
      const int other = is_owner ? fa.neighbor : fa.owner;
      const int other_facet = is_owner ? fa.neighbor_facet : fa.owner_facet;
      const FacetTransform& t = is_owner ? map.transforms.owner_to_neighbor[fid]
                                         : map.transforms.neighbor_to_owner[fid];
      const std::array<int, 2> q2 = t.apply(info.fpos, elem.facet_points, mesh.dim);
      const int l2 = elem.facet_dofs(other_facet)[elem.facet_pos_index(q2)];
      const DofInfo& info2 = elem.dofs[l2];

      // both reference points must land on the same physical point
      {
        const Point p1 = elem.facet_point(info.facet, info.fpos);
        const Point p2 = elem.facet_point(other_facet, info2.fpos);
        const MapData m1 = CellGeometry(mesh, c).map_point(p1);
        const MapData m2 = CellGeometry(mesh, other).map_point(p2);
        double dist = 0.0;
        for (int i = 0; i < mesh.dim; ++i)
          dist += (m1.x[i] - m2.x[i]) * (m1.x[i] - m2.x[i]);
        if (std::sqrt(dist) > tol)
          throw std::runtime_error("dofmap: facet quadrature nodes of cells " +
                                   std::to_string(c) + " and " +
                                   std::to_string(other) + " do not coincide");
      }

      map.cell_gdof[c][l] = next;
      map.cell_sign[c][l] = 1.0;
      map.cell_gdof[other][l2] = next;
      map.cell_sign[other][l2] = -info.trace_sign * info2.trace_sign;
      map.dof_class.push_back(DofClass::kFacetShared);
      ++map.n_shared;
      ++next;
    }
  }
  map.n_velocity = next;
  return map;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

NodeBlocks build_node_blocks(const Mesh& mesh, const VectorElement& elem,
                             const DofMap& dofmap) {
  if (elem.nodes.empty())
    throw std::invalid_argument("build_node_blocks: element has no nodal lattice");
  const int d = mesh.dim;
  const int npts = elem.facet_points;
  const int nodes_per_cell = static_cast<int>(elem.nodes.size());
  UnionFind uf(mesh.n_cells() * nodes_per_cell);

  auto node_of = [&](int facet, const std::array<int, 2>& q) {
    const int axis = facet / 2;
    const int side = facet % 2;
    std::array<int, 3> lat{0, 0, 0};
    lat[axis] = side == 1 ? npts - 1 : 0;
    int slot = 0;
    for (int a = 0; a < d; ++a)
      if (a != axis) lat[a] = q[slot++];
    int idx = 0;
    for (int a = 0; a < d; ++a) idx = idx * npts + lat[a];
    return idx;
  };

  for (std::size_t fid = 0; fid < mesh.facets.size(); ++fid) {
    const auto& fa = mesh.facets[fid];
    if (fa.neighbor == -1) continue;
    const FacetTransform& t = dofmap.transforms.owner_to_neighbor[fid];
    const int nfq = d == 2 ? npts : npts * npts;
    for (int q = 0; q < nfq; ++q) {
      const std::array<int, 2> qo =
          d == 2 ? std::array<int, 2>{q, 0} : std::array<int, 2>{q / npts, q % npts};
      const std::array<int, 2> qn = t.apply(qo, npts, d);
      uf.unite(fa.owner * nodes_per_cell + node_of(fa.owner_facet, qo),
               fa.neighbor * nodes_per_cell + node_of(fa.neighbor_facet, qn));
    }
  }

  NodeBlocks nb;
  nb.cell_node_block.assign(mesh.n_cells(), std::vector<int>(nodes_per_cell, -1));
  nb.dof_block.assign(dofmap.n_velocity, -1);
  nb.dof_block_pos.assign(dofmap.n_velocity, -1);
  std::vector<int> root_block(mesh.n_cells() * nodes_per_cell, -1);

  for (int c = 0; c < mesh.n_cells(); ++c) {
    for (int i = 0; i < nodes_per_cell; ++i) {
      const int root = uf.find(c * nodes_per_cell + i);
      int b = root_block[root];
      if (b == -1) {
        b = static_cast<int>(nb.blocks.size());
        root_block[root] = b;
        nb.blocks.emplace_back();
        // classify by the number of extreme lattice coordinates
        int rem = i, extremes = 0;
        for (int a = d - 1; a >= 0; --a) {
          const int la = rem % npts;
          rem /= npts;
          if (la == 0 || la == npts - 1) ++extremes;
        }
        int kind = NodeBlocks::kInterior;
        if (extremes == d)
          kind = NodeBlocks::kVertex;
        else if (extremes == 2 && d == 3)
          kind = NodeBlocks::kEdge;
        else if (extremes >= 1)
          kind = NodeBlocks::kFacet;
        nb.kind.push_back(kind);
      }
      nb.cell_node_block[c][i] = b;
      for (int a = 0; a < d; ++a) {
        const int g = dofmap.cell_gdof[c][i * d + a];
        if (g < 0 || nb.dof_block[g] != -1) continue;
        nb.dof_block[g] = b;
        nb.dof_block_pos[g] = static_cast<int>(nb.blocks[b].size());
        nb.blocks[b].push_back(g);
      }
    }
  }
  return nb;
}

}  // namespace mfmfe
