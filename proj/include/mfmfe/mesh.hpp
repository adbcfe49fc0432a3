// Copyright (c) 2026 mfmfe contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace mfmfe {

using Point = std::array<double, 3>;  // first `dim` entries used

enum class BoundaryTag : int { kInterior = 0, kDirichlet = 1, kNeumann = 2 };

/// Conforming quadrilateral (2d) or hexahedral (3d) mesh.
///
/// Cell corners follow the reference ordering on [0,1]^d:
///   2d: (0,0) (1,0) (1,1) (0,1)
///   3d: (0,0,0) (1,0,0) (1,1,0) (0,1,0) (0,0,1) (1,0,1) (1,1,1) (0,1,1)
/// Local facet f encodes axis = f/2 and side = f%2 (side 0: x_axis = 0).
struct Mesh {
  int dim = 2;
  std::vector<Point> vertices;
  std::vector<std::vector<int>> cells;  // 2^dim vertex ids per cell

  struct Facet {
    int owner = -1;
    int owner_facet = -1;
    int neighbor = -1;  // -1 on the boundary
    int neighbor_facet = -1;
    BoundaryTag tag = BoundaryTag::kInterior;
  };
  std::vector<Facet> facets;
  std::vector<std::array<int, 6>> cell_facets;  // first 2*dim entries used

  int n_cells() const { return static_cast<int>(cells.size()); }
  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int corners_per_cell() const { return 1 << dim; }
  int facets_per_cell() const { return 2 * dim; }

  /// Vertex ids of a local facet in lattice order of the facet's free axes.
  std::vector<int> facet_vertices(int cell, int local_facet) const;

  /// Longest vertex-to-vertex distance over all cells.
  double mesh_size() const;

  /// Rebuild facet connectivity from `vertices`/`cells`; boundary facets get
  /// `boundary_tag`.
  void build_facets(BoundaryTag boundary_tag = BoundaryTag::kDirichlet);
};

/// Reference corner (0/1 per axis) -> corner index in the ordering above.
int corner_index(int dim, const std::array<int, 3>& bits);
/// Local facet -> corner positions (2^(dim-1) reference corners).
std::vector<std::array<int, 3>> facet_corner_bits(int dim, int local_facet);

/// Value, Jacobian and determinant of the multilinear map at a reference point.
struct MapData {
  Point x{};
  double DF[3][3] = {};
  double DFinv[3][3] = {};
  double J = 0.0;  // |det DF| with det DF required positive
};

/// Geometry of one cell: corner coordinates plus the mapping machinery.
class CellGeometry {
 public:
  CellGeometry() = default;
  CellGeometry(const Mesh& mesh, int cell);

  int dim() const { return dim_; }
  int cell() const { return cell_; }

  /// F_E(xhat), DF_E, |det DF_E|. Throws on a degenerate cell (det <= 0).
  MapData map_point(const Point& xhat) const;

  /// Facet area scale J_e = |J_E (DF_E^-T) nhat| at a reference point on the
  /// facet.
  double facet_scale(int local_facet, const Point& xhat) const;

  const std::array<Point, 8>& corners() const { return r_; }

 private:
  int dim_ = 0;
  int cell_ = -1;
  std::array<Point, 8> r_{};  // corner coordinates
};

/// Per-cell geometry data cached at a fixed set of reference points.
/// Construction fails fast if det DF <= 0 at any cached point.
struct GeometryCache {
  int dim = 0;
  std::vector<CellGeometry> cell;
  std::vector<std::vector<MapData>> at;  // [cell][point]
};

GeometryCache build_geometry_cache(const Mesh& mesh,
                                   const std::vector<Point>& ref_points);

/// Split every cell into 2^dim children through facet midpoints (edge chord
/// midpoints, face corner averages, cell corner average). Children inherit
/// boundary tags.
Mesh refine_uniform(const Mesh& mesh);

/// Unit square, 3x3 coarse grid with interior vertices displaced by a fixed
/// smooth sine map, then `level` uniform refinements. All-Dirichlet boundary;
/// nominal h = 1/(3 * 2^level).
Mesh example1_mesh(int level);

/// 4x4x4 unit-cube grid with every vertex moved by the smooth cosine map
/// (x,y,z) += (0.03, -0.04, 0.05) cos(3 pi x) cos(3 pi y) cos(3 pi z),
/// then `level` uniform refinements. All-Dirichlet; nominal h = 1/(4*2^level).
Mesh example2_mesh(int level);

/// Structured n^dim grid on [0,1]^dim (axis-aligned, undistorted).
Mesh cartesian_mesh(int dim, int n);

/// Element-shape diagnostics for the h^2-parallelogram / regular
/// h^2-parallelepiped mesh classes.
struct GeometryReport {
  double h = 0.0;
  std::vector<double> cell_deviation;      // max opposite-edge (face) deviation
  std::vector<double> cell_regularity;     // 3d third-difference deviation
  double max_deviation_over_h2 = 0.0;      // fitted constant for |.| <= C h^2
  double max_regularity_over_h3 = 0.0;     // fitted constant for |.| <= C h^3
  bool is_h2_parallelogram(double C) const { return max_deviation_over_h2 <= C; }
  bool is_regular_h2_parallelepiped(double C) const {
    return max_deviation_over_h2 <= C && max_regularity_over_h3 <= C;
  }
};

GeometryReport geometry_report(const Mesh& mesh);

/// Plain-text mesh format:
///   line 1: dim n_cells n_vertices
///   n_vertices lines of dim coordinates
///   n_cells lines of 2^dim 0-based vertex ids (reference corner order)
///   remaining lines: cell local_facet tag  (boundary facets only)
void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);

}  // namespace mfmfe
