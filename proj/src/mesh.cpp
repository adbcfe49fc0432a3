// Copyright (c) 2026 mfmfe contributors
// SPDX-License-Identifier: Apache-2.0
#include "mfmfe/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mfmfe {

namespace {

Point sub(const Point& a, const Point& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

double norm(const Point& a, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += a[i] * a[i];
  return std::sqrt(s);
}

double det2(const double DF[3][3]) {
  return DF[0][0] * DF[1][1] - DF[0][1] * DF[1][0];
}

double det3(const double DF[3][3]) {
  return DF[0][0] * (DF[1][1] * DF[2][2] - DF[1][2] * DF[2][1]) -
         DF[0][1] * (DF[1][0] * DF[2][2] - DF[1][2] * DF[2][0]) +
         DF[0][2] * (DF[1][0] * DF[2][1] - DF[1][1] * DF[2][0]);
}

}  // namespace

int corner_index(int dim, const std::array<int, 3>& bits) {
  const int base = bits[1] == 0 ? bits[0] : 3 - bits[0];
  return dim == 2 ? base : base + 4 * bits[2];
}

std::vector<std::array<int, 3>> facet_corner_bits(int dim, int local_facet) {
  const int axis = local_facet / 2;
  const int side = local_facet % 2;
  std::vector<int> free_axes;
  for (int a = 0; a < dim; ++a)
    if (a != axis) free_axes.push_back(a);
  std::vector<std::array<int, 3>> out;
  const int nf = 1 << (dim - 1);
  for (int q = 0; q < nf; ++q) {
    std::array<int, 3> bits{0, 0, 0};
    bits[axis] = side;
    // lattice order over free axes, last free axis fastest
    if (dim == 2) {
      bits[free_axes[0]] = q;
    } else {
      bits[free_axes[0]] = q / 2;
      bits[free_axes[1]] = q % 2;
    }
    out.push_back(bits);
  }
  return out;
}

std::vector<int> Mesh::facet_vertices(int cell, int local_facet) const {
  std::vector<int> v;
  for (const auto& bits : facet_corner_bits(dim, local_facet))
    v.push_back(cells[cell][corner_index(dim, bits)]);
  return v;
}

double Mesh::mesh_size() const {
  double h = 0.0;
  const int nc = corners_per_cell();
  for (const auto& cell : cells)
    for (int i = 0; i < nc; ++i)
      for (int j = i + 1; j < nc; ++j)
        h = std::max(h, norm(sub(vertices[cell[i]], vertices[cell[j]]), dim));
  return h;
}

void Mesh::build_facets(BoundaryTag boundary_tag) {
  facets.clear();
  cell_facets.assign(cells.size(), {-1, -1, -1, -1, -1, -1});
  std::map<std::vector<int>, int> lookup;
  for (int c = 0; c < n_cells(); ++c) {
    for (int f = 0; f < facets_per_cell(); ++f) {
      std::vector<int> key = facet_vertices(c, f);
      std::sort(key.begin(), key.end());
      auto it = lookup.find(key);
      if (it == lookup.end()) {
        Facet fa;
        fa.owner = c;
        fa.owner_facet = f;
        fa.tag = boundary_tag;
        lookup.emplace(std::move(key), static_cast<int>(facets.size()));
        cell_facets[c][f] = static_cast<int>(facets.size());
        facets.push_back(fa);
      } else {
        Facet& fa = facets[it->second];
        if (fa.neighbor != -1)
          throw std::runtime_error("mesh: facet shared by more than two cells");
        fa.neighbor = c;
        fa.neighbor_facet = f;
        fa.tag = BoundaryTag::kInterior;
        cell_facets[c][f] = it->second;
      }
    }
  }
}

CellGeometry::CellGeometry(const Mesh& mesh, int cell)
    : dim_(mesh.dim), cell_(cell) {
  for (int i = 0; i < mesh.corners_per_cell(); ++i)
    r_[i] = mesh.vertices[mesh.cells[cell][i]];
}

MapData CellGeometry::map_point(const Point& xhat) const {
  MapData m;
  const double x = xhat[0], y = xhat[1], z = xhat[2];
  if (dim_ == 2) {
    const Point r21 = sub(r_[1], r_[0]);
    const Point r41 = sub(r_[3], r_[0]);
    const Point t = sub(sub(r_[2], r_[3]), r21);  // r34 - r21
    for (int i = 0; i < 2; ++i) {
      m.x[i] = r_[0][i] + r21[i] * x + r41[i] * y + t[i] * x * y;
      m.DF[i][0] = r21[i] + t[i] * y;
      m.DF[i][1] = r41[i] + t[i] * x;
    }
    const double det = det2(m.DF);
    if (det <= 0.0)
      throw std::runtime_error("degenerate cell " + std::to_string(cell_) +
                               ": Jacobian determinant <= 0");
    m.J = det;
    m.DFinv[0][0] = m.DF[1][1] / det;
    m.DFinv[0][1] = -m.DF[0][1] / det;
    m.DFinv[1][0] = -m.DF[1][0] / det;
    m.DFinv[1][1] = m.DF[0][0] / det;
  } else {
    const Point r21 = sub(r_[1], r_[0]);
    const Point r41 = sub(r_[3], r_[0]);
    const Point r51 = sub(r_[4], r_[0]);
    const Point txy = sub(sub(r_[2], r_[3]), r21);  // r34 - r21
    const Point txz = sub(sub(r_[5], r_[4]), r21);  // r65 - r21
    const Point tyz = sub(sub(r_[7], r_[4]), r41);  // r85 - r41
    // (r21 - r34) - (r65 - r78)
    const Point txyz = {
        -txy[0] - (r_[5][0] - r_[4][0]) + (r_[6][0] - r_[7][0]),
        -txy[1] - (r_[5][1] - r_[4][1]) + (r_[6][1] - r_[7][1]),
        -txy[2] - (r_[5][2] - r_[4][2]) + (r_[6][2] - r_[7][2])};
    for (int i = 0; i < 3; ++i) {
      m.x[i] = r_[0][i] + r21[i] * x + r41[i] * y + r51[i] * z +
               txy[i] * x * y + txz[i] * x * z + tyz[i] * y * z +
               txyz[i] * x * y * z;
      m.DF[i][0] = r21[i] + txy[i] * y + txz[i] * z + txyz[i] * y * z;
      m.DF[i][1] = r41[i] + txy[i] * x + tyz[i] * z + txyz[i] * x * z;
      m.DF[i][2] = r51[i] + txz[i] * x + tyz[i] * y + txyz[i] * x * y;
    }
    const double det = det3(m.DF);
    if (det <= 0.0)
      throw std::runtime_error("degenerate cell " + std::to_string(cell_) +
                               ": Jacobian determinant <= 0");
    m.J = det;
    // adjugate / det
    m.DFinv[0][0] = (m.DF[1][1] * m.DF[2][2] - m.DF[1][2] * m.DF[2][1]) / det;
    m.DFinv[0][1] = (m.DF[0][2] * m.DF[2][1] - m.DF[0][1] * m.DF[2][2]) / det;
    m.DFinv[0][2] = (m.DF[0][1] * m.DF[1][2] - m.DF[0][2] * m.DF[1][1]) / det;
    m.DFinv[1][0] = (m.DF[1][2] * m.DF[2][0] - m.DF[1][0] * m.DF[2][2]) / det;
    m.DFinv[1][1] = (m.DF[0][0] * m.DF[2][2] - m.DF[0][2] * m.DF[2][0]) / det;
    m.DFinv[1][2] = (m.DF[0][2] * m.DF[1][0] - m.DF[0][0] * m.DF[1][2]) / det;
    m.DFinv[2][0] = (m.DF[1][0] * m.DF[2][1] - m.DF[1][1] * m.DF[2][0]) / det;
    m.DFinv[2][1] = (m.DF[0][1] * m.DF[2][0] - m.DF[0][0] * m.DF[2][1]) / det;
    m.DFinv[2][2] = (m.DF[0][0] * m.DF[1][1] - m.DF[0][1] * m.DF[1][0]) / det;
  }
  return m;
}

double CellGeometry::facet_scale(int local_facet, const Point& xhat) const {
  const MapData m = map_point(xhat);
  const int axis = local_facet / 2;
  const double sign = local_facet % 2 == 0 ? -1.0 : 1.0;
  // J_E (DF^-1)^T nhat = J_E * (row `axis` of DF^-1) * sign
  Point v{0, 0, 0};
  for (int i = 0; i < dim_; ++i) v[i] = m.J * m.DFinv[axis][i] * sign;
  return norm(v, dim_);
}

GeometryCache build_geometry_cache(const Mesh& mesh,
                                   const std::vector<Point>& ref_points) {
  GeometryCache cache;
  cache.dim = mesh.dim;
  cache.cell.reserve(mesh.n_cells());
  cache.at.resize(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    cache.cell.emplace_back(mesh, c);
    cache.at[c].reserve(ref_points.size());
    for (const auto& p : ref_points) cache.at[c].push_back(cache.cell[c].map_point(p));
  }
  return cache;
}

Mesh cartesian_mesh(int dim, int n) {
  Mesh mesh;
  mesh.dim = dim;
  const int nv1 = n + 1;
  const double h = 1.0 / n;
  if (dim == 2) {
    for (int i = 0; i < nv1; ++i)
      for (int j = 0; j < nv1; ++j)
        mesh.vertices.push_back({i * h, j * h, 0.0});
    auto vid = [&](int i, int j) { return i * nv1 + j; };
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        mesh.cells.push_back(
            {vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
  } else {
    for (int i = 0; i < nv1; ++i)
      for (int j = 0; j < nv1; ++j)
        for (int k = 0; k < nv1; ++k)
          mesh.vertices.push_back({i * h, j * h, k * h});
    auto vid = [&](int i, int j, int k) { return (i * nv1 + j) * nv1 + k; };
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          mesh.cells.push_back({vid(i, j, k), vid(i + 1, j, k),
                                vid(i + 1, j + 1, k), vid(i, j + 1, k),
                                vid(i, j, k + 1), vid(i + 1, j, k + 1),
                                vid(i + 1, j + 1, k + 1), vid(i, j + 1, k + 1)});
  }
  mesh.build_facets();
  return mesh;
}

Mesh refine_uniform(const Mesh& mesh) {
  Mesh out;
  out.dim = mesh.dim;
  out.vertices = mesh.vertices;
  const int d = mesh.dim;

  std::map<std::vector<int>, int> midpoint;  // sorted corner ids -> new vertex
  auto average_vertex = [&](const std::vector<int>& ids) {
    std::vector<int> key = ids;
    std::sort(key.begin(), key.end());
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    Point p{0, 0, 0};
    for (int v : ids)
      for (int i = 0; i < d; ++i) p[i] += mesh.vertices[v][i];
    for (int i = 0; i < d; ++i) p[i] /= ids.size();
    const int id = static_cast<int>(out.vertices.size());
    out.vertices.push_back(p);
    midpoint.emplace(std::move(key), id);
    return id;
  };

  // Vertex id at a position of the refined 3^d lattice of a parent cell.
  auto lattice_vertex = [&](const std::vector<int>& cell,
                            const std::array<int, 3>& l) {
    std::vector<int> odd_axes, ids;
    for (int a = 0; a < d; ++a)
      if (l[a] % 2 == 1) odd_axes.push_back(a);
    // Enumerate parent corners adjacent to the lattice point.
    const int m = static_cast<int>(odd_axes.size());
    for (int s = 0; s < (1 << m); ++s) {
      // even axes keep l[a]/2; odd axes take both ends
      std::array<int, 3> bits{0, 0, 0};
      for (int a = 0; a < d; ++a) bits[a] = l[a] / 2;
      for (int t = 0; t < m; ++t) bits[odd_axes[t]] = (s >> t) & 1;
      ids.push_back(cell[corner_index(d, bits)]);
    }
    if (m == 0) return ids[0];
    return average_vertex(ids);
  };

  for (const auto& cell : mesh.cells) {
    std::array<int, 3> child{0, 0, 0};
    const int nchild = 1 << d;
    for (int ci = 0; ci < nchild; ++ci) {
      for (int a = 0; a < d; ++a) child[a] = (ci >> a) & 1;
      std::vector<int> corners(1 << d);
      for (int b = 0; b < (1 << d); ++b) {
        std::array<int, 3> bits{(b >> 0) & 1, (b >> 1) & 1, (b >> 2) & 1};
        std::array<int, 3> l{0, 0, 0};
        for (int a = 0; a < d; ++a) l[a] = child[a] + bits[a];
        corners[corner_index(d, bits)] = lattice_vertex(cell, l);
      }
      out.cells.push_back(std::move(corners));
    }
  }

  out.build_facets();

  // Inherit boundary tags: collect parent boundary facet membership by
  // vertex-set containment on child facets.
  std::map<std::vector<int>, BoundaryTag> child_tags;
  for (const auto& fa : mesh.facets) {
    if (fa.neighbor != -1) continue;
    // Children on the parent's facet side carry the tag; identify their facet
    // vertex sets by re-deriving them from the refined lattice.
    const auto& cell = mesh.cells[fa.owner];
    const int axis = fa.owner_facet / 2;
    const int side = fa.owner_facet % 2;
    std::array<int, 3> child{0, 0, 0};
    for (int ci = 0; ci < (1 << d); ++ci) {
      for (int a = 0; a < d; ++a) child[a] = (ci >> a) & 1;
      if (child[axis] != side) continue;
      std::vector<int> key;
      for (const auto& bits : facet_corner_bits(d, fa.owner_facet)) {
        std::array<int, 3> l{0, 0, 0};
        for (int a = 0; a < d; ++a) l[a] = child[a] + bits[a];
        key.push_back(lattice_vertex(cell, l));
      }
      std::sort(key.begin(), key.end());
      child_tags.emplace(std::move(key), fa.tag);
    }
  }
  for (auto& fa : out.facets) {
    if (fa.neighbor != -1) continue;
    std::vector<int> key = out.facet_vertices(fa.owner, fa.owner_facet);
    std::sort(key.begin(), key.end());
    auto it = child_tags.find(key);
    if (it == child_tags.end())
      throw std::runtime_error("refine_uniform: untagged boundary child facet");
    fa.tag = it->second;
  }
  return out;
}

Mesh example1_mesh(int level) {
  if (level < 0) throw std::invalid_argument("example1_mesh: level must be >= 0");
  Mesh mesh = cartesian_mesh(2, 3);
  // Fixed smooth displacement, zero on the boundary, making the coarse cells
  // genuinely non-affine. Uniform refinement then yields h^2-parallelograms.
  for (auto& v : mesh.vertices) {
    const double s = std::sin(2.0 * M_PI * v[0]) * std::sin(2.0 * M_PI * v[1]);
    v[0] += 0.03 * s;
    v[1] -= 0.04 * s;
  }
  for (int l = 0; l < level; ++l) mesh = refine_uniform(mesh);
  return mesh;
}

Mesh example2_mesh(int level) {
  if (level < 0) throw std::invalid_argument("example2_mesh: level must be >= 0");
  Mesh mesh = cartesian_mesh(3, 4);
  for (auto& v : mesh.vertices) {
    const double s = std::cos(3.0 * M_PI * v[0]) * std::cos(3.0 * M_PI * v[1]) *
                     std::cos(3.0 * M_PI * v[2]);
    v[0] += 0.03 * s;
    v[1] -= 0.04 * s;
    v[2] += 0.05 * s;
  }
  for (int l = 0; l < level; ++l) mesh = refine_uniform(mesh);
  return mesh;
}

GeometryReport geometry_report(const Mesh& mesh) {
  GeometryReport rep;
  rep.h = mesh.mesh_size();
  const int d = mesh.dim;
  auto quad_deviation = [&](const Point& a, const Point& b, const Point& c,
                            const Point& e) {
    // |(r3 - r4) - (r2 - r1)| for the cyclic quadrilateral (a,b,c,e)
    Point t{0, 0, 0};
    for (int i = 0; i < d; ++i) t[i] = c[i] - e[i] - b[i] + a[i];
    return norm(t, d);
  };
  for (int ci = 0; ci < mesh.n_cells(); ++ci) {
    const auto& cell = mesh.cells[ci];
    const auto v = [&](int i) -> const Point& { return mesh.vertices[cell[i]]; };
    double diam = 0.0;
    for (int i = 0; i < mesh.corners_per_cell(); ++i)
      for (int j = i + 1; j < mesh.corners_per_cell(); ++j)
        diam = std::max(diam, norm(sub(v(i), v(j)), d));
    double dev = 0.0;
    if (d == 2) {
      dev = quad_deviation(v(0), v(1), v(2), v(3));
    } else {
      static const int faces[6][4] = {{0, 1, 2, 3}, {4, 5, 6, 7}, {0, 1, 5, 4},
                                      {1, 2, 6, 5}, {3, 2, 6, 7}, {0, 3, 7, 4}};
      for (const auto& f : faces)
        dev = std::max(dev, quad_deviation(v(f[0]), v(f[1]), v(f[2]), v(f[3])));
      // |(r21 - r34) - (r65 - r78)|
      Point t{0, 0, 0};
      for (int i = 0; i < 3; ++i)
        t[i] = (v(1)[i] - v(0)[i]) - (v(2)[i] - v(3)[i]) -
               ((v(5)[i] - v(4)[i]) - (v(6)[i] - v(7)[i]));
      rep.cell_regularity.push_back(norm(t, 3));
      rep.max_regularity_over_h3 =
          std::max(rep.max_regularity_over_h3, norm(t, 3) / (diam * diam * diam));
    }
    rep.cell_deviation.push_back(dev);
    rep.max_deviation_over_h2 =
        std::max(rep.max_deviation_over_h2, dev / (diam * diam));
  }
  return rep;
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
  os << mesh.dim << ' ' << mesh.n_cells() << ' ' << mesh.n_vertices() << '\n';
  os.precision(17);
  for (const auto& v : mesh.vertices) {
    for (int i = 0; i < mesh.dim; ++i) os << (i ? " " : "") << v[i];
    os << '\n';
  }
  for (const auto& c : mesh.cells) {
    for (std::size_t i = 0; i < c.size(); ++i) os << (i ? " " : "") << c[i];
    os << '\n';
  }
  for (const auto& fa : mesh.facets)
    if (fa.neighbor == -1)
      os << fa.owner << ' ' << fa.owner_facet << ' ' << static_cast<int>(fa.tag)
         << '\n';
}

Mesh read_mesh(std::istream& is) {
  Mesh mesh;
  int ncells = 0, nverts = 0;
  if (!(is >> mesh.dim >> ncells >> nverts))
    throw std::runtime_error("read_mesh: bad header");
  if (mesh.dim != 2 && mesh.dim != 3)
    throw std::runtime_error("read_mesh: dim must be 2 or 3");
  mesh.vertices.resize(nverts, {0, 0, 0});
  for (auto& v : mesh.vertices)
    for (int i = 0; i < mesh.dim; ++i)
      if (!(is >> v[i])) throw std::runtime_error("read_mesh: bad vertex line");
  mesh.cells.assign(ncells, std::vector<int>(mesh.corners_per_cell()));
  for (auto& c : mesh.cells)
    for (auto& idx : c)
      if (!(is >> idx) || idx < 0 || idx >= nverts)
        throw std::runtime_error("read_mesh: bad cell line");
  mesh.build_facets();
  int cell, facet, tag;
  while (is >> cell >> facet >> tag) {
    const int fid = mesh.cell_facets.at(cell).at(facet);
    if (mesh.facets[fid].neighbor != -1)
      throw std::runtime_error("read_mesh: tag on interior facet");
    mesh.facets[fid].tag = static_cast<BoundaryTag>(tag);
  }
  return mesh;
}

}  // namespace mfmfe
