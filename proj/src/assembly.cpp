// Copyright (c) 2026 mfmfe contributors
// SPDX-License-Identifier: Apache-2.0
#include "mfmfe/assembly.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace mfmfe {

std::vector<Point> rule_points(const RuleND& rule) {
  return std::vector<Point>(rule.nodes.begin(), rule.nodes.end());
}

Eigen::MatrixXd mapped_permeability_inverse(const MapData& m,
                                            const CoefficientField& field,
                                            int dim) {
  double K[3][3];
  field.K(m.x, K);
  Eigen::MatrixXd Khat(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) Khat(i, j) = K[i][j];
  Eigen::LLT<Eigen::MatrixXd> llt(Khat);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("coefficient error: K is not SPD at a quadrature point");
  Eigen::MatrixXd DF(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) DF(i, j) = m.DF[i][j];
  const Eigen::MatrixXd KinvDF = llt.solve(DF);
  return (DF.transpose() * KinvDF) / m.J;
}

BlockDiagonalMatrix assemble_mass_blocks(const Mesh& mesh,
                                         const VectorElement& elem,
                                         const DofMap& dofmap,
                                         const NodeBlocks& blocks,
                                         const CoefficientField& field,
                                         const GeometryCache& node_geom) {
  const int d = mesh.dim;
  BlockDiagonalMatrix A;
  A.total_dim = dofmap.n_velocity;
  A.blocks.reserve(blocks.blocks.size());
  for (const auto& b : blocks.blocks)
    A.blocks.emplace_back(Eigen::MatrixXd::Zero(b.size(), b.size()));

  const int n_nodes = static_cast<int>(elem.nodes.size());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    for (int i = 0; i < n_nodes; ++i) {
      const Eigen::MatrixXd Kinv =
          mapped_permeability_inverse(node_geom.at[c][i], field, d);
      const double w = elem.node_weights[i];
      Eigen::MatrixXd& block = A.blocks[blocks.cell_node_block[c][i]];
      for (int a = 0; a < d; ++a) {
        const int ga = dofmap.cell_gdof[c][i * d + a];
        if (ga < 0) continue;
        const int pa = blocks.dof_block_pos[ga];
        const double sa = dofmap.cell_sign[c][i * d + a];
        for (int b = 0; b < d; ++b) {
          const int gb = dofmap.cell_gdof[c][i * d + b];
          if (gb < 0) continue;
          block(pa, blocks.dof_block_pos[gb]) +=
              w * Kinv(a, b) * sa * dofmap.cell_sign[c][i * d + b];
        }
      }
    }
  }
  return A;
}

SparseMatrix assemble_div(const Mesh& mesh, const VectorElement& elem,
                          const TensorLagrange& pressure, const DofMap& dofmap) {
  // Reference-cell pairing (divhat vhat, what): identical local matrix for
  // every cell; the integrand is polynomial of per-axis degree <= 2k-1.
  const RuleND rule =
      tensor_rule(map_rule(gauss_rule(elem.order + 1), 0.0, 1.0), mesh.dim);
  Eigen::MatrixXd local = Eigen::MatrixXd::Zero(pressure.size(), elem.n_dofs);
  Eigen::VectorXd pvals;
  for (int i = 0; i < rule.size(); ++i) {
    pressure.values(rule.nodes[i], pvals);
    const Eigen::VectorXd div = elem.eval_divergence(rule.nodes[i]);
    local += rule.weights[i] * pvals * div.transpose();
  }

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(mesh.n_cells()) * pressure.size() *
               elem.n_dofs);
  for (int c = 0; c < mesh.n_cells(); ++c)
    for (int l = 0; l < elem.n_dofs; ++l) {
      const int g = dofmap.cell_gdof[c][l];
      if (g < 0) continue;
      const double s = dofmap.cell_sign[c][l];
      for (int q = 0; q < pressure.size(); ++q)
        if (local(q, l) != 0.0)
          trip.emplace_back(dofmap.pressure_dof(c, q), g, s * local(q, l));
    }
  SparseMatrix B(dofmap.n_pressure, dofmap.n_velocity);
  B.setFromTriplets(trip.begin(), trip.end());
  return B;
}

Eigen::VectorXd project_dirichlet_facet(const CellGeometry& geom, int local_facet,
                                        const std::function<double(const Point&)>& g,
                                        int k, int quad_points) {
  const int d = geom.dim();
  const int axis = local_facet / 2;
  const int side = local_facet % 2;
  const Rule1D line = map_rule(gauss_rule(quad_points), 0.0, 1.0);
  const int nq = static_cast<int>(line.points.size());
  const int nfq = d == 2 ? nq : nq * nq;
  const int nc = d == 2 ? k : k * k;  // Legendre coefficients, degree <= k-1
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(nc);
  std::vector<double> leg0(k), leg1(k);
  for (int q = 0; q < nfq; ++q) {
    Point p{0, 0, 0};
    p[axis] = side;
    double w = 1.0;
    std::array<double, 2> fc{0, 0};
    int slot = 0;
    for (int a = 0; a < d; ++a) {
      if (a == axis) continue;
      const int iq = d == 2 ? q : (slot == 0 ? q / nq : q % nq);
      p[a] = line.points[iq];
      w *= line.weights[iq];
      fc[slot++] = line.points[iq];
    }
    const double gv = g(geom.map_point(p).x);
    shifted_legendre_values(k, fc[0], leg0.data());
    if (d == 3) shifted_legendre_values(k, fc[1], leg1.data());
    for (int i = 0; i < nc; ++i) {
      const int i0 = d == 2 ? i : i / k;
      const int i1 = d == 2 ? 0 : i % k;
      const double basis = d == 2 ? leg0[i0] : leg0[i0] * leg1[i1];
      const double scale = d == 2 ? (2.0 * i0 + 1.0)
                                  : (2.0 * i0 + 1.0) * (2.0 * i1 + 1.0);
      coef[i] += scale * w * gv * basis;
    }
  }
  return coef;
}

RhsVectors assemble_rhs(const Mesh& mesh, const VectorElement& elem,
                        const TensorLagrange& pressure, const DofMap& dofmap,
                        const CoefficientField& field,
                        const GeometryCache& quad_geom, const RuleND& quad_rule,
                        const Eigen::MatrixXd& pressure_values, bool project_g) {
  const int d = mesh.dim;
  const int k = elem.order + (project_g ? 0 : 1);  // MFMFE: k; RT_r: r+1
  RhsVectors rhs;
  rhs.G = Eigen::VectorXd::Zero(dofmap.n_velocity);
  rhs.F = Eigen::VectorXd::Zero(dofmap.n_pressure);

  // F[w] = (f, w): physical integral with J weight.
  for (int c = 0; c < mesh.n_cells(); ++c) {
    for (int i = 0; i < quad_rule.size(); ++i) {
      const MapData& m = quad_geom.at[c][i];
      const double wf = quad_rule.weights[i] * m.J * field.f(m.x);
      for (int q = 0; q < pressure.size(); ++q)
        rhs.F[dofmap.pressure_dof(c, q)] += wf * pressure_values(i, q);
    }
  }

  // G[v] = -<proj g, v.n>_GammaD, a pure reference-facet integral: the facet
  // quadrature pairs the (projected) pulled-back datum with the reference
  // normal trace of each facet DOF's basis function.
  const int facet_quad = elem.order + 3;
  const Rule1D line = map_rule(gauss_rule(facet_quad), 0.0, 1.0);
  const int nq = static_cast<int>(line.points.size());
  const int nfq = d == 2 ? nq : nq * nq;
  // trace values of every facet's DOFs at the facet quadrature points are
  // identical across cells; cache per local facet
  std::array<Eigen::MatrixXd, 6> trace;  // [facet](point, facet-dof)
  std::array<std::vector<Point>, 6> fpoints;
  for (int f = 0; f < 2 * d; ++f) {
    const int axis = f / 2;
    trace[f].resize(nfq, elem.facet_dofs(f).size());
    for (int q = 0; q < nfq; ++q) {
      Point p{0, 0, 0};
      p[axis] = f % 2;
      int slot = 0;
      for (int a = 0; a < d; ++a) {
        if (a == axis) continue;
        const int iq = d == 2 ? q : (slot == 0 ? q / nq : q % nq);
        p[a] = line.points[iq];
        ++slot;
      }
      fpoints[f].push_back(p);
      const double sign = f % 2 == 1 ? 1.0 : -1.0;
      for (std::size_t l = 0; l < elem.facet_dofs(f).size(); ++l)
        trace[f](q, l) =
            sign * elem.basis[elem.facet_dofs(f)[l]].comp[axis].eval(p);
    }
  }

  std::vector<double> leg0(std::max(k, 1)), leg1(std::max(k, 1));
  for (const auto& fa : mesh.facets) {
    if (fa.neighbor != -1 || fa.tag != BoundaryTag::kDirichlet) continue;
    const int c = fa.owner;
    const int f = fa.owner_facet;
    const int axis = f / 2;
    const CellGeometry geom(mesh, c);
    Eigen::VectorXd coef;
    if (project_g) coef = project_dirichlet_facet(geom, f, field.g, k, facet_quad);
    for (int q = 0; q < nfq; ++q) {
      const Point& p = fpoints[f][q];
      double w = 1.0;
      std::array<double, 2> fc{0, 0};
      int slot = 0;
      for (int a = 0; a < d; ++a) {
        if (a == axis) continue;
        const int iq = d == 2 ? q : (slot == 0 ? q / nq : q % nq);
        w *= line.weights[iq];
        fc[slot++] = line.points[iq];
      }
      double gv;
      if (project_g) {
        shifted_legendre_values(k, fc[0], leg0.data());
        if (d == 3) shifted_legendre_values(k, fc[1], leg1.data());
        gv = 0.0;
        for (int i = 0; i < coef.size(); ++i) {
          const int i0 = d == 2 ? i : i / k;
          const int i1 = d == 2 ? 0 : i % k;
          gv += coef[i] * (d == 2 ? leg0[i0] : leg0[i0] * leg1[i1]);
        }
      } else {
        gv = field.g(geom.map_point(p).x);
      }
      for (std::size_t l = 0; l < elem.facet_dofs(f).size(); ++l) {
        const int g = dofmap.cell_gdof[c][elem.facet_dofs(f)[l]];
        if (g < 0) continue;
        rhs.G[g] -= dofmap.cell_sign[c][elem.facet_dofs(f)[l]] * w * gv *
                    trace[f](q, l);
      }
    }
  }
  return rhs;
}

SparseMatrix assemble_rt_mass(const Mesh& mesh, const VectorElement& rt,
                              const DofMap& dofmap, const CoefficientField& field,
                              const GeometryCache& quad_geom,
                              const RuleND& quad_rule, const BasisCache& rt_values) {
  const int d = mesh.dim;
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::MatrixXd local(rt.n_dofs, rt.n_dofs);
  Eigen::MatrixXd vals(d, rt.n_dofs);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    local.setZero();
    for (int i = 0; i < quad_rule.size(); ++i) {
      const Eigen::MatrixXd Kinv =
          mapped_permeability_inverse(quad_geom.at[c][i], field, d);
      for (int a = 0; a < d; ++a) vals.row(a) = rt_values.values[a].row(i);
      local += quad_rule.weights[i] * vals.transpose() * Kinv * vals;
    }
    for (int l = 0; l < rt.n_dofs; ++l) {
      const int gl = dofmap.cell_gdof[c][l];
      if (gl < 0) continue;
      for (int m = 0; m < rt.n_dofs; ++m) {
        const int gm = dofmap.cell_gdof[c][m];
        if (gm < 0) continue;
        trip.emplace_back(gl, gm,
                          dofmap.cell_sign[c][l] * dofmap.cell_sign[c][m] *
                              local(l, m));
      }
    }
  }
  SparseMatrix A(dofmap.n_velocity, dofmap.n_velocity);
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

Eigen::MatrixXd cache_pressure(const TensorLagrange& pressure,
                               const std::vector<Point>& pts) {
  Eigen::MatrixXd out(pts.size(), pressure.size());
  Eigen::VectorXd v;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    pressure.values(pts[i], v);
    out.row(i) = v.transpose();
  }
  return out;
}

void write_triplets(std::ostream& os, const SparseMatrix& A) {
  os << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
  os.precision(17);
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(A, k); it; ++it)
      os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

void write_blocks(std::ostream& os, const BlockDiagonalMatrix& A,
                  const NodeBlocks& blocks) {
  os << A.blocks.size() << ' ' << A.total_dim << '\n';
  os.precision(17);
  for (std::size_t b = 0; b < A.blocks.size(); ++b) {
    const auto& dofs = blocks.blocks[b];
    os << b << ' ' << dofs.size() << '\n';
    for (std::size_t i = 0; i < dofs.size(); ++i)
      for (std::size_t j = 0; j < dofs.size(); ++j)
        os << dofs[i] << ' ' << dofs[j] << ' ' << A.blocks[b](i, j) << '\n';
  }
}

}  // namespace mfmfe
