// Copyright (c) 2026 mfmfe contributors
// SPDX-License-Identifier: Apache-2.0
#include "mfmfe/postprocess.hpp"

#include <stdexcept>

namespace mfmfe {

PostprocessedPressure postprocess(const Mesh& mesh, const VectorElement& elem,
                                  const TensorLagrange& pressure,
                                  const DofMap& dofmap,
                                  const CoefficientField& field,
                                  const Eigen::VectorXd& U,
                                  const Eigen::VectorXd& P, int k,
                                  const GeometryCache& quad_geom,
                                  const RuleND& quad_rule) {
  const int d = mesh.dim;
  PostprocessedPressure out;
  out.basis = build_qk_lagrange(k, d);
  const int D = out.basis.size();
  out.cell.assign(mesh.n_cells(), Eigen::VectorXd::Zero(D));

  const int nq = quad_rule.size();
  // reference values cached once: Q^k gradients, velocity basis values,
  // pressure values
  std::vector<Eigen::MatrixXd> qgrad(nq);
  std::vector<Eigen::VectorXd> qval(nq);
  for (int i = 0; i < nq; ++i) {
    out.basis.gradients(quad_rule.nodes[i], qgrad[i]);
    Eigen::VectorXd v;
    out.basis.values(quad_rule.nodes[i], v);
    qval[i] = v;
  }
  const BasisCache vel = cache_basis(elem, rule_points(quad_rule));
  const Eigen::MatrixXd pval = cache_pressure(pressure, rule_points(quad_rule));

  Eigen::MatrixXd stiff(D, D);
  Eigen::VectorXd rhs(D), mean(D);
  Eigen::MatrixXd grads(d, D);
  Eigen::VectorXd vh(d), kv(d), tmp(d);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    stiff.setZero();
    rhs.setZero();
    mean.setZero();
    double volume = 0.0, ph_mean = 0.0;
    const Eigen::VectorXd uloc = dofmap.gather_cell(c, U);
    const Eigen::VectorXd ploc = dofmap.gather_pressure(c, P);
    for (int i = 0; i < nq; ++i) {
      const MapData& m = quad_geom.at[c][i];
      const double w = quad_rule.weights[i];
      // physical gradients DF^{-T} gradhat q
      for (int j = 0; j < D; ++j)
        for (int a = 0; a < d; ++a) {
          double s = 0.0;
          for (int b = 0; b < d; ++b) s += m.DFinv[b][a] * qgrad[i](b, j);
          grads(a, j) = s;
        }
      stiff += (w * m.J) * grads.transpose() * grads;
      // u_h = (1/J) DF vhat
      for (int a = 0; a < d; ++a) vh[a] = vel.values[a].row(i).dot(uloc);
      double K[3][3];
      field.K(m.x, K);
      Eigen::MatrixXd Kmat(d, d);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) Kmat(a, b) = K[a][b];
      for (int a = 0; a < d; ++a) {
        double s = 0.0;
        for (int b = 0; b < d; ++b) s += m.DF[a][b] * vh[b];
        tmp[a] = s / m.J;
      }
      kv = Kmat.llt().solve(tmp);  // K^{-1} u_h at the point
      rhs -= (w * m.J) * (grads.transpose() * kv);
      mean += (w * m.J) * qval[i];
      volume += w * m.J;
      ph_mean += w * m.J * pval.row(i).dot(ploc);
    }
    ph_mean /= volume;

    // solve on the complement of constants: drop the last Lagrange function
    const int n = D - 1;
    if (n > 0) {
      Eigen::LLT<Eigen::MatrixXd> llt(stiff.topLeftCorner(n, n));
      if (llt.info() != Eigen::Success)
        throw std::runtime_error("postprocess: singular local gradient system");
      out.cell[c].head(n) = llt.solve(rhs.head(n));
    }
    // shift so the cell mean matches p_h
    const double shift = ph_mean - mean.dot(out.cell[c]) / volume;
    out.cell[c].array() += shift;
  }
  return out;
}

}  // namespace mfmfe
