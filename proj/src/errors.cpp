// Copyright (c) 2026 mfmfe contributors
// SPDX-License-Identifier: Apache-2.0
#include "mfmfe/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace mfmfe {

ErrorRecord error_norms(const Mesh& mesh, const DiscreteSolution& sol,
                        const PostprocessedPressure* pstar,
                        const ManufacturedCase& mcase, int quad_points,
                        const GeometryCache* quad_geom, const RuleND* quad_rule) {
  const int d = mesh.dim;
  const VectorElement& elem = *sol.elem;
  const TensorLagrange& pressure = *sol.pressure;
  const DofMap& dofmap = *sol.dofmap;

  RuleND own_rule;
  const RuleND* rule = quad_rule;
  if (!rule || rule->points_per_axis != quad_points) {
    own_rule = tensor_rule(map_rule(gauss_rule(quad_points), 0.0, 1.0), d);
    rule = &own_rule;
    quad_geom = nullptr;
  }
  const int nq = rule->size();
  const std::vector<Point> pts = rule_points(*rule);
  const BasisCache vel = cache_basis(elem, pts);
  const Eigen::MatrixXd pval = cache_pressure(pressure, pts);
  Eigen::MatrixXd pstar_val;
  if (pstar) pstar_val = cache_pressure(pstar->basis, pts);

  // Gauss lattice of the pressure space for the discrete |||.||| norm.
  const int k_gauss = pressure.points_per_axis();
  const RuleND gauss_rule_nd =
      tensor_rule(map_rule(gauss_rule(k_gauss), 0.0, 1.0), d);

  double e_u = 0, n_u = 0, e_div = 0, n_div = 0, e_p = 0, n_p = 0;
  double e_pG = 0, n_pG = 0, e_qp = 0, e_ps = 0;

  Eigen::MatrixXd gram(pressure.size(), pressure.size());
  Eigen::VectorXd pr(pressure.size());
  std::vector<MapData> own_maps(nq);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeometry geom(mesh, c);
    const MapData* cellmaps;
    if (quad_geom) {
      cellmaps = quad_geom->at[c].data();
    } else {
      for (int i = 0; i < nq; ++i) own_maps[i] = geom.map_point(pts[i]);
      cellmaps = own_maps.data();
    }
    const Eigen::VectorXd uloc = dofmap.gather_cell(c, sol.U);
    const Eigen::VectorXd ploc = dofmap.gather_pressure(c, sol.P);

    gram.setZero();
    pr.setZero();
    for (int i = 0; i < nq; ++i) {
      const MapData& m = cellmaps[i];
      const double wj = rule->weights[i] * m.J;
      // velocity: u_h = (1/J) DF vhat
      double vhat[3] = {0, 0, 0}, uh[3] = {0, 0, 0}, ue[3] = {0, 0, 0};
      for (int b = 0; b < d; ++b) vhat[b] = vel.values[b].row(i).dot(uloc);
      for (int a = 0; a < d; ++a) {
        double s = 0.0;
        for (int b = 0; b < d; ++b) s += m.DF[a][b] * vhat[b];
        uh[a] = s / m.J;
      }
      mcase.u(m.x, ue);
      for (int a = 0; a < d; ++a) {
        e_u += wj * (uh[a] - ue[a]) * (uh[a] - ue[a]);
        n_u += wj * ue[a] * ue[a];
      }
      // divergence: div u_h = (1/J) divhat vhat
      const double dh = vel.divergence.row(i).dot(uloc) / m.J;
      const double de = mcase.f(m.x);
      e_div += wj * (dh - de) * (dh - de);
      n_div += wj * de * de;
      // pressure
      const double ph = pval.row(i).dot(ploc);
      const double pe = mcase.p(m.x);
      e_p += wj * (ph - pe) * (ph - pe);
      n_p += wj * pe * pe;
      // cellwise L2 projection of p onto the pressure space
      gram += wj * pval.row(i).transpose() * pval.row(i);
      pr += wj * pe * pval.row(i).transpose();
      if (pstar) {
        const double ps = pstar_val.row(i).dot(pstar->cell[c]);
        e_ps += wj * (ps - pe) * (ps - pe);
      }
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(gram);
    const Eigen::VectorXd diff = llt.solve(pr) - ploc;
    e_qp += diff.dot(gram * diff);

    // discrete Gauss-point norm (pressure coefficients are nodal there)
    for (int i = 0; i < gauss_rule_nd.size(); ++i) {
      const MapData m = geom.map_point(gauss_rule_nd.nodes[i]);
      const double wj = gauss_rule_nd.weights[i] * m.J;
      const double pe = mcase.p(m.x);
      const double diff_g = ploc[i] - pe;
      e_pG += wj * diff_g * diff_g;
      n_pG += wj * pe * pe;
    }
  }

  // relative errors; fall back to absolute when the exact norm vanishes
  auto rel = [](double err2, double norm2) {
    return std::sqrt(norm2 > 1e-28 ? err2 / norm2 : err2);
  };
  ErrorRecord rec;
  rec.err_u = rel(e_u, n_u);
  rec.err_div = rel(e_div, n_div);
  rec.err_p = rel(e_p, n_p);
  rec.err_pG = rel(e_pG, n_pG);
  rec.err_qp = rel(e_qp, n_p);
  rec.err_pstar = pstar ? rel(e_ps, n_p) : 0.0;
  return rec;
}

void fill_rates(std::vector<ErrorRecord>& records) {
  for (std::size_t i = 1; i < records.size(); ++i) {
    const double lh = std::log(records[i - 1].h / records[i].h);
    if (lh <= 0.0) throw std::invalid_argument("fill_rates: h must decrease");
    auto rate = [lh](double e0, double e1) {
      return (e0 > 0 && e1 > 0) ? std::log(e0 / e1) / lh : 0.0;
    };
    records[i].rate_u = rate(records[i - 1].err_u, records[i].err_u);
    records[i].rate_div = rate(records[i - 1].err_div, records[i].err_div);
    records[i].rate_p = rate(records[i - 1].err_p, records[i].err_p);
    records[i].rate_pG = rate(records[i - 1].err_pG, records[i].err_pG);
    records[i].rate_qp = rate(records[i - 1].err_qp, records[i].err_qp);
    records[i].rate_pstar = rate(records[i - 1].err_pstar, records[i].err_pstar);
  }
}

double least_squares_rate(const std::vector<double>& h,
                          const std::vector<double>& e) {
  if (h.size() != e.size() || h.size() < 2)
    throw std::invalid_argument("least_squares_rate: need >= 2 samples");
  const int n = static_cast<int>(h.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(e[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace mfmfe
