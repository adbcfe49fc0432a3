// Copyright (c) 2026 mfmfe contributors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mfmfe/driver.hpp"

using namespace mfmfe;

TEST_CASE("manufactured cases validate and expose consistent data") {
  const ManufacturedCase c1 = example1_case();
  CHECK(c1.dim == 2);
  // spot value: p(1,1) = 1 + 1 + sin(1)cos(1)
  CHECK(c1.p({1, 1, 0}) ==
        doctest::Approx(2.0 + std::sin(1.0) * std::cos(1.0)).epsilon(1e-14));
  const ManufacturedCase c2 = example2_case();
  CHECK(c2.dim == 3);
  // p(1,1,1) = 1 + 1 + 1 + cos(1) + sin(1)
  CHECK(c2.p({1, 1, 1}) ==
        doctest::Approx(3.0 + std::cos(1.0) + std::sin(1.0)).epsilon(1e-14));
  validate_case(c1);
  validate_case(c2);
  validate_case(linear_case(2));
  validate_case(linear_case(3));
}

TEST_CASE("rates: frozen log-ratio values") {
  std::vector<ErrorRecord> recs(2);
  recs[0].h = 0.25;
  recs[1].h = 0.125;
  recs[0].err_u = 1e-2;
  recs[1].err_u = 2.5e-3;
  recs[0].err_p = 8e-3;
  recs[1].err_p = 1e-3;
  recs[0].err_div = 5e-4;
  recs[1].err_div = 5e-4;
  fill_rates(recs);
  CHECK(recs[1].rate_u == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(recs[1].rate_p == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(recs[1].rate_div == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(recs[0].rate_u == 0.0);  // first level has no rate

  std::vector<double> h{0.5, 0.25, 0.125};
  std::vector<double> e{1.0, 0.25, 0.0625};
  CHECK(least_squares_rate(h, e) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("exact discrete input gives zero errors") {
  // interpolate the linear case exactly: constant velocity, linear pressure
  const ManufacturedCase mc = linear_case(2);
  const Mesh mesh = example1_mesh(0);
  const int k = 2;
  const VectorElement elem = build_nodal_basis(k, 2);
  const TensorLagrange pb = build_pressure_basis(k, 2);
  const DofMap map = build_dof_map(mesh, elem, pb.size());
  // nodal interpolation of u: DOF (i,a) = component a of the Piola preimage
  // at node i (J DF^{-1} u)
  Eigen::VectorXd U(map.n_velocity), P(map.n_pressure);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellGeometry geom(mesh, c);
    for (std::size_t i = 0; i < elem.nodes.size(); ++i) {
      const MapData m = geom.map_point(elem.nodes[i]);
      double u[3];
      mc.u(m.x, u);
      for (int a = 0; a < 2; ++a) {
        const int g = map.cell_gdof[c][static_cast<int>(i) * 2 + a];
        if (g < 0) continue;
        double vhat = 0.0;
        for (int b = 0; b < 2; ++b) vhat += m.J * m.DFinv[a][b] * u[b];
        U[g] = map.cell_sign[c][static_cast<int>(i) * 2 + a] * vhat;
      }
    }
    for (int q = 0; q < pb.size(); ++q) {
      const MapData m = geom.map_point(pb.node(q));
      P[map.pressure_dof(c, q)] = mc.p(m.x);
    }
  }
  DiscreteSolution sol;
  sol.U = U;
  sol.P = P;
  sol.elem = &elem;
  sol.pressure = &pb;
  sol.dofmap = &map;
  const ErrorRecord rec = error_norms(mesh, sol, nullptr, mc, k + 3);
  CHECK(rec.err_u < 1e-12);
  CHECK(rec.err_pG < 1e-12);
  // the Gauss-point interpolant of a linear p agrees with its projection
  CHECK(rec.err_qp < 1e-12);
}

TEST_CASE("norms are quadrature converged") {
  RunConfig cfg;
  cfg.example = 1;
  cfg.method = "mfmfe";
  cfg.k = 2;
  const ErrorRecord a = [&] {
    RunConfig c = cfg;
    c.quad_points = cfg.k + 3;
    return run_level(c, 2);
  }();
  const ErrorRecord b = [&] {
    RunConfig c = cfg;
    c.quad_points = cfg.k + 6;
    return run_level(c, 2);
  }();
  CHECK(std::abs(a.err_u - b.err_u) / b.err_u < 1e-3);
  CHECK(std::abs(a.err_p - b.err_p) / b.err_p < 1e-3);
  CHECK(std::abs(a.err_pstar - b.err_pstar) / b.err_pstar < 1e-3);
}

TEST_CASE("csv schema and self-consistent rates") {
  RunConfig cfg;
  cfg.example = 1;
  cfg.method = "mfmfe";
  cfg.k = 1;
  cfg.level_min = 0;
  cfg.level_max = 2;
  const auto recs = run_convergence(cfg);
  std::stringstream ss;
  write_csv(ss, recs);
  std::string header;
  std::getline(ss, header);
  CHECK(header ==
        "level,h,err_u,rate_u,err_div,rate_div,err_p,rate_p,err_pG,rate_pG,"
        "err_qp,rate_qp,err_pstar,rate_pstar,cg_iters,assemble_s,solve_s");
  // rates recomputable from the error columns
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(ss, line)) {
    std::vector<double> vals;
    std::stringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) vals.push_back(std::stod(tok));
    rows.push_back(vals);
  }
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double expect =
        std::log(rows[i - 1][2] / rows[i][2]) / std::log(rows[i - 1][1] / rows[i][1]);
    CHECK(rows[i][3] == doctest::Approx(expect).epsilon(1e-9));
  }
  // k=1 convergence sanity: first-order velocity
  CHECK(recs.back().rate_u == doctest::Approx(1.0).epsilon(0.25));
}

TEST_CASE("deterministic reruns are bit identical") {
  RunConfig cfg;
  cfg.example = 1;
  cfg.method = "mfmfe";
  cfg.k = 2;
  cfg.level_min = 1;
  cfg.level_max = 1;
  cfg.deterministic = true;
  const auto a = run_convergence(cfg);
  const auto b = run_convergence(cfg);
  CHECK(a[0].err_u == b[0].err_u);
  CHECK(a[0].err_p == b[0].err_p);
  CHECK(a[0].err_pstar == b[0].err_pstar);
  CHECK(a[0].cg_iters == b[0].cg_iters);
}

TEST_CASE("element self-check report") {
  std::stringstream ss;
  CHECK(check_element_report(1, 2, ss));
  CHECK(check_element_report(3, 2, ss));
  CHECK(check_element_report(2, 3, ss));
  CHECK(ss.str().find("dim 8") != std::string::npos);
  CHECK(ss.str().find("dim 32") != std::string::npos);  // 2 (3+1)^2
  CHECK(ss.str().find("dim 81") != std::string::npos);  // 3 (2+1)^3
}
