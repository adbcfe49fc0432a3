// Copyright (c) 2026 mfmfe contributors
// SPDX-License-Identifier: Apache-2.0
#include "mfmfe/driver.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "mfmfe/postprocess.hpp"

namespace mfmfe {

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

void RunConfig::validate() const {
  if (example != 1 && example != 2)
    throw std::invalid_argument("config: example must be 1 or 2");
  if (method != "mfmfe" && method != "rt")
    throw std::invalid_argument("config: method must be mfmfe or rt");
  if (k < 1) throw std::invalid_argument("config: k must be >= 1");
  if (method == "rt" && k < 1)
    throw std::invalid_argument("config: RT comparison needs k >= 1");
  if (level_min < 0 || level_max < level_min)
    throw std::invalid_argument("config: bad level range");
  if (tol <= 0) throw std::invalid_argument("config: tol must be positive");
}

double RunConfig::nominal_h(int level) const {
  const double coarse = example == 1 ? 1.0 / 3.0 : 1.0 / 4.0;
  return coarse / static_cast<double>(1 << level);
}

ErrorRecord run_level(const RunConfig& config, int level) {
  config.validate();
  const int d = config.dim();
  const int k = config.k;
  const int nq = config.quad_points > 0 ? config.quad_points : k + 3;

  const Mesh mesh = config.example == 1 ? example1_mesh(level) : example2_mesh(level);
  const ManufacturedCase mcase =
      config.example == 1 ? example1_case() : example2_case();
  const CoefficientField field = mcase.field();

  const VectorElement elem =
      config.method == "mfmfe" ? build_nodal_basis(k, d) : build_rt_element(k - 1, d);
  const TensorLagrange pressure = build_pressure_basis(k, d);
  const DofMap dofmap = build_dof_map(mesh, elem, pressure.size());

  const RuleND quad = tensor_rule(map_rule(gauss_rule(nq), 0.0, 1.0), d);
  const GeometryCache quad_geom = build_geometry_cache(mesh, rule_points(quad));
  const Eigen::MatrixXd pvals = cache_pressure(pressure, rule_points(quad));

  DiscreteSolution sol;
  sol.elem = &elem;
  sol.pressure = &pressure;
  sol.dofmap = &dofmap;
  SolveStats stats;

  if (config.method == "mfmfe") {
    const auto t0 = std::chrono::steady_clock::now();
    const NodeBlocks blocks = build_node_blocks(mesh, elem, dofmap);
    const GeometryCache node_geom = build_geometry_cache(mesh, elem.nodes);
    const BlockDiagonalMatrix A =
        assemble_mass_blocks(mesh, elem, dofmap, blocks, field, node_geom);
    const SparseMatrix B = assemble_div(mesh, elem, pressure, dofmap);
    const RhsVectors rhs =
        assemble_rhs(mesh, elem, pressure, dofmap, field, quad_geom, quad, pvals,
                     /*project_g=*/true);
    stats.assemble_seconds = seconds_since(t0);

    const auto t1 = std::chrono::steady_clock::now();
    const FactorizedBlocks fact = factorize_blocks(A);
    const ReducedSystem red = reduce(fact, blocks, B, rhs.G, rhs.F);
    auto [P, cg] = solve_cg(red.S, red.rhs, config.tol, 200000);
    sol.P = std::move(P);
    sol.U = recover_velocity(fact, blocks, B, rhs.G, sol.P);
    stats.solve_seconds = seconds_since(t1);
    stats.iterations = cg.iterations;
    stats.relative_residual = cg.relative_residual;
  } else {
    const auto t0 = std::chrono::steady_clock::now();
    const BasisCache rt_values = cache_basis(elem, rule_points(quad));
    const SparseMatrix A =
        assemble_rt_mass(mesh, elem, dofmap, field, quad_geom, quad, rt_values);
    const SparseMatrix B = assemble_div(mesh, elem, pressure, dofmap);
    const RhsVectors rhs =
        assemble_rhs(mesh, elem, pressure, dofmap, field, quad_geom, quad, pvals,
                     /*project_g=*/false);
    stats.assemble_seconds = seconds_since(t0);

    const auto t1 = std::chrono::steady_clock::now();
    RtSolution rt = solve_rt_schur(A, B, rhs.G, rhs.F, config.tol, 200000);
    stats.solve_seconds = seconds_since(t1);
    stats.iterations = rt.stats.iterations;
    stats.relative_residual = rt.stats.relative_residual;
    sol.P = std::move(rt.P);
    sol.U = std::move(rt.U);
  }

  const PostprocessedPressure pstar =
      postprocess(mesh, elem, pressure, dofmap, field, sol.U, sol.P, k, quad_geom, quad);

  ErrorRecord rec = error_norms(mesh, sol, &pstar, mcase, nq, &quad_geom, &quad);
  rec.level = level;
  rec.h = config.nominal_h(level);
  rec.cg_iters = stats.iterations;
  rec.assemble_s = stats.assemble_seconds;
  rec.solve_s = stats.solve_seconds;
  return rec;
}

std::vector<ErrorRecord> run_convergence(const RunConfig& config) {
  config.validate();
  std::vector<ErrorRecord> records;
  for (int level = config.level_min; level <= config.level_max; ++level)
    records.push_back(run_level(config, level));
  fill_rates(records);
  return records;
}

void write_csv(std::ostream& os, const std::vector<ErrorRecord>& records) {
  os << "level,h,err_u,rate_u,err_div,rate_div,err_p,rate_p,err_pG,rate_pG,"
        "err_qp,rate_qp,err_pstar,rate_pstar,cg_iters,assemble_s,solve_s\n";
  os << std::setprecision(12);
  for (const auto& r : records)
    os << r.level << ',' << r.h << ',' << r.err_u << ',' << r.rate_u << ','
       << r.err_div << ',' << r.rate_div << ',' << r.err_p << ',' << r.rate_p
       << ',' << r.err_pG << ',' << r.rate_pG << ',' << r.err_qp << ','
       << r.rate_qp << ',' << r.err_pstar << ',' << r.rate_pstar << ','
       << r.cg_iters << ',' << r.assemble_s << ',' << r.solve_s << '\n';
}

void write_table(std::ostream& os, const std::vector<ErrorRecord>& records) {
  os << std::setw(6) << "1/h" << std::setw(12) << "err_u" << std::setw(6)
     << "rate" << std::setw(12) << "err_div" << std::setw(6) << "rate"
     << std::setw(12) << "err_p" << std::setw(6) << "rate" << std::setw(12)
     << "err_pG" << std::setw(6) << "rate" << std::setw(12) << "err_qp"
     << std::setw(6) << "rate" << std::setw(12) << "err_pstar" << std::setw(6)
     << "rate" << std::setw(8) << "its" << '\n';
  for (const auto& r : records) {
    os << std::setw(6) << static_cast<int>(std::round(1.0 / r.h));
    auto col = [&os](double e, double rate) {
      os << std::setw(12) << std::scientific << std::setprecision(2) << e
         << std::setw(6) << std::fixed << std::setprecision(1) << rate;
    };
    col(r.err_u, r.rate_u);
    col(r.err_div, r.rate_div);
    col(r.err_p, r.rate_p);
    col(r.err_pG, r.rate_pG);
    col(r.err_qp, r.rate_qp);
    col(r.err_pstar, r.rate_pstar);
    os << std::setw(8) << r.cg_iters << '\n';
  }
  os.unsetf(std::ios_base::floatfield);
}

bool check_element_report(int k, int d, std::ostream& os) {
  bool ok = true;
  auto line = [&](const std::string& what, bool pass, double value) {
    os << "  [" << (pass ? "ok" : "FAIL") << "] " << what << " = "
       << std::scientific << std::setprecision(3) << value << '\n';
    ok = ok && pass;
  };
  try {
    const VectorElement elem = build_nodal_basis(k, d);
    int dim_expected = d;
    for (int a = 0; a < d; ++a) dim_expected *= (k + 1);
    os << "element k=" << k << " d=" << d << ": dim " << elem.n_dofs << '\n';
    line("dimension d(k+1)^d", elem.n_dofs == dim_expected,
         static_cast<double>(elem.n_dofs));
    line("nodal Vandermonde condition < 1e10",
         elem.point_vandermonde_cond < 1e10, elem.point_vandermonde_cond);
    line("moment Vandermonde condition < 1e10",
         elem.moment_vandermonde_cond < 1e10, elem.moment_vandermonde_cond);
    const double gap = span_direct_sum_gap(k, d);
    line("direct-sum singular value gap > 1e-8", gap > 1e-8, gap);
    const double divres = divergence_space_residual(elem);
    line("div basis in Q^{k-1} residual < 1e-10", divres < 1e-10, divres);
    const double orth = quadrature_orthogonality_residual(elem);
    line("quadrature orthogonality residual < 1e-10", orth < 1e-10, orth);
  } catch (const std::exception& e) {
    os << "  [FAIL] construction: " << e.what() << '\n';
    ok = false;
  }
  return ok;
}

}  // namespace mfmfe
