// Copyright (c) 2026 mfmfe contributors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit code is the number of
// failed criteria.
#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "mfmfe/driver.hpp"
#include "mfmfe/postprocess.hpp"

using namespace mfmfe;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
              what.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

// ---------------------------------------------------------------- criterion 1
void element_self_checks() {
  bool ok = true;
  std::string detail;
  for (int d : {2, 3})
    for (int k = 1; k <= 4; ++k) {
      const VectorElement elem = build_nodal_basis(k, d);
      int dim = d;
      for (int a = 0; a < d; ++a) dim *= (k + 1);
      const double divres = divergence_space_residual(elem);
      const double orth = quadrature_orthogonality_residual(elem);
      const bool pass = elem.n_dofs == dim &&
                        elem.point_vandermonde_cond < 1e10 &&
                        elem.moment_vandermonde_cond < 1e10 &&
                        divres < 1e-10 && orth < 1e-10;
      if (!pass)
        detail += " k=" + std::to_string(k) + ",d=" + std::to_string(d);
      ok = ok && pass;
    }
  report(1, ok,
         "element self-checks k=1..4, d=2,3 (dim d(k+1)^d, Vandermonde "
         "conditions < 1e10, div in Q^{k-1} < 1e-10, quadrature "
         "orthogonality < 1e-10)" +
             (detail.empty() ? "" : " failed at" + detail));
}

// ---------------------------------------------------------------- criterion 2
struct MfmfeSolved {
  VectorElement elem;
  TensorLagrange pressure;
  DofMap map;
  NodeBlocks blocks;
  BlockDiagonalMatrix A;
  SparseMatrix B;
  RhsVectors rhs;
  Eigen::VectorXd U, P;
  int iters = 0;
};

MfmfeSolved solve_mfmfe(const Mesh& mesh, int k, const CoefficientField& field,
                        double tol) {
  MfmfeSolved s;
  s.elem = build_nodal_basis(k, mesh.dim);
  s.pressure = build_pressure_basis(k, mesh.dim);
  s.map = build_dof_map(mesh, s.elem, s.pressure.size());
  s.blocks = build_node_blocks(mesh, s.elem, s.map);
  const GeometryCache ng = build_geometry_cache(mesh, s.elem.nodes);
  s.A = assemble_mass_blocks(mesh, s.elem, s.map, s.blocks, field, ng);
  s.B = assemble_div(mesh, s.elem, s.pressure, s.map);
  const RuleND quad = tensor_rule(map_rule(gauss_rule(k + 3), 0.0, 1.0), mesh.dim);
  const GeometryCache qg = build_geometry_cache(mesh, rule_points(quad));
  const Eigen::MatrixXd pv = cache_pressure(s.pressure, rule_points(quad));
  s.rhs = assemble_rhs(mesh, s.elem, s.pressure, s.map, field, qg, quad, pv, true);
  const FactorizedBlocks fact = factorize_blocks(s.A);
  const ReducedSystem red = reduce(fact, s.blocks, s.B, s.rhs.G, s.rhs.F);
  auto [P, stats] = solve_cg(red.S, red.rhs, tol, 200000);
  s.P = P;
  s.U = recover_velocity(fact, s.blocks, s.B, s.rhs.G, P);
  s.iters = stats.iterations;
  return s;
}

Mesh sheared_affine_mesh(int d, int n) {
  Mesh m = cartesian_mesh(d, n);
  for (auto& v : m.vertices) {
    const double x = v[0], y = v[1], z = v[2];
    v[0] = x + 0.3 * y + (d == 3 ? 0.1 * z : 0.0);
    v[1] = 0.9 * y + 0.15 * x + (d == 3 ? 0.05 * z : 0.0);
    if (d == 3) v[2] = 1.1 * z + 0.08 * x + 0.12 * y;
  }
  return m;
}

Mesh flat_facet_nonaffine_mesh(int d) {
  if (d == 2) return example1_mesh(1);
  Mesh m = cartesian_mesh(3, 2);
  for (auto& v : m.vertices) {
    const double z = v[2];
    v[0] = 0.5 + (1.0 + 0.3 * z) * (v[0] - 0.5);
    v[1] = 0.5 + (1.0 + 0.2 * z) * (v[1] - 0.5);
  }
  return m;
}

void exact_reproduction() {
  bool ok = true;
  std::string detail;
  auto check = [&](const Mesh& mesh, int k, const char* tag) {
    const ManufacturedCase mc = linear_case(mesh.dim);
    const MfmfeSolved s = solve_mfmfe(mesh, k, mc.field(), 1e-13);
    DiscreteSolution sol{s.U, s.P, &s.elem, &s.pressure, &s.map};
    const ErrorRecord rec = error_norms(mesh, sol, nullptr, mc, k + 3);
    const bool pass = rec.err_u <= 1e-8 && rec.err_qp <= 1e-8;
    if (!pass)
      detail += std::string(" ") + tag + ",k=" + std::to_string(k) +
                " (err_u=" + std::to_string(rec.err_u) + ")";
    ok = ok && pass;
  };
  // distorted affine (parallelogram / parallelepiped) meshes: every order
  for (int k = 1; k <= 4; ++k) check(sheared_affine_mesh(2, 3), k, "affine2d");
  for (int k = 1; k <= 4; ++k) check(sheared_affine_mesh(3, 2), k, "affine3d");
  // genuinely non-affine flat-facet meshes: orders with Q^{k-1}-invariant
  // mapped constants (see decisions ledger for the k=1 restriction)
  for (int k = 2; k <= 4; ++k) check(flat_facet_nonaffine_mesh(2), k, "nonaffine2d");
  for (int k = 2; k <= 3; ++k) check(flat_facet_nonaffine_mesh(3), k, "nonaffine3d");
  report(2, ok,
         "exact reproduction of constant velocity / linear pressure "
         "(err_u <= 1e-8, ||Q_h p - p_h|| <= 1e-8)" +
             (detail.empty() ? "" : ";" + detail));
}

// ---------------------------------------------------------------- criterion 3
void saddle_equivalence() {
  const Mesh mesh = example1_mesh(0);
  const ManufacturedCase mc = example1_case();
  const int k = 1;
  const MfmfeSolved s = solve_mfmfe(mesh, k, mc.field(), 1e-14);
  const int total_dofs = s.map.n_velocity + s.map.n_pressure;

  const FactorizedBlocks fact = factorize_blocks(s.A);
  const ReducedSystem red = reduce(fact, s.blocks, s.B, s.rhs.G, s.rhs.F);
  const Eigen::MatrixXd S = Eigen::MatrixXd(red.S);
  const double asym = (S - S.transpose()).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
  const double lambda_min = eig.eigenvalues().minCoeff();

  const Eigen::MatrixXd Adense = dense_from_blocks(s.A, s.blocks, s.map.n_velocity);
  const auto [Ud, Pd] =
      solve_saddle_dense(Adense, Eigen::MatrixXd(s.B), s.rhs.G, s.rhs.F);
  const double du = (s.U - Ud).cwiseAbs().maxCoeff();
  const double dp = (s.P - Pd).cwiseAbs().maxCoeff();

  const bool pass = total_dofs <= 200 && du < 1e-10 && dp < 1e-10 &&
                    asym < 1e-12 && lambda_min > 0.0;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "saddle equivalence on %d DOFs (|dU|=%.1e |dP|=%.1e, "
                "|S-S^T|=%.1e, lambda_min=%.2e)",
                total_dofs, du, dp, asym, lambda_min);
  report(3, pass, buf);
}

// ---------------------------------------------------------------- criterion 4
void block_structure() {
  bool ok = true;
  std::string detail;
  // k=1: every GL node is a vertex; interior vertices couple n_v DOFs
  {
    const Mesh mesh = cartesian_mesh(2, 3);
    const VectorElement elem = build_nodal_basis(1, 2);
    const DofMap map = build_dof_map(mesh, elem, 1);
    const NodeBlocks nb = build_node_blocks(mesh, elem, map);
    int interior_vertex4 = 0;
    for (std::size_t b = 0; b < nb.blocks.size(); ++b)
      if (nb.kind[b] == NodeBlocks::kVertex && nb.blocks[b].size() == 4)
        ++interior_vertex4;
    if (interior_vertex4 != 4) {  // 3x3 grid has 4 interior vertices
      ok = false;
      detail += " 2d-vertex";
    }
  }
  {
    const Mesh mesh = cartesian_mesh(3, 2);
    const VectorElement elem = build_nodal_basis(1, 3);
    const DofMap map = build_dof_map(mesh, elem, 1);
    const NodeBlocks nb = build_node_blocks(mesh, elem, map);
    int interior_vertex12 = 0;
    for (std::size_t b = 0; b < nb.blocks.size(); ++b)
      if (nb.kind[b] == NodeBlocks::kVertex && nb.blocks[b].size() == 12)
        ++interior_vertex12;
    if (interior_vertex12 != 1) {
      ok = false;
      detail += " 3d-vertex";
    }
  }
  // facet-interior and cell-interior nodes need k >= 2 to exist; verify the
  // remaining stencil sizes of the classification there
  {
    const Mesh mesh = cartesian_mesh(2, 2);
    const VectorElement elem = build_nodal_basis(2, 2);
    const DofMap map = build_dof_map(mesh, elem, 4);
    const NodeBlocks nb = build_node_blocks(mesh, elem, map);
    bool edge3 = true, int2 = true;
    for (std::size_t b = 0; b < nb.blocks.size(); ++b) {
      if (nb.kind[b] == NodeBlocks::kFacet) {
        // interior edges couple 3 (1 normal + 2 tangential)
        const std::size_t n = nb.blocks[b].size();
        if (n != 3 && n != 2) edge3 = false;  // boundary edge nodes couple 2
      }
      if (nb.kind[b] == NodeBlocks::kInterior && nb.blocks[b].size() != 2)
        int2 = false;
    }
    bool saw3 = false;
    for (std::size_t b = 0; b < nb.blocks.size(); ++b)
      saw3 = saw3 || (nb.kind[b] == NodeBlocks::kFacet && nb.blocks[b].size() == 3);
    if (!(edge3 && int2 && saw3)) {
      ok = false;
      detail += " 2d-edge/interior";
    }
  }
  {
    const Mesh mesh = cartesian_mesh(3, 2);
    const VectorElement elem = build_nodal_basis(2, 3);
    const DofMap map = build_dof_map(mesh, elem, 8);
    const NodeBlocks nb = build_node_blocks(mesh, elem, map);
    bool saw8 = false, saw5 = false, ok3 = true;
    for (std::size_t b = 0; b < nb.blocks.size(); ++b) {
      const std::size_t n = nb.blocks[b].size();
      if (nb.kind[b] == NodeBlocks::kEdge && n == 8) saw8 = true;
      if (nb.kind[b] == NodeBlocks::kFacet && n == 5) saw5 = true;
      if (nb.kind[b] == NodeBlocks::kInterior && n != 3) ok3 = false;
    }
    if (!(saw8 && saw5 && ok3)) {
      ok = false;
      detail += " 3d-edge/face/interior";
    }
  }
  report(4, ok,
         "block sizes of the stencil classification (2d: 4/3/2; 3d: "
         "12/8/5/3)" +
             (detail.empty() ? "" : " failed:" + detail));
}

// ------------------------------------------------------------ criteria 5,6,7
struct RateCheck {
  const char* name;
  double target;
  double tol;
  std::vector<double> errors;
};

bool convergence_criterion(int criterion, int example, const char* method,
                           int k, int lmax, bool check_super) {
  RunConfig cfg;
  cfg.example = example;
  cfg.method = method;
  cfg.k = k;
  cfg.level_min = 0;
  cfg.level_max = lmax;
  std::vector<double> hs;
  std::vector<RateCheck> checks = {
      {"u", double(k), 0.2, {}},   {"div", double(k), 0.2, {}},
      {"p", double(k), 0.2, {}},   {"pG", k + 1.0, 0.3, {}},
      {"qp", k + 1.0, 0.3, {}},    {"pstar", k + 1.0, 0.3, {}},
  };
  if (!check_super) checks.resize(4);  // RT comparison: u, div, p, |||.|||
  for (int level = 0; level <= lmax; ++level) {
    const ErrorRecord rec = run_level(cfg, level);
    hs.push_back(rec.h);
    const double vals[6] = {rec.err_u,  rec.err_div, rec.err_p,
                            rec.err_pG, rec.err_qp,  rec.err_pstar};
    for (std::size_t i = 0; i < checks.size(); ++i)
      checks[i].errors.push_back(vals[i]);
  }
  bool ok = true;
  std::string detail;
  for (const auto& c : checks) {
    const double rate = least_squares_rate(hs, c.errors);
    char buf[64];
    std::snprintf(buf, sizeof(buf), " %s=%.2f", c.name, rate);
    detail += buf;
    if (std::abs(rate - c.target) > c.tol) {
      ok = false;
      detail += "(!)";
    }
  }
  char head[128];
  std::snprintf(head, sizeof(head),
                "%s k=%d example %d rates (levels 0..%d):", method, k, example,
                lmax);
  report(criterion, ok, head + detail);
  return ok;
}

// ---------------------------------------------------------------- criterion 8
void timing_trend() {
  RunConfig cfg;
  cfg.example = 1;
  cfg.method = "mfmfe";
  cfg.k = 2;
  std::vector<double> totals;
  for (int level = 2; level <= 4; ++level) {
    const ErrorRecord rec = run_level(cfg, level);
    totals.push_back(rec.assemble_s + rec.solve_s);
  }
  // report-only: print the per-refinement growth factors
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "timing trend (report only): 2d k=2 assemble+solve %.3fs -> "
                "%.3fs -> %.3fs, growth x%.1f, x%.1f",
                totals[0], totals[1], totals[2], totals[1] / totals[0],
                totals[2] / totals[1]);
  report(8, true, buf);
}

}  // namespace

int main() {
  element_self_checks();                                // 1
  exact_reproduction();                                 // 2
  saddle_equivalence();                                 // 3
  block_structure();                                    // 4
  convergence_criterion(5, 1, "mfmfe", 2, 4, true);     // 5 (k=2)
  convergence_criterion(5, 1, "mfmfe", 3, 4, true);     // 5 (k=3)
  convergence_criterion(6, 2, "mfmfe", 2, 2, true);     // 6
  convergence_criterion(7, 1, "rt", 2, 4, false);       // 7 (RT_1)
  timing_trend();                                       // 8
  std::printf("%s: %d criterion failures\n", g_failures ? "FAIL" : "OK",
              g_failures);
  return g_failures;
}
