// Copyright (c) 2026 mfmfe contributors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>
#include <set>

#include "mfmfe/cases.hpp"
#include "mfmfe/errors.hpp"
#include "mfmfe/solver.hpp"

using namespace mfmfe;

namespace {

struct Assembled {
  Mesh mesh;
  VectorElement elem;
  TensorLagrange pressure;
  DofMap map;
  NodeBlocks blocks;
  BlockDiagonalMatrix A;
  SparseMatrix B;
  RhsVectors rhs;
};

Assembled assemble_mfmfe(const Mesh& mesh, int k, const CoefficientField& field) {
  Assembled out;
  out.mesh = mesh;
  out.elem = build_nodal_basis(k, mesh.dim);
  out.pressure = build_pressure_basis(k, mesh.dim);
  out.map = build_dof_map(out.mesh, out.elem, out.pressure.size());
  out.blocks = build_node_blocks(out.mesh, out.elem, out.map);
  const GeometryCache ng = build_geometry_cache(out.mesh, out.elem.nodes);
  out.A = assemble_mass_blocks(out.mesh, out.elem, out.map, out.blocks, field, ng);
  out.B = assemble_div(out.mesh, out.elem, out.pressure, out.map);
  const RuleND quad =
      tensor_rule(map_rule(gauss_rule(k + 3), 0.0, 1.0), mesh.dim);
  const GeometryCache qg = build_geometry_cache(out.mesh, rule_points(quad));
  const Eigen::MatrixXd pv = cache_pressure(out.pressure, rule_points(quad));
  out.rhs = assemble_rhs(out.mesh, out.elem, out.pressure, out.map, field, qg,
                         quad, pv, true);
  return out;
}

}  // namespace

TEST_CASE("block factorization") {
  {
    BlockDiagonalMatrix A;
    A.blocks.push_back(0.25 * Eigen::MatrixXd::Identity(2, 2));
    const FactorizedBlocks f = factorize_blocks(A);
    const Eigen::MatrixXd L = f.llt[0].matrixL();
    CHECK((L - 0.5 * Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-14);
  }
  {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> coef(-1, 1);
    Eigen::MatrixXd M(5, 5);
    for (int i = 0; i < 25; ++i) M(i / 5, i % 5) = coef(rng);
    BlockDiagonalMatrix A;
    A.blocks.push_back(M * M.transpose() + Eigen::MatrixXd::Identity(5, 5));
    const FactorizedBlocks f = factorize_blocks(A);
    const Eigen::MatrixXd L = f.llt[0].matrixL();
    CHECK((L * L.transpose() - A.blocks[0]).cwiseAbs().maxCoeff() < 1e-12);
  }
  {
    // non-SPD block is refused with the block identified
    BlockDiagonalMatrix A;
    A.blocks.push_back(-Eigen::MatrixXd::Identity(2, 2));
    CHECK_THROWS_AS(factorize_blocks(A), std::runtime_error);
  }
  {
    // 12x12 vertex blocks of the 3d example factorize
    const ManufacturedCase mc = example2_case();
    const Assembled sys = assemble_mfmfe(example2_mesh(0), 1, mc.field());
    const FactorizedBlocks f = factorize_blocks(sys.A);
    bool saw12 = false;
    for (std::size_t b = 0; b < sys.blocks.blocks.size(); ++b)
      saw12 = saw12 || sys.blocks.blocks[b].size() == 12;
    CHECK(saw12);
    CHECK(f.llt.size() == sys.A.blocks.size());
  }
}

TEST_CASE("reduction: trivial data and the single-cell system") {
  const ManufacturedCase mc = linear_case(2);
  CoefficientField field = mc.field();
  field.g = [](const Point&) { return 0.0; };
  field.f = [](const Point&) { return 0.0; };
  const Assembled sys = assemble_mfmfe(cartesian_mesh(2, 1), 1, field);
  const FactorizedBlocks fact = factorize_blocks(sys.A);
  const ReducedSystem red = reduce(fact, sys.blocks, sys.B, sys.rhs.G, sys.rhs.F);
  CHECK(red.S.rows() == 1);
  CHECK(red.S.coeff(0, 0) > 0.0);
  CHECK(red.rhs.norm() == doctest::Approx(0.0).epsilon(1e-14));
  auto [P, stats] = solve_cg(red.S, red.rhs, 1e-12, 100);
  CHECK(P.norm() == doctest::Approx(0.0));
  CHECK(stats.iterations == 0);
  const Eigen::VectorXd U =
      recover_velocity(fact, sys.blocks, sys.B, sys.rhs.G, P);
  CHECK(U.norm() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("reduced solution equals the dense saddle solution") {
  const ManufacturedCase mc = example1_case();
  const Assembled sys = assemble_mfmfe(example1_mesh(0), 1, mc.field());
  const FactorizedBlocks fact = factorize_blocks(sys.A);
  const ReducedSystem red = reduce(fact, sys.blocks, sys.B, sys.rhs.G, sys.rhs.F);

  // materialized S is symmetric with positive smallest eigenvalue
  const Eigen::MatrixXd S = Eigen::MatrixXd(red.S);
  CHECK((S - S.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
  CHECK(eig.eigenvalues().minCoeff() > 0.0);

  auto [P, stats] = solve_cg(red.S, red.rhs, 1e-13, 10000);
  const Eigen::VectorXd U =
      recover_velocity(fact, sys.blocks, sys.B, sys.rhs.G, P);

  const Eigen::MatrixXd Adense =
      dense_from_blocks(sys.A, sys.blocks, sys.map.n_velocity);
  const auto [Ud, Pd] =
      solve_saddle_dense(Adense, Eigen::MatrixXd(sys.B), sys.rhs.G, sys.rhs.F);
  CHECK((U - Ud).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((P - Pd).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("discrete equations hold at the recovered solution") {
  const ManufacturedCase mc = example1_case();
  const Assembled sys = assemble_mfmfe(example1_mesh(1), 2, mc.field());
  const FactorizedBlocks fact = factorize_blocks(sys.A);
  const ReducedSystem red = reduce(fact, sys.blocks, sys.B, sys.rhs.G, sys.rhs.F);
  auto [P, stats] = solve_cg(red.S, red.rhs, 1e-13, 10000);
  const Eigen::VectorXd U =
      recover_velocity(fact, sys.blocks, sys.B, sys.rhs.G, P);
  // momentum equation per velocity DOF: A U - B^T P = G
  const Eigen::MatrixXd Adense =
      dense_from_blocks(sys.A, sys.blocks, sys.map.n_velocity);
  const Eigen::VectorXd res1 =
      Adense * U - sys.B.transpose() * P - sys.rhs.G;
  CHECK(res1.cwiseAbs().maxCoeff() < 1e-10);
  // mass conservation: (div u_h, w) = (f, w) for all w
  const Eigen::VectorXd res2 = sys.B * U - sys.rhs.F;
  CHECK(res2.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("pressure stencil couples only node-sharing cells") {
  const ManufacturedCase mc = example1_case();
  const Assembled sys = assemble_mfmfe(cartesian_mesh(2, 4), 1, mc.field());
  const FactorizedBlocks fact = factorize_blocks(sys.A);
  const ReducedSystem red = reduce(fact, sys.blocks, sys.B, sys.rhs.G, sys.rhs.F);
  // incidence oracle: cells sharing a quadrature-node block
  const int nc = sys.mesh.n_cells();
  std::vector<std::set<int>> block_cells(sys.blocks.blocks.size());
  for (int c = 0; c < nc; ++c)
    for (int b : sys.blocks.cell_node_block[c]) block_cells[b].insert(c);
  std::vector<std::set<int>> allowed(nc);
  for (const auto& cells : block_cells)
    for (int a : cells)
      for (int b : cells) allowed[a].insert(b);
  for (int c = 0; c < nc; ++c) {
    CHECK(allowed[c].size() <= 9);  // 3x3 patch on a structured mesh
    for (SparseMatrix::InnerIterator it(red.S, c); it; ++it)
      if (it.value() != 0.0) CHECK(allowed[c].count(it.row()) == 1);
  }
}

TEST_CASE("pcg basics") {
  {
    // identity system converges immediately
    SparseMatrix S(10, 10);
    S.setIdentity();
    const Eigen::VectorXd b = Eigen::VectorXd::Constant(10, 2.0);
    auto [x, stats] = solve_cg(S, b, 1e-14, 100);
    CHECK(stats.iterations <= 1);
    CHECK((x - b).norm() < 1e-13);
  }
  {
    // random SPD 50x50 matches a dense direct solve
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> coef(-1, 1);
    Eigen::MatrixXd M(50, 50);
    for (int i = 0; i < 50 * 50; ++i) M(i / 50, i % 50) = coef(rng);
    const Eigen::MatrixXd Sd =
        M * M.transpose() + 50.0 * Eigen::MatrixXd::Identity(50, 50);
    SparseMatrix S = Sd.sparseView();
    Eigen::VectorXd b(50);
    for (int i = 0; i < 50; ++i) b[i] = coef(rng);
    auto [x, stats] = solve_cg(S, b, 1e-13, 1000);
    const Eigen::VectorXd xd = Sd.partialPivLu().solve(b);
    CHECK((x - xd).norm() / xd.norm() < 1e-11);
  }
  {
    // iteration cap produces a convergence failure
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> coef(-1, 1);
    Eigen::MatrixXd M(30, 30);
    for (int i = 0; i < 900; ++i) M(i / 30, i % 30) = coef(rng);
    const Eigen::MatrixXd Sd =
        M * M.transpose() + 0.01 * Eigen::MatrixXd::Identity(30, 30);
    SparseMatrix S = Sd.sparseView();
    const Eigen::VectorXd b = Eigen::VectorXd::Constant(30, 1.0);
    CHECK_THROWS_AS(solve_cg(S, b, 1e-14, 2), std::runtime_error);
  }
}

TEST_CASE("RT Schur solve reproduces a constant-velocity field") {
  const ManufacturedCase mc = linear_case(2);
  const CoefficientField field = mc.field();
  const Mesh mesh = cartesian_mesh(2, 3);
  const int k = 1;  // RT_0
  const VectorElement rt = build_rt_element(k - 1, 2);
  const TensorLagrange pb = build_pressure_basis(k, 2);
  const DofMap map = build_dof_map(mesh, rt, pb.size());
  const RuleND quad = tensor_rule(map_rule(gauss_rule(k + 3), 0.0, 1.0), 2);
  const GeometryCache qg = build_geometry_cache(mesh, rule_points(quad));
  const BasisCache vals = cache_basis(rt, rule_points(quad));
  const Eigen::MatrixXd pv = cache_pressure(pb, rule_points(quad));
  const SparseMatrix A = assemble_rt_mass(mesh, rt, map, field, qg, quad, vals);
  const SparseMatrix B = assemble_div(mesh, rt, pb, map);
  const RhsVectors rhs =
      assemble_rhs(mesh, rt, pb, map, field, qg, quad, pv, false);
  const RtSolution sol = solve_rt_schur(A, B, rhs.G, rhs.F, 1e-12, 10000);
  CHECK(sol.stats.iterations > 0);
  CHECK(sol.stats.relative_residual <= 1e-12);
  // exact reproduction: compare with the dense saddle solve
  const auto [Ud, Pd] =
      solve_saddle_dense(Eigen::MatrixXd(A), Eigen::MatrixXd(B), rhs.G, rhs.F);
  CHECK((sol.U - Ud).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((sol.P - Pd).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("exact reproduction survives rotated local orderings") {
  // rotating a cell's corner list permutes its facet-lattice frames; the
  // assembled system must still reproduce a constant-velocity solution
  Mesh mesh = cartesian_mesh(3, 2);
  auto& c = mesh.cells[4];
  c = {c[1], c[2], c[3], c[0], c[5], c[6], c[7], c[4]};  // 90 deg about z
  mesh.build_facets();
  const ManufacturedCase mc = linear_case(3);
  const Assembled sys = assemble_mfmfe(mesh, 2, mc.field());
  const FactorizedBlocks fact = factorize_blocks(sys.A);
  const ReducedSystem red = reduce(fact, sys.blocks, sys.B, sys.rhs.G, sys.rhs.F);
  auto [P, stats] = solve_cg(red.S, red.rhs, 1e-13, 10000);
  const Eigen::VectorXd U =
      recover_velocity(fact, sys.blocks, sys.B, sys.rhs.G, P);
  DiscreteSolution sol;
  sol.U = U;
  sol.P = P;
  sol.elem = &sys.elem;
  sol.pressure = &sys.pressure;
  sol.dofmap = &sys.map;
  const ErrorRecord rec = error_norms(mesh, sol, nullptr, mc, 5);
  CHECK(rec.err_u < 1e-9);
  CHECK(rec.err_qp < 1e-9);
}
