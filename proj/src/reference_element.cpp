// Copyright (c) 2026 mfmfe contributors
// SPDX-License-Identifier: Apache-2.0
#include "mfmfe/reference_element.hpp"

#include <cmath>
#include <stdexcept>

namespace mfmfe {

namespace {

VectorPoly term_to_poly(const MonomialTerm& term, int dim, int n) {
  VectorPoly p(dim, n);
  for (int a = 0; a < dim; ++a)
    for (const auto& part : term.comp[a]) {
      TensorPoly mono = TensorPoly::monomial(dim, n, part.exps, part.coef);
      p.comp[a] += mono;
    }
  return p;
}

// Stack the Legendre coefficients of a vector polynomial, scaled so that the
// Euclidean inner product of stacked vectors equals the L2(reference cell)
// inner product.
Eigen::VectorXd stacked_coeffs(const VectorPoly& p) {
  const int dim = p.dim;
  const int n = p.comp[0].n();
  int block = 1;
  for (int a = 0; a < dim; ++a) block *= n;
  Eigen::VectorXd v(dim * block);
  std::array<int, 3> e{0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    for (int idx = 0; idx < block; ++idx) {
      int rem = idx;
      for (int b = dim - 1; b >= 0; --b) {
        e[b] = rem % n;
        rem /= n;
      }
      double w = 1.0;
      for (int b = 0; b < dim; ++b) w /= (2.0 * e[b] + 1.0);
      v[a * block + idx] = p.comp[a].coeffs()[idx] * std::sqrt(w);
    }
  }
  return v;
}

struct OrthoSpan {
  std::vector<VectorPoly> polys;
  double sv_ratio = 0.0;  // smallest/largest singular value of the raw span
};

OrthoSpan orthonormalize(const std::vector<VectorPoly>& terms) {
  const int m = static_cast<int>(terms.size());
  Eigen::MatrixXd A(stacked_coeffs(terms[0]).size(), m);
  for (int j = 0; j < m; ++j) A.col(j) = stacked_coeffs(terms[j]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  OrthoSpan out;
  out.sv_ratio = sv[m - 1] / sv[0];
  if (out.sv_ratio < 1e-12)
    throw std::runtime_error("reference element: span is rank deficient");
  // combos C = V * Sigma^-1 give an L2-orthonormal basis of the span
  Eigen::MatrixXd C = svd.matrixV() * sv.cwiseInverse().asDiagonal();
  const int dim = terms[0].dim;
  const int n = terms[0].comp[0].n();
  out.polys.assign(m, VectorPoly(dim, n));
  for (int j = 0; j < m; ++j)
    for (int t = 0; t < m; ++t)
      for (int a = 0; a < dim; ++a)
        out.polys[j].comp[a].coeffs() += C(t, j) * terms[t].comp[a].coeffs();
  return out;
}

double condition_number(const Eigen::MatrixXd& A) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& sv = svd.singularValues();
  return sv[0] / sv[sv.size() - 1];
}

// Combine orthonormal span polys with solve coefficients into final basis.
void finalize_basis(VectorElement& elem, const std::vector<VectorPoly>& ortho,
                    const Eigen::MatrixXd& coeff) {
  const int m = elem.n_dofs;
  const int dim = elem.dim;
  const int n = ortho[0].comp[0].n();
  elem.basis.assign(m, VectorPoly(dim, n));
  elem.basis_div.clear();
  for (int j = 0; j < m; ++j) {
    for (int o = 0; o < m; ++o) {
      const double c = coeff(o, j);
      if (c == 0.0) continue;
      for (int a = 0; a < dim; ++a)
        elem.basis[j].comp[a].coeffs() += c * ortho[o].comp[a].coeffs();
    }
    elem.basis_div.push_back(elem.basis[j].divergence());
  }
}

// Interior moment rows of the enhanced element (dof2) and of RT elements
// (RT-dof-2): component c against P^{imax}(x_c) (x) Q^{amax}(others);
// exact coefficient reads in the Legendre representation.
void append_interior_moments(const VectorPoly& q, int imax, int amax,
                             std::vector<double>& out) {
  const int dim = q.dim;
  for (int c = 0; c < dim; ++c) {
    std::array<int, 3> e{0, 0, 0};
    auto loop = [&](auto&& self, int slot) -> void {
      if (slot == dim) {
        double w = 1.0;
        for (int b = 0; b < dim; ++b) w /= (2.0 * e[b] + 1.0);
        out.push_back(q.comp[c].coeffs()[q.comp[c].index(e)] * w);
        return;
      }
      const int lim = (slot == c) ? imax : amax;
      for (e[slot] = 0; e[slot] <= lim; ++e[slot]) self(self, slot + 1);
    };
    if (imax >= 0) loop(loop, 0);
  }
}

// Facet moment rows: outward normal trace against Q^{amax} on each facet.
void append_facet_moments(const VectorPoly& q, int amax,
                          std::vector<double>& out) {
  const int dim = q.dim;
  for (int f = 0; f < 2 * dim; ++f) {
    const int axis = f / 2;
    const int side = f % 2;
    const double sign = side == 1 ? 1.0 : -1.0;
    TensorPoly trace = q.comp[axis].restrict_facet(axis, side);
    std::array<int, 3> e{0, 0, 0};
    auto loop = [&](auto&& self, int slot) -> void {
      if (slot == dim - 1) {
        double w = 1.0;
        for (int b = 0; b < dim - 1; ++b) w /= (2.0 * e[b] + 1.0);
        out.push_back(sign * trace.coeffs()[trace.index(e)] * w);
        return;
      }
      for (e[slot] = 0; e[slot] <= amax; ++e[slot]) self(self, slot + 1);
    };
    loop(loop, 0);
  }
}

}  // namespace

PolySpan build_rt_span(int k, int d) {
  if (k < 0) throw std::invalid_argument("build_rt_span: order must be >= 0");
  if (d != 2 && d != 3) throw std::invalid_argument("build_rt_span: d must be 2 or 3");
  PolySpan span;
  span.dim = d;
  for (int c = 0; c < d; ++c) {
    std::array<int, 3> e{0, 0, 0};
    auto loop = [&](auto&& self, int slot) -> void {
      if (slot == d) {
        MonomialTerm t;
        t.comp[c].push_back({1.0, e});
        span.terms.push_back(std::move(t));
        return;
      }
      const int lim = (slot == c) ? k + 1 : k;
      for (e[slot] = 0; e[slot] <= lim; ++e[slot]) self(self, slot + 1);
    };
    loop(loop, 0);
  }
  return span;
}

PolySpan build_bubble_span(int k, int d) {
  if (k < 1) throw std::invalid_argument("build_bubble_span: k must be >= 1");
  if (d != 2 && d != 3)
    throw std::invalid_argument("build_bubble_span: d must be 2 or 3");
  PolySpan span;
  span.dim = d;
  if (d == 2) {
    // family 1: x^{a1-1} y^k ((k+1) x, -a1 y)
    for (int a1 = 0; a1 <= k; ++a1) {
      MonomialTerm t;
      t.comp[0].push_back({double(k + 1), {a1, k, 0}});
      if (a1 > 0) t.comp[1].push_back({double(-a1), {a1 - 1, k + 1, 0}});
      span.terms.push_back(std::move(t));
    }
    // family 2: x^k y^{b2-1} (-b2 x, (k+1) y)
    for (int b2 = 0; b2 <= k; ++b2) {
      MonomialTerm t;
      if (b2 > 0) t.comp[0].push_back({double(-b2), {k + 1, b2 - 1, 0}});
      t.comp[1].push_back({double(k + 1), {k, b2, 0}});
      span.terms.push_back(std::move(t));
    }
    return span;
  }
  // 3d families: the free index runs over the full range, the other two are
  // constrained so that at least one of them equals k.
  auto add3 = [&](int family, int i1, int i2, int i3) {
    MonomialTerm t;
    if (family == 0) {  // x^{a1-1} y^{a2} z^{a3} ((a2+a3+2) x, -a1 y, -a1 z)
      t.comp[0].push_back({double(i2 + i3 + 2), {i1, i2, i3}});
      if (i1 > 0) {
        t.comp[1].push_back({double(-i1), {i1 - 1, i2 + 1, i3}});
        t.comp[2].push_back({double(-i1), {i1 - 1, i2, i3 + 1}});
      }
    } else if (family == 1) {  // x^{b1} y^{b2-1} z^{b3} (-b2 x, (b1+b3+2) y, -b2 z)
      t.comp[1].push_back({double(i1 + i3 + 2), {i1, i2, i3}});
      if (i2 > 0) {
        t.comp[0].push_back({double(-i2), {i1 + 1, i2 - 1, i3}});
        t.comp[2].push_back({double(-i2), {i1, i2 - 1, i3 + 1}});
      }
    } else {  // x^{c1} y^{c2} z^{c3-1} (-c3 x, -c3 y, (c1+c2+2) z)
      t.comp[2].push_back({double(i1 + i2 + 2), {i1, i2, i3}});
      if (i3 > 0) {
        t.comp[0].push_back({double(-i3), {i1 + 1, i2, i3 - 1}});
        t.comp[1].push_back({double(-i3), {i1, i2 + 1, i3 - 1}});
      }
    }
    span.terms.push_back(std::move(t));
  };
  for (int family = 0; family < 3; ++family) {
    const int free_axis = family;
    for (int ifree = 0; ifree <= k; ++ifree)
      for (int u = 0; u <= k; ++u)
        for (int v = 0; v <= k; ++v) {
          if (u != k && v != k) continue;  // "a2 = k or a3 = k" etc.
          std::array<int, 3> idx{0, 0, 0};
          idx[free_axis] = ifree;
          int slot = 0;
          for (int a = 0; a < 3; ++a)
            if (a != free_axis) idx[a] = (slot++ == 0) ? u : v;
          add3(family, idx[0], idx[1], idx[2]);
        }
  }
  return span;
}

Eigen::MatrixXd VectorElement::eval_values(const Point& xhat) const {
  Eigen::MatrixXd out(dim, n_dofs);
  for (int j = 0; j < n_dofs; ++j)
    for (int a = 0; a < dim; ++a) out(a, j) = basis[j].comp[a].eval(xhat);
  return out;
}

Eigen::VectorXd VectorElement::eval_divergence(const Point& xhat) const {
  Eigen::VectorXd out(n_dofs);
  for (int j = 0; j < n_dofs; ++j) out[j] = basis_div[j].eval(xhat);
  return out;
}

Point VectorElement::facet_point(int facet, const std::array<int, 2>& q) const {
  const int axis = facet / 2;
  const int side = facet % 2;
  Point p{0, 0, 0};
  p[axis] = side;
  int slot = 0;
  for (int a = 0; a < dim; ++a)
    if (a != axis) p[a] = facet_point_coords_[q[slot++]];
  return p;
}

VectorElement build_nodal_basis(int k, int d) {
  if (k < 1) throw std::invalid_argument("build_nodal_basis: k must be >= 1");
  if (d != 2 && d != 3)
    throw std::invalid_argument("build_nodal_basis: d must be 2 or 3");
  VectorElement elem;
  elem.dim = d;
  elem.order = k;
  elem.facet_points = k + 1;

  elem.span = build_rt_span(k - 1, d);
  PolySpan bubbles = build_bubble_span(k, d);
  for (auto& t : bubbles.terms) elem.span.terms.push_back(std::move(t));
  elem.n_dofs = elem.span.size();
  int expected = d;
  for (int a = 0; a < d; ++a) expected *= (k + 1);
  if (elem.n_dofs != expected)
    throw std::runtime_error("enhanced span dimension mismatch");

  const int n = k + 2;
  std::vector<VectorPoly> polys;
  polys.reserve(elem.n_dofs);
  for (const auto& t : elem.span.terms) polys.push_back(term_to_poly(t, d, n));
  OrthoSpan ortho = orthonormalize(polys);

  // Gauss-Lobatto lattice on [0,1], lexicographic with the last axis fastest.
  const Rule1D gl = map_rule(gauss_lobatto_rule(k + 1), 0.0, 1.0);
  elem.facet_point_coords_ = gl.points;
  const int n_nodes = elem.n_dofs / d;
  elem.nodes.resize(n_nodes);
  elem.node_weights.assign(n_nodes, 1.0);
  std::vector<std::array<int, 3>> lattice(n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    int rem = i;
    std::array<int, 3> l{0, 0, 0};
    for (int a = d - 1; a >= 0; --a) {
      l[a] = rem % (k + 1);
      rem /= (k + 1);
    }
    lattice[i] = l;
    for (int a = 0; a < d; ++a) {
      elem.nodes[i][a] = gl.points[l[a]];
      elem.node_weights[i] *= gl.weights[l[a]];
    }
  }

  for (int f = 0; f < 2 * d; ++f) {
    int nf = 1;
    for (int a = 0; a < d - 1; ++a) nf *= (k + 1);
    elem.facet_dofs_[f].assign(nf, -1);
  }
  elem.dofs.resize(elem.n_dofs);
  for (int i = 0; i < n_nodes; ++i)
    for (int a = 0; a < d; ++a) {
      DofInfo info;
      info.node = i;
      info.axis = a;
      const int la = lattice[i][a];
      if (la == 0 || la == k) {
        info.facet = 2 * a + (la == k ? 1 : 0);
        info.trace_sign = la == k ? 1.0 : -1.0;
        int slot = 0;
        for (int b = 0; b < d; ++b)
          if (b != a) info.fpos[slot++] = lattice[i][b];
        elem.facet_dofs_[info.facet][elem.facet_pos_index(info.fpos)] = i * d + a;
      }
      elem.dofs[i * d + a] = info;
    }

  // Point-value generalized Vandermonde (the executable unisolvency lemma).
  Eigen::MatrixXd V(elem.n_dofs, elem.n_dofs);
  for (int j = 0; j < elem.n_dofs; ++j)
    for (int i = 0; i < n_nodes; ++i)
      for (int a = 0; a < d; ++a)
        V(i * d + a, j) = ortho.polys[j].comp[a].eval(elem.nodes[i]);
  elem.point_vandermonde_cond = condition_number(V);
  if (elem.point_vandermonde_cond > 1e12)
    throw std::runtime_error(
        "enhanced element: nodal Vandermonde numerically singular");
  Eigen::MatrixXd coeff = V.partialPivLu().solve(
      Eigen::MatrixXd::Identity(elem.n_dofs, elem.n_dofs));
  finalize_basis(elem, ortho.polys, coeff);

  // Moment-DOF system (facet moments against Q^k, interior moments against
  // P^{k-2} (x) Q^k per component); its conditioning is the second
  // unisolvency check.
  {
    std::vector<double> rows;
    rows.reserve(elem.n_dofs * elem.n_dofs);
    for (int j = 0; j < elem.n_dofs; ++j) {
      std::vector<double> r;
      append_facet_moments(ortho.polys[j], k, r);
      append_interior_moments(ortho.polys[j], k - 2, k, r);
      if (static_cast<int>(r.size()) != elem.n_dofs)
        throw std::runtime_error("moment DOF count mismatch");
      rows.insert(rows.end(), r.begin(), r.end());
    }
    Eigen::MatrixXd M(elem.n_dofs, elem.n_dofs);
    for (int j = 0; j < elem.n_dofs; ++j)
      for (int i = 0; i < elem.n_dofs; ++i) M(i, j) = rows[j * elem.n_dofs + i];
    elem.moment_vandermonde_cond = condition_number(M);
  }
  return elem;
}

VectorElement build_rt_element(int r, int d) {
  if (r < 0) throw std::invalid_argument("build_rt_element: order must be >= 0");
  VectorElement elem;
  elem.dim = d;
  elem.order = r;
  elem.facet_points = r + 1;
  elem.span = build_rt_span(r, d);
  elem.n_dofs = elem.span.size();

  const int n = r + 2;
  std::vector<VectorPoly> polys;
  polys.reserve(elem.n_dofs);
  for (const auto& t : elem.span.terms) polys.push_back(term_to_poly(t, d, n));
  OrthoSpan ortho = orthonormalize(polys);

  const Rule1D gauss = map_rule(gauss_rule(r + 1), 0.0, 1.0);
  elem.facet_point_coords_ = gauss.points;

  int nf = 1;
  for (int a = 0; a < d - 1; ++a) nf *= (r + 1);
  // facet point-value DOFs, then interior moments
  for (int f = 0; f < 2 * d; ++f) {
    elem.facet_dofs_[f].assign(nf, -1);
    for (int q = 0; q < nf; ++q) {
      DofInfo info;
      info.facet = f;
      info.axis = f / 2;
      info.trace_sign = f % 2 == 1 ? 1.0 : -1.0;
      if (d == 2) {
        info.fpos = {q, 0};
      } else {
        info.fpos = {q / (r + 1), q % (r + 1)};
      }
      elem.facet_dofs_[f][q] = static_cast<int>(elem.dofs.size());
      elem.dofs.push_back(info);
    }
  }
  const int n_interior = elem.n_dofs - static_cast<int>(elem.dofs.size());
  for (int i = 0; i < n_interior; ++i) elem.dofs.push_back(DofInfo{});

  Eigen::MatrixXd V(elem.n_dofs, elem.n_dofs);
  for (int j = 0; j < elem.n_dofs; ++j) {
    std::vector<double> rows;
    for (int f = 0; f < 2 * d; ++f)
      for (int q = 0; q < nf; ++q) {
        const auto& info = elem.dofs[elem.facet_dofs_[f][q]];
        const Point p = elem.facet_point(f, info.fpos);
        rows.push_back(ortho.polys[j].comp[info.axis].eval(p));
      }
    append_interior_moments(ortho.polys[j], r - 1, r, rows);
    if (static_cast<int>(rows.size()) != elem.n_dofs)
      throw std::runtime_error("RT DOF count mismatch");
    for (int i = 0; i < elem.n_dofs; ++i) V(i, j) = rows[i];
  }
  elem.point_vandermonde_cond = condition_number(V);
  if (elem.point_vandermonde_cond > 1e12)
    throw std::runtime_error("RT element: Vandermonde numerically singular");
  Eigen::MatrixXd coeff = V.partialPivLu().solve(
      Eigen::MatrixXd::Identity(elem.n_dofs, elem.n_dofs));
  finalize_basis(elem, ortho.polys, coeff);
  return elem;
}

TensorLagrange::TensorLagrange(int dim, std::vector<double> nodes1d)
    : dim_(dim), nodes_(std::move(nodes1d)) {
  size_ = 1;
  for (int a = 0; a < dim_; ++a) size_ *= static_cast<int>(nodes_.size());
}

Point TensorLagrange::node(int i) const {
  const int n = points_per_axis();
  Point p{0, 0, 0};
  int rem = i;
  for (int a = dim_ - 1; a >= 0; --a) {
    p[a] = nodes_[rem % n];
    rem /= n;
  }
  return p;
}

void TensorLagrange::line_values(double x, std::vector<double>& v,
                                 std::vector<double>* dv) const {
  const int n = points_per_axis();
  v.assign(n, 1.0);
  if (dv) dv->assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    for (int m = 0; m < n; ++m) {
      if (m == j) continue;
      v[j] *= (x - nodes_[m]) / (nodes_[j] - nodes_[m]);
    }
    if (dv) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) {
        if (i == j) continue;
        double prod = 1.0 / (nodes_[j] - nodes_[i]);
        for (int m = 0; m < n; ++m) {
          if (m == j || m == i) continue;
          prod *= (x - nodes_[m]) / (nodes_[j] - nodes_[m]);
        }
        sum += prod;
      }
      (*dv)[j] = sum;
    }
  }
}

void TensorLagrange::values(const Point& xhat, Eigen::VectorXd& out) const {
  const int n = points_per_axis();
  std::array<std::vector<double>, 3> axis;
  for (int a = 0; a < dim_; ++a) line_values(xhat[a], axis[a], nullptr);
  out.resize(size_);
  for (int i = 0; i < size_; ++i) {
    int rem = i;
    double prod = 1.0;
    for (int a = dim_ - 1; a >= 0; --a) {
      prod *= axis[a][rem % n];
      rem /= n;
    }
    out[i] = prod;
  }
}

void TensorLagrange::gradients(const Point& xhat, Eigen::MatrixXd& out) const {
  const int n = points_per_axis();
  std::array<std::vector<double>, 3> val, der;
  for (int a = 0; a < dim_; ++a) line_values(xhat[a], val[a], &der[a]);
  out.resize(dim_, size_);
  for (int i = 0; i < size_; ++i) {
    std::array<int, 3> e{0, 0, 0};
    int rem = i;
    for (int a = dim_ - 1; a >= 0; --a) {
      e[a] = rem % n;
      rem /= n;
    }
    for (int g = 0; g < dim_; ++g) {
      double prod = 1.0;
      for (int a = 0; a < dim_; ++a)
        prod *= (a == g) ? der[a][e[a]] : val[a][e[a]];
      out(g, i) = prod;
    }
  }
}

TensorLagrange build_pressure_basis(int k, int d) {
  if (k < 1) throw std::invalid_argument("build_pressure_basis: k must be >= 1");
  return TensorLagrange(d, map_rule(gauss_rule(k), 0.0, 1.0).points);
}

TensorLagrange build_qk_lagrange(int k, int d) {
  return TensorLagrange(d, map_rule(gauss_rule(k + 1), 0.0, 1.0).points);
}

RtProjector::RtProjector(int r, int d) : r_(r), d_(d), n_(r + 2) {
  PolySpan span = build_rt_span(r, d);
  std::vector<VectorPoly> polys;
  for (const auto& t : span.terms) polys.push_back(term_to_poly(t, d, n_));
  OrthoSpan ortho = orthonormalize(polys);
  ortho_ = std::move(ortho.polys);
  const int m = static_cast<int>(ortho_.size());
  Eigen::MatrixXd V(m, m);
  for (int j = 0; j < m; ++j) V.col(j) = moment_vector(ortho_[j]);
  lu_ = Eigen::PartialPivLU<Eigen::MatrixXd>(V);
}

Eigen::VectorXd RtProjector::moment_vector(const VectorPoly& q) const {
  std::vector<double> rows;
  append_facet_moments(q, r_, rows);
  append_interior_moments(q, r_ - 1, r_, rows);
  return Eigen::Map<Eigen::VectorXd>(rows.data(), rows.size());
}

VectorPoly RtProjector::project(const VectorPoly& q) const {
  Eigen::VectorXd c = lu_.solve(moment_vector(q));
  VectorPoly out(d_, n_);
  for (int o = 0; o < c.size(); ++o)
    for (int a = 0; a < d_; ++a)
      out.comp[a].coeffs() += c[o] * ortho_[o].comp[a].coeffs();
  return out;
}

double quadrature_orthogonality_residual(const VectorElement& elem) {
  const int k = elem.order;
  const int d = elem.dim;
  RtProjector proj(k - 1, d);
  const RuleND rule = tensor_rule(map_rule(gauss_lobatto_rule(k + 1), 0.0, 1.0), d);

  // Test functions: per component, monomials of per-axis degree <= k-1.
  std::vector<std::pair<int, std::array<int, 3>>> tests;
  {
    std::array<int, 3> e{0, 0, 0};
    auto loop = [&](auto&& self, int slot, int c) -> void {
      if (slot == d) {
        tests.push_back({c, e});
        return;
      }
      for (e[slot] = 0; e[slot] < k; ++e[slot]) self(self, slot + 1, c);
    };
    for (int c = 0; c < d; ++c) loop(loop, 0, c);
  }

  double residual = 0.0;
  for (const auto& q : elem.basis) {
    const VectorPoly pq = proj.project(q);
    // difference values at the GL nodes
    std::vector<std::array<double, 3>> diff(rule.size());
    for (int i = 0; i < rule.size(); ++i) {
      const Point& x = {rule.nodes[i][0], rule.nodes[i][1], rule.nodes[i][2]};
      for (int a = 0; a < d; ++a)
        diff[i][a] = q.comp[a].eval(x) - pq.comp[a].eval(x);
    }
    for (const auto& [c, e] : tests) {
      double sum = 0.0;
      for (int i = 0; i < rule.size(); ++i) {
        double mono = 1.0;
        for (int a = 0; a < d; ++a)
          mono *= std::pow(rule.nodes[i][a], e[a]);
        sum += rule.weights[i] * diff[i][c] * mono;
      }
      residual = std::max(residual, std::abs(sum));
    }
  }
  return residual;
}

double divergence_space_residual(const VectorElement& elem) {
  const int k = elem.order;
  double residual = 0.0;
  for (const auto& div : elem.basis_div) {
    const int n = div.n();
    const int d = div.dim();
    double tail = 0.0;
    std::array<int, 3> e{0, 0, 0};
    auto loop = [&](auto&& self, int slot) -> void {
      if (slot == d) {
        bool outside = false;
        for (int a = 0; a < d; ++a)
          if (e[a] >= k) outside = true;
        if (outside) {
          double w = 1.0;
          for (int a = 0; a < d; ++a) w /= (2.0 * e[a] + 1.0);
          const double c = div.coeffs()[div.index(e)];
          tail += c * c * w;
        }
        return;
      }
      for (e[slot] = 0; e[slot] < n; ++e[slot]) self(self, slot + 1);
    };
    loop(loop, 0);
    residual = std::max(residual, std::sqrt(tail));
  }
  return residual;
}

double span_direct_sum_gap(int k, int d) {
  // Orthonormalize the two spans separately, then measure the smallest
  // singular value of the stacked orthonormal bases: it vanishes exactly
  // when RT_{k-1} and the bubbles intersect nontrivially, independently of
  // the conditioning of the raw monomial terms.
  auto ortho_polys = [&](const PolySpan& span) {
    std::vector<VectorPoly> polys;
    for (const auto& t : span.terms) polys.push_back(term_to_poly(t, d, k + 2));
    return orthonormalize(polys).polys;
  };
  const std::vector<VectorPoly> rt = ortho_polys(build_rt_span(k - 1, d));
  const std::vector<VectorPoly> bub = ortho_polys(build_bubble_span(k, d));
  const int m = static_cast<int>(rt.size() + bub.size());
  Eigen::MatrixXd A(stacked_coeffs(rt[0]).size(), m);
  for (std::size_t j = 0; j < rt.size(); ++j) A.col(j) = stacked_coeffs(rt[j]);
  for (std::size_t j = 0; j < bub.size(); ++j)
    A.col(rt.size() + j) = stacked_coeffs(bub[j]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& sv = svd.singularValues();
  return sv[m - 1] / sv[0];
}

BasisCache cache_basis(const VectorElement& elem, const std::vector<Point>& pts) {
  BasisCache cache;
  const int np = static_cast<int>(pts.size());
  for (int a = 0; a < elem.dim; ++a) cache.values[a].resize(np, elem.n_dofs);
  cache.divergence.resize(np, elem.n_dofs);
  for (int i = 0; i < np; ++i) {
    for (int j = 0; j < elem.n_dofs; ++j) {
      for (int a = 0; a < elem.dim; ++a)
        cache.values[a](i, j) = elem.basis[j].comp[a].eval(pts[i]);
      cache.divergence(i, j) = elem.basis_div[j].eval(pts[i]);
    }
  }
  return cache;
}

}  // namespace mfmfe
