// Copyright (c) 2026 mfmfe contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

namespace mfmfe {

// Polynomials on the reference cell [0,1]^d are stored as coefficient
// tensors over the shifted Legendre product basis Lt_{e1}(x1)...Lt_{ed}(xd),
// Lt_n(x) = P_n(2x-1). The basis is L2-orthogonal with
// int_0^1 Lt_m Lt_n = delta_mn / (2n+1), which makes integrals, inner
// products, facet restrictions and moment functionals exact coefficient
// manipulations.

/// Values Lt_0..Lt_{n-1} at x in [0,1].
void shifted_legendre_values(int n, double x, double* out);

/// n x n matrix M with column j = coefficients of x^j (on [0,1]) in the
/// shifted Legendre basis.
Eigen::MatrixXd monomial_to_legendre(int n);

/// n x n matrix D with d/dx Lt_j = sum_i D(i,j) Lt_i.
Eigen::MatrixXd legendre_derivative_matrix(int n);

/// Scalar polynomial on [0,1]^dim, per-axis degree < n.
class TensorPoly {
 public:
  TensorPoly() = default;
  TensorPoly(int dim, int n);

  static TensorPoly monomial(int dim, int n, const std::array<int, 3>& exps,
                             double coef);

  int dim() const { return dim_; }
  int n() const { return n_; }
  const Eigen::VectorXd& coeffs() const { return c_; }
  Eigen::VectorXd& coeffs() { return c_; }

  double eval(const std::array<double, 3>& x) const;
  TensorPoly derivative(int axis) const;
  /// Restriction to the facet {x_axis = side}; free axes keep their order.
  TensorPoly restrict_facet(int axis, int side) const;

  double integral() const;                    // over [0,1]^dim
  double inner(const TensorPoly& other) const;  // L2([0,1]^dim)

  TensorPoly& operator+=(const TensorPoly& other);
  TensorPoly& operator*=(double s);

  /// Lexicographic coefficient index, last axis fastest.
  int index(const std::array<int, 3>& e) const;

 private:
  int dim_ = 0;
  int n_ = 0;
  Eigen::VectorXd c_;
};

/// Vector-valued polynomial with dim components.
struct VectorPoly {
  std::array<TensorPoly, 3> comp;
  int dim = 0;

  VectorPoly() = default;
  VectorPoly(int d, int n) : dim(d) {
    for (int a = 0; a < d; ++a) comp[a] = TensorPoly(d, n);
  }
  TensorPoly divergence() const;
  void eval(const std::array<double, 3>& x, double* out) const {
    for (int a = 0; a < dim; ++a) out[a] = comp[a].eval(x);
  }
};

}  // namespace mfmfe
