// Copyright (c) 2026 mfmfe contributors
// SPDX-License-Identifier: Apache-2.0
#include "mfmfe/legendre.hpp"

#include <cmath>
#include <stdexcept>

#include "mfmfe/quadrature.hpp"

namespace mfmfe {

void shifted_legendre_values(int n, double x, double* out) {
  const double t = 2.0 * x - 1.0;
  if (n >= 1) out[0] = 1.0;
  if (n >= 2) out[1] = t;
  for (int m = 1; m + 1 < n; ++m)
    out[m + 1] = ((2 * m + 1) * t * out[m] - m * out[m - 1]) / (m + 1);
}

Eigen::MatrixXd monomial_to_legendre(int n) {
  // Column j: coefficients of x^j, c_i = (2i+1) int_0^1 x^j Lt_i(x) dx,
  // computed with a Gauss rule that is exact for the integrand.
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  const Rule1D q = map_rule(gauss_rule(n + 2), 0.0, 1.0);
  std::vector<double> leg(n);
  for (std::size_t k = 0; k < q.points.size(); ++k) {
    const double x = q.points[k];
    const double w = q.weights[k];
    shifted_legendre_values(n, x, leg.data());
    double xj = 1.0;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) M(i, j) += (2 * i + 1) * w * xj * leg[i];
      xj *= x;
    }
  }
  // Orthogonality zeros the strictly-lower triangle exactly; clean roundoff.
  for (int j = 0; j < n; ++j)
    for (int i = j + 1; i < n; ++i) M(i, j) = 0.0;
  return M;
}

Eigen::MatrixXd legendre_derivative_matrix(int n) {
  // On [-1,1]: P'_j = sum_{i<j, j-i odd} (2i+1) P_i; shift gives factor 2.
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < j; ++i)
      if ((j - i) % 2 == 1) D(i, j) = 2.0 * (2 * i + 1);
  return D;
}

TensorPoly::TensorPoly(int dim, int n) : dim_(dim), n_(n) {
  int total = 1;
  for (int a = 0; a < dim; ++a) total *= n;
  c_ = Eigen::VectorXd::Zero(total);
}

int TensorPoly::index(const std::array<int, 3>& e) const {
  int idx = 0;
  for (int a = 0; a < dim_; ++a) idx = idx * n_ + e[a];
  return idx;
}

TensorPoly TensorPoly::monomial(int dim, int n, const std::array<int, 3>& exps,
                                double coef) {
  static thread_local int cached_n = -1;
  static thread_local Eigen::MatrixXd M;
  if (cached_n != n) {
    M = monomial_to_legendre(n);
    cached_n = n;
  }
  TensorPoly p(dim, n);
  std::array<int, 3> e{0, 0, 0};
  if (dim == 1) {
    for (e[0] = 0; e[0] < n; ++e[0]) p.c_[p.index(e)] = coef * M(e[0], exps[0]);
  } else if (dim == 2) {
    for (e[0] = 0; e[0] < n; ++e[0])
      for (e[1] = 0; e[1] < n; ++e[1])
        p.c_[p.index(e)] = coef * M(e[0], exps[0]) * M(e[1], exps[1]);
  } else {
    for (e[0] = 0; e[0] < n; ++e[0])
      for (e[1] = 0; e[1] < n; ++e[1])
        for (e[2] = 0; e[2] < n; ++e[2])
          p.c_[p.index(e)] =
              coef * M(e[0], exps[0]) * M(e[1], exps[1]) * M(e[2], exps[2]);
  }
  return p;
}

double TensorPoly::eval(const std::array<double, 3>& x) const {
  std::array<std::vector<double>, 3> leg;
  for (int a = 0; a < dim_; ++a) {
    leg[a].resize(n_);
    shifted_legendre_values(n_, x[a], leg[a].data());
  }
  double sum = 0.0;
  std::array<int, 3> e{0, 0, 0};
  if (dim_ == 1) {
    for (e[0] = 0; e[0] < n_; ++e[0]) sum += c_[index(e)] * leg[0][e[0]];
  } else if (dim_ == 2) {
    for (e[0] = 0; e[0] < n_; ++e[0])
      for (e[1] = 0; e[1] < n_; ++e[1])
        sum += c_[index(e)] * leg[0][e[0]] * leg[1][e[1]];
  } else {
    for (e[0] = 0; e[0] < n_; ++e[0])
      for (e[1] = 0; e[1] < n_; ++e[1])
        for (e[2] = 0; e[2] < n_; ++e[2])
          sum += c_[index(e)] * leg[0][e[0]] * leg[1][e[1]] * leg[2][e[2]];
  }
  return sum;
}

TensorPoly TensorPoly::derivative(int axis) const {
  static thread_local int cached_n = -1;
  static thread_local Eigen::MatrixXd D;
  if (cached_n != n_) {
    D = legendre_derivative_matrix(n_);
    cached_n = n_;
  }
  TensorPoly out(dim_, n_);
  std::array<int, 3> e{0, 0, 0}, f{0, 0, 0};
  auto loop = [&](auto&& self, int a) -> void {
    if (a == dim_) {
      f = e;
      for (int j = 0; j < n_; ++j) {
        f[axis] = j;
        const double cj = c_[index(f)];
        if (cj == 0.0) continue;
        for (int i = 0; i < j; ++i) {
          if (D(i, j) == 0.0) continue;
          f[axis] = i;
          out.c_[index(f)] += D(i, j) * cj;
        }
      }
      return;
    }
    if (a == axis) {
      e[a] = 0;
      self(self, a + 1);
      return;
    }
    for (e[a] = 0; e[a] < n_; ++e[a]) self(self, a + 1);
  };
  loop(loop, 0);
  return out;
}

TensorPoly TensorPoly::restrict_facet(int axis, int side) const {
  if (dim_ < 2) throw std::logic_error("restrict_facet: dim must be >= 2");
  TensorPoly out(dim_ - 1, n_);
  // Lt_i(1) = 1, Lt_i(0) = (-1)^i.
  std::array<int, 3> e{0, 0, 0};
  auto value_at_side = [&](int i) { return side == 1 ? 1.0 : (i % 2 ? -1.0 : 1.0); };
  auto loop = [&](auto&& self, int a) -> void {
    if (a == dim_) {
      std::array<int, 3> f{0, 0, 0};
      int fa = 0;
      for (int b = 0; b < dim_; ++b)
        if (b != axis) f[fa++] = e[b];
      out.c_[out.index(f)] += value_at_side(e[axis]) * c_[index(e)];
      return;
    }
    for (e[a] = 0; e[a] < n_; ++e[a]) self(self, a + 1);
  };
  loop(loop, 0);
  return out;
}

double TensorPoly::integral() const { return c_[0]; }

double TensorPoly::inner(const TensorPoly& other) const {
  double sum = 0.0;
  std::array<int, 3> e{0, 0, 0};
  auto loop = [&](auto&& self, int a) -> void {
    if (a == dim_) {
      double norm2 = 1.0;
      for (int b = 0; b < dim_; ++b) norm2 /= (2.0 * e[b] + 1.0);
      sum += c_[index(e)] * other.c_[index(e)] * norm2;
      return;
    }
    for (e[a] = 0; e[a] < n_; ++e[a]) self(self, a + 1);
  };
  loop(loop, 0);
  return sum;
}

TensorPoly& TensorPoly::operator+=(const TensorPoly& other) {
  c_ += other.c_;
  return *this;
}

TensorPoly& TensorPoly::operator*=(double s) {
  c_ *= s;
  return *this;
}

TensorPoly VectorPoly::divergence() const {
  TensorPoly div(dim, comp[0].n());
  for (int a = 0; a < dim; ++a) div += comp[a].derivative(a);
  return div;
}

}  // namespace mfmfe
