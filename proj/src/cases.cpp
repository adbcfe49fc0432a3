// Copyright (c) 2026 mfmfe contributors
// SPDX-License-Identifier: Apache-2.0
#include "mfmfe/cases.hpp"

#include <cmath>
#include <stdexcept>

namespace mfmfe {

CoefficientField ManufacturedCase::field() const {
  CoefficientField out;
  out.dim = dim;
  out.K = K;
  out.f = f;
  out.g = p;  // Dirichlet datum is the trace of the exact pressure
  return out;
}

ManufacturedCase example1_case() {
  ManufacturedCase c;
  c.name = "example1";
  c.dim = 2;
  c.p = [](const Point& x) {
    return x[0] * x[0] * x[0] * std::pow(x[1], 4) + x[0] * x[0] +
           0.5 * std::sin(2.0 * x[0] * x[1]);
  };
  auto px = [](double x, double y) {
    return 3.0 * x * x * std::pow(y, 4) + 2.0 * x + y * std::cos(2.0 * x * y);
  };
  auto py = [](double x, double y) {
    return 4.0 * x * x * x * y * y * y + x * std::cos(2.0 * x * y);
  };
  c.grad_p = [px, py](const Point& q, double* g) {
    g[0] = px(q[0], q[1]);
    g[1] = py(q[0], q[1]);
  };
  c.K = [](const Point& q, double K[3][3]) {
    const double x = q[0], y = q[1];
    K[0][0] = (x + 1.0) * (x + 1.0) + y * y;
    K[0][1] = K[1][0] = std::sin(x * y);
    K[1][1] = (x + 1.0) * (x + 1.0);
  };
  c.u = [c](const Point& q, double* u) {
    double g[3], K[3][3];
    c.grad_p(q, g);
    c.K(q, K);
    u[0] = -(K[0][0] * g[0] + K[0][1] * g[1]);
    u[1] = -(K[1][0] * g[0] + K[1][1] * g[1]);
  };
  c.f = [px, py](const Point& q) {
    const double x = q[0], y = q[1];
    const double pxx =
        6.0 * x * std::pow(y, 4) + 2.0 - 2.0 * y * y * std::sin(2.0 * x * y);
    const double pyy =
        12.0 * x * x * x * y * y - 2.0 * x * x * std::sin(2.0 * x * y);
    const double pxy = 12.0 * x * x * y * y * y + std::cos(2.0 * x * y) -
                       2.0 * x * y * std::sin(2.0 * x * y);
    const double K11 = (x + 1.0) * (x + 1.0) + y * y;
    const double K22 = (x + 1.0) * (x + 1.0);
    return -(2.0 * (x + 1.0) * px(x, y) + K11 * pxx +
             y * std::cos(x * y) * py(x, y) + x * std::cos(x * y) * px(x, y) +
             2.0 * std::sin(x * y) * pxy + K22 * pyy);
  };
  validate_case(c);
  return c;
}

ManufacturedCase example2_case() {
  ManufacturedCase c;
  c.name = "example2";
  c.dim = 3;
  c.p = [](const Point& q) {
    const double x = q[0], y = q[1], z = q[2];
    return std::pow(x, 4) * y * y * y + x * x + y * z * z + std::cos(x * y) +
           std::sin(z);
  };
  auto px = [](double x, double y, double) {
    return 4.0 * x * x * x * y * y * y + 2.0 * x - y * std::sin(x * y);
  };
  auto py = [](double x, double y, double z) {
    return 3.0 * std::pow(x, 4) * y * y + z * z - x * std::sin(x * y);
  };
  auto pz = [](double, double y, double z) { return 2.0 * y * z + std::cos(z); };
  c.grad_p = [px, py, pz](const Point& q, double* g) {
    g[0] = px(q[0], q[1], q[2]);
    g[1] = py(q[0], q[1], q[2]);
    g[2] = pz(q[0], q[1], q[2]);
  };
  c.K = [](const Point& q, double K[3][3]) {
    const double x = q[0], y = q[1], z = q[2];
    K[0][0] = x * x + (y + 2.0) * (y + 2.0);
    K[0][1] = K[1][0] = 0.0;
    K[0][2] = K[2][0] = std::cos(x * y);
    K[1][1] = z * z + 2.0;
    K[1][2] = K[2][1] = std::sin(x * y);
    K[2][2] = (y + 3.0) * (y + 3.0);
  };
  c.u = [c](const Point& q, double* u) {
    double g[3], K[3][3];
    c.grad_p(q, g);
    c.K(q, K);
    for (int i = 0; i < 3; ++i)
      u[i] = -(K[i][0] * g[0] + K[i][1] * g[1] + K[i][2] * g[2]);
  };
  c.f = [px, py, pz](const Point& q) {
    const double x = q[0], y = q[1], z = q[2];
    const double pxx = 12.0 * x * x * y * y * y + 2.0 - y * y * std::cos(x * y);
    const double pyy = 6.0 * std::pow(x, 4) * y - x * x * std::cos(x * y);
    const double pzz = 2.0 * y - std::sin(z);
    const double K11 = x * x + (y + 2.0) * (y + 2.0);
    const double K22 = z * z + 2.0;
    const double K33 = (y + 3.0) * (y + 3.0);
    // p_xz = 0 and the mixed K13/K23 contributions reduce accordingly
    return -(2.0 * x * px(x, y, z) + K11 * pxx -
             y * std::sin(x * y) * pz(x, y, z) + K22 * pyy +
             x * std::cos(x * y) * pz(x, y, z) +
             4.0 * z * std::sin(x * y) + K33 * pzz);
  };
  validate_case(c);
  return c;
}

ManufacturedCase linear_case(int dim) {
  ManufacturedCase c;
  c.name = "linear";
  c.dim = dim;
  const double a0 = 1.0, a1 = -0.7, a2 = 0.4;
  c.p = [=](const Point& x) {
    double v = 0.3 + a0 * x[0] + a1 * x[1];
    if (dim == 3) v += a2 * x[2];
    return v;
  };
  c.grad_p = [=](const Point&, double* g) {
    g[0] = a0;
    g[1] = a1;
    g[2] = dim == 3 ? a2 : 0.0;
  };
  c.K = [dim](const Point&, double K[3][3]) {
    K[0][0] = 2.0;
    K[0][1] = K[1][0] = 0.5;
    K[1][1] = 1.5;
    if (dim == 3) {
      K[0][2] = K[2][0] = 0.2;
      K[1][2] = K[2][1] = 0.1;
      K[2][2] = 1.8;
    }
  };
  c.u = [c, dim](const Point& q, double* u) {
    double g[3], K[3][3];
    c.grad_p(q, g);
    c.K(q, K);
    for (int i = 0; i < dim; ++i) {
      u[i] = 0.0;
      for (int j = 0; j < dim; ++j) u[i] -= K[i][j] * g[j];
    }
  };
  c.f = [](const Point&) { return 0.0; };
  validate_case(c);
  return c;
}

void validate_case(const ManufacturedCase& c) {
  const double eps = 1e-5;
  const double samples[4][3] = {
      {0.21, 0.47, 0.63}, {0.83, 0.12, 0.35}, {0.55, 0.91, 0.18}, {0.4, 0.7, 0.9}};
  for (const auto& s : samples) {
    Point x{s[0], s[1], c.dim == 3 ? s[2] : 0.0};
    // u + K grad p = 0
    double g[3], K[3][3], u[3];
    c.grad_p(x, g);
    c.K(x, K);
    c.u(x, u);
    for (int i = 0; i < c.dim; ++i) {
      double r = u[i];
      for (int j = 0; j < c.dim; ++j) r += K[i][j] * g[j];
      if (std::abs(r) > 1e-12)
        throw std::logic_error(c.name + ": u != -K grad p");
    }
    // grad p consistent with p
    for (int i = 0; i < c.dim; ++i) {
      Point xp = x, xm = x;
      xp[i] += eps;
      xm[i] -= eps;
      const double fd = (c.p(xp) - c.p(xm)) / (2.0 * eps);
      if (std::abs(fd - g[i]) > 1e-6 * (1.0 + std::abs(g[i])))
        throw std::logic_error(c.name + ": grad p mismatch");
    }
    // f = div u by central differences
    double div = 0.0;
    for (int i = 0; i < c.dim; ++i) {
      Point xp = x, xm = x;
      xp[i] += eps;
      xm[i] -= eps;
      double up[3], um[3];
      c.u(xp, up);
      c.u(xm, um);
      div += (up[i] - um[i]) / (2.0 * eps);
    }
    if (std::abs(div - c.f(x)) > 1e-5 * (1.0 + std::abs(c.f(x))))
      throw std::logic_error(c.name + ": f != div u");
  }
}

}  // namespace mfmfe
