// Copyright (c) 2026 mfmfe contributors
// SPDX-License-Identifier: Apache-2.0
#include "mfmfe/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace mfmfe {

namespace {

// Legendre P_n and P'_n at x by the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  double d0 = 0.0, d1 = 1.0;
  if (n == 0) {
    p = p0;
    dp = d0;
    return;
  }
  for (int m = 1; m < n; ++m) {
    const double p2 = ((2 * m + 1) * x * p1 - m * p0) / (m + 1);
    const double d2 = ((2 * m + 1) * (p1 + x * d1) - m * d0) / (m + 1);
    p0 = p1;
    p1 = p2;
    d0 = d1;
    d1 = d2;
  }
  p = p1;
  dp = d1;
}

constexpr double kNewtonTol = 1e-14;
constexpr int kNewtonMaxIt = 200;

}  // namespace

Rule1D gauss_rule(int n) {
  if (n < 1) throw std::invalid_argument("gauss_rule: n must be >= 1");
  Rule1D rule;
  rule.points.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  rule.exactness_degree = 2 * n - 1;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev initial guess for the i-th root of P_n (descending order).
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p, dp;
    for (int it = 0; it < kNewtonMaxIt; ++it) {
      legendre(n, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < kNewtonTol) break;
    }
    legendre(n, x, p, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[n - 1 - i] = x;
    rule.points[i] = -x;
    rule.weights[n - 1 - i] = w;
    rule.weights[i] = w;
  }
  if (n % 2 == 1) rule.points[n / 2] = 0.0;
  return rule;
}

Rule1D gauss_lobatto_rule(int n) {
  if (n < 2) throw std::invalid_argument("gauss_lobatto_rule: n must be >= 2");
  Rule1D rule;
  rule.points.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  rule.exactness_degree = 2 * n - 3;
  const int m = n - 1;  // interior points are roots of P_m'
  rule.points[0] = -1.0;
  rule.points[n - 1] = 1.0;
  for (int i = 1; i <= (n - 2) / 2 + (n - 2) % 2; ++i) {
    // Chebyshev-Lobatto initial guess, Newton on P_m' using the Legendre ODE
    // (1-x^2) P'' = 2 x P' - m(m+1) P.
    double x = std::cos(M_PI * i / m);
    double p, dp;
    for (int it = 0; it < kNewtonMaxIt; ++it) {
      legendre(m, x, p, dp);
      const double ddp = (2.0 * x * dp - m * (m + 1) * p) / (1.0 - x * x);
      const double dx = dp / ddp;
      x -= dx;
      if (std::abs(dx) < kNewtonTol) break;
    }
    rule.points[n - 1 - i] = x;
    rule.points[i] = -x;
  }
  if (n % 2 == 1) rule.points[n / 2] = 0.0;
  for (int i = 0; i < n; ++i) {
    double p, dp;
    legendre(m, rule.points[i], p, dp);
    rule.weights[i] = 2.0 / (m * (m + 1) * p * p);
  }
  return rule;
}

Rule1D map_rule(const Rule1D& rule, double a, double b) {
  Rule1D out = rule;
  const double scale = 0.5 * (b - a);
  const double shift = 0.5 * (b + a);
  for (auto& x : out.points) x = shift + scale * x;
  for (auto& w : out.weights) w *= scale;
  return out;
}

RuleND tensor_rule(const Rule1D& rule, int d) {
  if (d != 2 && d != 3) throw std::invalid_argument("tensor_rule: d must be 2 or 3");
  const int n = static_cast<int>(rule.points.size());
  RuleND out;
  out.dim = d;
  out.points_per_axis = n;
  int total = 1;
  for (int a = 0; a < d; ++a) total *= n;
  out.nodes.resize(total);
  out.weights.resize(total);
  for (int idx = 0; idx < total; ++idx) {
    int rem = idx;
    std::array<int, 3> ijk{0, 0, 0};
    for (int a = d - 1; a >= 0; --a) {
      ijk[a] = rem % n;
      rem /= n;
    }
    double w = 1.0;
    std::array<double, 3> node{0.0, 0.0, 0.0};
    for (int a = 0; a < d; ++a) {
      node[a] = rule.points[ijk[a]];
      w *= rule.weights[ijk[a]];
    }
    out.nodes[idx] = node;
    out.weights[idx] = w;
  }
  return out;
}

}  // namespace mfmfe
