// Copyright (c) 2026 mfmfe contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "mfmfe/assembly.hpp"

namespace mfmfe {

/// Analytic data for an error study: pressure p, permeability K, the derived
/// velocity u = -K grad p and source f = div u, all hand-differentiated and
/// validated against finite differences on construction.
struct ManufacturedCase {
  std::string name;
  int dim = 2;
  std::function<double(const Point&)> p;
  std::function<void(const Point&, double*)> grad_p;
  std::function<void(const Point&, double K[3][3])> K;
  std::function<void(const Point&, double*)> u;
  std::function<double(const Point&)> f;

  CoefficientField field() const;
};

/// Full-tensor 2d case: K = [(x+1)^2 + y^2, sin(xy); sin(xy), (x+1)^2],
/// p = x^3 y^4 + x^2 + sin(xy) cos(xy).
ManufacturedCase example1_case();

/// Full-tensor 3d case: p = x^4 y^3 + x^2 + y z^2 + cos(xy) + sin(z).
ManufacturedCase example2_case();

/// Constant SPD K with linear pressure (constant velocity, f = 0).
ManufacturedCase linear_case(int dim);

/// Finite-difference consistency of (p, grad p, u, f); throws on mismatch.
void validate_case(const ManufacturedCase& c);

}  // namespace mfmfe
