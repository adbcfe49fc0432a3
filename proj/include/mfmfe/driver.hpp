// Copyright (c) 2026 mfmfe contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mfmfe/errors.hpp"
#include "mfmfe/solver.hpp"

namespace mfmfe {

/// Configuration of a convergence or timing run.
struct RunConfig {
  int example = 1;              // 1: 2d quadrilateral study, 2: 3d hexahedral
  std::string method = "mfmfe"; // "mfmfe" or "rt" (RT_{k-1} comparison)
  int k = 2;                    // method order >= 1
  int level_min = 0;
  int level_max = 3;
  double tol = 1e-12;           // CG relative residual
  int quad_points = 0;          // per-axis Gauss points for exact integration
                                // (0 selects k+3)
  bool deterministic = false;   // runs are single-threaded and deterministic;
                                // flag kept for interface stability
  void validate() const;
  int dim() const { return example == 2 ? 3 : 2; }
  double nominal_h(int level) const;
};

ErrorRecord run_level(const RunConfig& config, int level);

/// Full study over config levels with rates filled in.
std::vector<ErrorRecord> run_convergence(const RunConfig& config);

/// CSV schema used by the CLI:
/// level,h,err_u,rate_u,err_div,rate_div,err_p,rate_p,err_pG,rate_pG,
/// err_qp,rate_qp,err_pstar,rate_pstar,cg_iters,assemble_s,solve_s
void write_csv(std::ostream& os, const std::vector<ErrorRecord>& records);
void write_table(std::ostream& os, const std::vector<ErrorRecord>& records);

/// Element self-check report for order k in dimension d; returns true when
/// every check passes.
bool check_element_report(int k, int d, std::ostream& os);

}  // namespace mfmfe
