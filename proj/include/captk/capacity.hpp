// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "captk/calculus.hpp"
#include "captk/geometry.hpp"
#include "captk/solver.hpp"

namespace captk {

enum class CapacityKind { Sobolev, Wiener };

// A computed capacity value with its minimizer and solve diagnostics. The
// value is a discrete estimate on the recorded grid, not a certified bound.
struct CapacityEstimate {
  double value = 0;
  CapacityKind kind = CapacityKind::Sobolev;
  double p = 2;
  ScalarField potential;
  SolverStats solver;
  double h = 0;
  double margin = 0;       // distance from the set's bbox to the grid edge
  double grad_reg_eps = 0; // gradient regularization used (p < 2)
};

// Minimizes ||u||_p^p + ||grad u||_p^p over nodal fields with u = 1 on the
// nodes of K's cells and u = 0 on the grid boundary; the grid of K is the
// ambient truncation of R^n. Empty K returns 0 without solving.
CapacityEstimate sobolev_capacity(const CellMask& K, double p, const SolverOptions& opts = {});

// Same minimization without the mass term.
CapacityEstimate wiener_capacity(const CellMask& K, double p, const SolverOptions& opts = {});

CapacityEstimate compute_capacity(const CellMask& K, double p, CapacityKind kind,
                                  const SolverOptions& opts = {});

struct ScalingRow {
  double s = 1;
  double value = 0;
  double bound = 0;  // s^n max(1, s^-p) * value(1) * (1 + tol)
  bool pass = true;
};

struct ScalingReport {
  double p = 2;
  double h = 0;
  double tol = 0.02;
  std::vector<ScalingRow> rows;
  // translation-invariance probe at one exact multiple-of-h shift
  double base_value = 0;
  double translated_value = 0;
  bool translation_exact = false;
};

// Rasterizes sK for each scale on its own margin-framed grid and checks the
// dilation bound C_p(sK) <= s^n max(1, s^-p) C_p(K) (1 + tol).
ScalingReport capacity_scaling_report(const DomainSpec& shape, double p,
                                      const std::vector<double>& scales, double h,
                                      double tol = 0.02, CapacityKind kind = CapacityKind::Sobolev,
                                      const SolverOptions& opts = {});

}  // namespace captk
