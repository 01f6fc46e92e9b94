// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "captk/capacity.hpp"
#include "captk/geometry.hpp"

namespace captk {

struct InradiusOptions {
  CapacityKind capacity = CapacityKind::Sobolev;
  double center_pitch = 0;   // center lattice pitch, 0 -> grid h
  double bisect_tol = 0;     // radius bisection tolerance, 0 -> h/4 (h/2 for r_{p,gamma})
  double window_margin = 0;  // solve-window margin around a queried ball, 0 -> max(1, r)
  std::vector<double> epsilons;    // absolute thresholds, descending; empty -> cell-floor schedule
  std::vector<double> gamma_grid;  // empty -> {0.5, 0.25, 0.1, 0.05}
  bool with_gamma_curve = true;    // strict_inradius fills the gamma curve
  // Cap on capacity solves per gamma-threshold probe. Witnesses sort first in
  // the measure ordering, so the cap only weakens marginal refutations; probes
  // that hit it are flagged in the report.
  long max_probe_solves = 256;
  std::vector<double> R_list;      // optional delta/gamma table radii
  SolverOptions solver;
};

struct EpsilonPoint {
  double epsilon = 0;
  double radius = 0;
  Vec witness{0, 0, 0};
  bool saturated = false;  // admissible up to the search range limit
};

struct GammaPoint {
  double gamma = 0;
  double radius = 0;
};

struct DeltaPoint {
  double R = 0;
  double delta = 0;
  Vec witness{0, 0, 0};
  double gamma = 0;  // delta / capacity of the full R-ball
};

struct InradiusReport {
  double p = 2;
  CapacityKind kind = CapacityKind::Sobolev;
  double h = 0;
  double rho_hat = 0;          // radius at the smallest epsilon
  double geometric = 0;        // distance-transform inradius
  double cell_floor = 0;       // capacity of one grid cell, the epsilon anchor
  std::vector<EpsilonPoint> epsilon_curve;
  std::vector<GammaPoint> gamma_curve;
  std::vector<DeltaPoint> delta_curve;
  double center_pitch = 0;
  double bisect_tol = 0;
  bool solver_trouble = false;  // any capacity sub-solve failed to converge
  bool gamma_capped = false;    // some gamma probe hit the solve cap
  // complements are truncated to the mask's box plus per-query windows; every
  // report carries this reminder since the continuum takes all of R^n
  bool truncated_complement = true;
};

// C_p(closed ball(center, r) \ omega), solved on a window of the ball dilated
// by the window margin; cells beyond omega's grid count as complement.
CapacityEstimate ball_complement_capacity(const CellMask& omega, const Vec& center, double r,
                                          double p, const InradiusOptions& opts = {});

// Capacity of the full closed ball of radius r under the same window
// convention (the denominator of the gamma quantities).
double ball_window_capacity(const CellMask& omega, double r, double p,
                            const InradiusOptions& opts = {});

// Capacity of a single grid cell at omega's spacing; anchors the default
// epsilon schedule.
double single_cell_capacity(const CellMask& omega, double p, const InradiusOptions& opts = {});

struct DeltaResult {
  double value = 0;
  Vec witness{0, 0, 0};
  bool solver_trouble = false;
};

// Minimum of ball_complement_capacity over the center lattice covering the
// mask's bbox dilated by R; ties go to the lowest lexicographic center.
DeltaResult delta_R(const CellMask& omega, double R, double p, const InradiusOptions& opts = {});

// sup { r : some center keeps the complement capacity <= gamma * C_p(B_r) },
// located by bisection at tolerance h/2.
double mazya_shubin_radius(const CellMask& omega, double gamma, double p,
                           const InradiusOptions& opts = {});

// Full report: epsilon sweep (bisection per threshold), gamma curve, geometric
// inradius and optional delta table. rho_hat is the radius at the smallest
// epsilon of the schedule.
InradiusReport strict_inradius(const CellMask& omega, double p, const InradiusOptions& opts = {});

}  // namespace captk
