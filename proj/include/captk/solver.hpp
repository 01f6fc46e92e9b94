// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "captk/geometry.hpp"

namespace captk {

struct SolverOptions {
  double rel_tol = 1e-9;   // relative energy decrement per accepted step
  int consecutive = 5;     // decrements that must stay below rel_tol in a row
  long max_iters = 100000;
  int cascade_levels = 1;  // dyadic coarse-to-fine warm start (1 = off)
  // when > 0, also require sup |projected gradient| <= grad_tol; decrements
  // alone under-resolve flat minima
  double grad_tol = 0;
};

struct SolverStats {
  long iterations = 0;
  double final_decrement = 0;
  double constraint_violation = 0;
  double grad_norm = 0;  // sup norm of the projected gradient at exit
  bool converged = true;
};

// Convex nodal energy at unit spacing:
//
//   E(u) = sum_{live cells} [ alpha |avg_c(u)|^p + (|g_c(u)|^2 + eps2)^{p/2} ]
//          - sum_nodes lin * u
//
// where avg_c is the corner average and g_c the pair-averaged forward
// differences. Pinned nodes keep their incoming values; free nodes may be
// clamped to a box. Physical h-factors are the caller's business.
struct EnergyModel {
  const Grid* grid = nullptr;
  double p = 2;
  double alpha = 0;  // mass-term weight; 0 drops the term
  double eps2 = 0;   // gradient regularization, used when p < 2
  std::vector<std::int64_t> cells;        // live cells
  std::vector<double> lin;                // per-node linear term; empty = none
  std::vector<std::uint8_t> free_node;    // 1 = optimized
  double clamp_lo = -std::numeric_limits<double>::infinity();
  double clamp_hi = std::numeric_limits<double>::infinity();

  double energy(const std::vector<double>& u) const;
  // Returns E(u); writes dE/du into g (zero at pinned nodes).
  double energy_and_gradient(const std::vector<double>& u, std::vector<double>& g) const;
};

// Accelerated projected gradient with backtracking line search and adaptive
// restart; monotone in the energy. `u` holds the start point (pinned values
// included) and receives the minimizer.
SolverStats accelerated_minimize(const EnergyModel& model, std::vector<double>& u,
                                 const SolverOptions& opts);

// --- dyadic helpers for coarse-to-fine warm starts ---------------------------

// True when every grid axis has an even cell count.
bool can_coarsen(const Grid& g);
Grid coarsen_grid(const Grid& g);
// Coarse cell true when any (outer) / all (inner) of its children are true.
std::vector<std::uint8_t> coarsen_cells_outer(const Grid& fine, const std::vector<std::uint8_t>& bits);
std::vector<std::uint8_t> coarsen_cells_inner(const Grid& fine, const std::vector<std::uint8_t>& bits);
// Multilinear prolongation of nodal values from coarse to fine.
std::vector<double> prolong_nodal(const Grid& coarse, const Grid& fine, const std::vector<double>& v);

}  // namespace captk
