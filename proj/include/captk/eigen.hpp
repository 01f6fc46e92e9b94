// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "captk/calculus.hpp"
#include "captk/geometry.hpp"
#include "captk/solver.hpp"

namespace captk {

struct EigenOptions {
  double outer_tol = 1e-7;  // relative change of lambda between outer steps
  int max_outer = 200;
  SolverOptions inner;
  int residual_probes = 32;          // probes recorded in the estimate
  std::uint64_t residual_seed = 42;  // probe stream
};

// Principal Dirichlet eigenvalue estimate of the p-Laplacian on a mask.
struct EigenEstimate {
  double lambda = 0;
  ScalarField field;        // nonnegative, ||.||_p = 1
  double residual = 0;      // relative weak-form residual over random probes
  int iterations = 0;       // outer iterations
  double p = 2;
  double h = 0;
  bool converged = true;
  bool connected = true;
  std::vector<double> lambda_history;
};

// Minimizes (1/p)||grad u||_p^p - <rhs, u> over fields equal to `boundary`
// outside the interior nodes of omega. Unique minimizer for p > 1.
ScalarField p_dirichlet_solve(const CellMask& omega, double p, const ScalarField& boundary,
                              const ScalarField& rhs, const SolverOptions& opts = {},
                              SolverStats* stats = nullptr);

// Inverse-power iteration on the Rayleigh quotient: repeatedly solves the
// p-Dirichlet problem with rhs = lambda |u|^{p-2} u and renormalizes. The
// spacing enters only through the final h^{-p} factor, so scaling the domain
// together with the grid reproduces the eigenvalue scaling law exactly.
EigenEstimate principal_rayleigh(const CellMask& omega, double p, const EigenOptions& opts = {});

// Max relative weak-form residual of (lambda, u) against `probes` random test
// fields supported in omega.
double eigen_residual(const CellMask& omega, double p, const ScalarField& u, double lambda,
                      int probes, std::uint64_t seed);

struct ExtensionNormEstimate {
  double R = 1;
  double p = 2;
  int dim = 2;
  double norm = 1;       // lower estimate of the discrete operator norm
  int trials = 0;
  std::uint64_t fingerprint = 0;  // parameters of the maximizing field
  double h = 0;
};

// Even reflection across each cube face into a one-R collar followed by a
// quintic-smoothstep cutoff (1 on the cube, 0 outside the 3R cube). The norm
// is estimated from below by random smooth fields refined by local ascent.
ExtensionNormEstimate extension_norm_estimate(double R, double p, int dim, int cells_per_R,
                                              int trials, std::uint64_t seed);

}  // namespace captk
