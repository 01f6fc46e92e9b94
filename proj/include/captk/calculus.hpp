// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

#include "captk/geometry.hpp"

namespace captk {

// Nodal real values (nodes = cell corners).
struct ScalarField {
  Grid grid;
  std::vector<double> values;  // node-major, x fastest

  static ScalarField zeros(const Grid& g) { return {g, std::vector<double>(g.node_count(), 0.0)}; }
  // Samples f at every node.
  static ScalarField sample(const Grid& g, const std::function<double(const Vec&)>& f);
};

// One n-vector per cell (cell-centered gradients).
struct VectorField {
  Grid grid;
  std::vector<double> comps;  // cell-major, dim components per cell
};

// Cell-centered gradient: component i at a cell averages the forward
// differences along axis i over the cell's 2^(n-1) node pairs, divided by h.
// Exact on affine fields.
VectorField gradient(const ScalarField& f);

// Midpoint-quadrature L^p norm over the region's cells. Scalar fields are
// averaged to cell centers first; vector fields use the Euclidean magnitude.
double lp_norm(const ScalarField& f, double p, const CellMask& region);
double lp_norm(const VectorField& f, double p, const CellMask& region);

// ||grad f||_p^p / ||f||_p^p over omega. Throws when ||f||_p = 0.
double rayleigh_quotient(const ScalarField& f, double p, const CellMask& omega);

// Nodes all of whose incident cells lie in the open-set mask; fields vanishing
// on the rest are the discrete counterpart of compactly supported functions.
std::vector<std::uint8_t> interior_nodes(const CellMask& omega);

// Restriction helper: zero out values at nodes not marked active.
void zero_outside(ScalarField& f, const std::vector<std::uint8_t>& active);

void validate_p(double p);

}  // namespace captk
