// SPDX-License-Identifier: Apache-2.0
#include "captk/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace captk {
namespace {

// Nodes of K's true cells (every corner of a true cell).
std::vector<std::uint8_t> k_nodes(const CellMask& K) {
  const Grid& g = K.grid;
  const auto nd = g.node_dims();
  std::vector<std::uint8_t> out(static_cast<std::size_t>(g.node_count()), 0);
  std::int64_t idx = 0;
  for (std::int64_t z = 0; z < g.dims[2]; ++z)
    for (std::int64_t y = 0; y < g.dims[1]; ++y)
      for (std::int64_t x = 0; x < g.dims[0]; ++x, ++idx) {
        if (!K.bits[idx]) continue;
        for (std::int64_t dz = 0; dz <= (g.dim >= 3 ? 1 : 0); ++dz)
          for (std::int64_t dy = 0; dy <= (g.dim >= 2 ? 1 : 0); ++dy)
            for (std::int64_t dx = 0; dx <= 1; ++dx)
              out[g.node_index(x + dx, y + dy, z + dz)] = 1;
      }
  return out;
}

std::vector<std::uint8_t> boundary_nodes(const Grid& g) {
  const auto nd = g.node_dims();
  std::vector<std::uint8_t> out(static_cast<std::size_t>(g.node_count()), 0);
  std::int64_t idx = 0;
  for (std::int64_t z = 0; z < nd[2]; ++z)
    for (std::int64_t y = 0; y < nd[1]; ++y)
      for (std::int64_t x = 0; x < nd[0]; ++x, ++idx) {
        bool edge = x == 0 || x == nd[0] - 1;
        if (g.dim >= 2) edge = edge || y == 0 || y == nd[1] - 1;
        if (g.dim >= 3) edge = edge || z == 0 || z == nd[2] - 1;
        out[idx] = edge;
      }
  return out;
}

struct LevelProblem {
  Grid grid;
  std::vector<std::uint8_t> kbits;  // K cells at this level
};

// One capacity solve at unit spacing with mass weight alpha; returns the
// minimizer in `u` (sized to the grid's nodes).
SolverStats solve_level(const Grid& g, const std::vector<std::uint8_t>& kbits, double p,
                        double alpha, double eps2, const SolverOptions& opts,
                        std::vector<double>& u) {
  CellMask km{g, MaskKind::CompactSet, kbits, false};
  const auto pin1 = k_nodes(km);
  const auto pin0 = boundary_nodes(g);

  EnergyModel model;
  model.grid = &g;
  model.p = p;
  model.alpha = alpha;
  model.eps2 = eps2;
  model.clamp_lo = 0.0;
  model.clamp_hi = 1.0;
  model.free_node.assign(pin1.size(), 1);
  const std::int64_t ncells = g.cell_count();
  model.cells.reserve(static_cast<std::size_t>(ncells));
  for (std::int64_t c = 0; c < ncells; ++c) model.cells.push_back(c);

  for (std::size_t i = 0; i < pin1.size(); ++i) {
    if (pin1[i]) {
      model.free_node[i] = 0;
      u[i] = 1.0;
    }
    if (pin0[i]) {
      if (pin1[i]) throw std::invalid_argument("capacity: set touches the margin frame");
      model.free_node[i] = 0;
      u[i] = 0.0;
    }
  }
  return accelerated_minimize(model, u, opts);
}

std::vector<double> initial_guess(const Grid& g, const std::vector<std::uint8_t>& knode) {
  // 1 on K, linear decay to 0 over the margin width (in cells)
  auto d2 = node_distance_sq(g, knode);
  const auto nd = g.node_dims();
  double mind_edge = 1e30;
  std::int64_t idx = 0;
  for (std::int64_t z = 0; z < nd[2]; ++z)
    for (std::int64_t y = 0; y < nd[1]; ++y)
      for (std::int64_t x = 0; x < nd[0]; ++x, ++idx) {
        if (!knode[idx]) continue;
        double d = double(x);
        d = std::min(d, double(nd[0] - 1 - x));
        if (g.dim >= 2) d = std::min({d, double(y), double(nd[1] - 1 - y)});
        if (g.dim >= 3) d = std::min({d, double(z), double(nd[2] - 1 - z)});
        mind_edge = std::min(mind_edge, d);
      }
  if (mind_edge < 1) mind_edge = 1;
  std::vector<double> u(d2.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    u[i] = std::max(0.0, 1.0 - std::sqrt(d2[i]) / mind_edge);
  return u;
}

}  // namespace

CapacityEstimate compute_capacity(const CellMask& K, double p, CapacityKind kind,
                                  const SolverOptions& opts) {
  validate_p(p);
  if (K.kind != MaskKind::CompactSet)
    throw std::invalid_argument("capacity: compact-set mask expected");
  const Grid& g = K.grid;

  CapacityEstimate est;
  est.kind = kind;
  est.p = p;
  est.h = g.h;
  est.potential = ScalarField::zeros(g);

  const auto bbox = K.true_bbox();
  if (!bbox) return est;  // empty set, u = 0 admissible
  est.margin = 1e30;
  for (int i = 0; i < g.dim; ++i) {
    est.margin = std::min(est.margin, bbox->lo[i] - g.lo[i]);
    est.margin = std::min(est.margin, g.hi(i) - bbox->hi[i]);
  }

  const double alpha = kind == CapacityKind::Sobolev ? std::pow(g.h, p) : 0.0;
  const double eps = p < 2.0 ? 1e-8 / g.h : 0.0;  // physical regularization scale
  const double eps2 = p < 2.0 ? (eps * g.h) * (eps * g.h) : 0.0;  // unit-spacing equivalent
  est.grad_reg_eps = eps;

  // coarse-to-fine warm start
  std::vector<LevelProblem> levels{{g, K.bits}};
  for (int l = 1; l < opts.cascade_levels && can_coarsen(levels.back().grid); ++l) {
    const auto& fine = levels.back();
    LevelProblem c{coarsen_grid(fine.grid), coarsen_cells_outer(fine.grid, fine.kbits)};
    levels.push_back(std::move(c));
  }

  std::vector<double> u;
  SolverStats stats;
  for (std::size_t li = levels.size(); li-- > 0;) {
    const auto& L = levels[li];
    const double lalpha = kind == CapacityKind::Sobolev ? std::pow(L.grid.h, p) : 0.0;
    const double leps2 = p < 2.0 ? (eps * L.grid.h) * (eps * L.grid.h) : 0.0;
    if (li + 1 == levels.size()) {
      CellMask km{L.grid, MaskKind::CompactSet, L.kbits, false};
      u = initial_guess(L.grid, k_nodes(km));
    } else {
      u = prolong_nodal(levels[li + 1].grid, L.grid, u);
    }
    SolverOptions lopts = opts;
    if (li != 0) lopts.rel_tol = std::max(opts.rel_tol, 1e-7);  // coarse levels are warm starts
    stats = solve_level(L.grid, L.kbits, p, lalpha, leps2, lopts, u);
  }

  est.potential.values = std::move(u);
  est.solver = stats;

  // report the unregularized energy of the returned potential
  EnergyModel plain;
  plain.grid = &g;
  plain.p = p;
  plain.alpha = alpha;
  plain.eps2 = 0;
  plain.free_node.assign(est.potential.values.size(), 1);
  const std::int64_t ncells = g.cell_count();
  plain.cells.reserve(static_cast<std::size_t>(ncells));
  for (std::int64_t c = 0; c < ncells; ++c) plain.cells.push_back(c);
  est.value = std::pow(g.h, double(g.dim) - p) * plain.energy(est.potential.values);

  // constraint audit
  double viol = 0;
  const auto kn = k_nodes(K);
  const auto bn = boundary_nodes(g);
  for (std::size_t i = 0; i < kn.size(); ++i) {
    const double v = est.potential.values[i];
    if (kn[i]) viol = std::max(viol, 1.0 - v);
    if (bn[i]) viol = std::max(viol, std::abs(v));
    viol = std::max({viol, -v, v - 1.0});
  }
  est.solver.constraint_violation = viol;
  return est;
}

CapacityEstimate sobolev_capacity(const CellMask& K, double p, const SolverOptions& opts) {
  return compute_capacity(K, p, CapacityKind::Sobolev, opts);
}

CapacityEstimate wiener_capacity(const CellMask& K, double p, const SolverOptions& opts) {
  return compute_capacity(K, p, CapacityKind::Wiener, opts);
}

ScalingReport capacity_scaling_report(const DomainSpec& shape, double p,
                                      const std::vector<double>& scales, double h, double tol,
                                      CapacityKind kind, const SolverOptions& opts) {
  validate_p(p);
  ScalingReport rep;
  rep.p = p;
  rep.h = h;
  rep.tol = tol;

  auto capacity_of = [&](const DomainSpec& s) {
    auto hb = hull(s);
    if (!hb) throw std::invalid_argument("scaling report: shape must be bounded");
    double r = 0;
    for (int i = 0; i < s.dim; ++i) r = std::max(r, 0.5 * (hb->hi[i] - hb->lo[i]));
    const Grid g = cover_box(s.dim, *hb, h, std::max(1.0, r));
    return compute_capacity(rasterize(s, g, MaskKind::CompactSet), p, kind, opts).value;
  };

  const double base = capacity_of(shape);
  for (double s : scales) {
    DomainSpec scaled = shape;
    ShapeExpr e;
    e.kind = ShapeKind::Scale;
    e.s = s;
    e.children.push_back(shape.root);
    scaled.root = std::move(e);
    ScalingRow row;
    row.s = s;
    row.value = s == 1.0 ? base : capacity_of(scaled);
    double sn = 1;
    for (int i = 0; i < shape.dim; ++i) sn *= s;
    row.bound = sn * std::max(1.0, std::pow(s, -p)) * base * (1.0 + tol);
    row.pass = row.value <= row.bound;
    rep.rows.push_back(row);
  }

  // translation invariance at one exact multiple-of-h shift
  DomainSpec moved = shape;
  ShapeExpr t;
  t.kind = ShapeKind::Translate;
  t.a = {3 * h, shape.dim >= 2 ? 2 * h : 0.0, shape.dim >= 3 ? h : 0.0};
  t.children.push_back(shape.root);
  moved.root = std::move(t);
  rep.base_value = base;
  rep.translated_value = capacity_of(moved);
  rep.translation_exact = rep.base_value == rep.translated_value;
  return rep;
}

}  // namespace captk
