// SPDX-License-Identifier: Apache-2.0
#include "captk/calculus.hpp"

#include <cmath>
#include <stdexcept>

namespace captk {

void validate_p(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("p must lie in (1, inf)");
}

ScalarField ScalarField::sample(const Grid& g, const std::function<double(const Vec&)>& f) {
  ScalarField out = zeros(g);
  const auto nd = g.node_dims();
  std::int64_t idx = 0;
  for (std::int64_t z = 0; z < nd[2]; ++z)
    for (std::int64_t y = 0; y < nd[1]; ++y)
      for (std::int64_t x = 0; x < nd[0]; ++x, ++idx) {
        Vec pt{0, 0, 0};
        const std::array<std::int64_t, 3> c{x, y, z};
        for (int i = 0; i < g.dim; ++i) pt[i] = g.lo[i] + double(c[i]) * g.h;
        out.values[idx] = f(pt);
      }
  return out;
}

namespace {

// Corner node indices of cell (x,y,z), x-fastest order.
inline void corner_nodes(const Grid& g, std::int64_t x, std::int64_t y, std::int64_t z,
                         std::int64_t out[8]) {
  const auto nd = g.node_dims();
  const std::int64_t base = x + nd[0] * (y + nd[1] * z);
  out[0] = base;
  out[1] = base + 1;
  if (g.dim >= 2) {
    out[2] = base + nd[0];
    out[3] = base + nd[0] + 1;
  }
  if (g.dim >= 3) {
    out[4] = base + nd[0] * nd[1];
    out[5] = out[4] + 1;
    out[6] = out[4] + nd[0];
    out[7] = out[6] + 1;
  }
}

}  // namespace

VectorField gradient(const ScalarField& f) {
  const Grid& g = f.grid;
  VectorField out;
  out.grid = g;
  out.comps.assign(static_cast<std::size_t>(g.cell_count()) * g.dim, 0.0);
  const double inv_h = 1.0 / g.h;
  const int dim = g.dim;
  const int ncorner = 1 << dim;
  std::int64_t nodes[8];
  std::int64_t idx = 0;
  for (std::int64_t z = 0; z < g.dims[2]; ++z)
    for (std::int64_t y = 0; y < g.dims[1]; ++y)
      for (std::int64_t x = 0; x < g.dims[0]; ++x, ++idx) {
        corner_nodes(g, x, y, z, nodes);
        double v[8];
        for (int k = 0; k < ncorner; ++k) v[k] = f.values[nodes[k]];
        const double pair_scale = inv_h / double(ncorner / 2);
        for (int axis = 0; axis < dim; ++axis) {
          const int stride = 1 << axis;
          double acc = 0;
          for (int k = 0; k < ncorner; ++k)
            if (!(k & stride)) acc += v[k + stride] - v[k];
          out.comps[idx * dim + axis] = acc * pair_scale;
        }
      }
  return out;
}

namespace {

double lp_norm_impl(const Grid& g, const CellMask& region,
                    const std::function<double(std::int64_t)>& cell_abs, double p) {
  if (!region.grid.same_layout(g)) throw std::invalid_argument("lp_norm: grid mismatch");
  double hn = 1;
  for (int i = 0; i < g.dim; ++i) hn *= g.h;
  double acc = 0;
  const std::int64_t n = g.cell_count();
  for (std::int64_t c = 0; c < n; ++c) {
    if (!region.bits[c]) continue;
    acc += std::pow(cell_abs(c), p);
  }
  return std::pow(acc * hn, 1.0 / p);
}

}  // namespace

double lp_norm(const ScalarField& f, double p, const CellMask& region) {
  validate_p(p);
  const Grid& g = f.grid;
  const int ncorner = 1 << g.dim;
  std::int64_t nodes[8];
  // cell averages in one pass to keep the reduction order fixed
  std::vector<double> avg(static_cast<std::size_t>(g.cell_count()));
  std::int64_t idx = 0;
  for (std::int64_t z = 0; z < g.dims[2]; ++z)
    for (std::int64_t y = 0; y < g.dims[1]; ++y)
      for (std::int64_t x = 0; x < g.dims[0]; ++x, ++idx) {
        corner_nodes(g, x, y, z, nodes);
        double a = 0;
        for (int k = 0; k < ncorner; ++k) a += f.values[nodes[k]];
        avg[idx] = a / double(ncorner);
      }
  return lp_norm_impl(g, region, [&](std::int64_t c) { return std::abs(avg[c]); }, p);
}

double lp_norm(const VectorField& f, double p, const CellMask& region) {
  validate_p(p);
  const Grid& g = f.grid;
  const int dim = g.dim;
  return lp_norm_impl(g, region,
                      [&](std::int64_t c) {
                        double m2 = 0;
                        for (int i = 0; i < dim; ++i) {
                          const double gi = f.comps[c * dim + i];
                          m2 += gi * gi;
                        }
                        return std::sqrt(m2);
                      },
                      p);
}

double rayleigh_quotient(const ScalarField& f, double p, const CellMask& omega) {
  const double den = lp_norm(f, p, omega);
  if (den <= 0) throw std::invalid_argument("rayleigh_quotient: field vanishes on the region");
  const double num = lp_norm(gradient(f), p, omega);
  return std::pow(num, p) / std::pow(den, p);
}

std::vector<std::uint8_t> interior_nodes(const CellMask& omega) {
  if (omega.kind != MaskKind::OpenSet)
    throw std::invalid_argument("interior_nodes: open-set mask expected");
  const Grid& g = omega.grid;
  const auto nd = g.node_dims();
  std::vector<std::uint8_t> active(static_cast<std::size_t>(g.node_count()), 0);
  std::int64_t idx = 0;
  for (std::int64_t z = 0; z < nd[2]; ++z)
    for (std::int64_t y = 0; y < nd[1]; ++y)
      for (std::int64_t x = 0; x < nd[0]; ++x, ++idx) {
        bool all = true;
        // incident cells span [x-1,x] per axis, clipped at the grid edge;
        // a node on the edge is never interior
        for (std::int64_t dz = (g.dim >= 3 ? -1 : 0); all && dz <= (g.dim >= 3 ? 0 : 0); ++dz)
          for (std::int64_t dy = (g.dim >= 2 ? -1 : 0); all && dy <= (g.dim >= 2 ? 0 : 0); ++dy)
            for (std::int64_t dx = -1; all && dx <= 0; ++dx) {
              const std::int64_t cx = x + dx, cy = y + dy, cz = z + dz;
              if (cx < 0 || cx >= g.dims[0] || cy < 0 || cy >= g.dims[1] || cz < 0 ||
                  cz >= g.dims[2]) {
                all = false;
                break;
              }
              if (!omega.bits[g.cell_index(cx, cy, cz)]) all = false;
            }
        active[idx] = all;
      }
  return active;
}

void zero_outside(ScalarField& f, const std::vector<std::uint8_t>& active) {
  for (std::size_t i = 0; i < f.values.size(); ++i)
    if (!active[i]) f.values[i] = 0.0;
}

}  // namespace captk
