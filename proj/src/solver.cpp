// SPDX-License-Identifier: Apache-2.0
#include "captk/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace captk {
namespace {

inline void corner_nodes(const Grid& g, std::int64_t cell, std::int64_t out[8]) {
  const auto nd = g.node_dims();
  const std::int64_t nx = g.dims[0], ny = g.dims[1];
  const std::int64_t x = cell % nx, y = (cell / nx) % ny, z = cell / (nx * ny);
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

// |x|^p and p|x|^{p-1} sgn(x) with fast paths for p = 2, 3.
struct PowCase {
  double p;
  int tag;  // 2, 3, or 0 for the generic path
  explicit PowCase(double pp) : p(pp), tag(pp == 2.0 ? 2 : (pp == 3.0 ? 3 : 0)) {}
  inline double val(double ax) const {
    if (tag == 2) return ax * ax;
    if (tag == 3) return ax * ax * ax;
    return std::pow(ax, p);
  }
  // returns p * s^{(p-2)/2} for s = |.|^2 (+ eps2); the gradient weight
  inline double gweight(double s) const {
    if (tag == 2) return 2.0;
    if (tag == 3) return 3.0 * std::sqrt(s);
    return p * std::pow(s, 0.5 * p - 1.0);
  }
};

template <bool WithMass, bool WithGrad>
double cell_pass(const EnergyModel& m, const std::vector<double>& u, std::vector<double>* grad) {
  const Grid& g = *m.grid;
  const int dim = g.dim;
  const int ncorner = 1 << dim;
  const double inv_pairs = 1.0 / double(ncorner / 2);
  const double inv_corners = 1.0 / double(ncorner);
  const PowCase pc(m.p);
  std::int64_t nodes[8];
  double v[8], gc[3];
  double acc = 0;
  for (const std::int64_t cell : m.cells) {
    corner_nodes(g, cell, nodes);
    for (int k = 0; k < ncorner; ++k) v[k] = u[nodes[k]];
    if constexpr (WithMass) {
      double mavg = 0;
      for (int k = 0; k < ncorner; ++k) mavg += v[k];
      mavg *= inv_corners;
      acc += m.alpha * pc.val(std::abs(mavg));
      if (grad && mavg != 0.0) {
        const double dm = m.alpha * pc.gweight(mavg * mavg) * mavg * inv_corners;
        for (int k = 0; k < ncorner; ++k) (*grad)[nodes[k]] += dm;
      }
    }
    if constexpr (WithGrad) {
      double s = m.eps2;
      for (int axis = 0; axis < dim; ++axis) {
        const int stride = 1 << axis;
        double d = 0;
        for (int k = 0; k < ncorner; ++k)
          if (!(k & stride)) d += v[k + stride] - v[k];
        gc[axis] = d * inv_pairs;
        s += gc[axis] * gc[axis];
      }
      acc += (pc.tag == 2 && m.eps2 == 0.0)
                 ? s
                 : (pc.tag == 3 ? s * std::sqrt(s) : std::pow(s, 0.5 * m.p));
      if (grad && s > 0) {
        const double w = pc.gweight(s) * inv_pairs;
        for (int axis = 0; axis < dim; ++axis) {
          const int stride = 1 << axis;
          const double dw = w * gc[axis];
          for (int k = 0; k < ncorner; ++k)
            if (!(k & stride)) {
              (*grad)[nodes[k + stride]] += dw;
              (*grad)[nodes[k]] -= dw;
            }
        }
      }
    }
  }
  return acc;
}

double model_pass(const EnergyModel& m, const std::vector<double>& u, std::vector<double>* grad) {
  if (grad) std::fill(grad->begin(), grad->end(), 0.0);
  double e = m.alpha != 0.0 ? cell_pass<true, true>(m, u, grad) : cell_pass<false, true>(m, u, grad);
  if (!m.lin.empty()) {
    double ldot = 0;
    for (std::size_t i = 0; i < u.size(); ++i) ldot += m.lin[i] * u[i];
    e -= ldot;
    if (grad)
      for (std::size_t i = 0; i < u.size(); ++i) (*grad)[i] -= m.lin[i];
  }
  if (grad)
    for (std::size_t i = 0; i < u.size(); ++i)
      if (!m.free_node[i]) (*grad)[i] = 0.0;
  return e;
}

}  // namespace

double EnergyModel::energy(const std::vector<double>& u) const { return model_pass(*this, u, nullptr); }

double EnergyModel::energy_and_gradient(const std::vector<double>& u, std::vector<double>& g) const {
  if (g.size() != u.size()) g.assign(u.size(), 0.0);
  return model_pass(*this, u, &g);
}

SolverStats accelerated_minimize(const EnergyModel& model, std::vector<double>& u,
                                 const SolverOptions& opts) {
  const std::size_t n = u.size();
  if (model.free_node.size() != n) throw std::invalid_argument("solver: free-node mask size mismatch");

  auto project = [&](std::vector<double>& x) {
    if (model.clamp_lo == -std::numeric_limits<double>::infinity() &&
        model.clamp_hi == std::numeric_limits<double>::infinity())
      return;
    for (std::size_t i = 0; i < n; ++i)
      if (model.free_node[i]) x[i] = std::clamp(x[i], model.clamp_lo, model.clamp_hi);
  };

  project(u);
  std::vector<double> x = u, y = u, xnew(n), grad(n);
  double ex = model.energy(x);
  double t_mom = 1.0;
  double step = 1.0;
  SolverStats stats;
  int calm = 0;

  for (long iter = 0; iter < opts.max_iters; ++iter) {
    stats.iterations = iter + 1;
    const double ey = model.energy_and_gradient(y, grad);

    // projected-gradient sup norm at y (clamped directions do not count)
    double gsup = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!model.free_node[i]) continue;
      double gi = grad[i];
      if (y[i] <= model.clamp_lo && gi > 0) gi = 0;
      if (y[i] >= model.clamp_hi && gi < 0) gi = 0;
      gsup = std::max(gsup, std::abs(gi));
    }
    stats.grad_norm = gsup;

    // backtracking on the quadratic majorization at y
    double enew = 0;
    for (int ls = 0;; ++ls) {
      for (std::size_t i = 0; i < n; ++i)
        xnew[i] = model.free_node[i] ? y[i] - step * grad[i] : y[i];
      project(xnew);
      enew = model.energy(xnew);
      double lindot = 0, dist2 = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = xnew[i] - y[i];
        lindot += grad[i] * d;
        dist2 += d * d;
      }
      if (enew <= ey + lindot + dist2 / (2.0 * step) + 1e-12 * (std::abs(ey) + 1e-300)) break;
      if (ls > 60) break;  // step underflow guard
      step *= 0.5;
    }

    if (enew > ex + 1e-12 * (std::abs(ex) + 1e-300)) {
      // momentum overshoot: restart from the best point
      y = x;
      t_mom = 1.0;
      continue;
    }

    const double decrement = std::max(0.0, ex - enew) / std::max(std::abs(enew), 1e-300);
    ex = std::min(ex, enew);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_mom * t_mom));
    const double beta = (t_mom - 1.0) / t_next;
    for (std::size_t i = 0; i < n; ++i) {
      const double xi = xnew[i];
      y[i] = xi + beta * (xi - x[i]);
      x[i] = xi;
    }
    project(y);
    t_mom = t_next;
    step *= 1.25;

    stats.final_decrement = decrement;
    calm = decrement < opts.rel_tol ? calm + 1 : 0;
    if (calm >= opts.consecutive && (opts.grad_tol <= 0 || gsup <= opts.grad_tol)) {
      stats.converged = true;
      u = x;
      return stats;
    }
  }
  stats.converged = false;
  u = x;
  return stats;
}

bool can_coarsen(const Grid& g) {
  for (int i = 0; i < g.dim; ++i)
    if (g.dims[i] % 2 != 0 || g.dims[i] < 8) return false;
  return true;
}

Grid coarsen_grid(const Grid& g) {
  Grid c = g;
  c.h = g.h * 2;
  for (int i = 0; i < g.dim; ++i) c.dims[i] = g.dims[i] / 2;
  return c;
}

namespace {

template <bool Any>
std::vector<std::uint8_t> coarsen_cells(const Grid& fine, const std::vector<std::uint8_t>& bits) {
  const Grid coarse = coarsen_grid(fine);
  std::vector<std::uint8_t> out(static_cast<std::size_t>(coarse.cell_count()), Any ? 0 : 1);
  std::int64_t idx = 0;
  for (std::int64_t z = 0; z < fine.dims[2]; ++z)
    for (std::int64_t y = 0; y < fine.dims[1]; ++y)
      for (std::int64_t x = 0; x < fine.dims[0]; ++x, ++idx) {
        const std::int64_t cc = coarse.cell_index(x / 2, fine.dim >= 2 ? y / 2 : y,
                                                  fine.dim >= 3 ? z / 2 : z);
        if (Any) {
          if (bits[idx]) out[cc] = 1;
        } else {
          if (!bits[idx]) out[cc] = 0;
        }
      }
  return out;
}

}  // namespace

std::vector<std::uint8_t> coarsen_cells_outer(const Grid& fine, const std::vector<std::uint8_t>& bits) {
  return coarsen_cells<true>(fine, bits);
}

std::vector<std::uint8_t> coarsen_cells_inner(const Grid& fine, const std::vector<std::uint8_t>& bits) {
  return coarsen_cells<false>(fine, bits);
}

std::vector<double> prolong_nodal(const Grid& coarse, const Grid& fine, const std::vector<double>& v) {
  const auto fnd = fine.node_dims();
  const auto cnd = coarse.node_dims();
  std::vector<double> out(static_cast<std::size_t>(fine.node_count()), 0.0);
  std::int64_t idx = 0;
  for (std::int64_t z = 0; z < fnd[2]; ++z)
    for (std::int64_t y = 0; y < fnd[1]; ++y)
      for (std::int64_t x = 0; x < fnd[0]; ++x, ++idx) {
        const std::array<std::int64_t, 3> f{x, y, z};
        double acc = 0;
        int cnt = 0;
        // average coarse nodes adjacent along each odd axis
        std::array<std::int64_t, 3> base{0, 0, 0}, odd{0, 0, 0};
        for (int i = 0; i < 3; ++i) {
          base[i] = i < fine.dim ? f[i] / 2 : 0;
          odd[i] = i < fine.dim ? f[i] % 2 : 0;
        }
        for (int corner = 0; corner < 8; ++corner) {
          std::array<std::int64_t, 3> c = base;
          bool valid = true;
          for (int i = 0; i < 3; ++i) {
            if (corner & (1 << i)) {
              if (!odd[i]) { valid = false; break; }
              c[i] = base[i] + 1;
            }
          }
          if (!valid) continue;
          bool in = true;
          for (int i = 0; i < fine.dim; ++i)
            if (c[i] >= cnd[i]) in = false;
          if (!in) continue;
          acc += v[coarse.node_index(c[0], c[1], c[2])];
          ++cnt;
        }
        out[idx] = cnt > 0 ? acc / double(cnt) : 0.0;
      }
  return out;
}

}  // namespace captk
