// SPDX-License-Identifier: Apache-2.0
#include "captk/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "captk/randfields.hpp"

namespace captk {
namespace {

std::vector<std::int64_t> omega_cells(const CellMask& omega) {
  std::vector<std::int64_t> cells;
  cells.reserve(static_cast<std::size_t>(omega.count_true()));
  const std::int64_t n = omega.grid.cell_count();
  for (std::int64_t c = 0; c < n; ++c)
    if (omega.bits[c]) cells.push_back(c);
  return cells;
}

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

// Scatter of the midpoint pairing <rhs, .>: lin[node] += avg_cell(rhs)/2^n
// over the given cells, scaled by `factor`.
std::vector<double> pairing_linear_term(const Grid& g, const std::vector<std::int64_t>& cells,
                                        const std::vector<double>& rhs, double factor) {
  const int ncorner = 1 << g.dim;
  const double inv_corners = 1.0 / double(ncorner);
  std::vector<double> lin(static_cast<std::size_t>(g.node_count()), 0.0);
  std::int64_t nodes[8];
  for (const std::int64_t c : cells) {
    corner_nodes(g, c, nodes);
    double a = 0;
    for (int k = 0; k < ncorner; ++k) a += rhs[nodes[k]];
    const double w = factor * a * inv_corners * inv_corners;
    for (int k = 0; k < ncorner; ++k) lin[nodes[k]] += w;
  }
  return lin;
}

// Derivative of the p-mass functional sum |avg u|^p at u, as a linear term:
// lin[node] += |avg u|^{p-2} avg(u) / 2^n. The nonlinearity acts on the cell
// average, matching the quadrature of the Rayleigh-quotient denominator, so
// the inverse-iteration fixed point and the quotient agree exactly.
std::vector<double> mass_derivative_linear_term(const Grid& g,
                                                const std::vector<std::int64_t>& cells,
                                                const std::vector<double>& u, double p,
                                                double factor) {
  const int ncorner = 1 << g.dim;
  const double inv_corners = 1.0 / double(ncorner);
  std::vector<double> lin(static_cast<std::size_t>(g.node_count()), 0.0);
  std::int64_t nodes[8];
  for (const std::int64_t c : cells) {
    corner_nodes(g, c, nodes);
    double a = 0;
    for (int k = 0; k < ncorner; ++k) a += u[nodes[k]];
    a *= inv_corners;
    if (a == 0.0) continue;
    const double q = std::pow(std::abs(a), p - 1.0) * (a < 0 ? -1.0 : 1.0);
    const double w = factor * q * inv_corners;
    for (int k = 0; k < ncorner; ++k) lin[nodes[k]] += w;
  }
  return lin;
}

// Unit-spacing L^p norm over cells (corner averages).
double norm_dl(const Grid& g, const std::vector<std::int64_t>& cells, const std::vector<double>& u,
               double p) {
  const int ncorner = 1 << g.dim;
  const double inv_corners = 1.0 / double(ncorner);
  std::int64_t nodes[8];
  double acc = 0;
  for (const std::int64_t c : cells) {
    corner_nodes(g, c, nodes);
    double a = 0;
    for (int k = 0; k < ncorner; ++k) a += u[nodes[k]];
    acc += std::pow(std::abs(a * inv_corners), p);
  }
  return std::pow(acc, 1.0 / p);
}

double grad_norm_dl_pow(const Grid& g, const std::vector<std::int64_t>& cells,
                        const std::vector<double>& u, double p) {
  const int dim = g.dim;
  const int ncorner = 1 << dim;
  const double inv_pairs = 1.0 / double(ncorner / 2);
  std::int64_t nodes[8];
  double v[8];
  double acc = 0;
  for (const std::int64_t c : cells) {
    corner_nodes(g, c, nodes);
    for (int k = 0; k < ncorner; ++k) v[k] = u[nodes[k]];
    double s = 0;
    for (int axis = 0; axis < dim; ++axis) {
      const int stride = 1 << axis;
      double d = 0;
      for (int k = 0; k < ncorner; ++k)
        if (!(k & stride)) d += v[k + stride] - v[k];
      d *= inv_pairs;
      s += d * d;
    }
    acc += std::pow(s, 0.5 * p);
  }
  return acc;
}

}  // namespace

ScalarField p_dirichlet_solve(const CellMask& omega, double p, const ScalarField& boundary,
                              const ScalarField& rhs, const SolverOptions& opts,
                              SolverStats* stats) {
  validate_p(p);
  if (omega.kind != MaskKind::OpenSet)
    throw std::invalid_argument("p_dirichlet_solve: open-set mask expected");
  const Grid& g = omega.grid;
  if (!boundary.grid.same_layout(g) || !rhs.grid.same_layout(g))
    throw std::invalid_argument("p_dirichlet_solve: field grid mismatch");
  if (omega.count_true() == 0) throw std::invalid_argument("p_dirichlet_solve: empty omega");
  for (double v : boundary.values)
    if (!std::isfinite(v)) throw std::invalid_argument("p_dirichlet_solve: boundary not finite");

  const auto active = interior_nodes(omega);
  const auto cells = omega_cells(omega);

  EnergyModel model;
  model.grid = &g;
  model.p = p;
  model.alpha = 0;
  const double eps = p < 2.0 ? 1e-8 / g.h : 0.0;
  model.eps2 = p < 2.0 ? (eps * g.h) * (eps * g.h) : 0.0;
  model.cells = cells;
  model.free_node = active;
  // objective scaled by p * h^{p-n}: minimize sum |grad u|^p - p h^p <rhs, u>
  model.lin = pairing_linear_term(g, cells, rhs.values, p * std::pow(g.h, p));

  bool zero_boundary = true;
  for (std::size_t i = 0; i < boundary.values.size(); ++i)
    if (!active[i] && boundary.values[i] != 0.0) { zero_boundary = false; break; }
  bool nonneg_rhs = true;
  for (double v : rhs.values)
    if (v < 0.0) { nonneg_rhs = false; break; }
  if (zero_boundary && nonneg_rhs) model.clamp_lo = 0.0;

  ScalarField u = boundary;
  SolverStats st = accelerated_minimize(model, u.values, opts);
  if (stats) *stats = st;
  return u;
}

namespace {

// Eigen iteration at unit spacing. Returns lambda_dl; `u` enters as the start
// field (or empty for the distance start) and leaves normalized.
double rayleigh_iterate(const CellMask& omega, double p, const EigenOptions& opts,
                        std::vector<double>& u, EigenEstimate& est) {
  const Grid& g = omega.grid;
  const auto active = interior_nodes(omega);
  std::int64_t n_active = 0;
  for (auto a : active) n_active += a;
  if (n_active == 0) throw std::invalid_argument("principal_rayleigh: no interior nodes");
  const auto cells = omega_cells(omega);

  if (u.empty()) {
    // distance-to-complement start: positive, supported on the interior nodes
    std::vector<std::uint8_t> inactive(active.size());
    for (std::size_t i = 0; i < active.size(); ++i) inactive[i] = active[i] ? 0 : 1;
    auto d2 = node_distance_sq(g, inactive);
    u.resize(active.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::sqrt(d2[i]);
  }
  for (std::size_t i = 0; i < u.size(); ++i)
    if (!active[i]) u[i] = 0.0;
  double nrm = norm_dl(g, cells, u, p);
  if (!(nrm > 0)) throw std::runtime_error("principal_rayleigh: zero start field");
  for (auto& v : u) v /= nrm;

  double lambda = grad_norm_dl_pow(g, cells, u, p);  // ||u||_dl = 1
  est.lambda_history.push_back(lambda);

  EnergyModel model;
  model.grid = &g;
  model.p = p;
  model.alpha = 0;
  const double eps = p < 2.0 ? 1e-8 / g.h : 0.0;
  model.eps2 = p < 2.0 ? (eps * g.h) * (eps * g.h) : 0.0;
  model.cells = cells;
  model.free_node = active;
  model.clamp_lo = 0.0;

  bool converged = false;
  int outer = 0;
  double rel_prev = 1e-2;
  for (; outer < opts.max_outer; ++outer) {
    // minimize (1/p) sum |grad v|^p - lambda <d mass(u), v>, scaled by p
    model.lin = mass_derivative_linear_term(g, cells, u, p, p * lambda);
    SolverOptions lopts = opts.inner;
    // warm-started inner solves tighten as the outer iteration converges
    lopts.rel_tol = std::clamp(0.01 * rel_prev, opts.inner.rel_tol, 1e-5);
    accelerated_minimize(model, u, lopts);

    nrm = norm_dl(g, cells, u, p);
    if (!(nrm > 0)) throw std::runtime_error("principal_rayleigh: iterate collapsed to zero");
    for (auto& v : u) v /= nrm;
    const double lnew = grad_norm_dl_pow(g, cells, u, p);
    est.lambda_history.push_back(lnew);
    const double rel = std::abs(lnew - lambda) / std::max(lnew, 1e-300);
    lambda = lnew;
    rel_prev = rel;
    if (rel < opts.outer_tol) {
      converged = true;
      ++outer;
      break;
    }
  }
  // fixed-point polish at full tolerance with a stationarity target; the
  // decrement rule alone under-resolves the weak form near flat minima
  SolverOptions popt = opts.inner;
  popt.grad_tol = 1e-9 * p * std::max(lambda, 1.0);
  std::vector<double> uprev(u.size());
  for (int round = 0; round < 40; ++round) {
    uprev = u;
    model.lin = mass_derivative_linear_term(g, cells, u, p, p * lambda);
    accelerated_minimize(model, u, popt);
    nrm = norm_dl(g, cells, u, p);
    for (auto& v : u) v /= nrm;
    const double lnew = grad_norm_dl_pow(g, cells, u, p);
    est.lambda_history.push_back(lnew);
    lambda = lnew;
    double step = 0;
    for (std::size_t i = 0; i < u.size(); ++i) step = std::max(step, std::abs(u[i] - uprev[i]));
    if (step < 1e-9) break;
  }
  est.iterations = outer;
  est.converged = converged;
  return lambda;
}

}  // namespace

EigenEstimate principal_rayleigh(const CellMask& omega, double p, const EigenOptions& opts) {
  validate_p(p);
  if (omega.kind != MaskKind::OpenSet)
    throw std::invalid_argument("principal_rayleigh: open-set mask expected");
  const Grid& g = omega.grid;
  EigenEstimate est;
  est.p = p;
  est.h = g.h;
  est.connected = mask_connected(omega);

  // coarse-to-fine: solve on dyadically coarsened masks first, prolong the field
  std::vector<CellMask> levels{omega};
  for (int l = 1; l < opts.inner.cascade_levels && can_coarsen(levels.back().grid); ++l) {
    const CellMask& fine = levels.back();
    CellMask c;
    c.grid = coarsen_grid(fine.grid);
    c.kind = MaskKind::OpenSet;
    c.bits = coarsen_cells_inner(fine.grid, fine.bits);
    bool any = false;
    for (auto b : c.bits) any = any || b;
    std::int64_t nact = 0;
    if (any)
      for (auto a : interior_nodes(c)) nact += a;
    if (!any || nact == 0) break;
    levels.push_back(std::move(c));
  }

  std::vector<double> u;
  double lambda = 0;
  for (std::size_t li = levels.size(); li-- > 0;) {
    if (li + 1 < levels.size()) u = prolong_nodal(levels[li + 1].grid, levels[li].grid, u);
    EigenOptions lopts = opts;
    if (li != 0) {
      lopts.outer_tol = std::max(opts.outer_tol, 1e-4);
      lopts.inner.rel_tol = std::max(opts.inner.rel_tol, 1e-8);
      EigenEstimate scratch;
      rayleigh_iterate(levels[li], p, lopts, u, scratch);
    } else {
      lambda = rayleigh_iterate(levels[li], p, lopts, u, est);
    }
  }

  // physical normalization: ||field||_p = 1 with the h^n quadrature weight
  const double phys_scale = std::pow(g.h, double(g.dim) / p);
  est.field = ScalarField::zeros(g);
  for (std::size_t i = 0; i < u.size(); ++i) est.field.values[i] = std::max(0.0, u[i]) / phys_scale;
  est.lambda = lambda * std::pow(g.h, -p);
  est.residual =
      eigen_residual(omega, p, est.field, est.lambda, opts.residual_probes, opts.residual_seed);
  return est;
}

double eigen_residual(const CellMask& omega, double p, const ScalarField& u, double lambda,
                      int probes, std::uint64_t seed) {
  const Grid& g = omega.grid;
  const auto active = interior_nodes(omega);
  const auto cells = omega_cells(omega);
  const int dim = g.dim;
  const int ncorner = 1 << dim;
  const double inv_pairs = 1.0 / double(ncorner / 2);
  const double inv_corners = 1.0 / double(ncorner);
  double hn = 1;
  for (int i = 0; i < dim; ++i) hn *= g.h;

  const auto bbox = omega.true_bbox();
  if (!bbox) return 0;
  CounterRng rng(seed, 0x7e57f1e1d5ull);

  // Hoelder-type normalization of the weak form
  const double gnorm = lp_norm(gradient(u), p, omega);
  const double unorm = lp_norm(u, p, omega);

  double worst = 0;
  std::int64_t nodes[8];
  double v[8], w[8];
  for (int t = 0; t < probes; ++t) {
    BumpField bumps = random_bumps(dim, *bbox, 4 * g.h,
                                   std::max(4 * g.h, 0.25 * (bbox->hi[0] - bbox->lo[0])), rng, t);
    ScalarField chi = bumps.sample(g);
    zero_outside(chi, active);
    double lhs = 0, rhs = 0;
    for (const std::int64_t c : cells) {
      corner_nodes(g, c, nodes);
      for (int k = 0; k < ncorner; ++k) {
        v[k] = u.values[nodes[k]];
        w[k] = chi.values[nodes[k]];
      }
      double s = 0, gu[3], gx[3];
      for (int axis = 0; axis < dim; ++axis) {
        const int stride = 1 << axis;
        double du = 0, dx = 0;
        for (int k = 0; k < ncorner; ++k)
          if (!(k & stride)) {
            du += v[k + stride] - v[k];
            dx += w[k + stride] - w[k];
          }
        gu[axis] = du * inv_pairs / g.h;
        gx[axis] = dx * inv_pairs / g.h;
        s += gu[axis] * gu[axis];
      }
      if (s > 0) {
        const double wgt = std::pow(s, 0.5 * p - 1.0);
        double dot = 0;
        for (int axis = 0; axis < dim; ++axis) dot += gu[axis] * gx[axis];
        lhs += wgt * dot;
      }
      double au = 0, ax = 0;
      for (int k = 0; k < ncorner; ++k) {
        au += v[k];
        ax += w[k];
      }
      au *= inv_corners;
      ax *= inv_corners;
      // nonlinearity at the cell average, the derivative of the p-mass term
      if (au != 0.0) rhs += std::pow(std::abs(au), p - 1.0) * (au < 0 ? -1 : 1) * ax;
    }
    lhs *= hn;
    rhs *= hn * lambda;
    const double gchi = lp_norm(gradient(chi), p, omega);
    const double uchi = lp_norm(chi, p, omega);
    const double scale = std::pow(gnorm, p - 1.0) * gchi + lambda * std::pow(unorm, p - 1.0) * uchi;
    if (scale <= 0) continue;
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

ExtensionNormEstimate extension_norm_estimate(double R, double p, int dim, int cells_per_R,
                                              int trials, std::uint64_t seed) {
  validate_p(p);
  if (trials < 1) throw std::invalid_argument("extension_norm_estimate: trials must be >= 1");
  if (cells_per_R < 4) throw std::invalid_argument("extension_norm_estimate: resolution too coarse");
  const double h = R / cells_per_R;
  const std::int64_t q = cells_per_R;

  Grid cube;
  cube.dim = dim;
  cube.h = h;
  for (int i = 0; i < dim; ++i) { cube.lo[i] = 0; cube.dims[i] = q; }
  Grid big;
  big.dim = dim;
  big.h = h;
  for (int i = 0; i < dim; ++i) { big.lo[i] = -R; big.dims[i] = 3 * q; }

  CellMask cube_all{cube, MaskKind::OpenSet,
                    std::vector<std::uint8_t>(static_cast<std::size_t>(cube.cell_count()), 1), false};
  CellMask big_all{big, MaskKind::OpenSet,
                   std::vector<std::uint8_t>(static_cast<std::size_t>(big.cell_count()), 1), false};

  // even reflection of node index into [0, q]
  auto fold = [q](std::int64_t k) {
    std::int64_t m = ((k % (2 * q)) + 2 * q) % (2 * q);
    return std::min(m, 2 * q - m);
  };
  auto smoothstep5 = [](double t) {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
  };

  auto w1p = [p](const ScalarField& f, const CellMask& region) {
    const double a = lp_norm(f, p, region);
    const double b = lp_norm(gradient(f), p, region);
    return std::pow(std::pow(a, p) + std::pow(b, p), 1.0 / p);
  };

  auto ratio_of = [&](const BumpField& bumps) {
    ScalarField f = bumps.sample(cube);
    const double den = w1p(f, cube_all);
    if (!(den > 0)) return 0.0;
    ScalarField ef = ScalarField::zeros(big);
    const auto bnd = big.node_dims();
    std::int64_t idx = 0;
    for (std::int64_t z = 0; z < bnd[2]; ++z)
      for (std::int64_t y = 0; y < bnd[1]; ++y)
        for (std::int64_t x = 0; x < bnd[0]; ++x, ++idx) {
          const std::array<std::int64_t, 3> node{x, y, z};
          std::array<std::int64_t, 3> src{0, 0, 0};
          double cut = 1.0;
          for (int i = 0; i < dim; ++i) {
            const std::int64_t k = node[i] - q;  // big node -> lattice index rel. cube
            src[i] = fold(k);
            const double coord = -R + double(node[i]) * h;
            const double d = std::max({0.0, -coord, coord - R});
            cut = std::min(cut, smoothstep5(1.0 - d / R));
          }
          ef.values[idx] = f.values[cube.node_index(src[0], src[1], src[2])] * cut;
        }
    return w1p(ef, big_all) / den;
  };

  CounterRng rng(seed, 0xe87e0d);
  Aabb cube_box;
  for (int i = 0; i < dim; ++i) { cube_box.lo[i] = 0; cube_box.hi[i] = R; }
  const double slo = std::max(4 * h, R / 16), shi = std::max(4 * h, R / 4);

  ExtensionNormEstimate est;
  est.R = R;
  est.p = p;
  est.dim = dim;
  est.trials = trials;
  est.h = h;
  est.norm = 1.0;  // the restriction to the cube is the identity

  for (int t = 0; t < trials; ++t) {
    BumpField bumps = random_bumps(dim, cube_box, slo, shi, rng, 1000 + t);
    double best = ratio_of(bumps);
    // local ascent on the bump parameters
    BumpField cur = bumps;
    CounterRng ascent(seed ^ 0xa5a5a5a5ull, t);
    const int pdim = cur.count * (dim + 2);
    for (int stepi = 0; stepi < 3 * pdim; ++stepi) {
      BumpField trial = cur;
      const int k = stepi % pdim;
      const int bump = k / (dim + 2), comp = k % (dim + 2);
      const double delta = ascent.uniform(stepi, -1.0, 1.0);
      if (comp < dim)
        trial.center[bump * dim + comp] += delta * 0.05 * R;
      else if (comp == dim)
        trial.sigma[bump] = std::clamp(trial.sigma[bump] * (1.0 + 0.25 * delta), slo, shi);
      else
        trial.amp[bump] += 0.3 * delta;
      const double r = ratio_of(trial);
      if (r > best) {
        best = r;
        cur = trial;
      }
    }
    if (best > est.norm) {
      est.norm = best;
      est.fingerprint = bump_fingerprint(cur);
    }
  }
  return est;
}

}  // namespace captk
