// SPDX-License-Identifier: Apache-2.0
#include "captk/inradius.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>

namespace captk {
namespace {

double default_margin(double r, const InradiusOptions& opts) {
  return opts.window_margin > 0 ? opts.window_margin : std::max(1.5, r);
}

// --- capacity cache keyed by the canonical form of the window mask ----------
//
// Windows are anchored to the mask lattice, so translated queries produce
// identical bit patterns; axis flips leave the energy untouched, so the
// canonical form also folds reflections. Values are always the canonical
// orientation's solve, which keeps results independent of query order.

struct CacheKey {
  std::array<std::int64_t, 3> dims;
  int kind;
  std::uint64_t pbits;
  std::uint64_t tolbits;
  std::uint64_t maskhash;
  std::int64_t count;
  bool operator<(const CacheKey& o) const {
    return std::tie(dims, kind, pbits, tolbits, maskhash, count) <
           std::tie(o.dims, o.kind, o.pbits, o.tolbits, o.maskhash, o.count);
  }
};

std::uint64_t fnv1a(const std::vector<std::uint8_t>& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::vector<std::uint8_t> flip_bits(const Grid& g, const std::vector<std::uint8_t>& bits,
                                    int flip_axes) {
  std::vector<std::uint8_t> out(bits.size());
  const std::int64_t nx = g.dims[0], ny = g.dims[1], nz = g.dims[2];
  std::int64_t idx = 0;
  for (std::int64_t z = 0; z < nz; ++z)
    for (std::int64_t y = 0; y < ny; ++y)
      for (std::int64_t x = 0; x < nx; ++x, ++idx) {
        const std::int64_t fx = (flip_axes & 1) ? nx - 1 - x : x;
        const std::int64_t fy = (flip_axes & 2) ? ny - 1 - y : y;
        const std::int64_t fz = (flip_axes & 4) ? nz - 1 - z : z;
        out[fx + nx * (fy + ny * fz)] = bits[idx];
      }
  return out;
}

struct SweepContext {
  const CellMask* omega = nullptr;
  double p = 2;
  InradiusOptions opts;
  double solve_rel_tol = 0;  // when > 0, overrides the solver tolerance
  std::vector<std::int64_t> prefix;  // inclusive-exclusive box counts of true cells
  std::map<CacheKey, double> cache;
  bool solver_trouble = false;
  bool probe_capped = false;
  double omega_measure = 0;
  // distance transform of the complement, for the deep-ball fast path
  double edt_max = 0;                     // sup cell-center distance to a false cell, in h units
  std::array<std::int64_t, 3> edt_argmax{0, 0, 0};  // cell coordinates of the deepest cell

  void build_aux() {
    omega_measure = omega->measure();
    const Grid& g = omega->grid;
    std::vector<std::uint8_t> site(omega->bits.size());
    for (std::size_t i = 0; i < site.size(); ++i) site[i] = omega->bits[i] ? 0 : 1;
    auto d2 = cell_distance_sq(g, site);
    std::int64_t idx = 0;
    for (std::int64_t z = 0; z < g.dims[2]; ++z)
      for (std::int64_t y = 0; y < g.dims[1]; ++y)
        for (std::int64_t x = 0; x < g.dims[0]; ++x, ++idx)
          if (omega->bits[idx] && d2[idx] > edt_max * edt_max) {
            edt_max = std::sqrt(d2[idx]);
            edt_argmax = {x, y, z};
          }
  }

  void build_prefix() {
    const Grid& g = omega->grid;
    const std::int64_t nx = g.dims[0], ny = g.dims[1], nz = g.dims[2];
    prefix.assign(static_cast<std::size_t>((nx + 1) * (ny + 1) * (nz + 1)), 0);
    auto P = [&](std::int64_t x, std::int64_t y, std::int64_t z) -> std::int64_t& {
      return prefix[x + (nx + 1) * (y + (ny + 1) * z)];
    };
    for (std::int64_t z = 1; z <= nz; ++z)
      for (std::int64_t y = 1; y <= ny; ++y)
        for (std::int64_t x = 1; x <= nx; ++x) {
          P(x, y, z) = (omega->bits[g.cell_index(x - 1, y - 1, z - 1)] ? 1 : 0) + P(x - 1, y, z) +
                       P(x, y - 1, z) + P(x, y, z - 1) - P(x - 1, y - 1, z) - P(x - 1, y, z - 1) -
                       P(x, y - 1, z - 1) + P(x - 1, y - 1, z - 1);
        }
  }

  // true cells of omega in cell-index box [x0,x1] x [y0,y1] x [z0,z1], clipped
  std::int64_t box_count(std::int64_t x0, std::int64_t x1, std::int64_t y0, std::int64_t y1,
                         std::int64_t z0, std::int64_t z1) const {
    const Grid& g = omega->grid;
    x0 = std::max<std::int64_t>(x0, 0);
    y0 = std::max<std::int64_t>(y0, 0);
    z0 = std::max<std::int64_t>(z0, 0);
    x1 = std::min(x1, g.dims[0] - 1);
    y1 = std::min(y1, g.dims[1] - 1);
    z1 = std::min(z1, g.dims[2] - 1);
    if (x0 > x1 || y0 > y1 || z0 > z1) return 0;
    const std::int64_t nx = g.dims[0], ny = g.dims[1];
    auto P = [&](std::int64_t x, std::int64_t y, std::int64_t z) {
      return prefix[x + (nx + 1) * (y + (ny + 1) * z)];
    };
    return P(x1 + 1, y1 + 1, z1 + 1) - P(x0, y1 + 1, z1 + 1) - P(x1 + 1, y0, z1 + 1) -
           P(x1 + 1, y1 + 1, z0) + P(x0, y0, z1 + 1) + P(x0, y1 + 1, z0) + P(x1 + 1, y0, z0) -
           P(x0, y0, z0);
  }

  double solve_window(const CellMask& window) {
    CacheKey key;
    key.dims = window.grid.dims;
    key.kind = static_cast<int>(opts.capacity);
    std::memcpy(&key.pbits, &p, sizeof p);
    const double efftol = solve_rel_tol > 0 ? std::max(opts.solver.rel_tol, solve_rel_tol)
                                            : opts.solver.rel_tol;
    std::memcpy(&key.tolbits, &efftol, sizeof efftol);
    key.count = 0;
    for (auto b : window.bits) key.count += b != 0;
    // canonical orientation: lexicographically smallest bit string over the
    // energy-preserving symmetries (axis flips, plus the transpose on square
    // 2-D windows)
    const int nflips = 1 << window.grid.dim;
    std::vector<std::uint8_t> canon = window.bits;
    const bool square2 = window.grid.dim == 2 && window.grid.dims[0] == window.grid.dims[1];
    for (int f = 0; f < nflips; ++f) {
      auto alt = f == 0 ? window.bits : flip_bits(window.grid, window.bits, f);
      if (f != 0 && alt < canon) canon = alt;
      if (square2) {
        const std::int64_t n = window.grid.dims[0];
        std::vector<std::uint8_t> tr(alt.size());
        for (std::int64_t yy = 0; yy < n; ++yy)
          for (std::int64_t xx = 0; xx < n; ++xx) tr[yy + n * xx] = alt[xx + n * yy];
        if (tr < canon) canon = std::move(tr);
      }
    }
    key.maskhash = fnv1a(canon);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    CellMask canonical;
    canonical.grid = window.grid;
    canonical.grid.lo = {0, 0, 0};
    canonical.kind = MaskKind::CompactSet;
    canonical.bits = std::move(canon);
    CapacityEstimate est = compute_capacity(canonical, p, opts.capacity, opts.solver);
    if (!est.solver.converged) solver_trouble = true;
    cache.emplace(key, est.value);
    return est.value;
  }
};

// Cells of the closed ball around a lattice node, encoded as x-run per
// transverse row offset. q(a) = distance (in cells) from cell a to the node.
struct BallTemplate {
  // per row: offsets (ay, az) and inclusive x-offset range [-(span+1), span]
  struct Row {
    std::int64_t ay, az, span;
  };
  std::vector<Row> rows;
  std::int64_t cell_count = 0;

  static std::int64_t qdist(std::int64_t a) { return a >= 0 ? a : -a - 1; }

  static BallTemplate make(double r, double h, int dim) {
    BallTemplate t;
    const double rc = r / h;
    const std::int64_t m = static_cast<std::int64_t>(std::floor(rc));
    auto span_for = [&](double rem2) -> std::int64_t {
      if (rem2 < 0) return -1;
      return static_cast<std::int64_t>(std::floor(std::sqrt(rem2)));
    };
    if (dim == 1) {
      const std::int64_t s = span_for(rc * rc);
      if (s >= 0) t.rows.push_back({0, 0, s});
    } else if (dim == 2) {
      for (std::int64_t ay = -m - 1; ay <= m; ++ay) {
        const double qy = double(qdist(ay));
        const std::int64_t s = span_for(rc * rc - qy * qy);
        if (s >= 0) t.rows.push_back({ay, 0, s});
      }
    } else {
      for (std::int64_t az = -m - 1; az <= m; ++az) {
        const double qz = double(qdist(az));
        for (std::int64_t ay = -m - 1; ay <= m; ++ay) {
          const double qy = double(qdist(ay));
          const std::int64_t s = span_for(rc * rc - qy * qy - qz * qz);
          if (s >= 0) t.rows.push_back({ay, az, s});
        }
      }
    }
    for (const auto& row : t.rows) t.cell_count += 2 * row.span + 2;
    return t;
  }
};

struct Center {
  std::array<std::int64_t, 3> node{0, 0, 0};
  std::int64_t lex = 0;
  double mhat = 0;  // measure of the complement region, a capacity lower bound
};

Vec center_point(const Grid& g, const std::array<std::int64_t, 3>& node) {
  Vec v{0, 0, 0};
  for (int i = 0; i < g.dim; ++i) v[i] = g.lo[i] + double(node[i]) * g.h;
  return v;
}

// Center lattice over the mask bbox dilated by r, pitch snapped to whole
// cells; the measure bound per center costs one prefix query per row.
std::vector<Center> sweep_centers(SweepContext& ctx, double r) {
  const Grid& g = ctx.omega->grid;
  const double h = g.h;
  const std::int64_t stride =
      std::max<std::int64_t>(1, static_cast<std::int64_t>(std::llround(
                                    (ctx.opts.center_pitch > 0 ? ctx.opts.center_pitch : h) / h)));
  const auto bbox = ctx.omega->true_bbox();
  std::array<std::int64_t, 3> i0{0, 0, 0}, i1{0, 0, 0};
  if (bbox) {
    for (int i = 0; i < g.dim; ++i) {
      i0[i] = static_cast<std::int64_t>(std::ceil((bbox->lo[i] - r - g.lo[i]) / h - 1e-9));
      i1[i] = static_cast<std::int64_t>(std::floor((bbox->hi[i] + r - g.lo[i]) / h + 1e-9));
      i0[i] = (i0[i] >= 0 ? (i0[i] + stride - 1) / stride : i0[i] / stride) * stride;
    }
  } else {
    for (int i = 0; i < g.dim; ++i) i0[i] = i1[i] = g.dims[i] / 2;
  }

  const BallTemplate tmpl = BallTemplate::make(r, h, g.dim);
  double hn = 1;
  for (int i = 0; i < g.dim; ++i) hn *= h;

  std::vector<Center> out;
  std::int64_t lex = 0;
  std::array<std::int64_t, 3> node;
  for (std::int64_t iz = i0[2]; iz <= i1[2]; iz += stride)
    for (std::int64_t iy = i0[1]; iy <= i1[1]; iy += stride)
      for (std::int64_t ix = i0[0]; ix <= i1[0]; ix += stride, ++lex) {
        node = {ix, iy, iz};
        std::int64_t inside = 0;
        for (const auto& row : tmpl.rows) {
          const std::int64_t y = iy + row.ay, z = iz + row.az;
          inside += ctx.box_count(ix - row.span - 1, ix + row.span, y, y, z, z);
        }
        Center c;
        c.node = node;
        c.lex = lex;
        c.mhat = double(tmpl.cell_count - inside) * hn;
        out.push_back(c);
      }
  return out;
}

struct Admissibility {
  bool admissible = false;
  Vec witness{0, 0, 0};
};

// Measure of the complement region at one lattice node, via the row template.
double mhat_at(SweepContext& ctx, const BallTemplate& tmpl,
               const std::array<std::int64_t, 3>& node) {
  const Grid& g = ctx.omega->grid;
  double hn = 1;
  for (int i = 0; i < g.dim; ++i) hn *= g.h;
  std::int64_t inside = 0;
  for (const auto& row : tmpl.rows) {
    const std::int64_t y = node[1] + row.ay, z = node[2] + row.az;
    inside += ctx.box_count(node[0] - row.span - 1, node[0] + row.span, y, y, z, z);
  }
  return double(tmpl.cell_count - inside) * hn;
}

// Exists a center whose region capacity is below the threshold? strict
// selects "<" (epsilon thresholds) vs "<=" (gamma thresholds). The measure
// bound C >= m prunes candidates exactly; pruning cannot miss a witness.
Admissibility exists_center_below(SweepContext& ctx, double r, double threshold, bool strict) {
  const Grid& g = ctx.omega->grid;
  Admissibility res;

  // every region contains at least vol(ball) - m(omega); nothing to sweep
  {
    const BallTemplate probe = BallTemplate::make(r, g.h, g.dim);
    double hn = 1;
    for (int i = 0; i < g.dim; ++i) hn *= g.h;
    const double global_lb = double(probe.cell_count) * hn - ctx.omega_measure;
    if (global_lb >= threshold) return res;

    // deep-ball fast path: a ball around the deepest cell misses the complement
    const std::int64_t stride = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(
               std::llround((ctx.opts.center_pitch > 0 ? ctx.opts.center_pitch : g.h) / g.h)));
    if (ctx.edt_max * g.h >= r + (2.0 + double(stride)) * g.h * std::sqrt(double(g.dim))) {
      std::array<std::int64_t, 3> node{0, 0, 0};
      for (int i = 0; i < g.dim; ++i)
        node[i] = (ctx.edt_argmax[i] / stride) * stride;  // snap to the center lattice
      if (mhat_at(ctx, probe, node) == 0.0 && (!strict || threshold > 0)) {
        res.admissible = true;
        res.witness = center_point(g, node);
        return res;
      }
    }
  }

  auto centers = sweep_centers(ctx, r);
  // empty regions first, in lexicographic order
  for (const auto& c : centers)
    if (c.mhat == 0.0) {
      if (strict ? (0.0 < threshold) : true) {
        res.admissible = true;
        res.witness = center_point(g, c.node);
      }
      return res;
    }
  std::vector<const Center*> cand;
  for (const auto& c : centers)
    if (strict ? (c.mhat < threshold) : (c.mhat < threshold)) cand.push_back(&c);
  std::sort(cand.begin(), cand.end(), [](const Center* a, const Center* b) {
    return std::tie(a->mhat, a->lex) < std::tie(b->mhat, b->lex);
  });
  const double margin = default_margin(r, ctx.opts);
  // Two-phase candidate solves. A loose solve bounds the value from above,
  // so admitting off it is sound; only near-threshold cases resolve tightly.
  const double saved_tol = ctx.solve_rel_tol;
  struct Restore {
    SweepContext& c;
    double t;
    ~Restore() { c.solve_rel_tol = t; }
  } restore{ctx, saved_tol};
  long solves = 0;
  for (const Center* c : cand) {
    // refutation cap: witnesses sort first by the measure bound, so only
    // marginal refutations weaken; capped probes are flagged
    if (ctx.opts.max_probe_solves > 0 && solves >= ctx.opts.max_probe_solves) {
      ctx.probe_capped = true;
      break;
    }
    const Vec x = center_point(g, c->node);
    CellMask window = ball_complement_window(*ctx.omega, x, r, margin);
    ctx.solve_rel_tol = std::max(saved_tol, 1e-4);
    double value = ctx.solve_window(window);
    if (value > threshold && value <= 1.5 * threshold) {
      ctx.solve_rel_tol = std::max(saved_tol, 1e-7);
      value = ctx.solve_window(window);
    }
    ++solves;
    if (strict ? value < threshold : value <= threshold) {
      res.admissible = true;
      res.witness = x;
      return res;
    }
  }
  return res;
}

double search_range(const Grid& g) {
  double d2 = 0;
  for (int i = 0; i < g.dim; ++i) {
    const double e = double(g.dims[i]) * g.h;
    d2 += e * e;
  }
  return std::sqrt(d2);
}

// Certified upper bound on the full-ball capacity: the energy of the explicit
// cone field 1 - dist(x, ball)/margin on the query window. No solve involved.
double ball_capacity_upper(const SweepContext& ctx, double r) {
  const Grid& og = ctx.omega->grid;
  const double h = og.h;
  const double margin = default_margin(r, ctx.opts);
  const int dim = og.dim;
  Grid w;
  w.dim = dim;
  w.h = h;
  const std::int64_t side = static_cast<std::int64_t>(std::ceil((2 * r + 2 * margin) / h)) + 2;
  for (int i = 0; i < dim; ++i) {
    w.lo[i] = -0.5 * double(side) * h;
    w.dims[i] = side;
  }
  std::vector<double> u(static_cast<std::size_t>(w.node_count()));
  const auto nd = w.node_dims();
  std::int64_t idx = 0;
  for (std::int64_t z = 0; z < nd[2]; ++z)
    for (std::int64_t y = 0; y < nd[1]; ++y)
      for (std::int64_t x = 0; x < nd[0]; ++x, ++idx) {
        const std::array<std::int64_t, 3> c{x, y, z};
        double d2 = 0;
        for (int i = 0; i < dim; ++i) {
          const double xi = w.lo[i] + double(c[i]) * h;
          d2 += xi * xi;
        }
        const double d = std::max(0.0, std::sqrt(d2) - r);
        u[idx] = std::max(0.0, 1.0 - d / margin);
      }
  EnergyModel m;
  m.grid = &w;
  m.p = ctx.p;
  m.alpha = ctx.opts.capacity == CapacityKind::Sobolev ? std::pow(h, ctx.p) : 0.0;
  m.eps2 = 0;
  m.free_node.assign(u.size(), 1);
  const std::int64_t nc = w.cell_count();
  m.cells.reserve(static_cast<std::size_t>(nc));
  for (std::int64_t c = 0; c < nc; ++c) m.cells.push_back(c);
  return std::pow(h, double(dim) - ctx.p) * m.energy(u);
}

struct Bisect {
  double radius = 0;
  Vec witness{0, 0, 0};
  bool saturated = false;
};

Bisect bisect_radius(SweepContext& ctx, double threshold_or_gamma, bool gamma_mode, double tol) {
  const Grid& g = ctx.omega->grid;
  const double rmax = search_range(g);
  auto admissible = [&](double r) -> Admissibility {
    double threshold = threshold_or_gamma;
    if (gamma_mode) {
      // refute cheaply before paying for a full-ball capacity solve
      const BallTemplate probe = BallTemplate::make(r, g.h, g.dim);
      double hn = 1;
      for (int i = 0; i < g.dim; ++i) hn *= g.h;
      const double global_lb = double(probe.cell_count) * hn - ctx.omega_measure;
      if (global_lb >= threshold_or_gamma * ball_capacity_upper(ctx, r)) return {};
      threshold = threshold_or_gamma * ball_window_capacity(*ctx.omega, r, ctx.p, ctx.opts);
    }
    return exists_center_below(ctx, r, threshold, !gamma_mode);
  };
  Bisect out;
  auto top = admissible(rmax);
  if (top.admissible) {
    out.radius = rmax;
    out.witness = top.witness;
    out.saturated = true;
    return out;
  }
  double lo = 0, hi = rmax;
  Vec wit{0, 0, 0};
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    auto a = admissible(mid);
    if (a.admissible) {
      lo = mid;
      wit = a.witness;
    } else {
      hi = mid;
    }
  }
  out.radius = 0.5 * (lo + hi);
  out.witness = wit;
  return out;
}

}  // namespace

CapacityEstimate ball_complement_capacity(const CellMask& omega, const Vec& center, double r,
                                          double p, const InradiusOptions& opts) {
  validate_p(p);
  if (!(r > 0)) throw std::invalid_argument("ball_complement_capacity: radius must be positive");
  CellMask window = ball_complement_window(omega, center, r, default_margin(r, opts));
  return compute_capacity(window, p, opts.capacity, opts.solver);
}

double ball_window_capacity(const CellMask& omega, double r, double p,
                            const InradiusOptions& opts) {
  // full ball: complement region of the empty open set
  CellMask empty;
  empty.grid = omega.grid;
  empty.kind = MaskKind::OpenSet;
  empty.bits.assign(omega.bits.size(), 0);
  std::array<std::int64_t, 3> mid{0, 0, 0};
  for (int i = 0; i < omega.grid.dim; ++i) mid[i] = omega.grid.dims[i] / 2;
  Vec c{0, 0, 0};
  for (int i = 0; i < omega.grid.dim; ++i) c[i] = omega.grid.lo[i] + double(mid[i]) * omega.grid.h;
  CellMask window = ball_complement_window(empty, c, r, default_margin(r, opts));
  return compute_capacity(window, p, opts.capacity, opts.solver).value;
}

double single_cell_capacity(const CellMask& omega, double p, const InradiusOptions& opts) {
  const Grid& g = omega.grid;
  Grid w;
  w.dim = g.dim;
  w.h = g.h;
  const std::int64_t mc =
      std::max<std::int64_t>(2, static_cast<std::int64_t>(std::ceil(1.0 / g.h - 1e-12)));
  for (int i = 0; i < g.dim; ++i) {
    w.lo[i] = 0;
    w.dims[i] = 2 * mc + 1;
  }
  CellMask cellmask;
  cellmask.grid = w;
  cellmask.kind = MaskKind::CompactSet;
  cellmask.bits.assign(static_cast<std::size_t>(w.cell_count()), 0);
  cellmask.bits[w.cell_index(mc, g.dim >= 2 ? mc : 0, g.dim >= 3 ? mc : 0)] = 1;
  InradiusOptions o = opts;
  return compute_capacity(cellmask, p, o.capacity, o.solver).value;
}

DeltaResult delta_R(const CellMask& omega, double R, double p, const InradiusOptions& opts) {
  validate_p(p);
  if (!(R > 0)) throw std::invalid_argument("delta_R: R must be positive");
  if (omega.kind != MaskKind::OpenSet)
    throw std::invalid_argument("delta_R: open-set mask expected");
  SweepContext ctx;
  ctx.omega = &omega;
  ctx.p = p;
  ctx.opts = opts;
  ctx.build_prefix();
  ctx.build_aux();

  auto centers = sweep_centers(ctx, R);
  if (centers.empty()) throw std::invalid_argument("delta_R: empty center lattice");
  DeltaResult res;
  for (const auto& c : centers)
    if (c.mhat == 0.0) {
      res.value = 0;
      res.witness = center_point(omega.grid, c.node);
      return res;
    }
  std::vector<const Center*> order;
  order.reserve(centers.size());
  for (const auto& c : centers) order.push_back(&c);
  std::sort(order.begin(), order.end(), [](const Center* a, const Center* b) {
    return std::tie(a->mhat, a->lex) < std::tie(b->mhat, b->lex);
  });

  const double margin = default_margin(R, opts);
  double best = std::numeric_limits<double>::infinity();
  std::int64_t best_lex = -1;
  Vec best_wit{0, 0, 0};
  for (const Center* c : order) {
    if (c->mhat >= best) break;  // minimum found: capacity exceeds the measure bound
    const Vec x = center_point(omega.grid, c->node);
    CellMask window = ball_complement_window(omega, x, R, margin);
    const double value = ctx.solve_window(window);
    if (value < best || (value == best && c->lex < best_lex)) {
      best = value;
      best_lex = c->lex;
      best_wit = x;
    }
  }
  res.value = best;
  res.witness = best_wit;
  res.solver_trouble = ctx.solver_trouble;
  return res;
}

double mazya_shubin_radius(const CellMask& omega, double gamma, double p,
                           const InradiusOptions& opts) {
  validate_p(p);
  if (!(gamma > 0) || !(gamma < 1))
    throw std::invalid_argument("mazya_shubin_radius: gamma must lie in (0,1)");
  SweepContext ctx;
  ctx.omega = &omega;
  ctx.p = p;
  ctx.opts = opts;
  if (omega.count_true() == 0) return 0;
  ctx.build_prefix();
  ctx.build_aux();
  const double tol = opts.bisect_tol > 0 ? opts.bisect_tol : 0.5 * omega.grid.h;
  return bisect_radius(ctx, gamma, true, tol).radius;
}

InradiusReport strict_inradius(const CellMask& omega, double p, const InradiusOptions& opts) {
  validate_p(p);
  if (omega.kind != MaskKind::OpenSet)
    throw std::invalid_argument("strict_inradius: open-set mask expected");
  InradiusReport rep;
  rep.p = p;
  rep.kind = opts.capacity;
  rep.h = omega.grid.h;
  rep.center_pitch = opts.center_pitch > 0 ? opts.center_pitch : omega.grid.h;
  rep.bisect_tol = opts.bisect_tol > 0 ? opts.bisect_tol : 0.25 * omega.grid.h;

  if (omega.count_true() == 0) return rep;

  SweepContext ctx;
  ctx.omega = &omega;
  ctx.p = p;
  ctx.opts = opts;
  ctx.build_prefix();
  ctx.build_aux();

  rep.geometric = geometric_inradius(omega);
  rep.cell_floor = single_cell_capacity(omega, p, opts);

  std::vector<double> eps = opts.epsilons;
  if (eps.empty())
    for (double f : {1e-1, 1e-2, 1e-3, 1e-4}) eps.push_back(f * rep.cell_floor);
  std::sort(eps.rbegin(), eps.rend());
  for (double e : eps) {
    if (!(e > 0)) throw std::invalid_argument("strict_inradius: epsilons must be positive");
    Bisect b = bisect_radius(ctx, e, false, rep.bisect_tol);
    rep.epsilon_curve.push_back({e, b.radius, b.witness, b.saturated});
  }
  rep.rho_hat = rep.epsilon_curve.back().radius;

  if (opts.with_gamma_curve) {
    std::vector<double> gammas = opts.gamma_grid;
    if (gammas.empty()) gammas = {0.5, 0.25, 0.1, 0.05};
    std::sort(gammas.rbegin(), gammas.rend());
    const double gtol = opts.bisect_tol > 0 ? opts.bisect_tol : 0.5 * omega.grid.h;
    for (double gm : gammas) {
      Bisect b = bisect_radius(ctx, gm, true, gtol);
      rep.gamma_curve.push_back({gm, b.radius});
    }
  }

  for (double R : opts.R_list) {
    DeltaResult d = delta_R(omega, R, p, opts);
    DeltaPoint pt;
    pt.R = R;
    pt.delta = d.value;
    pt.witness = d.witness;
    const double cball = ball_window_capacity(omega, R, p, opts);
    pt.gamma = cball > 0 ? std::min(1.0, d.value / cball) : 0.0;
    rep.delta_curve.push_back(pt);
    rep.solver_trouble = rep.solver_trouble || d.solver_trouble;
  }
  rep.solver_trouble = rep.solver_trouble || ctx.solver_trouble;
  rep.gamma_capped = ctx.probe_capped;  // covers both threshold modes
  return rep;
}

}  // namespace captk
