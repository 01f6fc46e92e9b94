// SPDX-License-Identifier: Apache-2.0
#include "captk/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

namespace captk {
namespace {

using nlohmann::json;

constexpr int kMaxDepth = 32;
constexpr long kMaxLatticeCopies = 10000;

Vec read_vec(const json& j, int dim, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    throw ParseError(std::string(what) + ": expected an array of length " + std::to_string(dim));
  Vec v{0, 0, 0};
  for (int i = 0; i < dim; ++i) {
    if (!j[i].is_number()) throw ParseError(std::string(what) + ": non-numeric component");
    v[i] = j[i].get<double>();
  }
  return v;
}

ShapeExpr parse_shape(const json& j, int dim, int depth);

ShapeExpr parse_lattice(const json& j, int dim, int depth) {
  if (!j.contains("of") || !j.contains("pitch") || !j.contains("counts"))
    throw ParseError("lattice: requires of/pitch/counts");
  ShapeExpr base = parse_shape(j.at("of"), dim, depth + 1);
  Vec pitch = read_vec(j.at("pitch"), dim, "lattice.pitch");
  const json& cj = j.at("counts");
  if (!cj.is_array() || static_cast<int>(cj.size()) != dim)
    throw ParseError("lattice.counts: expected an array of length " + std::to_string(dim));
  std::array<long, 3> counts{1, 1, 1};
  long total = 1;
  for (int i = 0; i < dim; ++i) {
    counts[i] = cj[i].get<long>();
    if (counts[i] < 1) throw ParseError("lattice.counts: entries must be >= 1");
    total *= counts[i];
  }
  if (total > kMaxLatticeCopies)
    throw ParseError("lattice: " + std::to_string(total) + " copies exceeds the cap of 10000");
  ShapeExpr u;
  u.kind = ShapeKind::Union;
  for (long z = 0; z < counts[2]; ++z)
    for (long y = 0; y < counts[1]; ++y)
      for (long x = 0; x < counts[0]; ++x) {
        ShapeExpr t;
        t.kind = ShapeKind::Translate;
        t.a = {pitch[0] * double(x), pitch[1] * double(y), pitch[2] * double(z)};
        t.children.push_back(base);
        u.children.push_back(std::move(t));
      }
  if (u.children.size() == 1) return u.children[0];
  return u;
}

ShapeExpr parse_shape(const json& j, int dim, int depth) {
  if (depth > kMaxDepth) throw ParseError("shape tree deeper than 32 levels");
  if (!j.is_object() || j.size() != 1)
    throw ParseError("shape: expected an object with exactly one key");
  const std::string key = j.begin().key();
  const json& v = j.begin().value();
  ShapeExpr e;
  if (key == "ball") {
    e.kind = ShapeKind::Ball;
    e.a = read_vec(v.at("center"), dim, "ball.center");
    e.s = v.at("r").get<double>();
    if (!(e.s > 0)) throw ParseError("ball: radius must be positive");
  } else if (key == "box") {
    e.kind = ShapeKind::Box;
    e.a = read_vec(v.at("lo"), dim, "box.lo");
    e.b = read_vec(v.at("hi"), dim, "box.hi");
    for (int i = 0; i < dim; ++i)
      if (!(e.a[i] < e.b[i])) throw ParseError("box: lo must be componentwise below hi");
  } else if (key == "point") {
    e.kind = ShapeKind::Point;
    e.a = read_vec(v, dim, "point");
  } else if (key == "union" || key == "intersect") {
    e.kind = key == "union" ? ShapeKind::Union : ShapeKind::Intersect;
    if (!v.is_array() || v.empty()) throw ParseError(key + ": expected a non-empty array");
    for (const auto& c : v) e.children.push_back(parse_shape(c, dim, depth + 1));
  } else if (key == "complement") {
    e.kind = ShapeKind::Complement;
    e.children.push_back(parse_shape(v, dim, depth + 1));
  } else if (key == "translate") {
    e.kind = ShapeKind::Translate;
    e.a = read_vec(v.at("by"), dim, "translate.by");
    e.children.push_back(parse_shape(v.at("of"), dim, depth + 1));
  } else if (key == "scale") {
    e.kind = ShapeKind::Scale;
    e.s = v.at("by").get<double>();
    if (!(e.s > 0)) throw ParseError("scale: factor must be positive");
    e.children.push_back(parse_shape(v.at("of"), dim, depth + 1));
  } else if (key == "lattice") {
    return parse_lattice(v, dim, depth);
  } else {
    throw ParseError("unknown shape '" + key + "'");
  }
  return e;
}

// --- hull ------------------------------------------------------------------

std::optional<Aabb> hull_of(const ShapeExpr& e, int dim) {
  switch (e.kind) {
    case ShapeKind::Ball: {
      Aabb b;
      for (int i = 0; i < dim; ++i) { b.lo[i] = e.a[i] - e.s; b.hi[i] = e.a[i] + e.s; }
      return b;
    }
    case ShapeKind::Box:
      return Aabb{e.a, e.b};
    case ShapeKind::Point:
      return Aabb{e.a, e.a};
    case ShapeKind::Union: {
      Aabb b;
      bool first = true;
      for (const auto& c : e.children) {
        auto hb = hull_of(c, dim);
        if (!hb) return std::nullopt;
        if (first) { b = *hb; first = false; continue; }
        for (int i = 0; i < dim; ++i) {
          b.lo[i] = std::min(b.lo[i], hb->lo[i]);
          b.hi[i] = std::max(b.hi[i], hb->hi[i]);
        }
      }
      return b;
    }
    case ShapeKind::Intersect: {
      // the intersection is contained in any bounded factor
      std::optional<Aabb> best;
      for (const auto& c : e.children) {
        auto hb = hull_of(c, dim);
        if (!hb) continue;
        if (!best) { best = hb; continue; }
        for (int i = 0; i < dim; ++i) {
          best->lo[i] = std::max(best->lo[i], hb->lo[i]);
          best->hi[i] = std::min(best->hi[i], hb->hi[i]);
        }
      }
      return best;
    }
    case ShapeKind::Complement:
      return std::nullopt;
    case ShapeKind::Translate: {
      auto hb = hull_of(e.children[0], dim);
      if (!hb) return std::nullopt;
      for (int i = 0; i < dim; ++i) { hb->lo[i] += e.a[i]; hb->hi[i] += e.a[i]; }
      return hb;
    }
    case ShapeKind::Scale: {
      auto hb = hull_of(e.children[0], dim);
      if (!hb) return std::nullopt;
      for (int i = 0; i < dim; ++i) { hb->lo[i] *= e.s; hb->hi[i] *= e.s; }
      return hb;
    }
  }
  return std::nullopt;
}

// --- rasterization predicates ------------------------------------------------
//
// For a closed cell C we track the pair
//   inner(C, S): C lies in the closure of S,
//   outer(C, S): C meets the closure of S,
// exact on leaves and folded conservatively over the tree (inner never
// over-reports, outer never under-reports), which keeps mask inclusion
// faithful to shape inclusion.

struct CellBox {
  Vec lo, hi;
};

struct InOut {
  bool inner;
  bool outer;
};

InOut classify(const ShapeExpr& e, const CellBox& cell, int dim) {
  switch (e.kind) {
    case ShapeKind::Ball: {
      double dmin2 = 0, dmax2 = 0;
      for (int i = 0; i < dim; ++i) {
        const double lo = cell.lo[i] - e.a[i], hi = cell.hi[i] - e.a[i];
        const double away = std::max({0.0, lo, -hi});
        dmin2 += away * away;
        const double far = std::max(std::abs(lo), std::abs(hi));
        dmax2 += far * far;
      }
      const double r2 = e.s * e.s;
      return {dmax2 <= r2, dmin2 <= r2};
    }
    case ShapeKind::Box: {
      bool in = true, out = true;
      for (int i = 0; i < dim; ++i) {
        in = in && cell.lo[i] >= e.a[i] && cell.hi[i] <= e.b[i];
        out = out && cell.lo[i] <= e.b[i] && cell.hi[i] >= e.a[i];
      }
      return {in, out};
    }
    case ShapeKind::Point: {
      bool out = true;
      for (int i = 0; i < dim; ++i) out = out && cell.lo[i] <= e.a[i] && e.a[i] <= cell.hi[i];
      return {false, out};
    }
    case ShapeKind::Union: {
      InOut r{false, false};
      for (const auto& c : e.children) {
        InOut k = classify(c, cell, dim);
        r.inner = r.inner || k.inner;
        r.outer = r.outer || k.outer;
      }
      return r;
    }
    case ShapeKind::Intersect: {
      InOut r{true, true};
      for (const auto& c : e.children) {
        InOut k = classify(c, cell, dim);
        r.inner = r.inner && k.inner;
        r.outer = r.outer && k.outer;
      }
      return r;
    }
    case ShapeKind::Complement: {
      InOut k = classify(e.children[0], cell, dim);
      return {!k.outer, !k.inner};
    }
    case ShapeKind::Translate: {
      CellBox t = cell;
      for (int i = 0; i < dim; ++i) { t.lo[i] -= e.a[i]; t.hi[i] -= e.a[i]; }
      return classify(e.children[0], t, dim);
    }
    case ShapeKind::Scale: {
      CellBox t = cell;
      for (int i = 0; i < dim; ++i) { t.lo[i] /= e.s; t.hi[i] /= e.s; }
      return classify(e.children[0], t, dim);
    }
  }
  return {false, false};
}

// 1-D squared-distance lower envelope (Felzenszwalb-Huttenlocher).
void edt_pass(std::vector<double>& f, std::vector<double>& scratch_d,
              std::vector<std::int64_t>& scratch_v, std::vector<double>& scratch_z,
              std::int64_t n) {
  auto& d = scratch_d;
  auto& v = scratch_v;
  auto& z = scratch_z;
  std::int64_t k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (std::int64_t q = 1; q < n; ++q) {
    double s;
    while (true) {
      const std::int64_t p = v[k];
      s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
      if (s > z[k]) break;
      --k;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (std::int64_t q = 0; q < n; ++q) {
    while (z[k + 1] < double(q)) ++k;
    const std::int64_t p = v[k];
    d[q] = double(q - p) * (q - p) + f[p];
  }
  std::copy(d.begin(), d.begin() + n, f.begin());
}

std::vector<double> distance_sq_lattice(const std::array<std::int64_t, 3>& dims, int dim,
                                        const std::vector<double>& seed) {
  std::vector<double> f = seed;
  const std::int64_t nx = dims[0], ny = dims[1], nz = dims[2];
  const std::int64_t nmax = std::max({nx, ny, nz});
  std::vector<double> line(nmax), d(nmax), z(nmax + 1);
  std::vector<std::int64_t> v(nmax);

  // axis 0
  for (std::int64_t zc = 0; zc < nz; ++zc)
    for (std::int64_t y = 0; y < ny; ++y) {
      const std::int64_t base = nx * (y + ny * zc);
      for (std::int64_t x = 0; x < nx; ++x) line[x] = f[base + x];
      edt_pass(line, d, v, z, nx);
      for (std::int64_t x = 0; x < nx; ++x) f[base + x] = line[x];
    }
  if (dim >= 2) {
    for (std::int64_t zc = 0; zc < nz; ++zc)
      for (std::int64_t x = 0; x < nx; ++x) {
        for (std::int64_t y = 0; y < ny; ++y) line[y] = f[x + nx * (y + ny * zc)];
        edt_pass(line, d, v, z, ny);
        for (std::int64_t y = 0; y < ny; ++y) f[x + nx * (y + ny * zc)] = line[y];
      }
  }
  if (dim >= 3) {
    for (std::int64_t y = 0; y < ny; ++y)
      for (std::int64_t x = 0; x < nx; ++x) {
        for (std::int64_t zc = 0; zc < nz; ++zc) line[zc] = f[x + nx * (y + ny * zc)];
        edt_pass(line, d, v, z, nz);
        for (std::int64_t zc = 0; zc < nz; ++zc) f[x + nx * (y + ny * zc)] = line[zc];
      }
  }
  return f;
}

}  // namespace

DomainSpec parse_domain_spec(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("syntax error: ") + e.what(), static_cast<long>(e.byte));
  }
  if (!doc.is_object() || !doc.contains("dim") || !doc.contains("shape"))
    throw ParseError("document must be an object with 'dim' and 'shape'");
  DomainSpec spec;
  if (!doc["dim"].is_number_integer()) throw ParseError("dim must be an integer");
  spec.dim = doc["dim"].get<int>();
  if (spec.dim < 1 || spec.dim > 3) throw ParseError("dim must be 1, 2 or 3");
  spec.root = parse_shape(doc["shape"], spec.dim, 1);
  return spec;
}

std::optional<Aabb> hull(const DomainSpec& spec) { return hull_of(spec.root, spec.dim); }

Grid make_grid(int dim, const Vec& lo, const Vec& hi, double h, const GridOptions& opts) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("grid: dim must be 1, 2 or 3");
  if (!(h > 0)) throw std::invalid_argument("grid: spacing must be positive");
  Grid g;
  g.dim = dim;
  g.lo = lo;
  g.h = h;
  for (int i = 0; i < dim; ++i) {
    const double steps = (hi[i] - lo[i]) / h;
    const double rounded = std::round(steps);
    if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, std::abs(steps)))
      throw std::invalid_argument("grid: extent is not an integral multiple of h");
    g.dims[i] = static_cast<std::int64_t>(rounded);
    if (g.dims[i] < 4) throw std::invalid_argument("grid: fewer than 4 cells along an axis");
  }
  if (g.cell_count() > opts.cell_budget)
    throw std::invalid_argument("grid: cell budget exceeded");
  return g;
}

Grid cover_box(int dim, const Aabb& box, double h, double margin, const GridOptions& opts) {
  if (!(h > 0)) throw std::invalid_argument("grid: spacing must be positive");
  if (margin < 0) throw std::invalid_argument("grid: negative margin");
  const std::int64_t mcells = static_cast<std::int64_t>(std::ceil(margin / h - 1e-12));
  Grid g;
  g.dim = dim;
  g.h = h;
  for (int i = 0; i < dim; ++i) {
    std::int64_t c0 = static_cast<std::int64_t>(std::floor(box.lo[i] / h + 1e-12)) - mcells;
    std::int64_t c1 = static_cast<std::int64_t>(std::ceil(box.hi[i] / h - 1e-12)) + mcells;
    while (c1 - c0 < 4) { --c0; ++c1; }
    g.lo[i] = double(c0) * h;
    g.dims[i] = c1 - c0;
  }
  if (g.cell_count() > opts.cell_budget)
    throw std::invalid_argument("grid: cell budget exceeded");
  return g;
}

std::int64_t CellMask::count_true() const {
  std::int64_t n = 0;
  for (auto b : bits) n += b != 0;
  return n;
}

double CellMask::measure() const {
  double hn = 1;
  for (int i = 0; i < grid.dim; ++i) hn *= grid.h;
  return double(count_true()) * hn;
}

std::optional<Aabb> CellMask::true_bbox() const {
  std::array<std::int64_t, 3> clo{std::numeric_limits<std::int64_t>::max(),
                                  std::numeric_limits<std::int64_t>::max(),
                                  std::numeric_limits<std::int64_t>::max()};
  std::array<std::int64_t, 3> chi{-1, -1, -1};
  bool any = false;
  std::int64_t idx = 0;
  for (std::int64_t z = 0; z < grid.dims[2]; ++z)
    for (std::int64_t y = 0; y < grid.dims[1]; ++y)
      for (std::int64_t x = 0; x < grid.dims[0]; ++x, ++idx) {
        if (!bits[idx]) continue;
        any = true;
        const std::array<std::int64_t, 3> c{x, y, z};
        for (int i = 0; i < 3; ++i) {
          clo[i] = std::min(clo[i], c[i]);
          chi[i] = std::max(chi[i], c[i]);
        }
      }
  if (!any) return std::nullopt;
  Aabb b;
  for (int i = 0; i < grid.dim; ++i) {
    b.lo[i] = grid.lo[i] + double(clo[i]) * grid.h;
    b.hi[i] = grid.lo[i] + double(chi[i] + 1) * grid.h;
  }
  return b;
}

CellMask rasterize(const DomainSpec& spec, const Grid& grid, MaskKind kind) {
  if (spec.dim != grid.dim) throw std::invalid_argument("rasterize: dimension mismatch");
  if (kind == MaskKind::OpenSet) {
    auto hb = hull(spec);
    if (!hb) throw std::invalid_argument("rasterize: open-set spec has no bounded hull");
    for (int i = 0; i < grid.dim; ++i)
      if (hb->lo[i] < grid.lo[i] - 1e-12 || hb->hi[i] > grid.hi(i) + 1e-12)
        throw std::invalid_argument("rasterize: open-set spec extends beyond the grid box");
  }
  CellMask m;
  m.grid = grid;
  m.kind = kind;
  m.bits.assign(static_cast<std::size_t>(grid.cell_count()), 0);
  auto hb = hull(spec);
  bool clipped = false;
  if (kind == MaskKind::CompactSet && hb) {
    for (int i = 0; i < grid.dim; ++i)
      clipped = clipped || hb->lo[i] < grid.lo[i] - 1e-12 || hb->hi[i] > grid.hi(i) + 1e-12;
  }
  m.clipped = clipped;

  std::int64_t idx = 0;
  CellBox cell;
  for (std::int64_t z = 0; z < grid.dims[2]; ++z)
    for (std::int64_t y = 0; y < grid.dims[1]; ++y)
      for (std::int64_t x = 0; x < grid.dims[0]; ++x, ++idx) {
        const std::array<std::int64_t, 3> c{x, y, z};
        for (int i = 0; i < grid.dim; ++i) {
          cell.lo[i] = grid.lo[i] + double(c[i]) * grid.h;
          cell.hi[i] = grid.lo[i] + double(c[i] + 1) * grid.h;
        }
        InOut k = classify(spec.root, cell, grid.dim);
        m.bits[idx] = kind == MaskKind::OpenSet ? k.inner : k.outer;
      }
  return m;
}

namespace {

bool cell_in_closed_ball(const Grid& g, const std::array<std::int64_t, 3>& c, const Vec& center,
                         double r, int dim) {
  double dmin2 = 0;
  for (int i = 0; i < dim; ++i) {
    const double lo = g.lo[i] + double(c[i]) * g.h - center[i];
    const double hi = lo + g.h;
    const double away = std::max({0.0, lo, -hi});
    dmin2 += away * away;
  }
  return dmin2 <= r * r;
}

}  // namespace

CellMask ball_complement_region(const CellMask& omega, const Vec& center, double r) {
  if (omega.kind != MaskKind::OpenSet)
    throw std::invalid_argument("ball_complement_region: omega must be an open-set mask");
  if (!(r > 0)) throw std::invalid_argument("ball_complement_region: radius must be positive");
  const Grid& g = omega.grid;
  CellMask m;
  m.grid = g;
  m.kind = MaskKind::CompactSet;
  m.bits.assign(omega.bits.size(), 0);
  for (int i = 0; i < g.dim; ++i)
    m.clipped = m.clipped || center[i] - r < g.lo[i] - 1e-12 || center[i] + r > g.hi(i) + 1e-12;
  std::int64_t idx = 0;
  for (std::int64_t z = 0; z < g.dims[2]; ++z)
    for (std::int64_t y = 0; y < g.dims[1]; ++y)
      for (std::int64_t x = 0; x < g.dims[0]; ++x, ++idx) {
        if (omega.bits[idx]) continue;
        if (cell_in_closed_ball(g, {x, y, z}, center, r, g.dim)) m.bits[idx] = 1;
      }
  return m;
}

CellMask ball_complement_window(const CellMask& omega, const Vec& center, double r, double margin) {
  if (omega.kind != MaskKind::OpenSet)
    throw std::invalid_argument("ball_complement_window: omega must be an open-set mask");
  const Grid& og = omega.grid;
  const double h = og.h;
  const std::int64_t mcells = static_cast<std::int64_t>(std::ceil(margin / h - 1e-12));
  Grid w;
  w.dim = og.dim;
  w.h = h;
  std::array<std::int64_t, 3> off{0, 0, 0};  // window cell -> omega cell offset
  for (int i = 0; i < og.dim; ++i) {
    // window anchored to omega's lattice so translated queries coincide bitwise
    std::int64_t c0 =
        static_cast<std::int64_t>(std::floor((center[i] - r - og.lo[i]) / h + 1e-12)) - mcells;
    std::int64_t c1 =
        static_cast<std::int64_t>(std::ceil((center[i] + r - og.lo[i]) / h - 1e-12)) + mcells;
    while (c1 - c0 < 4) { --c0; ++c1; }
    w.lo[i] = og.lo[i] + double(c0) * h;
    w.dims[i] = c1 - c0;
    off[i] = c0;
  }
  CellMask m;
  m.grid = w;
  m.kind = MaskKind::CompactSet;
  m.bits.assign(static_cast<std::size_t>(w.cell_count()), 0);
  std::int64_t idx = 0;
  for (std::int64_t z = 0; z < w.dims[2]; ++z)
    for (std::int64_t y = 0; y < w.dims[1]; ++y)
      for (std::int64_t x = 0; x < w.dims[0]; ++x, ++idx) {
        if (!cell_in_closed_ball(w, {x, y, z}, center, r, w.dim)) continue;
        const std::int64_t ox = x + off[0], oy = y + off[1], oz = z + off[2];
        bool in_omega = false;
        if (ox >= 0 && ox < og.dims[0] && (og.dim < 2 || (oy >= 0 && oy < og.dims[1])) &&
            (og.dim < 3 || (oz >= 0 && oz < og.dims[2]))) {
          in_omega = omega.bits[og.cell_index(ox, og.dim < 2 ? 0 : oy, og.dim < 3 ? 0 : oz)] != 0;
        }
        if (!in_omega) m.bits[idx] = 1;
      }
  return m;
}

std::vector<double> cell_distance_sq(const Grid& grid, const std::vector<std::uint8_t>& site) {
  std::vector<double> seed(site.size());
  const double inf = 1e30;
  for (std::size_t i = 0; i < site.size(); ++i) seed[i] = site[i] ? 0.0 : inf;
  return distance_sq_lattice(grid.dims, grid.dim, seed);
}

std::vector<double> node_distance_sq(const Grid& grid, const std::vector<std::uint8_t>& site) {
  std::vector<double> seed(site.size());
  const double inf = 1e30;
  for (std::size_t i = 0; i < site.size(); ++i) seed[i] = site[i] ? 0.0 : inf;
  return distance_sq_lattice(grid.node_dims(), grid.dim, seed);
}

double geometric_inradius(const CellMask& omega) {
  if (omega.kind != MaskKind::OpenSet)
    throw std::invalid_argument("geometric_inradius: open-set mask expected");
  const Grid& g = omega.grid;
  std::vector<std::uint8_t> site(omega.bits.size());
  for (std::size_t i = 0; i < site.size(); ++i) site[i] = omega.bits[i] ? 0 : 1;
  std::vector<double> d2 = cell_distance_sq(g, site);
  double best = 0;
  std::int64_t idx = 0;
  for (std::int64_t z = 0; z < g.dims[2]; ++z)
    for (std::int64_t y = 0; y < g.dims[1]; ++y)
      for (std::int64_t x = 0; x < g.dims[0]; ++x, ++idx) {
        if (!omega.bits[idx]) continue;
        // center-to-center distance, recentred by half a cell
        double d = (std::sqrt(d2[idx]) + 0.5) * g.h;
        const std::array<std::int64_t, 3> c{x, y, z};
        for (int i = 0; i < g.dim; ++i) {
          const double ctr = g.lo[i] + (double(c[i]) + 0.5) * g.h;
          d = std::min({d, ctr - g.lo[i], g.hi(i) - ctr});
        }
        best = std::max(best, d);
      }
  return best;
}

bool mask_connected(const CellMask& mask) {
  const Grid& g = mask.grid;
  std::int64_t start = -1;
  for (std::size_t i = 0; i < mask.bits.size(); ++i)
    if (mask.bits[i]) { start = static_cast<std::int64_t>(i); break; }
  if (start < 0) return true;
  std::vector<std::uint8_t> seen(mask.bits.size(), 0);
  std::vector<std::int64_t> stack{start};
  seen[start] = 1;
  std::int64_t visited = 0;
  const std::int64_t nx = g.dims[0], ny = g.dims[1], nz = g.dims[2];
  while (!stack.empty()) {
    const std::int64_t c = stack.back();
    stack.pop_back();
    ++visited;
    const std::int64_t x = c % nx, y = (c / nx) % ny, z = c / (nx * ny);
    const std::array<std::array<std::int64_t, 3>, 6> nbrs{{{x - 1, y, z}, {x + 1, y, z},
                                                           {x, y - 1, z}, {x, y + 1, z},
                                                           {x, y, z - 1}, {x, y, z + 1}}};
    for (const auto& nb : nbrs) {
      if (nb[0] < 0 || nb[0] >= nx || nb[1] < 0 || nb[1] >= ny || nb[2] < 0 || nb[2] >= nz)
        continue;
      const std::int64_t j = g.cell_index(nb[0], nb[1], nb[2]);
      if (mask.bits[j] && !seen[j]) { seen[j] = 1; stack.push_back(j); }
    }
  }
  return visited == mask.count_true();
}

}  // namespace captk
