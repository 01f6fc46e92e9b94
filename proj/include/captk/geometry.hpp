// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace captk {

using Vec = std::array<double, 3>;  // components beyond the dimension are 0

struct Aabb {
  Vec lo{0, 0, 0};
  Vec hi{0, 0, 0};
  Aabb dilated(double m) const {
    Aabb b = *this;
    for (int i = 0; i < 3; ++i) { b.lo[i] -= m; b.hi[i] += m; }
    return b;
  }
};

// Thrown on malformed domain-spec documents; byte offset is set for syntax
// errors, -1 for semantic ones.
struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, long pos = -1) : std::runtime_error(msg), position(pos) {}
  long position;
};

// ---------------------------------------------------------------------------
// Shape expression trees

enum class ShapeKind { Ball, Box, Point, Union, Intersect, Complement, Translate, Scale };

struct ShapeExpr {
  ShapeKind kind = ShapeKind::Ball;
  Vec a{0, 0, 0};   // ball center / box lo / point / translate offset
  Vec b{0, 0, 0};   // box hi
  double s = 0;     // ball radius / scale factor
  std::vector<ShapeExpr> children;
};

struct DomainSpec {
  int dim = 2;
  ShapeExpr root;
};

// Parses a {"dim": n, "shape": ...} document. Lattice leaves are expanded to
// explicit unions here (capped at 10^4 copies).
DomainSpec parse_domain_spec(std::string_view text);

// Bounding box of the shape. Unbounded shapes (a complement not cut down by
// an intersection) have no hull.
std::optional<Aabb> hull(const DomainSpec& spec);

// ---------------------------------------------------------------------------
// Grids and cell masks

struct GridOptions {
  std::int64_t cell_budget = std::int64_t(1) << 24;
};

// Uniform isotropic grid over [lo, lo + dims*h] per axis.
struct Grid {
  int dim = 2;
  Vec lo{0, 0, 0};
  double h = 1;
  std::array<std::int64_t, 3> dims{1, 1, 1};  // cells per axis; 1 beyond dim

  double hi(int axis) const { return lo[axis] + static_cast<double>(dims[axis]) * h; }
  std::int64_t cell_count() const { return dims[0] * dims[1] * dims[2]; }
  std::int64_t node_count() const {
    std::int64_t n = 1;
    for (int i = 0; i < dim; ++i) n *= dims[i] + 1;
    return n;
  }
  std::array<std::int64_t, 3> node_dims() const {
    std::array<std::int64_t, 3> nd{1, 1, 1};
    for (int i = 0; i < dim; ++i) nd[i] = dims[i] + 1;
    return nd;
  }
  std::int64_t cell_index(std::int64_t x, std::int64_t y, std::int64_t z) const {
    return x + dims[0] * (y + dims[1] * z);
  }
  std::int64_t node_index(std::int64_t x, std::int64_t y, std::int64_t z) const {
    auto nd = node_dims();
    return x + nd[0] * (y + nd[1] * z);
  }
  bool same_layout(const Grid& o) const {
    return dim == o.dim && h == o.h && lo == o.lo && dims == o.dims;
  }
};

// Validating constructor: (hi-lo)/h must be integral within 1e-9 relative,
// at least 4 cells per axis, total cells within budget.
Grid make_grid(int dim, const Vec& lo, const Vec& hi, double h, const GridOptions& opts = {});

// Smallest h-aligned grid containing `box` dilated by `margin` on every axis.
// The grid lattice is anchored at the origin so that translating `box` by an
// exact multiple of h translates the grid identically.
Grid cover_box(int dim, const Aabb& box, double h, double margin, const GridOptions& opts = {});

enum class MaskKind { OpenSet, CompactSet };

struct CellMask {
  Grid grid;
  MaskKind kind = MaskKind::OpenSet;
  std::vector<std::uint8_t> bits;   // one per cell
  bool clipped = false;             // compact-set rasterization hit the grid edge

  bool test(std::int64_t c) const { return bits[static_cast<std::size_t>(c)] != 0; }
  std::int64_t count_true() const;
  // Lebesgue measure surrogate: (true cells) * h^dim.
  double measure() const;
  std::optional<Aabb> true_bbox() const;  // bbox of true cells, empty mask -> nullopt
};

// Inner rasterization (open sets): a cell is kept when the closed cell lies in
// the closure of the shape. Outer rasterization (compact sets): kept when the
// closed cell meets the closed shape. Folded exactly over the expression tree
// so mask inclusion mirrors shape inclusion.
CellMask rasterize(const DomainSpec& spec, const Grid& grid, MaskKind kind);

// Cells of the closed ball B_r(center) not in omega; cells outside omega's
// grid count as complement. Result lives on omega's grid.
CellMask ball_complement_region(const CellMask& omega, const Vec& center, double r);

// Same region on a fresh window grid: the ball's bbox dilated by `margin`,
// aligned to omega's lattice. Cells beyond omega's grid count as complement.
CellMask ball_complement_window(const CellMask& omega, const Vec& center, double r, double margin);

// Largest distance from a true-cell center to the nearest false cell center or
// bounding-box wall; 0 for an empty mask. Exact Euclidean distance transform.
double geometric_inradius(const CellMask& omega);

// Squared-distance transform over cells: distance from each cell center to the
// nearest site-cell center (sites = cells where `site` returns true).
// Unit spacing; multiply by h for physical distances.
std::vector<double> cell_distance_sq(const Grid& grid, const std::vector<std::uint8_t>& site);

// Node-level variant used for solver initialization (unit spacing).
std::vector<double> node_distance_sq(const Grid& grid, const std::vector<std::uint8_t>& site);

// True when the mask's true cells form one face-connected component (empty
// masks count as connected).
bool mask_connected(const CellMask& mask);

}  // namespace captk
