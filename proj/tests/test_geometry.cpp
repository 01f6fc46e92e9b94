// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "captk/geometry.hpp"
#include "captk/rng.hpp"

using namespace captk;

namespace {

DomainSpec spec_of(const std::string& text) { return parse_domain_spec(text); }

// independent enumeration oracle for a disk: farthest-corner distance <= r
std::int64_t disk_inner_count(const Grid& g, double cx, double cy, double r) {
  std::int64_t n = 0;
  for (std::int64_t y = 0; y < g.dims[1]; ++y)
    for (std::int64_t x = 0; x < g.dims[0]; ++x) {
      const double x0 = g.lo[0] + x * g.h, x1 = x0 + g.h;
      const double y0 = g.lo[1] + y * g.h, y1 = y0 + g.h;
      const double fx = std::max(std::abs(x0 - cx), std::abs(x1 - cx));
      const double fy = std::max(std::abs(y0 - cy), std::abs(y1 - cy));
      if (fx * fx + fy * fy <= r * r) ++n;
    }
  return n;
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("parse: well-formed ball round-trips") {
    auto s = spec_of(R"({"dim":2,"shape":{"ball":{"center":[0,0],"r":1}}})");
    CHECK(s.dim == 2);
    CHECK(s.root.kind == ShapeKind::Ball);
    CHECK(s.root.s == 1.0);
  }

  TEST_CASE("parse: negative radius is a semantic error") {
    CHECK_THROWS_AS(spec_of(R"({"dim":2,"shape":{"ball":{"center":[0,0],"r":-1}}})"), ParseError);
    CHECK_THROWS_AS(spec_of(R"({"dim":2,"shape":{"box":{"lo":[1,1],"hi":[0,2]}}})"), ParseError);
    CHECK_THROWS_AS(spec_of(R"({"dim":2,"shape":{"blob":{}}})"), ParseError);
  }

  TEST_CASE("parse: syntax errors carry a position") {
    try {
      spec_of("{\"dim\":2,");
      CHECK(false);
    } catch (const ParseError& e) {
      CHECK(e.position >= 0);
    }
  }

  TEST_CASE("parse: union of box and complement(ball) has the right shape") {
    auto s = spec_of(
        R"({"dim":2,"shape":{"union":[{"box":{"lo":[0,0],"hi":[1,1]}},)"
        R"({"complement":{"ball":{"center":[0,0],"r":1}}}]}})");
    REQUIRE(s.root.kind == ShapeKind::Union);
    REQUIRE(s.root.children.size() == 2);
    CHECK(s.root.children[1].kind == ShapeKind::Complement);
  }

  TEST_CASE("parse: lattice expands to translated copies") {
    auto s = spec_of(
        R"({"dim":2,"shape":{"lattice":{"of":{"ball":{"center":[0.5,0.5],"r":0.1}},)"
        R"("pitch":[1,1],"counts":[3,2]}}})");
    REQUIRE(s.root.kind == ShapeKind::Union);
    CHECK(s.root.children.size() == 6);
    CHECK_THROWS_AS(spec_of(R"({"dim":2,"shape":{"lattice":{"of":{"ball":{"center":[0,0],"r":1}},)"
                            R"("pitch":[1,1],"counts":[101,101]}}})"),
                    ParseError);
  }

  TEST_CASE("rasterize: grid-aligned box keeps all 16 cells") {
    auto s = spec_of(R"({"dim":2,"shape":{"box":{"lo":[0,0],"hi":[1,1]}}})");
    Grid g = make_grid(2, {0, 0, 0}, {1, 1, 0}, 0.25);
    CellMask m = rasterize(s, g, MaskKind::OpenSet);
    CHECK(m.count_true() == 16);
  }

  TEST_CASE("rasterize: disjoint intersection is empty") {
    auto s = spec_of(
        R"({"dim":2,"shape":{"intersect":[{"ball":{"center":[-2,0],"r":0.5}},)"
        R"({"ball":{"center":[2,0],"r":0.5}}]}})");
    Grid g = make_grid(2, {-3, -3, 0}, {3, 3, 0}, 0.25);
    CHECK(rasterize(s, g, MaskKind::OpenSet).count_true() == 0);
    CHECK(rasterize(s, g, MaskKind::CompactSet).count_true() == 0);
  }

  TEST_CASE("rasterize: unit disk cell count matches the corner-distance oracle") {
    auto s = spec_of(R"({"dim":2,"shape":{"ball":{"center":[0,0],"r":1}}})");
    const double h = 1.0 / 64;
    Grid g = make_grid(2, {-1, -1, 0}, {1, 1, 0}, h);
    CellMask m = rasterize(s, g, MaskKind::OpenSet);
    CHECK(m.count_true() == disk_inner_count(g, 0, 0, 1));
    const double area = double(m.count_true()) * h * h;
    CHECK(std::abs(area - M_PI) / M_PI < 0.025);  // exact predicate sheds a hair over 2% at this h
  }

  TEST_CASE("rasterize: open-set spec outside the grid errors, compact clips") {
    auto s = spec_of(R"({"dim":2,"shape":{"ball":{"center":[0,0],"r":2}}})");
    Grid g = make_grid(2, {-1, -1, 0}, {1, 1, 0}, 0.25);
    CHECK_THROWS_AS(rasterize(s, g, MaskKind::OpenSet), std::invalid_argument);
    CellMask m = rasterize(s, g, MaskKind::CompactSet);
    CHECK(m.clipped);
    CHECK(m.count_true() == g.cell_count());
  }

  TEST_CASE("ball_complement_region: ball inside omega is empty") {
    auto box = spec_of(R"({"dim":2,"shape":{"box":{"lo":[-3,-3],"hi":[3,3]}}})");
    Grid g = make_grid(2, {-3, -3, 0}, {3, 3, 0}, 0.25);
    CellMask omega = rasterize(box, g, MaskKind::OpenSet);
    CellMask region = ball_complement_region(omega, {0, 0, 0}, 1.0);
    CHECK(region.count_true() == 0);
  }

  TEST_CASE("ball_complement_region: empty omega gives the outer ball") {
    Grid g = make_grid(2, {-3, -3, 0}, {3, 3, 0}, 0.25);
    CellMask omega{g, MaskKind::OpenSet, std::vector<std::uint8_t>(g.cell_count(), 0), false};
    CellMask region = ball_complement_region(omega, {0, 0, 0}, 1.0);
    auto ball = spec_of(R"({"dim":2,"shape":{"ball":{"center":[0,0],"r":1}}})");
    CellMask outer = rasterize(ball, g, MaskKind::CompactSet);
    CHECK(region.bits == outer.bits);
  }

  TEST_CASE("ball_complement_region: disk complement in a large ball is the annulus") {
    auto ball = spec_of(R"({"dim":2,"shape":{"ball":{"center":[0,0],"r":1}}})");
    Grid g = make_grid(2, {-3, -3, 0}, {3, 3, 0}, 1.0 / 16);
    CellMask omega = rasterize(ball, g, MaskKind::OpenSet);
    CellMask region = ball_complement_region(omega, {0, 0, 0}, 2.0);
    // per-cell oracle: in the closed 2-ball and not in the inner-rasterized disk
    std::int64_t idx = 0;
    for (std::int64_t y = 0; y < g.dims[1]; ++y)
      for (std::int64_t x = 0; x < g.dims[0]; ++x, ++idx) {
        const double x0 = g.lo[0] + x * g.h, x1 = x0 + g.h;
        const double y0 = g.lo[1] + y * g.h, y1 = y0 + g.h;
        const double nx = std::max({0.0, x0, -x1}), ny = std::max({0.0, y0, -y1});
        const double fx = std::max(std::abs(x0), std::abs(x1));
        const double fy = std::max(std::abs(y0), std::abs(y1));
        const bool in_ball2 = nx * nx + ny * ny <= 4.0;
        const bool in_disk = fx * fx + fy * fy <= 1.0;
        CHECK(region.test(idx) == (in_ball2 && !in_disk));
      }
  }

  TEST_CASE("ball_complement_window matches the on-grid region where they overlap") {
    auto ball = spec_of(R"({"dim":2,"shape":{"ball":{"center":[0,0],"r":1}}})");
    Grid g = make_grid(2, {-3, -3, 0}, {3, 3, 0}, 1.0 / 16);
    CellMask omega = rasterize(ball, g, MaskKind::OpenSet);
    CellMask on_grid = ball_complement_region(omega, {0.25, -0.5, 0}, 1.5);
    CellMask window = ball_complement_window(omega, {0.25, -0.5, 0}, 1.5, 0.5);
    std::int64_t idx = 0;
    std::int64_t seen = 0;
    const Grid& w = window.grid;
    for (std::int64_t y = 0; y < w.dims[1]; ++y)
      for (std::int64_t x = 0; x < w.dims[0]; ++x, ++idx) {
        const double cx = w.lo[0] + (x + 0.5) * w.h;
        const double cy = w.lo[1] + (y + 0.5) * w.h;
        if (cx < g.lo[0] || cx > g.hi(0) || cy < g.lo[1] || cy > g.hi(1)) continue;
        const std::int64_t gx = std::llround((w.lo[0] - g.lo[0]) / g.h) + x;
        const std::int64_t gy = std::llround((w.lo[1] - g.lo[1]) / g.h) + y;
        CHECK(window.test(idx) == on_grid.test(g.cell_index(gx, gy, 0)));
        ++seen;
      }
    CHECK(seen > 0);
  }

  TEST_CASE("geometric_inradius: aligned square, disk, empty") {
    Grid g = make_grid(2, {-1, -1, 0}, {2, 2, 0}, 1.0 / 32);
    auto sq = spec_of(R"({"dim":2,"shape":{"box":{"lo":[0,0],"hi":[1,1]}}})");
    CellMask m = rasterize(sq, g, MaskKind::OpenSet);
    CHECK(std::abs(geometric_inradius(m) - 0.5) <= g.h);

    auto ball = spec_of(R"({"dim":2,"shape":{"ball":{"center":[0.5,0.5],"r":0.75}}})");
    CellMask b = rasterize(ball, g, MaskKind::OpenSet);
    CHECK(std::abs(geometric_inradius(b) - 0.75) <= g.h);

    CellMask empty{g, MaskKind::OpenSet, std::vector<std::uint8_t>(g.cell_count(), 0), false};
    CHECK(geometric_inradius(empty) == 0.0);
  }

  TEST_CASE("property: union branch grows masks, inner within outer, inradius monotone") {
    CounterRng rng(2024, 7);
    Grid g = make_grid(2, {-2, -2, 0}, {2, 2, 0}, 1.0 / 16);
    for (int t = 0; t < 25; ++t) {
      std::uint64_t c = t * 64;
      auto ball_json = [&](double cx, double cy, double r) {
        return std::string("{\"ball\":{\"center\":[") + std::to_string(cx) + "," +
               std::to_string(cy) + "],\"r\":" + std::to_string(r) + "}}";
      };
      const std::string b1 = ball_json(rng.uniform(c + 0, -1, 1), rng.uniform(c + 1, -1, 1),
                                       rng.uniform(c + 2, 0.1, 0.8));
      const std::string b2 = ball_json(rng.uniform(c + 3, -1, 1), rng.uniform(c + 4, -1, 1),
                                       rng.uniform(c + 5, 0.1, 0.8));
      auto s1 = spec_of(R"({"dim":2,"shape":)" + b1 + "}");
      auto s2 = spec_of(R"({"dim":2,"shape":{"union":[)" + b1 + "," + b2 + "]}}");
      for (MaskKind kind : {MaskKind::OpenSet, MaskKind::CompactSet}) {
        CellMask m1 = rasterize(s1, g, kind);
        CellMask m2 = rasterize(s2, g, kind);
        for (std::size_t i = 0; i < m1.bits.size(); ++i)
          CHECK((!m1.bits[i] || m2.bits[i]));
      }
      CellMask inner = rasterize(s2, g, MaskKind::OpenSet);
      CellMask outer = rasterize(s2, g, MaskKind::CompactSet);
      for (std::size_t i = 0; i < inner.bits.size(); ++i)
        CHECK((!inner.bits[i] || outer.bits[i]));
      CHECK(geometric_inradius(rasterize(s1, g, MaskKind::OpenSet)) <=
            geometric_inradius(inner) + 1e-12);
    }
  }

  TEST_CASE("property: translation by grid multiples permutes the mask") {
    auto s = spec_of(R"({"dim":2,"shape":{"union":[{"ball":{"center":[0,0],"r":0.625}},)"
                     R"({"box":{"lo":[-0.25,-0.75],"hi":[0.5,0.25]}}]}})");
    const double h = 1.0 / 16;
    Grid g = make_grid(2, {-2, -2, 0}, {2, 2, 0}, h);
    auto moved = spec_of(
        R"({"dim":2,"shape":{"translate":{"by":[0.3125,-0.1875],)"
        R"("of":{"union":[{"ball":{"center":[0,0],"r":0.625}},)"
        R"({"box":{"lo":[-0.25,-0.75],"hi":[0.5,0.25]}}]}}}})");
    for (MaskKind kind : {MaskKind::OpenSet, MaskKind::CompactSet}) {
      CellMask base = rasterize(s, g, kind);
      CellMask shifted = rasterize(moved, g, kind);
      CHECK(base.count_true() == shifted.count_true());
      const std::int64_t dx = 5, dy = -3;  // 0.3125/h, -0.1875/h
      std::int64_t idx = 0;
      for (std::int64_t y = 0; y < g.dims[1]; ++y)
        for (std::int64_t x = 0; x < g.dims[0]; ++x, ++idx) {
          if (!base.bits[idx]) continue;
          CHECK(shifted.test(g.cell_index(x + dx, y + dy, 0)));
        }
    }
  }

  TEST_CASE("grid: invariant violations are rejected") {
    CHECK_THROWS_AS(make_grid(2, {0, 0, 0}, {1, 1, 0}, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(2, {0, 0, 0}, {0.5, 0.5, 0}, 0.25), std::invalid_argument);
    GridOptions tiny;
    tiny.cell_budget = 100;
    CHECK_THROWS_AS(make_grid(2, {0, 0, 0}, {1, 1, 0}, 1.0 / 64, tiny), std::invalid_argument);
  }

  TEST_CASE("1-D and 3-D rasterization smoke") {
    auto s1 = spec_of(R"({"dim":1,"shape":{"box":{"lo":[0],"hi":[1]}}})");
    Grid g1 = make_grid(1, {-1, 0, 0}, {2, 0, 0}, 0.25);
    CHECK(rasterize(s1, g1, MaskKind::OpenSet).count_true() == 4);

    auto s3 = spec_of(R"({"dim":3,"shape":{"ball":{"center":[0,0,0],"r":1}}})");
    Grid g3 = make_grid(3, {-1.5, -1.5, -1.5}, {1.5, 1.5, 1.5}, 0.125);
    CellMask m3 = rasterize(s3, g3, MaskKind::CompactSet);
    const double vol = m3.measure();
    CHECK(vol > 4.0 / 3.0 * M_PI);  // outer rasterization over-covers
    CHECK(vol < 4.0 / 3.0 * M_PI * 1.4);
  }
}
