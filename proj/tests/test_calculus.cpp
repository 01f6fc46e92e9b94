// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "captk/calculus.hpp"
#include "captk/randfields.hpp"

using namespace captk;

namespace {

CellMask full_mask(const Grid& g) {
  return {g, MaskKind::OpenSet, std::vector<std::uint8_t>(static_cast<std::size_t>(g.cell_count()), 1), false};
}

}  // namespace

TEST_SUITE("calculus") {
  TEST_CASE("gradient: constant fields vanish, affine fields are exact") {
    Grid g = make_grid(2, {0, 0, 0}, {1, 1, 0}, 1.0 / 8);
    ScalarField c = ScalarField::sample(g, [](const Vec&) { return 3.25; });
    VectorField gc = gradient(c);
    for (double v : gc.comps) CHECK(v == 0.0);

    ScalarField f = ScalarField::sample(g, [](const Vec& x) { return x[0] - 2.0 * x[1]; });
    VectorField gf = gradient(f);
    for (std::int64_t cidx = 0; cidx < g.cell_count(); ++cidx) {
      CHECK(gf.comps[2 * cidx + 0] == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(gf.comps[2 * cidx + 1] == doctest::Approx(-2.0).epsilon(1e-13));
    }
  }

  TEST_CASE("gradient: x^2 stencil gives 2*(cell center)") {
    Grid g = make_grid(1, {0, 0, 0}, {1, 0, 0}, 0.25);
    ScalarField f = ScalarField::sample(g, [](const Vec& x) { return x[0] * x[0]; });
    VectorField gf = gradient(f);
    for (std::int64_t i = 0; i < g.dims[0]; ++i) {
      const double center = (double(i) + 0.5) * g.h;
      CHECK(gf.comps[i] == doctest::Approx(2.0 * center).epsilon(1e-13));
    }
  }

  TEST_CASE("lp_norm: unit mass, zero field") {
    Grid g = make_grid(2, {0, 0, 0}, {1, 1, 0}, 1.0 / 16);
    CellMask all = full_mask(g);
    ScalarField one = ScalarField::sample(g, [](const Vec&) { return 1.0; });
    for (double p : {1.5, 2.0, 3.0})
      CHECK(lp_norm(one, p, all) == doctest::Approx(1.0).epsilon(1e-12));
    ScalarField zero = ScalarField::zeros(g);
    CHECK(lp_norm(zero, 2.0, all) == 0.0);
  }

  TEST_CASE("lp_norm: midpoint quadrature of x on (0,1)") {
    const double h = 1.0 / 256;
    Grid g = make_grid(1, {0, 0, 0}, {1, 0, 0}, h);
    CellMask all = full_mask(g);
    ScalarField f = ScalarField::sample(g, [](const Vec& x) { return x[0]; });
    const double mine = lp_norm(f, 2.0, all);
    // independent midpoint-rule oracle for the integral of x^2
    double acc = 0;
    for (std::int64_t i = 0; i < g.dims[0]; ++i) {
      const double c = (double(i) + 0.5) * h;
      acc += c * c * h;
    }
    CHECK(mine == doctest::Approx(std::sqrt(acc)).epsilon(1e-13));
    CHECK(std::abs(mine - 1.0 / std::sqrt(3.0)) < 1e-4);
  }

  TEST_CASE("rayleigh_quotient: hat function on (0,1)") {
    const double h = 1.0 / 64;
    Grid g = make_grid(1, {0, 0, 0}, {1, 0, 0}, h);
    CellMask all = full_mask(g);
    ScalarField hat =
        ScalarField::sample(g, [](const Vec& x) { return 1.0 - std::abs(2.0 * x[0] - 1.0); });
    CHECK(rayleigh_quotient(hat, 2.0, all) == doctest::Approx(12.0).epsilon(2e-3));
  }

  TEST_CASE("rayleigh_quotient: sine mode on a fine grid") {
    const double h = 1.0 / 512;
    Grid g = make_grid(1, {0, 0, 0}, {1, 0, 0}, h);
    CellMask all = full_mask(g);
    ScalarField s = ScalarField::sample(g, [](const Vec& x) { return std::sin(M_PI * x[0]); });
    const double rq = rayleigh_quotient(s, 2.0, all);
    CHECK(std::abs(rq - M_PI * M_PI) / (M_PI * M_PI) < 0.005);
  }

  TEST_CASE("rayleigh_quotient: homogeneity") {
    Grid g = make_grid(2, {0, 0, 0}, {1, 1, 0}, 1.0 / 16);
    CellMask all = full_mask(g);
    ScalarField f = ScalarField::sample(
        g, [](const Vec& x) { return std::sin(M_PI * x[0]) * x[1] * (1 - x[1]); });
    {
      const double base = rayleigh_quotient(f, 2.0, all);
      ScalarField doubled = f;
      for (auto& v : doubled.values) v *= 2.0;  // power-of-two scaling is lossless for p = 2
      CHECK(rayleigh_quotient(doubled, 2.0, all) == base);
    }
    {
      const double base = rayleigh_quotient(f, 3.0, all);
      ScalarField doubled = f;
      for (auto& v : doubled.values) v *= 2.0;
      CHECK(rayleigh_quotient(doubled, 3.0, all) == doctest::Approx(base).epsilon(1e-13));
    }
    const double base = rayleigh_quotient(f, 1.5, all);
    ScalarField scaled = f;
    for (auto& v : scaled.values) v *= -5.0;
    CHECK(rayleigh_quotient(scaled, 1.5, all) == doctest::Approx(base).epsilon(1e-12));
  }

  TEST_CASE("rayleigh_quotient: zero field is rejected") {
    Grid g = make_grid(1, {0, 0, 0}, {1, 0, 0}, 0.25);
    CellMask all = full_mask(g);
    ScalarField zero = ScalarField::zeros(g);
    CHECK_THROWS_AS(rayleigh_quotient(zero, 2.0, all), std::invalid_argument);
  }

  TEST_CASE("property: gradient triangle inequality in the discrete norms") {
    Grid g = make_grid(2, {0, 0, 0}, {1, 1, 0}, 1.0 / 16);
    CellMask all = full_mask(g);
    CounterRng rng(99, 1);
    Aabb box{{0, 0, 0}, {1, 1, 0}};
    for (int t = 0; t < 10; ++t) {
      ScalarField f = random_bumps(2, box, 0.05, 0.3, rng, 2 * t).sample(g);
      ScalarField gfld = random_bumps(2, box, 0.05, 0.3, rng, 2 * t + 1).sample(g);
      ScalarField sum = f;
      for (std::size_t i = 0; i < sum.values.size(); ++i) sum.values[i] += gfld.values[i];
      for (double p : {1.5, 2.0, 3.0}) {
        const double lhs = lp_norm(gradient(sum), p, all);
        const double rhs = lp_norm(gradient(f), p, all) + lp_norm(gradient(gfld), p, all);
        CHECK(lhs <= rhs + 1e-12 * (1.0 + rhs));
      }
    }
  }

  TEST_CASE("interior nodes need every incident cell inside the mask") {
    Grid g = make_grid(2, {0, 0, 0}, {1, 1, 0}, 0.25);
    CellMask all = full_mask(g);
    auto active = interior_nodes(all);
    // 5x5 nodes, only the 3x3 interior block is active
    std::int64_t n = 0;
    for (auto a : active) n += a;
    CHECK(n == 9);
  }
}
