// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "captk/inradius.hpp"

using namespace captk;

namespace {

DomainSpec spec_of(const std::string& t) { return parse_domain_spec(t); }

CellMask mask2(const std::string& text, double lo, double hi, double h) {
  auto s = spec_of(text);
  Grid g = make_grid(2, {lo, lo, 0}, {hi, hi, 0}, h);
  return rasterize(s, g, MaskKind::OpenSet);
}

const char* kDisk1 = R"({"dim":2,"shape":{"ball":{"center":[0,0],"r":1}}})";

// 2x2 disk lattice in (0,2)^2, unit pitch, radius 0.1
const char* kPerforated =
    R"({"dim":2,"shape":{"intersect":[{"box":{"lo":[0,0],"hi":[2,2]}},)"
    R"({"complement":{"lattice":{"of":{"ball":{"center":[0.5,0.5],"r":0.1}},)"
    R"("pitch":[1,1],"counts":[2,2]}}}]}})";

}  // namespace

TEST_SUITE("inradius") {
  TEST_CASE("ball_complement_capacity: covered ball, empty omega, obstacle") {
    const double h = 1.0 / 16;
    CellMask omega = mask2(R"({"dim":2,"shape":{"box":{"lo":[-2,-2],"hi":[2,2]}}})", -2, 2, h);
    auto covered = ball_complement_capacity(omega, {0, 0, 0}, 1.0, 2.0);
    CHECK(covered.value == 0.0);

    CellMask empty{omega.grid, MaskKind::OpenSet,
                   std::vector<std::uint8_t>(omega.bits.size(), 0), false};
    auto full = ball_complement_capacity(empty, {0, 0, 0}, 1.0, 2.0);
    InradiusOptions opts;
    CHECK(full.value == doctest::Approx(ball_window_capacity(omega, 1.0, 2.0, opts)).epsilon(1e-9));
    CHECK(full.value > 0.0);

    // square minus center disk: the ball sees just the disk
    CellMask holed = mask2(
        R"({"dim":2,"shape":{"intersect":[{"box":{"lo":[-2,-2],"hi":[2,2]}},)"
        R"({"complement":{"ball":{"center":[0,0],"r":0.25}}}]}})",
        -2, 2, h);
    auto seen = ball_complement_capacity(holed, {0, 0, 0}, 1.0, 2.0);
    auto disk = spec_of(R"({"dim":2,"shape":{"ball":{"center":[0,0],"r":0.25}}})");
    Grid wg = cover_box(2, *hull(disk), h, 2.25);  // matches the query window margin
    auto alone = sobolev_capacity(rasterize(disk, wg, MaskKind::CompactSet), 2.0);
    CHECK(std::abs(seen.value - alone.value) / alone.value < 0.05);
  }

  TEST_CASE("delta_R: a fitting ball gives zero with a lex-first witness") {
    const double h = 1.0 / 16;
    CellMask omega = mask2(R"({"dim":2,"shape":{"box":{"lo":[0,0],"hi":[2,2]}}})", -1, 3, h);
    auto d = delta_R(omega, 0.5, 2.0);
    CHECK(d.value == 0.0);
  }

  TEST_CASE("delta_R: empty omega reduces to the ball capacity") {
    const double h = 1.0 / 16;
    Grid g = make_grid(2, {-1, -1, 0}, {1, 1, 0}, h);
    CellMask empty{g, MaskKind::OpenSet,
                   std::vector<std::uint8_t>(static_cast<std::size_t>(g.cell_count()), 0), false};
    InradiusOptions opts;
    auto d = delta_R(empty, 0.5, 2.0, opts);
    CHECK(d.value == doctest::Approx(ball_window_capacity(empty, 0.5, 2.0, opts)).epsilon(1e-9));
  }

  TEST_CASE("delta_R: perforated square, pitch refinement consistency") {
    const double h = 1.0 / 8;
    CellMask omega = mask2(kPerforated, -1, 3, h);
    InradiusOptions coarse;
    coarse.center_pitch = 2 * h;
    InradiusOptions fine;  // defaults to pitch h, the oracle sweep
    auto dc = delta_R(omega, 1.0, 1.5, coarse);
    auto df = delta_R(omega, 1.0, 1.5, fine);
    CHECK(dc.value > 0.0);
    CHECK(df.value <= dc.value + 1e-12);  // denser lattice can only lower the min
    CHECK(std::abs(dc.value - df.value) / df.value < 0.05);
    // the searched minimum matches a direct solve at the witness
    auto direct = ball_complement_capacity(omega, dc.witness, 1.0, 1.5, coarse);
    CHECK(std::abs(direct.value - dc.value) / dc.value < 1e-6);
  }

  TEST_CASE("mazya_shubin_radius: inscribed ball keeps every radius admissible") {
    const double h = 1.0 / 16;
    CellMask omega = mask2(kDisk1, -1.5, 1.5, h);
    InradiusOptions opts;
    opts.center_pitch = 2 * h;
    const double r = mazya_shubin_radius(omega, 0.5, 2.0, opts);
    CHECK(r >= 1.0 - 2 * h);  // inner rasterization sheds a diagonal cell layer
  }

  TEST_CASE("mazya_shubin radii nondecreasing in gamma (shared sweep)") {
    const double h = 1.0 / 8;
    CellMask omega = mask2(kPerforated, -1, 3, h);
    InradiusOptions opts;
    opts.center_pitch = 2 * h;
    opts.gamma_grid = {0.1, 0.3, 0.6};
    opts.max_probe_solves = 40;
    auto rep = strict_inradius(omega, 1.5, opts);
    REQUIRE(rep.gamma_curve.size() == 3);
    // the curve is stored with gamma descending
    CHECK(rep.gamma_curve[2].radius <= rep.gamma_curve[1].radius + 1e-12);
    CHECK(rep.gamma_curve[1].radius <= rep.gamma_curve[0].radius + 1e-12);
  }

  TEST_CASE("strict_inradius: unit disk radius within 2h for all p") {
    const double h = 1.0 / 16;
    CellMask omega = mask2(kDisk1, -1.5, 1.5, h);
    for (double p : {1.5, 2.0, 3.0}) {
      InradiusOptions opts;
      opts.solver.cascade_levels = 2;
      opts.center_pitch = 2 * h;
      opts.gamma_grid = {0.5, 0.1};
      opts.max_probe_solves = 40;
      auto rep = strict_inradius(omega, p, opts);
      CHECK(std::abs(rep.rho_hat - 1.0) <= 2 * h);
      CHECK(rep.rho_hat >= rep.geometric - 2 * h);
      // epsilon curve is nonincreasing as the threshold shrinks
      for (std::size_t k = 1; k < rep.epsilon_curve.size(); ++k) {
        CHECK(rep.epsilon_curve[k].epsilon < rep.epsilon_curve[k - 1].epsilon);
        CHECK(rep.epsilon_curve[k].radius <= rep.epsilon_curve[k - 1].radius + 1e-12);
      }
      // gamma curve sits above rho and is nondecreasing in gamma
      double prev = -1;
      double gmin_radius = 1e30;
      for (auto it = rep.gamma_curve.rbegin(); it != rep.gamma_curve.rend(); ++it) {
        CHECK(it->radius >= prev - 1e-12);
        prev = it->radius;
        gmin_radius = std::min(gmin_radius, it->radius);
      }
      CHECK(gmin_radius >= rep.rho_hat - 2 * h);
    }
  }

  TEST_CASE("strict_inradius: empty mask reports zero") {
    Grid g = make_grid(2, {0, 0, 0}, {1, 1, 0}, 0.125);
    CellMask empty{g, MaskKind::OpenSet,
                   std::vector<std::uint8_t>(static_cast<std::size_t>(g.cell_count()), 0), false};
    auto rep = strict_inradius(empty, 2.0);
    CHECK(rep.rho_hat == 0.0);
    CHECK(rep.geometric == 0.0);
  }

  TEST_CASE("strict_inradius: square minus a grid point, p < n") {
    // the single point is invisible once epsilon clears the four-cell capacity
    const double h = 1.0 / 32;
    CellMask omega = mask2(
        R"({"dim":2,"shape":{"intersect":[{"box":{"lo":[0,0],"hi":[3,3]}},)"
        R"({"complement":{"point":[1.5,1.5]}}]}})",
        -1, 4, h);
    InradiusOptions opts;
    opts.with_gamma_curve = false;
    opts.max_probe_solves = 16;
    const double floor_cap = single_cell_capacity(omega, 1.5, opts);
    opts.epsilons = {3.0 * floor_cap};
    auto rep = strict_inradius(omega, 1.5, opts);
    CHECK(std::abs(rep.rho_hat - 1.5) <= 2 * h);
    // below the floor the point blocks the big ball
    InradiusOptions tight;
    tight.with_gamma_curve = false;
    tight.epsilons = {0.05 * floor_cap};
    auto rep2 = strict_inradius(omega, 1.5, tight);
    CHECK(rep2.rho_hat < 1.0);
    CHECK(std::abs(rep2.rho_hat - rep2.geometric) <= 2 * h);
  }

  TEST_CASE("single-cell capacity sinks as the grid refines") {
    double prev = 1e30;
    for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
      Grid g = make_grid(2, {0, 0, 0}, {1, 1, 0}, h);
      CellMask any{g, MaskKind::OpenSet,
                   std::vector<std::uint8_t>(static_cast<std::size_t>(g.cell_count()), 1), false};
      const double c = single_cell_capacity(any, 1.5, {});
      CHECK(c < prev);
      prev = c;
    }
  }

  TEST_CASE("delta/gamma coherence on the perforated square") {
    const double h = 1.0 / 8;
    CellMask omega = mask2(kPerforated, -1, 3, h);
    InradiusOptions opts;
    opts.center_pitch = 2 * h;
    opts.R_list = {1.0};
    opts.solver.cascade_levels = 2;
    opts.with_gamma_curve = false;
    auto rep = strict_inradius(omega, 1.5, opts);
    REQUIRE(rep.delta_curve.size() == 1);
    const auto& d = rep.delta_curve[0];
    CHECK(d.delta > 0.0);
    CHECK(d.gamma > 0.0);
    CHECK(d.gamma <= 1.0);
    const double cball = ball_window_capacity(omega, 1.0, 1.5, opts);
    CHECK(d.gamma == doctest::Approx(std::min(1.0, d.delta / cball)).epsilon(1e-9));
    CHECK(1.0 > rep.rho_hat + 2 * h);  // R above rho so gamma must be positive
  }

  TEST_CASE("rho via sobolev and via wiener agree within 2h") {
    const double h = 1.0 / 32;
    CellMask omega = mask2(kDisk1, -1.5, 1.5, h);
    InradiusOptions so;
    so.solver.cascade_levels = 2;
    so.with_gamma_curve = false;
    InradiusOptions wi = so;
    wi.capacity = CapacityKind::Wiener;
    for (double p : {1.5, 3.0}) {
      auto a = strict_inradius(omega, p, so);
      auto b = strict_inradius(omega, p, wi);
      CHECK(std::abs(a.rho_hat - b.rho_hat) <= 2 * h);
    }
  }
}
