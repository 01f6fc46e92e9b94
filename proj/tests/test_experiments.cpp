// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "captk/experiments.hpp"
#include "captk/report.hpp"

using namespace captk;

namespace {

DomainSpec spec_of(const std::string& t) { return parse_domain_spec(t); }

ExperimentOptions fast_opts() {
  ExperimentOptions o;
  o.inradius.with_gamma_curve = false;
  o.inradius.solver.cascade_levels = 2;
  o.solver.cascade_levels = 2;
  o.eigen.inner.cascade_levels = 3;
  return o;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("upper bound on the unit square, p = 2") {
    auto rep = check_upper_bound(spec_of(R"({"dim":2,"shape":{"box":{"lo":[0,0],"hi":[1,1]}}})"),
                                 2.0, 1.0 / 32, fast_opts());
    // rho ~ 1/2, lambda ~ 2 pi^2, ball ~ 5.78: margin comfortably above 1
    CHECK(rep.upper_pass);
    CHECK(rep.upper_margin >= 0.99);
    CHECK(std::abs(rep.lambda_hat - 2 * M_PI * M_PI) / (2 * M_PI * M_PI) < 0.05);
    CHECK(std::abs(rep.rho_hat - 0.5) < 0.1);
    CHECK(std::abs(rep.lambda_ball - 5.7832) / 5.7832 < 0.05);
  }

  TEST_CASE("upper bound on a strip: width sets the rate") {
    auto rep = check_upper_bound(spec_of(R"({"dim":2,"shape":{"box":{"lo":[0,0],"hi":[1,8]}}})"),
                                 2.0, 1.0 / 16, fast_opts());
    CHECK(rep.upper_pass);
    CHECK(std::abs(rep.lambda_hat - M_PI * M_PI * (1 + 1.0 / 64)) / (M_PI * M_PI) < 0.08);
  }

  TEST_CASE("upper bound near equality on the unit disk") {
    auto rep = check_upper_bound(spec_of(R"({"dim":2,"shape":{"ball":{"center":[0,0],"r":1}}})"),
                                 2.0, 1.0 / 64, fast_opts());
    CHECK(rep.upper_pass);
    CHECK(rep.upper_margin >= 1.0);
    CHECK(rep.upper_margin <= 1.06);
    CHECK(rep.lambda_ball == rep.lambda_hat);  // same mask, shared eigensolve
  }

  TEST_CASE("lower bounds on the perforated lattice") {
    auto spec = spec_of(slurp(std::string(CAPTK_SUITE_DIR) + "/perforated_lattice_4x4.json"));
    ExperimentOptions o = fast_opts();
    o.inradius.center_pitch = 0.25;
    auto rep = check_lower_bounds(spec, 1.5, 1.0 / 16, {1.0, 1.5}, o);
    for (const auto& rec : rep.lower) {
      CHECK(rec.pass);
      CHECK(rec.delta > 0.0);
      CHECK(rec.gamma > 0.0);
      CHECK(rec.gamma <= 1.0);
      CHECK(rec.ext_norm >= 1.0);
      CHECK(rec.empirical_C > 0.0);
    }
    CHECK(rep.lower_pass);
    CHECK(rep.c_spread <= 10.0);
  }

  TEST_CASE("lower bounds reject R below the inradius") {
    auto spec = spec_of(R"({"dim":2,"shape":{"box":{"lo":[0,0],"hi":[2,2]}}})");
    CHECK_THROWS_AS(check_lower_bounds(spec, 2.0, 1.0 / 16, {0.5}, fast_opts()),
                    std::invalid_argument);
  }

  TEST_CASE("continuity: vanishing obstacles leave the eigenvalue intact") {
    auto disk = spec_of(R"({"dim":2,"shape":{"ball":{"center":[0,0],"r":1}}})");
    std::vector<DomainSpec> obstacles;
    for (int j = 3; j <= 5; ++j) {
      DomainSpec ob;
      ob.dim = 2;
      ob.root.kind = ShapeKind::Ball;
      ob.root.a = {0, 0, 0};
      ob.root.s = std::pow(2.0, -j);
      obstacles.push_back(ob);
    }
    auto rep = continuity_experiment(disk, obstacles, {1.5, 3.0}, 1.0 / 32, true, fast_opts());
    REQUIRE(rep.per_p.size() == 2);
    for (const auto& pp : rep.per_p) {
      CHECK(pp.monotone);
      double prev_cap = 1e30;
      for (const auto& row : pp.rows) {
        CHECK(row.cap < prev_cap);  // shrinking obstacles lose capacity
        prev_cap = row.cap;
        CHECK(row.gap >= -1e-6 * pp.lambda_base);
        CHECK(row.diag_pass);
      }
    }
    // removability dichotomy: p > n keeps a visible gap, p < n does not
    const double gap_small_p = rep.per_p[0].last_gap_rel;
    const double gap_large_p = rep.per_p[1].last_gap_rel;
    CHECK(gap_large_p > gap_small_p);
  }

  TEST_CASE("vanishing-set bound holds with recorded slack") {
    auto K = spec_of(R"({"dim":2,"shape":{"ball":{"center":[0.5,0.5],"r":0.2}}})");
    auto rep = vanishing_set_poincare_check(1.0, K, 2.0, 40, 1.0 / 32, fast_opts());
    CHECK_FALSE(rep.inconclusive);
    CHECK(rep.pass);
    CHECK(rep.measured_max > 0.0);
    CHECK(rep.slack >= 1.0);
  }

  TEST_CASE("vanishing-set bound tightens as the set grows") {
    auto k1 = spec_of(R"({"dim":2,"shape":{"ball":{"center":[0.5,0.5],"r":0.1}}})");
    auto k2 = spec_of(R"({"dim":2,"shape":{"ball":{"center":[0.5,0.5],"r":0.3}}})");
    auto r1 = vanishing_set_poincare_check(1.0, k1, 2.0, 10, 1.0 / 32, fast_opts());
    auto r2 = vanishing_set_poincare_check(1.0, k2, 2.0, 10, 1.0 / 32, fast_opts());
    CHECK(r2.cap > r1.cap);
    CHECK(r2.bound < r1.bound);
  }

  TEST_CASE("equivalence suite classifies squares, strips and the perforated plane") {
    auto families = load_suite(std::string(CAPTK_SUITE_DIR) + "/equivalence.json");
    REQUIRE(families.size() == 3);
    // trim to a fast configuration: the full ladder runs in the acceptance suite
    for (auto& f : families) {
      while (f.sizes.size() > 3) {
        f.sizes.erase(f.sizes.begin() + 1);
        f.domains.erase(f.domains.begin() + 1);
      }
    }
    auto rep = equivalence_suite(families, 2.0, 1.0 / 16, fast_opts());
    REQUIRE(rep.families.size() == 3);
    CHECK(rep.families[0].lambda_verdict == "fails");
    CHECK(rep.families[0].rho_verdict == "fails");
    CHECK(rep.families[1].lambda_verdict == "holds");
    CHECK(rep.families[2].lambda_verdict == "holds");
    CHECK(rep.all_agree);
  }

  TEST_CASE("cli: dispatch, usage errors, byte-identical reruns") {
    const std::string bin = CAPTK_CLI_PATH;
    const std::string dir = "cli_scratch";
    std::system(("rm -rf " + dir).c_str());

    // usage error: malformed p; no outputs may appear
    int rc = std::system((bin + " verify upper --spec " + CAPTK_SUITE_DIR +
                          "/unit_square.json --p abc --out " + dir + " >/dev/null 2>&1")
                             .c_str());
    CHECK(WEXITSTATUS(rc) == 2);
    CHECK(!std::ifstream(dir + "/verify_upper.json").good());

    // capacity smoke run
    rc = std::system((bin + " capacity --spec " + CAPTK_SUITE_DIR +
                      "/disk.json --p 2 --h 0.0625 --out " + dir + " >/dev/null 2>&1")
                         .c_str());
    CHECK(WEXITSTATUS(rc) == 0);
    const std::string first = slurp(dir + "/capacity.json");
    CHECK(first.find("\"value\"") != std::string::npos);

    // determinism: identical bytes on rerun
    rc = std::system((bin + " capacity --spec " + CAPTK_SUITE_DIR +
                      "/disk.json --p 2 --h 0.0625 --out " + dir + " >/dev/null 2>&1")
                         .c_str());
    CHECK(WEXITSTATUS(rc) == 0);
    CHECK(slurp(dir + "/capacity.json") == first);

    // sweep: monotone 1-D eigenvalues toward pi^2 from below
    rc = std::system((bin + " sweep eigen --spec " + CAPTK_SUITE_DIR +
                      "/interval.json --p 2 --vary h --values 0.03125,0.015625,0.0078125 --out " +
                      dir + " >/dev/null 2>&1")
                         .c_str());
    CHECK(WEXITSTATUS(rc) == 0);
    std::ifstream csv(dir + "/sweep.csv");
    std::string line;
    std::getline(csv, line);
    CHECK(line == "parameter,value,tolerance,pass");
    std::vector<double> lams;
    while (std::getline(csv, line)) {
      const auto c1 = line.find(','), c2 = line.find(',', c1 + 1);
      lams.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
    }
    REQUIRE(lams.size() == 3);
    CHECK(lams[0] < lams[1]);
    CHECK(lams[1] < lams[2]);
    CHECK(lams[2] < M_PI * M_PI);

    // sweep without a varied axis is a usage error
    rc = std::system((bin + " sweep eigen --spec " + CAPTK_SUITE_DIR +
                      "/interval.json --p 2 --out " + dir + " >/dev/null 2>&1")
                         .c_str());
    CHECK(WEXITSTATUS(rc) == 2);
    std::system(("rm -rf " + dir).c_str());
  }
}
