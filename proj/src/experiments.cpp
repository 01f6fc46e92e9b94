// SPDX-License-Identifier: Apache-2.0
#include "captk/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "captk/randfields.hpp"
#include "captk/report.hpp"

namespace captk {
namespace {

using nlohmann::json;

Grid domain_grid(const DomainSpec& spec, double h, double margin) {
  auto hb = hull(spec);
  if (!hb) throw std::invalid_argument("experiment: domain must be bounded");
  return cover_box(spec.dim, *hb, h, margin);
}

DomainSpec unit_ball_spec(int dim) {
  DomainSpec s;
  s.dim = dim;
  s.root.kind = ShapeKind::Ball;
  s.root.a = {0, 0, 0};
  s.root.s = 1.0;
  return s;
}

json base_provenance(const ExperimentOptions& opts, double h) {
  json j;
  j["h"] = h;
  j["margin"] = opts.margin;
  j["seed"] = opts.seed;
  j["tol"] = opts.tol;
  j["solver"] = {{"rel_tol", opts.solver.rel_tol},
                 {"max_iters", opts.solver.max_iters},
                 {"cascade_levels", opts.solver.cascade_levels}};
  j["tool_version"] = kToolVersion;
  return j;
}

}  // namespace

BoundsReport check_upper_bound(const DomainSpec& spec, double p, double h,
                               const ExperimentOptions& opts) {
  validate_p(p);
  BoundsReport rep;
  rep.p = p;
  rep.h = h;
  rep.tol = opts.tol;
  rep.provenance = base_provenance(opts, h);

  Grid g = domain_grid(spec, h, opts.margin);
  CellMask omega = rasterize(spec, g, MaskKind::OpenSet);
  EigenOptions eo = opts.eigen;
  if (eo.inner.cascade_levels == 1) eo.inner.cascade_levels = 3;
  rep.lambda_hat = principal_rayleigh(omega, p, eo).lambda;

  DomainSpec ball = unit_ball_spec(spec.dim);
  Grid bg = domain_grid(ball, h, opts.margin);
  CellMask bmask = rasterize(ball, bg, MaskKind::OpenSet);
  if (bmask.grid.same_layout(omega.grid) && bmask.bits == omega.bits)
    rep.lambda_ball = rep.lambda_hat;  // the domain is the unit ball itself
  else
    rep.lambda_ball = principal_rayleigh(bmask, p, eo).lambda;

  InradiusOptions io = opts.inradius;
  io.solver.cascade_levels = std::max(io.solver.cascade_levels, 2);
  rep.rho_hat = strict_inradius(omega, p, io).rho_hat;

  const double lhs = std::pow(rep.rho_hat, p) * rep.lambda_hat;
  rep.upper_margin = rep.lambda_ball / lhs;
  rep.upper_pass = lhs <= rep.lambda_ball * (1.0 + opts.tol);
  return rep;
}

BoundsReport check_lower_bounds(const DomainSpec& spec, double p, double h,
                                const std::vector<double>& R_list,
                                const ExperimentOptions& opts) {
  validate_p(p);
  if (R_list.empty()) throw std::invalid_argument("check_lower_bounds: empty R list");
  BoundsReport rep;
  rep.p = p;
  rep.h = h;
  rep.tol = opts.tol;
  rep.provenance = base_provenance(opts, h);

  double rmax = 0;
  for (double R : R_list) rmax = std::max(rmax, R);
  ExperimentOptions o = opts;
  o.margin = std::max(opts.margin, 2.0 * rmax);  // ambient frame covers the queried balls

  Grid g = domain_grid(spec, h, o.margin);
  CellMask omega = rasterize(spec, g, MaskKind::OpenSet);
  EigenOptions eo = o.eigen;
  if (eo.inner.cascade_levels == 1) eo.inner.cascade_levels = 3;
  rep.lambda_hat = principal_rayleigh(omega, p, eo).lambda;

  InradiusOptions io = o.inradius;
  io.solver.cascade_levels = std::max(io.solver.cascade_levels, 2);
  rep.rho_hat = strict_inradius(omega, p, io).rho_hat;

  for (double R : R_list)
    if (R <= rep.rho_hat)
      throw std::invalid_argument("check_lower_bounds: R must exceed the capacitary inradius");

  const int n = spec.dim;
  double cmin = 1e300, cmax = 0;
  for (double R : R_list) {
    LowerRecord rec;
    rec.R = R;
    auto d = delta_R(omega, R, p, io);
    rec.delta = d.value;
    const double cball = ball_window_capacity(omega, R, p, io);
    rec.gamma = cball > 0 ? std::min(1.0, rec.delta / cball) : 0.0;
    const int cells_per_R = std::clamp<int>(static_cast<int>(std::llround(R / h)), 8, 32);
    rec.ext_norm = extension_norm_estimate(R, p, n, cells_per_R, 16, o.seed).norm;
    rec.lhs = rec.delta / (std::pow(R, n) * std::pow(rec.ext_norm, p));
    rec.pass = rec.lhs <= rep.lambda_hat * (1.0 + o.tol);
    rec.empirical_C = p < double(n) ? rep.lambda_hat * std::pow(R, p) / rec.gamma
                                    : rep.lambda_hat * (1.0 + std::pow(R, p)) / rec.gamma;
    cmin = std::min(cmin, rec.empirical_C);
    cmax = std::max(cmax, rec.empirical_C);
    rep.lower.push_back(rec);
  }
  rep.c_spread = cmin > 0 ? cmax / cmin : std::numeric_limits<double>::infinity();
  rep.lower_pass = cmin > 0 && rep.c_spread <= 10.0;
  for (const auto& rec : rep.lower) rep.lower_pass = rep.lower_pass && rec.pass;
  return rep;
}

ContinuityReport continuity_experiment(const DomainSpec& domain,
                                       const std::vector<DomainSpec>& obstacles,
                                       const std::vector<double>& p_list, double h,
                                       bool diagnostic, const ExperimentOptions& opts) {
  ContinuityReport rep;
  rep.h = h;
  rep.provenance = base_provenance(opts, h);
  Grid g = domain_grid(domain, h, opts.margin);
  CellMask dmask = rasterize(domain, g, MaskKind::OpenSet);

  EigenOptions eo = opts.eigen;
  if (eo.inner.cascade_levels == 1) eo.inner.cascade_levels = 3;

  for (double p : p_list) {
    validate_p(p);
    ContinuityReport::PerP row;
    row.p = p;
    auto base = principal_rayleigh(dmask, p, eo);
    row.lambda_base = base.lambda;
    const double C = std::pow(base.lambda, -1.0 / p);

    // 0 < phi <= 1 for the transfer diagnostic
    ScalarField phi = base.field;
    double pmax = 0;
    for (double v : phi.values) pmax = std::max(pmax, v);
    for (auto& v : phi.values) v /= pmax;

    double prev_lambda = std::numeric_limits<double>::infinity();
    int j = 0;
    for (const auto& obstacle : obstacles) {
      ++j;
      // punctured domain: domain minus the obstacle
      DomainSpec punct = domain;
      ShapeExpr inter;
      inter.kind = ShapeKind::Intersect;
      ShapeExpr comp;
      comp.kind = ShapeKind::Complement;
      comp.children.push_back(obstacle.root);
      inter.children.push_back(domain.root);
      inter.children.push_back(comp);
      punct.root = std::move(inter);
      CellMask pmask = rasterize(punct, g, MaskKind::OpenSet);

      ContinuityRow r;
      r.j = j;
      auto ohull = hull(obstacle);
      if (!ohull) throw std::invalid_argument("continuity: obstacles must be bounded");
      Grid og = cover_box(domain.dim, *ohull, h, 1.5);
      r.cap = compute_capacity(rasterize(obstacle, og, MaskKind::CompactSet), p,
                               opts.inradius.capacity, opts.solver)
                  .value;
      r.lambda = principal_rayleigh(pmask, p, eo).lambda;
      r.gap = r.lambda - base.lambda;
      row.monotone = row.monotone && r.lambda <= prev_lambda * (1.0 + 1e-6);
      prev_lambda = r.lambda;

      if (diagnostic) {
        ScalarField zero = ScalarField::zeros(g);
        SolverOptions so = opts.solver;
        ScalarField hj = p_dirichlet_solve(pmask, p, phi, zero, so);
        // the transfer lives on the punctured domain only
        r.hj_norm_pow = std::pow(lp_norm(hj, p, pmask), p);
        r.diag_bound = std::pow(2.0, p - 1.0) * (2.0 * C + 1.0) * r.cap;
        r.diag_pass = r.hj_norm_pow <= r.diag_bound * (1.0 + opts.tol);
      }
      row.rows.push_back(r);
    }
    if (!row.rows.empty()) row.last_gap_rel = row.rows.back().gap / base.lambda;
    rep.per_p.push_back(std::move(row));
  }
  return rep;
}

PoincareReport vanishing_set_poincare_check(double cube_side, const DomainSpec& K, double p,
                                            int samples, double h, const ExperimentOptions& opts) {
  validate_p(p);
  PoincareReport rep;
  rep.R = cube_side;
  rep.p = p;
  rep.h = h;
  rep.samples = samples;
  rep.provenance = base_provenance(opts, h);

  const int dim = K.dim;
  Grid g;
  g.dim = dim;
  g.h = h;
  const std::int64_t q = static_cast<std::int64_t>(std::llround(cube_side / h));
  for (int i = 0; i < dim; ++i) {
    g.lo[i] = 0;
    g.dims[i] = q;
  }
  CellMask cube_all{g, MaskKind::OpenSet,
                    std::vector<std::uint8_t>(static_cast<std::size_t>(g.cell_count()), 1), false};

  auto khull = hull(K);
  if (!khull) throw std::invalid_argument("poincare check: vanishing set must be bounded");
  Grid kg = cover_box(dim, *khull, h, 1.5);
  rep.cap = compute_capacity(rasterize(K, kg, MaskKind::CompactSet), p, opts.inradius.capacity,
                             opts.solver)
                .value;
  if (rep.cap < 1e-12) {
    rep.inconclusive = true;
    rep.pass = false;
    return rep;
  }

  CellMask kmask = rasterize(K, g, MaskKind::CompactSet);
  // smooth bump vanishing on a neighborhood of K
  std::vector<std::uint8_t> ksite(static_cast<std::size_t>(g.node_count()), 0);
  {
    std::int64_t idx = 0;
    for (std::int64_t z = 0; z < g.dims[2]; ++z)
      for (std::int64_t y = 0; y < g.dims[1]; ++y)
        for (std::int64_t x = 0; x < g.dims[0]; ++x, ++idx) {
          if (!kmask.bits[idx]) continue;
          for (std::int64_t dz = 0; dz <= (dim >= 3 ? 1 : 0); ++dz)
            for (std::int64_t dy = 0; dy <= (dim >= 2 ? 1 : 0); ++dy)
              for (std::int64_t dx = 0; dx <= 1; ++dx)
                ksite[g.node_index(x + dx, y + dy, z + dz)] = 1;
        }
  }
  auto d2 = node_distance_sq(g, ksite);
  const double w = 4.0;  // neighborhood width in cells
  std::vector<double> bump(d2.size());
  for (std::size_t i = 0; i < bump.size(); ++i) {
    const double t = std::min(1.0, std::sqrt(d2[i]) / w);
    bump[i] = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
  }

  const int cells_per_R = std::clamp<int>(static_cast<int>(q), 8, 32);
  rep.ext_norm = extension_norm_estimate(cube_side, p, dim, cells_per_R, 16, opts.seed).norm;

  CounterRng rng(opts.seed, 0x70c1e);
  Aabb box;
  for (int i = 0; i < dim; ++i) {
    box.lo[i] = 0;
    box.hi[i] = cube_side;
  }
  double measured = 0;
  for (int t = 0; t < samples; ++t) {
    BumpField bf = random_bumps(dim, box, std::max(4 * h, cube_side / 16), cube_side / 4, rng, t);
    ScalarField f = bf.sample(g);
    for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] *= bump[i];
    const double gn = lp_norm(gradient(f), p, cube_all);
    if (gn <= 0) continue;
    measured = std::max(measured, lp_norm(f, p, cube_all) / gn);
  }
  rep.measured_max = measured;
  double mcube = 1;
  for (int i = 0; i < dim; ++i) mcube *= cube_side;
  rep.bound = std::pow(mcube, 1.0 / p) * rep.ext_norm / std::pow(rep.cap, 1.0 / p);
  rep.slack = measured > 0 ? rep.bound / measured : std::numeric_limits<double>::infinity();
  rep.pass = measured <= rep.bound;
  return rep;
}

std::vector<SuiteFamily> load_suite(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open suite file: " + path);
  json doc = json::parse(f);
  std::vector<SuiteFamily> out;
  for (const auto& fam : doc.at("families")) {
    SuiteFamily sf;
    sf.name = fam.at("name").get<std::string>();
    sf.scale_h_with_L = fam.value("scale_h_with_L", false);
    for (const auto& entry : fam.at("entries")) {
      sf.sizes.push_back(entry.at("L").get<double>());
      sf.domains.push_back(parse_domain_spec(entry.at("spec").dump()));
    }
    out.push_back(std::move(sf));
  }
  return out;
}

EquivalenceReport equivalence_suite(const std::vector<SuiteFamily>& families, double p, double h,
                                    const ExperimentOptions& opts) {
  validate_p(p);
  EquivalenceReport rep;
  rep.p = p;
  rep.provenance = base_provenance(opts, h);

  for (const auto& fam : families) {
    FamilyReport fr;
    fr.name = fam.name;
    for (std::size_t i = 0; i < fam.domains.size(); ++i) {
      const double L = fam.sizes[i];
      const double hL = fam.scale_h_with_L ? h * L : h;
      FamilyEntry e;
      e.L = L;
      e.h = hL;
      Grid g = domain_grid(fam.domains[i], hL, opts.margin * (fam.scale_h_with_L ? L : 1.0));
      CellMask m = rasterize(fam.domains[i], g, MaskKind::OpenSet);
      EigenOptions eo = opts.eigen;
      if (eo.inner.cascade_levels == 1) eo.inner.cascade_levels = 3;
      e.lambda = principal_rayleigh(m, p, eo).lambda;
      InradiusOptions io = opts.inradius;
      io.solver.cascade_levels = std::max(io.solver.cascade_levels, 2);
      e.rho = strict_inradius(m, p, io).rho_hat;
      fr.entries.push_back(e);
    }
    // classification from the trailing trend
    const std::size_t k = fr.entries.size();
    if (k >= 2) {
      const auto& a = fr.entries[k - 2];
      const auto& b = fr.entries[k - 1];
      const double lr = b.lambda / a.lambda;
      if (lr >= 0.8 && lr <= 1.25)
        fr.lambda_verdict = "holds";
      else if (lr < 0.5)
        fr.lambda_verdict = "fails";
      else
        fr.lambda_verdict = "inconclusive";
      const double dr = b.rho - a.rho;
      if (dr <= 2.0 * std::max(a.h, b.h))
        fr.rho_verdict = "holds";
      else if (dr >= 0.25 * (b.L - a.L))
        fr.rho_verdict = "fails";
      else
        fr.rho_verdict = "inconclusive";
    } else {
      fr.lambda_verdict = fr.rho_verdict = "inconclusive";
    }
    fr.agree = fr.lambda_verdict == fr.rho_verdict && fr.lambda_verdict != "inconclusive";
    rep.all_agree = rep.all_agree && fr.agree;
    rep.families.push_back(std::move(fr));
  }
  return rep;
}

json to_json(const BoundsReport& r) {
  json j;
  j["domain_id"] = r.domain_id;
  j["p"] = r.p;
  j["h"] = r.h;
  j["lambda_hat"] = r.lambda_hat;
  j["lambda_ball"] = r.lambda_ball;
  j["rho_hat"] = r.rho_hat;
  j["upper_margin"] = r.upper_margin;
  j["upper_pass"] = r.upper_pass;
  j["tol"] = r.tol;
  j["lower"] = json::array();
  for (const auto& rec : r.lower) {
    j["lower"].push_back({{"R", rec.R},
                          {"delta", rec.delta},
                          {"gamma", rec.gamma},
                          {"ext_norm", rec.ext_norm},
                          {"lhs", rec.lhs},
                          {"pass", rec.pass},
                          {"empirical_C", rec.empirical_C}});
  }
  j["lower_pass"] = r.lower_pass;
  j["c_spread"] = r.c_spread;
  j["provenance"] = r.provenance;
  return j;
}

json to_json(const ContinuityReport& r) {
  json j;
  j["domain_id"] = r.domain_id;
  j["h"] = r.h;
  j["per_p"] = json::array();
  for (const auto& pp : r.per_p) {
    json rows = json::array();
    for (const auto& row : pp.rows)
      rows.push_back({{"j", row.j},
                      {"cap", row.cap},
                      {"lambda", row.lambda},
                      {"gap", row.gap},
                      {"hj_norm_pow", row.hj_norm_pow},
                      {"diag_bound", row.diag_bound},
                      {"diag_pass", row.diag_pass}});
    j["per_p"].push_back({{"p", pp.p},
                          {"lambda_base", pp.lambda_base},
                          {"rows", rows},
                          {"monotone", pp.monotone},
                          {"last_gap_rel", pp.last_gap_rel}});
  }
  j["provenance"] = r.provenance;
  return j;
}

json to_json(const PoincareReport& r) {
  json j;
  j["R"] = r.R;
  j["p"] = r.p;
  j["h"] = r.h;
  j["samples"] = r.samples;
  j["cap"] = r.cap;
  j["ext_norm"] = r.ext_norm;
  j["measured_max"] = r.measured_max;
  j["bound"] = r.bound;
  j["slack"] = r.slack;
  j["pass"] = r.pass;
  j["inconclusive"] = r.inconclusive;
  j["provenance"] = r.provenance;
  return j;
}

json to_json(const EquivalenceReport& r) {
  json j;
  j["p"] = r.p;
  j["families"] = json::array();
  for (const auto& f : r.families) {
    json entries = json::array();
    for (const auto& e : f.entries)
      entries.push_back({{"L", e.L}, {"lambda", e.lambda}, {"rho", e.rho}, {"h", e.h}});
    j["families"].push_back({{"name", f.name},
                             {"entries", entries},
                             {"lambda_verdict", f.lambda_verdict},
                             {"rho_verdict", f.rho_verdict},
                             {"agree", f.agree}});
  }
  j["all_agree"] = r.all_agree;
  j["provenance"] = r.provenance;
  return j;
}

}  // namespace captk
