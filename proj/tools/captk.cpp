// SPDX-License-Identifier: Apache-2.0
//
// captk: capacity / eigenvalue / inradius computations and the verification
// harnesses, driven by domain-spec documents.
//
// Exit codes: 0 success, 1 failed inequality check, 2 usage error,
// 3 solver non-convergence.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "captk/capacity.hpp"
#include "captk/eigen.hpp"
#include "captk/experiments.hpp"
#include "captk/inradius.hpp"
#include "captk/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace captk;

namespace {

struct CommonArgs {
  std::string spec_path;
  double p = 2.0;
  double h = 1.0 / 64;
  double margin = 1.0;
  std::vector<double> R;
  std::vector<double> eps;
  std::vector<double> gamma_grid;
  std::uint64_t seed = 1;
  double tol = 0.05;
  int jobs = 1;
  std::string out = ".";
  std::string format = "json";
  std::string capacity_kind = "sobolev";
};

void add_common(CLI::App* cmd, CommonArgs& a, bool needs_spec = true) {
  auto* s = cmd->add_option("--spec", a.spec_path, "domain-spec document (JSON)");
  if (needs_spec) s->required();
  cmd->add_option("--p", a.p, "exponent in (1, inf)");
  cmd->add_option("--h", a.h, "grid spacing");
  cmd->add_option("--margin", a.margin, "ambient frame width beyond the domain hull");
  cmd->add_option("--R", a.R, "ball radii");
  cmd->add_option("--eps", a.eps, "epsilon thresholds (absolute, descending)");
  cmd->add_option("--gamma-grid", a.gamma_grid, "gamma values in (0,1)");
  cmd->add_option("--seed", a.seed, "random seed");
  cmd->add_option("--tol", a.tol, "inequality slack");
  cmd->add_option("--jobs", a.jobs, "worker bound (results are identical for any value)");
  cmd->add_option("--out", a.out, "output directory");
  cmd->add_option("--format", a.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--capacity", a.capacity_kind, "sobolev or wiener")
      ->check(CLI::IsMember({"sobolev", "wiener"}));
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json resolved_config(const CommonArgs& a, const std::string& command) {
  json j;
  j["command"] = command;
  j["spec"] = a.spec_path;
  j["p"] = a.p;
  j["h"] = a.h;
  j["margin"] = a.margin;
  j["R"] = a.R;
  j["eps"] = a.eps;
  j["gamma_grid"] = a.gamma_grid;
  j["seed"] = a.seed;
  j["tol"] = a.tol;
  j["jobs"] = a.jobs;
  j["format"] = a.format;
  j["capacity"] = a.capacity_kind;
  return j;
}

// input hash covers the resolved config and the spec document bytes
std::string input_hash(const json& config, const std::string& spec_bytes) {
  return hash_hex(content_hash(config.dump() + "\n" + spec_bytes));
}

void validate_common(const CommonArgs& a) {
  if (!(a.p > 1.0)) throw CLI::ValidationError("--p", "p must lie in (1, inf)");
  if (!(a.h > 0)) throw CLI::ValidationError("--h", "h must be positive");
  if (a.jobs < 1) throw CLI::ValidationError("--jobs", "jobs must be >= 1");
}

ExperimentOptions experiment_options(const CommonArgs& a) {
  ExperimentOptions o;
  o.tol = a.tol;
  o.margin = a.margin;
  o.seed = a.seed;
  o.jobs = a.jobs;
  o.inradius.capacity =
      a.capacity_kind == "wiener" ? CapacityKind::Wiener : CapacityKind::Sobolev;
  if (!a.eps.empty()) o.inradius.epsilons = a.eps;
  if (!a.gamma_grid.empty()) o.inradius.gamma_grid = a.gamma_grid;
  return o;
}

void write_report(const CommonArgs& a, const std::string& name, json body,
                  const std::vector<CsvRow>& curve = {}) {
  fs::create_directories(a.out);
  const std::string path = (fs::path(a.out) / (name + ".json")).string();
  write_text_file(path, body.dump(2) + "\n");
  if (a.format == "csv" && !curve.empty())
    write_text_file((fs::path(a.out) / (name + ".csv")).string(), to_csv(curve));
}

int run_capacity(const CommonArgs& a) {
  const std::string bytes = read_file(a.spec_path);
  DomainSpec spec = parse_domain_spec(bytes);
  auto hb = hull(spec);
  if (!hb) throw std::runtime_error("capacity: spec must be bounded");
  Grid g = cover_box(spec.dim, *hb, a.h, a.margin);
  CellMask K = rasterize(spec, g, MaskKind::CompactSet);
  SolverOptions so;
  so.cascade_levels = 3;
  const CapacityKind kind =
      a.capacity_kind == "wiener" ? CapacityKind::Wiener : CapacityKind::Sobolev;
  auto est = compute_capacity(K, a.p, kind, so);

  json config = resolved_config(a, "capacity");
  json rep = make_report(input_hash(config, bytes), a.seed,
                         {{"h", g.h}, {"dims", {g.dims[0], g.dims[1], g.dims[2]}}}, config);
  rep["results"].push_back({{"value", est.value},
                            {"kind", a.capacity_kind},
                            {"p", est.p},
                            {"margin", est.margin},
                            {"iterations", est.solver.iterations},
                            {"final_decrement", est.solver.final_decrement},
                            {"constraint_violation", est.solver.constraint_violation},
                            {"converged", est.solver.converged}});
  if (!est.solver.converged) rep["flags"].push_back("non-converged");
  write_report(a, "capacity", rep);
  return est.solver.converged ? 0 : 3;
}

int run_eigen(const CommonArgs& a) {
  const std::string bytes = read_file(a.spec_path);
  DomainSpec spec = parse_domain_spec(bytes);
  auto hb = hull(spec);
  if (!hb) throw std::runtime_error("eigen: spec must be bounded");
  Grid g = cover_box(spec.dim, *hb, a.h, a.margin);
  CellMask omega = rasterize(spec, g, MaskKind::OpenSet);
  EigenOptions eo;
  eo.inner.cascade_levels = 3;
  auto est = principal_rayleigh(omega, a.p, eo);

  json config = resolved_config(a, "eigen");
  json rep = make_report(input_hash(config, bytes), a.seed,
                         {{"h", g.h}, {"dims", {g.dims[0], g.dims[1], g.dims[2]}}}, config);
  rep["results"].push_back({{"lambda", est.lambda},
                            {"p", est.p},
                            {"residual", est.residual},
                            {"iterations", est.iterations},
                            {"connected", est.connected},
                            {"converged", est.converged}});
  if (!est.converged) rep["flags"].push_back("non-converged");
  if (!est.connected) rep["flags"].push_back("disconnected");
  write_report(a, "eigen", rep);
  return est.converged ? 0 : 3;
}

int run_inradius(const CommonArgs& a) {
  const std::string bytes = read_file(a.spec_path);
  DomainSpec spec = parse_domain_spec(bytes);
  auto hb = hull(spec);
  if (!hb) throw std::runtime_error("inradius: spec must be bounded");
  Grid g = cover_box(spec.dim, *hb, a.h, a.margin);
  CellMask omega = rasterize(spec, g, MaskKind::OpenSet);
  InradiusOptions io;
  io.capacity = a.capacity_kind == "wiener" ? CapacityKind::Wiener : CapacityKind::Sobolev;
  io.epsilons = a.eps;
  io.gamma_grid = a.gamma_grid;
  io.R_list = a.R;
  auto rep_in = strict_inradius(omega, a.p, io);

  json config = resolved_config(a, "inradius");
  json rep = make_report(input_hash(config, bytes), a.seed,
                         {{"h", g.h}, {"dims", {g.dims[0], g.dims[1], g.dims[2]}}}, config);
  json eps_curve = json::array();
  std::vector<CsvRow> curve;
  for (const auto& ep : rep_in.epsilon_curve) {
    eps_curve.push_back({{"epsilon", ep.epsilon},
                         {"radius", ep.radius},
                         {"witness", {ep.witness[0], ep.witness[1], ep.witness[2]}},
                         {"saturated", ep.saturated}});
    curve.push_back({format_double(ep.epsilon), ep.radius, rep_in.bisect_tol, true});
  }
  json gamma_curve = json::array();
  for (const auto& gp : rep_in.gamma_curve)
    gamma_curve.push_back({{"gamma", gp.gamma}, {"radius", gp.radius}});
  json delta_curve = json::array();
  for (const auto& dp : rep_in.delta_curve)
    delta_curve.push_back({{"R", dp.R},
                           {"delta", dp.delta},
                           {"gamma", dp.gamma},
                           {"witness", {dp.witness[0], dp.witness[1], dp.witness[2]}}});
  rep["results"].push_back({{"rho_hat", rep_in.rho_hat},
                            {"geometric_inradius", rep_in.geometric},
                            {"cell_floor", rep_in.cell_floor},
                            {"epsilon_curve", eps_curve},
                            {"gamma_curve", gamma_curve},
                            {"delta_curve", delta_curve},
                            {"center_pitch", rep_in.center_pitch},
                            {"bisect_tol", rep_in.bisect_tol}});
  rep["flags"].push_back("complement truncated to the ambient box plus query windows");
  if (rep_in.solver_trouble) rep["flags"].push_back("non-converged");
  write_report(a, "inradius", rep, curve);
  return rep_in.solver_trouble ? 3 : 0;
}

int run_verify(const CommonArgs& a, const std::string& what, const std::string& suite_path) {
  json config = resolved_config(a, "verify " + what);
  int rc = 0;
  if (what == "equivalence") {
    auto families = load_suite(suite_path);
    auto rep = equivalence_suite(families, a.p, a.h, experiment_options(a));
    json out = make_report(input_hash(config, read_file(suite_path)), a.seed,
                           {{"h", a.h}}, config);
    out["results"].push_back(to_json(rep));
    std::vector<CsvRow> curve;
    for (const auto& f : rep.families)
      for (const auto& e : f.entries)
        curve.push_back({f.name + ":L=" + format_double(e.L), e.lambda, 0.0, f.agree});
    if (!rep.all_agree) rc = 1;
    write_report(a, "verify_equivalence", out, curve);
    return rc;
  }

  const std::string bytes = read_file(a.spec_path);
  DomainSpec spec = parse_domain_spec(bytes);
  json out = make_report(input_hash(config, bytes), a.seed, {{"h", a.h}}, config);
  std::vector<CsvRow> curve;
  if (what == "upper") {
    auto rep = check_upper_bound(spec, a.p, a.h, experiment_options(a));
    out["results"].push_back(to_json(rep));
    curve.push_back({"upper_margin", rep.upper_margin, a.tol, rep.upper_pass});
    rc = rep.upper_pass ? 0 : 1;
    write_report(a, "verify_upper", out, curve);
  } else if (what == "lower") {
    std::vector<double> R = a.R.empty() ? std::vector<double>{1.0} : a.R;
    auto rep = check_lower_bounds(spec, a.p, a.h, R, experiment_options(a));
    out["results"].push_back(to_json(rep));
    for (const auto& rec : rep.lower)
      curve.push_back({"R=" + format_double(rec.R), rec.lhs, a.tol, rec.pass});
    rc = rep.lower_pass ? 0 : 1;
    write_report(a, "verify_lower", out, curve);
  } else if (what == "continuity") {
    std::vector<DomainSpec> obstacles;
    for (int j = 1; j <= 6; ++j) {
      DomainSpec ob;
      ob.dim = spec.dim;
      ob.root.kind = ShapeKind::Ball;
      ob.root.a = {0, 0, 0};
      ob.root.s = std::pow(2.0, -j);
      obstacles.push_back(ob);
    }
    auto rep = continuity_experiment(spec, obstacles, {a.p}, a.h, true, experiment_options(a));
    out["results"].push_back(to_json(rep));
    bool pass = true;
    for (const auto& pp : rep.per_p) {
      pass = pass && pp.monotone;
      for (const auto& row : pp.rows) {
        pass = pass && row.diag_pass;
        curve.push_back({"j=" + std::to_string(row.j), row.lambda, a.tol, row.diag_pass});
      }
    }
    rc = pass ? 0 : 1;
    write_report(a, "verify_continuity", out, curve);
  } else if (what == "poincare") {
    const double side = a.R.empty() ? 1.0 : a.R[0];
    auto rep = vanishing_set_poincare_check(side, spec, a.p, 200, a.h, experiment_options(a));
    out["results"].push_back(to_json(rep));
    curve.push_back({"measured_max", rep.measured_max, a.tol, rep.pass});
    rc = rep.inconclusive ? 3 : (rep.pass ? 0 : 1);
    write_report(a, "verify_poincare", out, curve);
  } else {
    throw CLI::ValidationError("verify", "unknown verify target");
  }
  return rc;
}

int run_sweep(const CommonArgs& a, const std::string& target, const std::string& axis,
              const std::vector<double>& values) {
  if (values.empty()) throw CLI::ValidationError("--values", "varied axis needs values");
  const std::string bytes = read_file(a.spec_path);
  DomainSpec spec = parse_domain_spec(bytes);
  json config = resolved_config(a, "sweep " + target);
  config["vary"] = axis;
  config["values"] = values;

  std::vector<CsvRow> rows;
  for (double v : values) {
    CommonArgs b = a;
    double param = v;
    if (axis == "h")
      b.h = v;
    else if (axis == "p")
      b.p = v;
    else if (axis == "R")
      b.R = {v};
    else if (axis == "gamma")
      b.gamma_grid = {v};
    else if (axis == "eps")
      b.eps = {v};
    else
      throw CLI::ValidationError("--vary", "unknown axis");

    auto hb = hull(spec);
    if (!hb) throw std::runtime_error("sweep: spec must be bounded");
    Grid g = cover_box(spec.dim, *hb, b.h, b.margin);
    double value = 0;
    if (target == "eigen") {
      EigenOptions eo;
      eo.inner.cascade_levels = 3;
      value = principal_rayleigh(rasterize(spec, g, MaskKind::OpenSet), b.p, eo).lambda;
    } else if (target == "capacity") {
      SolverOptions so;
      so.cascade_levels = 3;
      const CapacityKind kind =
          b.capacity_kind == "wiener" ? CapacityKind::Wiener : CapacityKind::Sobolev;
      value = compute_capacity(rasterize(spec, g, MaskKind::CompactSet), b.p, kind, so).value;
    } else if (target == "inradius") {
      InradiusOptions io;
      if (!b.eps.empty()) io.epsilons = b.eps;
      value = strict_inradius(rasterize(spec, g, MaskKind::OpenSet), b.p, io).rho_hat;
    } else if (target == "mazya-shubin") {
      InradiusOptions io;
      const double gm = b.gamma_grid.empty() ? 0.5 : b.gamma_grid[0];
      value = mazya_shubin_radius(rasterize(spec, g, MaskKind::OpenSet), gm, b.p, io);
    } else {
      throw CLI::ValidationError("sweep", "unknown target");
    }
    rows.push_back({format_double(param), value, 0.0, true});
  }

  fs::create_directories(a.out);
  write_text_file((fs::path(a.out) / "sweep.csv").string(), to_csv(rows));
  json manifest = make_report(input_hash(config, bytes), a.seed, {{"h", a.h}}, config);
  for (const auto& r : rows)
    manifest["results"].push_back({{"parameter", r.parameter}, {"value", r.value}});
  write_text_file((fs::path(a.out) / "sweep.json").string(), manifest.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"potential-theory numerics: capacities, principal eigenvalues, inradii"};
  app.require_subcommand(1);

  CommonArgs a;
  std::string verify_what;
  std::string suite_path;
  std::string sweep_target, sweep_axis;
  std::vector<double> sweep_values;

  auto* cap = app.add_subcommand("capacity", "capacity of a compact set");
  add_common(cap, a);
  auto* eig = app.add_subcommand("eigen", "principal p-Laplacian eigenvalue");
  add_common(eig, a);
  auto* inr = app.add_subcommand("inradius", "strict capacitary inradius report");
  add_common(inr, a);

  auto* ver = app.add_subcommand("verify", "theorem-level checks");
  ver->add_option("what", verify_what, "upper | lower | continuity | poincare | equivalence")
      ->required()
      ->check(CLI::IsMember({"upper", "lower", "continuity", "poincare", "equivalence"}));
  add_common(ver, a, false);
  ver->add_option("--suite", suite_path, "suite document for the equivalence run");

  auto* sw = app.add_subcommand("sweep", "one varied axis, CSV output");
  sw->add_option("target", sweep_target, "eigen | capacity | inradius | mazya-shubin")
      ->required()
      ->check(CLI::IsMember({"eigen", "capacity", "inradius", "mazya-shubin"}));
  add_common(sw, a);
  sw->add_option("--vary", sweep_axis, "h | p | R | gamma | eps")->required();
  sw->add_option("--values", sweep_values, "axis values")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    validate_common(a);
    if (cap->parsed()) return run_capacity(a);
    if (eig->parsed()) return run_eigen(a);
    if (inr->parsed()) return run_inradius(a);
    if (ver->parsed()) {
      if (verify_what == "equivalence") {
        if (suite_path.empty()) throw CLI::ValidationError("--suite", "equivalence needs a suite");
      } else if (a.spec_path.empty()) {
        throw CLI::ValidationError("--spec", "this verify target needs a spec");
      }
      return run_verify(a, verify_what, suite_path);
    }
    if (sw->parsed()) return run_sweep(a, sweep_target, sweep_axis, sweep_values);
  } catch (const CLI::Error& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "spec error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 2;
}
