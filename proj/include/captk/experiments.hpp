// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "captk/eigen.hpp"
#include "captk/inradius.hpp"

namespace captk {

// Shared knobs for the verification harnesses. Every report embeds them.
struct ExperimentOptions {
  double tol = 0.05;        // multiplicative slack on inequality checks
  double margin = 1.0;      // ambient frame width beyond the domain hull
  std::uint64_t seed = 1;
  SolverOptions solver;
  EigenOptions eigen;
  InradiusOptions inradius;
  int jobs = 1;
};

struct LowerRecord {
  double R = 0;
  double delta = 0;
  double gamma = 0;
  double ext_norm = 1;
  double lhs = 0;        // delta / (R^n ||E_R||^p)
  bool pass = true;      // lhs <= lambda (1 + tol)
  double empirical_C = 0;
};

// Upper/lower bound verification for one domain.
struct BoundsReport {
  std::string domain_id;
  double p = 2;
  double h = 0;
  double lambda_hat = 0;
  double lambda_ball = 0;  // unit-ball eigenvalue at matched h
  double rho_hat = 0;
  double upper_margin = 0;  // lambda_ball / (rho^p lambda); >= 1 up to slack
  bool upper_pass = true;
  std::vector<LowerRecord> lower;
  bool lower_pass = true;
  double c_spread = 0;  // max/min of the empirical constants across R
  double tol = 0.05;
  nlohmann::json provenance;
};

BoundsReport check_upper_bound(const DomainSpec& spec, double p, double h,
                               const ExperimentOptions& opts = {});

BoundsReport check_lower_bounds(const DomainSpec& spec, double p, double h,
                                const std::vector<double>& R_list,
                                const ExperimentOptions& opts = {});

struct ContinuityRow {
  int j = 0;
  double cap = 0;          // capacity of the obstacle
  double lambda = 0;       // eigenvalue of the punctured domain
  double gap = 0;          // lambda - lambda(D)
  double hj_norm_pow = 0;  // ||h_j||_p^p of the harmonic transfer
  double diag_bound = 0;   // 2^{p-1} (2C+1) cap
  bool diag_pass = true;
};

struct ContinuityReport {
  std::string domain_id;
  double h = 0;
  struct PerP {
    double p = 2;
    double lambda_base = 0;
    std::vector<ContinuityRow> rows;
    bool monotone = true;  // lambda nonincreasing as obstacles shrink
    double last_gap_rel = 0;
  };
  std::vector<PerP> per_p;
  nlohmann::json provenance;
};

// Obstacles must be nested and shrinking; the diagnostic solves the p-harmonic
// transfer of the base eigenfunction and checks its norm against the
// capacity-controlled bound.
ContinuityReport continuity_experiment(const DomainSpec& domain,
                                       const std::vector<DomainSpec>& obstacles,
                                       const std::vector<double>& p_list, double h,
                                       bool diagnostic = true,
                                       const ExperimentOptions& opts = {});

struct PoincareReport {
  double R = 0;  // cube side
  double p = 2;
  double h = 0;
  int samples = 0;
  double cap = 0;           // capacity of the vanishing set
  double ext_norm = 1;
  double measured_max = 0;  // max ||f||_p / ||grad f||_p over the samples
  double bound = 0;         // m(cube)^{1/p} ||E|| / cap^{1/p}
  double slack = 0;         // bound / measured_max
  bool pass = true;
  bool inconclusive = false;  // capacity vanished at this resolution
  nlohmann::json provenance;
};

PoincareReport vanishing_set_poincare_check(double cube_side, const DomainSpec& K, double p,
                                            int samples, double h,
                                            const ExperimentOptions& opts = {});

struct FamilyEntry {
  double L = 0;
  double lambda = 0;
  double rho = 0;
  double h = 0;
};

struct FamilyReport {
  std::string name;
  std::vector<FamilyEntry> entries;
  std::string lambda_verdict;  // "holds" | "fails" | "inconclusive"
  std::string rho_verdict;
  bool agree = true;
};

struct EquivalenceReport {
  double p = 2;
  std::vector<FamilyReport> families;
  bool all_agree = true;
  nlohmann::json provenance;
};

// One suite family: explicit domain documents plus their size parameters.
struct SuiteFamily {
  std::string name;
  bool scale_h_with_L = false;
  std::vector<double> sizes;
  std::vector<DomainSpec> domains;  // one per size
};

std::vector<SuiteFamily> load_suite(const std::string& path);

EquivalenceReport equivalence_suite(const std::vector<SuiteFamily>& families, double p, double h,
                                    const ExperimentOptions& opts = {});

// JSON serialization of the reports (sorted keys, shortest floats).
nlohmann::json to_json(const BoundsReport& r);
nlohmann::json to_json(const ContinuityReport& r);
nlohmann::json to_json(const PoincareReport& r);
nlohmann::json to_json(const EquivalenceReport& r);

}  // namespace captk
