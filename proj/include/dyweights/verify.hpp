#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dyweights/norms.hpp"
#include "dyweights/weight.hpp"

namespace dyweights {

// One verification check instance. Pass semantics by kind:
//   exact-identity     |lhs - rhs| <= tol * max(|lhs|, |rhs|) + tol
//   exact-inequality   lhs <= rhs * (1 + tol) + tol
//   measured-constant  always passes; ratio is the datum
struct CheckReport {
  std::string check_id;
  int depth = 0;
  std::string family;
  std::string params;
  std::uint64_t seed = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool pass = false;
  double tol = 0.0;
  std::string kind;
  std::string metadata;
};

// Inputs a check may draw on. u/v always present (may alias), b and f only
// for checks that need a symbol or a test function.
struct CheckContext {
  const Weight* u = nullptr;
  const Weight* v = nullptr;
  const LeafFn* b = nullptr;
  const LeafFn* f = nullptr;
  std::uint64_t seed = 0;
  std::string family;
  std::string params;
  double tol_identity = 1e-10;
  double tol_inequality = 1e-9;
};

// Registered check ids in canonical order.
const std::vector<std::string>& registry_ids();
bool check_needs_symbol(const std::string& id);
bool check_needs_test_fn(const std::string& id);

// Runs one check; throws std::invalid_argument for unknown ids or missing
// inputs.
CheckReport run_check(const std::string& id, const CheckContext& ctx);

// Deterministic corpus and suite driver.
struct SuiteOptions {
  std::vector<int> depths = {6, 8, 10};
  std::uint64_t seed = 20260814;
  std::optional<std::string> only_check;  // restrict to one id
  double tol_identity = 1e-10;
  double tol_inequality = 1e-9;
  int mixed_pairs = 6;        // two-weight pairs per depth
  int symbols_per_pair = 2;   // b draws per pair (plus log-v and a spike)
  int test_fns = 2;           // random f per weight
  int max_dense_depth = 8;    // dense-route checks skip deeper trees
  int threads = 0;            // 0: decide from DYWEIGHTS_THREADS, then hardware
};

struct SuiteResult {
  std::vector<CheckReport> reports;
  int total = 0;
  int passed = 0;
  int failed = 0;
  std::map<std::string, std::pair<int, int>> by_kind;  // kind -> {total, passed}
};

SuiteResult run_suite(const SuiteOptions& opt);

std::string reports_to_csv(const std::vector<CheckReport>& reports);
std::string summary_to_json(const SuiteResult& result);

// Power-weight scaling sweep. For each alpha the weight is w(x) = x^alpha at
// the given depth; the characteristic column is the exact pair
// sup_I m_I(x^-alpha) m_I(x^alpha) (closed form 1/(1-alpha^2)), and the norm
// column is the requested operator norm at u = v = w. slope/intercept fit
// log(norm) against log(characteristic).
struct SweepPoint {
  double alpha = 0.0;
  double a2 = 0.0;
  double rh1_inv = 0.0;
  double norm = 0.0;
  std::string norm_kind;
};
struct SweepResult {
  std::string target;  // square | maximal | martingale
  int depth = 0;
  std::vector<SweepPoint> points;
  double slope = 0.0;
  double intercept = 0.0;
  double max_fit_residual = 0.0;
};

SweepResult sweep_power_scaling(const std::string& target, const std::vector<double>& alphas,
                                int depth, std::uint64_t seed = 1);
std::string sweep_to_csv(const SweepResult& s);

}  // namespace dyweights
