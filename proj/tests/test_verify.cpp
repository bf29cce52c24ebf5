#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "dyweights/haar.hpp"
#include "dyweights/rng.hpp"
#include "dyweights/verify.hpp"
#include "dyweights/weight.hpp"

using namespace dyweights;

namespace {

CheckContext make_ctx(const Weight& u, const Weight& v, const LeafFn* b,
                      const LeafFn* f) {
  CheckContext ctx;
  ctx.u = &u;
  ctx.v = &v;
  ctx.b = b;
  ctx.f = f;
  ctx.seed = 42;
  ctx.family = "test";
  ctx.params = "unit";
  return ctx;
}

}  // namespace

TEST_CASE("registry lists every check exactly once") {
  const std::vector<std::string>& ids = registry_ids();
  CHECK(ids.size() == 29);
  const std::set<std::string> unique(ids.begin(), ids.end());
  CHECK(unique.size() == ids.size());
  for (const char* expect :
       {"CHK-PARSEVAL", "CHK-WHB", "CHK-LITTLE", "CHK-WCL", "CHK-B2",
        "CHK-BERE", "CHK-SQ-NEC", "CHK-SQ-MIXED", "CHK-PARA-MAIN", "CHK-T0",
        "CHK-SAWYER-NEC", "CHK-BLOOM", "CHK-MART-NTV", "CHK-INV-SQ"}) {
    CHECK(unique.count(expect) == 1);
  }
  CHECK(check_needs_symbol("CHK-B2"));
  CHECK(!check_needs_symbol("CHK-WHB"));
  CHECK(check_needs_test_fn("CHK-PARSEVAL"));
  CHECK(!check_needs_test_fn("CHK-B2"));
}

TEST_CASE("run_check rejects unknown ids and missing inputs") {
  const Weight u = make_random_martingale_weight(4, 0.5, 1);
  const Weight v = make_random_martingale_weight(4, 0.5, 2);
  CHECK_THROWS_AS(run_check("CHK-NOPE", make_ctx(u, v, nullptr, nullptr)),
                  std::invalid_argument);
  // CHK-B2 needs a symbol, CHK-PARSEVAL a test function.
  CHECK_THROWS_AS(run_check("CHK-B2", make_ctx(u, v, nullptr, nullptr)),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_check("CHK-PARSEVAL", make_ctx(u, v, nullptr, nullptr)),
                  std::invalid_argument);
}

TEST_CASE("run_check is deterministic") {
  const Weight u = make_random_martingale_weight(5, 0.6, 3);
  const Weight v = make_random_martingale_weight(5, 0.6, 4);
  DyadicTree tree(5);
  const LeafFn b = haar_fn(tree, DyadicTree::root);
  const CheckContext ctx = make_ctx(u, v, &b, nullptr);
  const CheckReport a = run_check("CHK-PARA-MAIN", ctx);
  const CheckReport c = run_check("CHK-PARA-MAIN", ctx);
  CHECK(a.lhs == c.lhs);
  CHECK(a.rhs == c.rhs);
  CHECK(a.ratio == c.ratio);
  CHECK(a.pass == c.pass);
  CHECK(a.check_id == std::string("CHK-PARA-MAIN"));
  CHECK(a.pass);
}

TEST_CASE("every registered check passes on a sample pair") {
  const Weight u = make_random_martingale_weight(5, 0.5, 7);
  const Weight v = make_random_martingale_weight(5, 0.5, 8);
  DyadicTree tree(5);
  LeafFn b{5, std::vector<double>(static_cast<std::size_t>(tree.leaf_count()))};
  for (std::size_t i = 0; i < b.values.size(); ++i) {
    b.values[i] = usym(mix_seed(0xB00, i));
  }
  LeafFn f = b;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    f.values[i] = usym(mix_seed(0xF00, i));
  }
  for (const std::string& id : registry_ids()) {
    const CheckReport r = run_check(id, make_ctx(u, v, &b, &f));
    INFO("check ", id, " lhs=", r.lhs, " rhs=", r.rhs);
    CHECK(r.pass);
    CHECK(std::isfinite(r.lhs));
    CHECK(std::isfinite(r.rhs));
  }
}

TEST_CASE("suite runs clean at a small depth") {
  SuiteOptions opt;
  opt.depths = {4};
  opt.threads = 1;
  const SuiteResult res = run_suite(opt);
  CHECK(res.total > 100);
  CHECK(res.failed == 0);
  CHECK(res.passed == res.total);
  CHECK(res.reports.size() == static_cast<std::size_t>(res.total));
  int by_kind_total = 0;
  for (const auto& [kind, counts] : res.by_kind) {
    CHECK((kind == "exact-identity" || kind == "exact-inequality" || kind == "measured-constant"));
    by_kind_total += counts.first;
  }
  CHECK(by_kind_total == res.total);
}

TEST_CASE("suite output is stable across runs and thread counts") {
  SuiteOptions opt;
  opt.depths = {4};
  opt.threads = 1;
  const std::string csv1 = reports_to_csv(run_suite(opt).reports);
  opt.threads = 2;
  const std::string csv2 = reports_to_csv(run_suite(opt).reports);
  CHECK(csv1 == csv2);
  CHECK(csv1.rfind("check_id,depth,family,params,seed,lhs,rhs,ratio,pass,kind,tol",
                   0) == 0);
}

TEST_CASE("suite respects the single-check filter") {
  SuiteOptions opt;
  opt.depths = {4};
  opt.threads = 1;
  opt.only_check = std::string("CHK-WHB");
  const SuiteResult res = run_suite(opt);
  CHECK(res.total > 0);
  for (const CheckReport& r : res.reports) CHECK(r.check_id == "CHK-WHB");
}

TEST_CASE("summary json is well formed") {
  SuiteOptions opt;
  opt.depths = {4};
  opt.threads = 1;
  opt.only_check = std::string("CHK-PARSEVAL");
  const SuiteResult res = run_suite(opt);
  const nlohmann::json j = nlohmann::json::parse(summary_to_json(res));
  CHECK(j.at("total").get<int>() == res.total);
  CHECK(j.at("passed").get<int>() == res.passed);
  CHECK(j.at("failed").get<int>() == 0);
  CHECK(j.at("by_kind").contains("exact-identity"));
}

TEST_CASE("csv rows match report count") {
  SuiteOptions opt;
  opt.depths = {4};
  opt.threads = 1;
  opt.only_check = std::string("CHK-BERE");
  const SuiteResult res = run_suite(opt);
  const std::string csv = reports_to_csv(res.reports);
  const std::size_t lines =
      static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
  CHECK(lines == res.reports.size() + 1);
}

TEST_CASE("sweep validates its inputs") {
  CHECK_THROWS_AS(sweep_power_scaling("square", {0.5, 0.9}, 6, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(sweep_power_scaling("square", {0.5, 0.9, 1.0}, 6, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(sweep_power_scaling("square", {0.5, 0.9, -1.2}, 6, 1),
                  std::invalid_argument);
}

TEST_CASE("sweep reports the exact flatness constants") {
  const SweepResult s = sweep_power_scaling("square", {0.3, 0.5, 0.7}, 8, 5);
  REQUIRE(s.points.size() == 3);
  for (const SweepPoint& p : s.points) {
    const double exact = 1.0 / (1.0 - p.alpha * p.alpha);
    CHECK(p.a2 == doctest::Approx(exact).epsilon(1e-12));
    CHECK(p.norm > 0.0);
    CHECK(std::isfinite(p.rh1_inv));
  }
  CHECK(std::isfinite(s.slope));
  CHECK(std::isfinite(s.intercept));
  const std::string csv = sweep_to_csv(s);
  CHECK(csv.rfind("target,depth,alpha,a2,rh1_inv,norm,norm_kind,slope,intercept",
                  0) == 0);
}

TEST_CASE("sweep with no spread in the characteristic yields no slope") {
  const SweepResult s = sweep_power_scaling("square", {0.4, 0.4, 0.4}, 6, 5);
  CHECK(std::isnan(s.slope));
}

TEST_CASE("sweep covers every norm target") {
  for (const char* target : {"square", "maximal", "martingale", "paraproduct"}) {
    const SweepResult s = sweep_power_scaling(target, {0.3, 0.6, 0.8}, 5, 9);
    REQUIRE(s.points.size() == 3);
    for (const SweepPoint& p : s.points) {
      INFO("target ", target, " alpha ", p.alpha);
      CHECK(p.norm > 0.0);
      CHECK(std::isfinite(p.norm));
    }
    CHECK(s.slope > 0.0);
  }
}
