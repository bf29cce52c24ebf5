// Batch front-end: generate weight specs, compute characteristics and norms,
// run the check suite, run scaling sweeps. Every command is seeded and
// file-driven; the same command line over the same files produces identical
// bytes. Exit codes: 0 all exact checks pass, 1 exact failure, 2 usage error.
#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dyweights/carleson.hpp"
#include "dyweights/haar.hpp"
#include "dyweights/norms.hpp"
#include "dyweights/operators.hpp"
#include "dyweights/verify.hpp"
#include "dyweights/weight.hpp"

namespace {

using dyweights::Weight;
using dyweights::WeightSpec;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write file: " + path);
  out << text;
}

Weight load_weight(const std::string& path, int depth_override) {
  const WeightSpec spec = WeightSpec::from_json(read_file(path));
  return dyweights::materialize(
      spec, depth_override > 0 ? std::optional<int>(depth_override) : std::nullopt);
}

nlohmann::ordered_json estimate_json(const dyweights::NormEstimate& est) {
  return {{"value", est.value},
          {"kind", est.kind},
          {"iterations", est.iterations},
          {"residual", est.residual},
          {"seed", est.seed}};
}

struct GenArgs {
  std::string family;
  int depth = 10;
  double alpha = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 1;
  std::vector<double> values;
  std::vector<double> breakpoints;
  std::string out;
};

int cmd_gen(const GenArgs& a) {
  WeightSpec spec;
  spec.family = a.family;
  spec.depth = a.depth;
  spec.alpha = a.alpha;
  spec.delta = a.delta;
  spec.seed = a.seed;
  spec.values = a.values;
  spec.breakpoints = a.breakpoints;
  spec.validate();
  write_output(spec.to_json() + "\n", a.out);
  return 0;
}

struct PairArgs {
  std::string u_path;
  std::string v_path;
  std::string b_path;
  int depth = 0;  // 0: take depth from the weight-spec file
  std::string out;
};

struct LoadedPair {
  Weight u;
  Weight v;
  std::optional<dyweights::LeafFn> b;
};

LoadedPair load_pair(const PairArgs& a) {
  Weight u = load_weight(a.u_path, a.depth);
  Weight v = a.v_path.empty() ? u : load_weight(a.v_path, a.depth);
  if (u.depth() != v.depth()) throw std::invalid_argument("mismatched depths between u and v");
  std::optional<dyweights::LeafFn> b;
  if (!a.b_path.empty()) {
    Weight bw = load_weight(a.b_path, a.depth);
    if (bw.depth() != u.depth()) throw std::invalid_argument("mismatched depths for b");
    b = std::move(bw.w);
  }
  return {std::move(u), std::move(v), std::move(b)};
}

int cmd_chars(const PairArgs& a) {
  const LoadedPair p = load_pair(a);
  const Weight uinv = p.u.reciprocal();
  nlohmann::ordered_json j;
  j["depth"] = p.u.depth();
  j["joint_a2"] = dyweights::char_joint_a2(p.u, p.v);
  j["rh1_u_inv"] = dyweights::char_rh1(uinv);
  j["rh1_v"] = dyweights::char_rh1(p.v);
  j["ainfty_u_inv"] = dyweights::char_ainfty(uinv);
  j["ainfty_v"] = dyweights::char_ainfty(p.v);
  j["doubling_u"] = dyweights::char_doubling(p.u);
  j["doubling_v"] = dyweights::char_doubling(p.v);
  nlohmann::ordered_json carl;
  carl["c_intensity"] = dyweights::intensity(dyweights::delta_sequence(uinv, p.v), uinv).value;
  carl["d_intensity"] = dyweights::intensity(dyweights::delta_sequence(p.v, uinv), p.v).value;
  if (p.b) {
    carl["b_intensity"] =
        dyweights::intensity(dyweights::carl_sequence(dyweights::haar_analysis(*p.b), p.v), uinv)
            .value;
  }
  j["carleson"] = std::move(carl);
  write_output(j.dump(2) + "\n", a.out);
  return 0;
}

struct NormArgs {
  PairArgs pair;
  std::string op;
  std::string method = "power";
  double tol = 0.0;  // 0: method default
  int max_iter = 10000;
  std::uint64_t seed = 1;
};

int cmd_norm(const NormArgs& a) {
  const LoadedPair p = load_pair(a.pair);
  dyweights::NormEstimate est;
  std::string method = a.method;
  auto run_linear = [&](const dyweights::LinearOp& op) {
    if (method == "dense") {
      if (p.u.depth() > 12) throw std::invalid_argument("dense method requires depth <= 12");
      est = dyweights::op_norm_exact(op, p.u, p.v, a.tol > 0 ? a.tol : 1e-10, a.seed);
    } else if (method == "power") {
      est = dyweights::op_norm_power(op, p.u, p.v, a.tol > 0 ? a.tol : 1e-8, a.max_iter, a.seed);
    } else {
      throw std::invalid_argument("method must be dense or power for op " + a.op);
    }
  };
  if (a.op == "square") {
    est = dyweights::sq_norm(p.u, p.v, a.tol > 0 ? a.tol : 1e-10, a.max_iter);
    method = "form";
  } else if (a.op == "paraproduct") {
    if (!p.b) throw std::invalid_argument("paraproduct norm requires --b");
    run_linear(dyweights::make_paraproduct_op(*p.b));
  } else if (a.op == "t0") {
    run_linear(dyweights::make_t0_op(p.u, p.v));
  } else if (a.op == "martingale") {
    est = dyweights::martingale_sup_norm_lower(p.u, p.v, 4, a.seed).estimate;
    method = "search";
  } else if (a.op == "maximal") {
    est = dyweights::maximal_norm_lower(p.u, p.v, 6, a.seed);
    method = "search";
  } else {
    throw std::invalid_argument("unknown op: " + a.op);
  }
  nlohmann::ordered_json j = estimate_json(est);
  j["op"] = a.op;
  j["method"] = method;
  j["depth"] = p.u.depth();
  write_output(j.dump(2) + "\n", a.pair.out);
  return 0;
}

struct CheckArgs {
  std::vector<int> depths = {6, 8, 10};
  std::uint64_t seed = 20260814;
  std::string ids;
  double tol = 0.0;
  int threads = 0;
  std::string out;
  std::string format = "csv";
};

int cmd_check(const CheckArgs& a) {
  dyweights::SuiteOptions opt;
  opt.depths = a.depths;
  opt.seed = a.seed;
  opt.threads = a.threads;
  if (a.tol > 0) {
    opt.tol_identity = a.tol;
    opt.tol_inequality = a.tol;
  }
  bool unknown_id = false;
  if (!a.ids.empty()) {
    const std::vector<std::string>& known = dyweights::registry_ids();
    std::string kept;
    std::stringstream ss(a.ids);
    std::string id;
    while (std::getline(ss, id, ',')) {
      if (std::find(known.begin(), known.end(), id) == known.end()) {
        std::cerr << "unknown check id: " << id << " (skipped)\n";
        unknown_id = true;
        continue;
      }
      if (!kept.empty()) kept += ',';
      kept += id;
    }
    if (kept.empty()) {
      std::cerr << "no known check ids remain\n";
      return 2;
    }
    opt.only_check = kept;
  }
  const dyweights::SuiteResult result = dyweights::run_suite(opt);
  if (a.format == "json") {
    write_output(dyweights::summary_to_json(result) + "\n", a.out);
  } else {
    write_output(dyweights::reports_to_csv(result.reports), a.out);
    if (!a.out.empty()) std::cout << dyweights::summary_to_json(result) << "\n";
  }
  if (unknown_id) return 2;
  return result.failed > 0 ? 1 : 0;
}

struct SweepArgs {
  std::string target = "square";
  std::vector<double> alphas;
  int depth = 16;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
};

int cmd_sweep(const SweepArgs& a) {
  const dyweights::SweepResult res =
      dyweights::sweep_power_scaling(a.target, a.alphas, a.depth, a.seed);
  if (a.format == "json") {
    nlohmann::ordered_json j;
    j["target"] = res.target;
    j["depth"] = res.depth;
    j["slope"] = res.slope;
    j["intercept"] = res.intercept;
    j["max_fit_residual"] = res.max_fit_residual;
    nlohmann::ordered_json pts = nlohmann::ordered_json::array();
    for (const dyweights::SweepPoint& pt : res.points) {
      pts.push_back({{"alpha", pt.alpha},
                     {"a2", pt.a2},
                     {"rh1_inv", pt.rh1_inv},
                     {"norm", pt.norm},
                     {"norm_kind", pt.norm_kind}});
    }
    j["points"] = std::move(pts);
    write_output(j.dump(2) + "\n", a.out);
  } else {
    write_output(dyweights::sweep_to_csv(res), a.out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dyadic two-weight operator harness"};
  app.require_subcommand(1);

  GenArgs gen;
  CLI::App* g = app.add_subcommand("gen", "write a weight spec JSON");
  g->add_option("--family", gen.family, "power | random-martingale | step | leaf-values")
      ->required();
  g->add_option("--depth", gen.depth)->check(CLI::Range(1, 24));
  g->add_option("--alpha", gen.alpha);
  g->add_option("--delta", gen.delta);
  g->add_option("--seed", gen.seed);
  g->add_option("--values", gen.values)->delimiter(',');
  g->add_option("--breakpoints", gen.breakpoints)->delimiter(',');
  g->add_option("--out", gen.out);

  PairArgs chars;
  CLI::App* c = app.add_subcommand("chars", "characteristics of a weight or pair");
  c->add_option("--u", chars.u_path)->required();
  c->add_option("--v", chars.v_path);
  c->add_option("--b", chars.b_path);
  c->add_option("--depth", chars.depth)->check(CLI::Range(1, 24));
  c->add_option("--out", chars.out);

  NormArgs norm;
  CLI::App* n = app.add_subcommand("norm", "operator norm between weighted L2 spaces");
  n->add_option("--op", norm.op, "paraproduct | martingale | square | maximal | t0")->required();
  n->add_option("--u", norm.pair.u_path)->required();
  n->add_option("--v", norm.pair.v_path);
  n->add_option("--b", norm.pair.b_path);
  n->add_option("--depth", norm.pair.depth)->check(CLI::Range(1, 24));
  n->add_option("--method", norm.method, "dense | power | form");
  n->add_option("--tol", norm.tol);
  n->add_option("--max-iter", norm.max_iter);
  n->add_option("--seed", norm.seed);
  n->add_option("--out", norm.pair.out);

  CheckArgs check;
  CLI::App* k = app.add_subcommand("check", "run the verification suite");
  k->add_option("--depth", check.depths)->check(CLI::Range(1, 24));
  k->add_option("--seed", check.seed);
  k->add_option("--id", check.ids, "comma-separated check ids");
  k->add_option("--tol", check.tol);
  k->add_option("--threads", check.threads);
  k->add_option("--out", check.out);
  k->add_option("--format", check.format)->check(CLI::IsMember({"csv", "json"}));

  SweepArgs sweep;
  CLI::App* s = app.add_subcommand("sweep", "power-weight scaling sweep");
  s->add_option("--target", sweep.target, "square | maximal | martingale | paraproduct");
  s->add_option("--alphas", sweep.alphas)->delimiter(',')->required();
  s->add_option("--depth", sweep.depth)->check(CLI::Range(1, 24));
  s->add_option("--seed", sweep.seed);
  s->add_option("--out", sweep.out);
  s->add_option("--format", sweep.format)->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(g)) return cmd_gen(gen);
    if (app.got_subcommand(c)) return cmd_chars(chars);
    if (app.got_subcommand(n)) return cmd_norm(norm);
    if (app.got_subcommand(k)) return cmd_check(check);
    if (app.got_subcommand(s)) return cmd_sweep(sweep);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
