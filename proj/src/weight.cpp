#include "dyweights/weight.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dyweights/rng.hpp"
#include "json.hpp"

namespace dyweights {

namespace {

void require_positive(const std::vector<double>& values, const char* what) {
  for (double x : values) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw std::invalid_argument(std::string(what) + " must be strictly positive and finite");
    }
  }
}

}  // namespace

Weight weight_from_leaves(LeafFn leaves) {
  DyadicTree tree(leaves.depth);
  if (static_cast<std::int64_t>(leaves.values.size()) != tree.leaf_count()) {
    throw std::invalid_argument("weight needs 2^depth leaf values");
  }
  require_positive(leaves.values, "weight leaf values");
  Weight w;
  w.avg = dyadic_averages_of(tree, leaves.values);
  std::vector<double> inv(leaves.values.size());
  for (std::size_t i = 0; i < inv.size(); ++i) inv[i] = 1.0 / leaves.values[i];
  w.inv_avg = dyadic_averages_of(tree, inv);
  w.w = std::move(leaves);
  return w;
}

Weight Weight::reciprocal() const {
  Weight r;
  r.w.depth = w.depth;
  r.w.values.resize(w.values.size());
  for (std::size_t i = 0; i < w.values.size(); ++i) r.w.values[i] = 1.0 / w.values[i];
  // m_I((w^{-1})^{-1}) is m_I w exactly; reuse the caches instead of
  // re-averaging the doubly rounded leaves.
  r.avg = inv_avg;
  r.inv_avg = avg;
  return r;
}

Weight Weight::flat(int depth) {
  DyadicTree tree(depth);
  return weight_from_leaves(LeafFn{depth, std::vector<double>(static_cast<std::size_t>(tree.leaf_count()), 1.0)});
}

Weight make_power_weight(double alpha, int depth) {
  if (!(std::abs(alpha) < 1.0)) {
    throw std::invalid_argument("power weight needs |alpha| < 1");
  }
  DyadicTree tree(depth);
  const std::int64_t m = tree.leaf_count();
  std::vector<double> leaves(static_cast<std::size_t>(m));
  if (alpha == 0.0) {
    std::fill(leaves.begin(), leaves.end(), 1.0);
  } else {
    // Exact cell average of x^alpha over [jh, (j+1)h):
    //   ((j+1)^p - j^p) h^alpha / p with p = 1 + alpha.
    // The difference is formed via expm1/log1p so the relative error stays a
    // few ulp for every j instead of growing like j * eps.
    const double p = 1.0 + alpha;
    const double ha = std::exp2(-static_cast<double>(depth) * alpha);
    leaves[0] = ha / p;
    for (std::int64_t j = 1; j < m; ++j) {
      const double dj = static_cast<double>(j);
      const double diff = std::pow(dj, p) * std::expm1(p * std::log1p(1.0 / dj));
      leaves[static_cast<std::size_t>(j)] = diff * ha / p;
    }
  }
  return weight_from_leaves(LeafFn{depth, std::move(leaves)});
}

Weight make_random_martingale_weight(int depth, double delta, std::uint64_t seed) {
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw std::invalid_argument("random-martingale weight needs delta in [0, 1)");
  }
  DyadicTree tree(depth);
  // Top-down multiplicative jumps keyed to the node id, so a deeper tree with
  // the same seed refines a shallower one.
  NodeScalars avg(static_cast<std::size_t>(tree.node_count()));
  avg[0] = 1.0;
  for (NodeId n = 0; n < tree.internal_count(); ++n) {
    const double s = delta * usym(mix_seed(seed, static_cast<std::uint64_t>(n)));
    avg[static_cast<std::size_t>(DyadicTree::left(n))] = avg[static_cast<std::size_t>(n)] * (1.0 - s);
    avg[static_cast<std::size_t>(DyadicTree::right(n))] = avg[static_cast<std::size_t>(n)] * (1.0 + s);
  }
  std::vector<double> leaves(avg.begin() + static_cast<std::ptrdiff_t>(tree.first_leaf()), avg.end());
  return weight_from_leaves(LeafFn{depth, std::move(leaves)});
}

Weight make_step_weight(int depth, const std::vector<double>& breakpoints,
                        const std::vector<double>& values) {
  if (values.size() != breakpoints.size() + 1) {
    throw std::invalid_argument("step weight needs one more value than breakpoints");
  }
  require_positive(values, "step weight values");
  for (std::size_t k = 0; k < breakpoints.size(); ++k) {
    const double b = breakpoints[k];
    if (!(b > 0.0 && b < 1.0) || (k > 0 && !(b > breakpoints[k - 1]))) {
      throw std::invalid_argument("step breakpoints must be strictly increasing inside (0,1)");
    }
  }
  DyadicTree tree(depth);
  const std::int64_t m = tree.leaf_count();
  const double h = DyadicTree::length_at(depth);
  std::vector<double> edges;
  edges.reserve(breakpoints.size() + 2);
  edges.push_back(0.0);
  edges.insert(edges.end(), breakpoints.begin(), breakpoints.end());
  edges.push_back(1.0);
  std::vector<double> leaves(static_cast<std::size_t>(m));
  for (std::int64_t j = 0; j < m; ++j) {
    const double a = static_cast<double>(j) * h;
    const double b = a + h;
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
      const double lo = std::max(a, edges[k]);
      const double hi = std::min(b, edges[k + 1]);
      if (hi > lo) acc += (hi - lo) * values[k];
    }
    leaves[static_cast<std::size_t>(j)] = acc / h;
  }
  return weight_from_leaves(LeafFn{depth, std::move(leaves)});
}

Weight coarsen(const Weight& v) {
  if (v.depth() < 2) throw std::invalid_argument("cannot coarsen below depth 1");
  std::vector<double> leaves(v.w.values.size() / 2);
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    leaves[i] = 0.5 * (v.w.values[2 * i] + v.w.values[2 * i + 1]);
  }
  return weight_from_leaves(LeafFn{v.depth() - 1, std::move(leaves)});
}

void WeightSpec::validate() const {
  DyadicTree tree(depth);
  if (family == "power") {
    if (!(std::abs(alpha) < 1.0)) throw std::invalid_argument("power family needs |alpha| < 1");
  } else if (family == "random-martingale") {
    if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("random-martingale family needs delta in [0,1)");
  } else if (family == "step") {
    if (values.size() != breakpoints.size() + 1) {
      throw std::invalid_argument("step family needs one more value than breakpoints");
    }
  } else if (family == "leaf-values") {
    if (static_cast<std::int64_t>(values.size()) != tree.leaf_count()) {
      throw std::invalid_argument("leaf-values family needs 2^depth values");
    }
  } else {
    throw std::invalid_argument("unknown weight family: " + family);
  }
}

std::string WeightSpec::to_json() const {
  nlohmann::ordered_json j;
  j["family"] = family;
  j["depth"] = depth;
  if (family == "power") j["alpha"] = alpha;
  if (family == "random-martingale") {
    j["delta"] = delta;
    j["seed"] = seed;
  }
  if (family == "step") {
    j["breakpoints"] = breakpoints;
    j["values"] = values;
  }
  if (family == "leaf-values") j["values"] = values;
  return j.dump(2);
}

WeightSpec WeightSpec::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  WeightSpec s;
  s.family = j.at("family").get<std::string>();
  s.depth = j.at("depth").get<int>();
  s.alpha = j.value("alpha", 0.0);
  s.delta = j.value("delta", 0.0);
  s.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("values")) s.values = j["values"].get<std::vector<double>>();
  if (j.contains("breakpoints")) s.breakpoints = j["breakpoints"].get<std::vector<double>>();
  s.validate();
  return s;
}

Weight materialize(const WeightSpec& spec, std::optional<int> depth_override) {
  WeightSpec s = spec;
  if (depth_override) s.depth = *depth_override;
  s.validate();
  if (s.family == "power") return make_power_weight(s.alpha, s.depth);
  if (s.family == "random-martingale") return make_random_martingale_weight(s.depth, s.delta, s.seed);
  if (s.family == "step") return make_step_weight(s.depth, s.breakpoints, s.values);
  return weight_from_leaves(LeafFn{s.depth, s.values});
}

double joint_a2_of_avgs(const NodeScalars& uinv_avg, const NodeScalars& v_avg) {
  if (uinv_avg.size() != v_avg.size()) throw std::invalid_argument("average tree size mismatch");
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < v_avg.size(); ++n) {
    best = std::max(best, uinv_avg[n] * v_avg[n]);
  }
  return best;
}

double char_joint_a2(const Weight& u, const Weight& v) {
  if (u.depth() != v.depth()) throw std::invalid_argument("weight depth mismatch");
  return joint_a2_of_avgs(u.inv_avg, v.avg);
}

double char_rh1(const Weight& v) {
  DyadicTree tree = v.tree();
  std::vector<double> vlogv(v.w.values.size());
  for (std::size_t i = 0; i < vlogv.size(); ++i) {
    vlogv[i] = v.w.values[i] * std::log(v.w.values[i]);
  }
  const NodeScalars num = dyadic_averages_of(tree, vlogv);
  double best = 0.0;
  for (std::size_t n = 0; n < num.size(); ++n) {
    // m_I((v/m) log(v/m)) = m_I(v log v)/m_I v - log(m_I v); >= 0 by Jensen.
    best = std::max(best, num[n] / v.avg[n] - std::log(v.avg[n]));
  }
  return best;
}

double char_ainfty(const Weight& v) {
  DyadicTree tree = v.tree();
  std::vector<double> logv(v.w.values.size());
  for (std::size_t i = 0; i < logv.size(); ++i) logv[i] = std::log(v.w.values[i]);
  const NodeScalars lavg = dyadic_averages_of(tree, logv);
  double best = 0.0;
  for (std::size_t n = 0; n < lavg.size(); ++n) {
    best = std::max(best, v.avg[n] * std::exp(-lavg[n]));
  }
  return best;
}

double char_doubling(const Weight& v) {
  DyadicTree tree = v.tree();
  double best = 0.0;
  for (NodeId n = 1; n < tree.node_count(); ++n) {
    best = std::max(best, v.mass(DyadicTree::parent(n)) / v.mass(n));
  }
  return best;
}

LeafFn weighted_haar_fn(const Weight& v, NodeId n) {
  DyadicTree tree = v.tree();
  if (n < 0 || n >= tree.internal_count()) {
    throw std::invalid_argument("weighted_haar_fn needs an internal node");
  }
  const double mI = v.mass(n);
  const double mL = v.mass(DyadicTree::left(n));
  const double mR = v.mass(DyadicTree::right(n));
  const double amp_right = std::sqrt(mL / mR) / std::sqrt(mI);
  const double amp_left = -std::sqrt(mR / mL) / std::sqrt(mI);
  LeafFn h;
  h.depth = tree.depth;
  h.values.assign(static_cast<std::size_t>(tree.leaf_count()), 0.0);
  const auto [llo, lhi] = tree.leaf_span(DyadicTree::left(n));
  const auto [rlo, rhi] = tree.leaf_span(DyadicTree::right(n));
  for (std::int64_t i = llo; i < lhi; ++i) h.values[static_cast<std::size_t>(i)] = amp_left;
  for (std::int64_t i = rlo; i < rhi; ++i) h.values[static_cast<std::size_t>(i)] = amp_right;
  return h;
}

WhbCoefficients whb_decompose(const Weight& v, NodeId n) {
  DyadicTree tree = v.tree();
  if (n < 0 || n >= tree.internal_count()) {
    throw std::invalid_argument("whb_decompose needs an internal node");
  }
  const double len = tree.node_length(n);
  const double mI = v.mass(n);
  const double mL = v.mass(DyadicTree::left(n));
  const double mR = v.mass(DyadicTree::right(n));
  // Matching h_I on both children gives the unique 2x2 solution
  //   alpha = 2 sqrt(v(I+) v(I-)) / (sqrt(|I|) sqrt(v(I)))
  //   beta  = (v(I+) - v(I-)) / v(I).
  WhbCoefficients c;
  c.alpha = 2.0 * std::sqrt(mR * mL) / (std::sqrt(len) * std::sqrt(mI));
  c.beta = (mR - mL) / mI;
  return c;
}

}  // namespace dyweights
