#include "dyweights/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "dyweights/rng.hpp"

namespace dyweights {

double weighted_norm_sq(const LeafFn& f, const Weight& w) {
  if (f.depth != w.depth()) throw std::invalid_argument("depth mismatch in weighted_norm");
  const double h = DyadicTree::length_at(f.depth);
  double s = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    s += f.values[i] * f.values[i] * w.w.values[i];
  }
  return s * h;
}

double weighted_norm(const LeafFn& f, const Weight& w) { return std::sqrt(weighted_norm_sq(f, w)); }

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

struct PowerOutcome {
  double lambda = 0.0;
  int iters = 0;
  double residual = 0.0;
  std::vector<double> vec;
};

// Power iteration on a PSD operator M from several start vectors; returns the
// largest converged Rayleigh quotient. Rayleigh quotients along a PSD power
// iteration are nondecreasing, so the result dominates the quotient of every
// start vector (witness starts certify lower bounds exactly).
PowerOutcome power_iterate(const std::vector<std::vector<double>>& starts,
                           const std::function<void(const std::vector<double>&, std::vector<double>&)>& M,
                           double tol, int max_iters) {
  PowerOutcome best;
  std::vector<double> x, y;
  for (const auto& start : starts) {
    x = start;
    const double n0 = norm2(x);
    if (!(n0 > 0.0)) continue;
    for (double& c : x) c /= n0;
    y.assign(x.size(), 0.0);
    double rq_prev = -1.0;
    double rq = 0.0;
    int hits = 0;
    int it = 0;
    double res = 0.0;
    while (it < max_iters) {
      ++it;
      M(x, y);
      rq = dot(x, y);
      const double yn = norm2(y);
      res = rq > 0.0 ? std::sqrt(std::max(0.0, yn * yn - rq * rq)) / rq : 0.0;
      if (!(yn > 0.0)) {
        rq = 0.0;
        break;
      }
      if (std::abs(rq - rq_prev) <= tol * std::max(std::abs(rq), 1e-300)) {
        if (++hits >= 2) break;
      } else {
        hits = 0;
      }
      rq_prev = rq;
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = y[i] / yn;
    }
    best.iters += it;
    if (rq > best.lambda) {
      best.lambda = rq;
      best.residual = res;
      best.vec = x;
    }
  }
  return best;
}

std::vector<double> alternating_start(std::size_t dim) {
  std::vector<double> x(dim);
  for (std::size_t i = 0; i < dim; ++i) x[i] = (i % 2 == 0) ? 1.0 : -1.0;
  return x;
}

std::vector<double> random_start(std::size_t dim, std::uint64_t seed) {
  SplitMix rng(seed);
  std::vector<double> x(dim);
  for (double& c : x) c = rng.next_usym();
  return x;
}

// Source-space witnesses enter the euclidean iteration as D_u^{1/2} f; the
// cell width cancels from every Rayleigh quotient, so the scalings drop it.
std::vector<double> witness_start(const LeafFn& f, const Weight& u) {
  std::vector<double> x(f.values.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = f.values[i] * std::sqrt(u.w.values[i]);
  return x;
}

std::vector<std::vector<double>> default_starts(std::size_t dim, std::uint64_t seed,
                                                const StartVectors* witnesses, const Weight& u) {
  std::vector<std::vector<double>> starts;
  starts.push_back(alternating_start(dim));
  starts.push_back(random_start(dim, mix_seed(seed, 0xA11CE)));
  if (witnesses) {
    for (const auto& f : *witnesses) starts.push_back(witness_start(f, u));
  }
  return starts;
}

}  // namespace

NormEstimate op_norm_exact(const LinearOp& op, const Weight& u, const Weight& v, double tol,
                           std::uint64_t seed, const StartVectors* witnesses) {
  if (op.depth != u.depth() || op.depth != v.depth()) {
    throw std::invalid_argument("depth mismatch in op_norm_exact");
  }
  if (op.depth > 12) throw std::invalid_argument("dense route supports depth <= 12");
  const std::size_t m = static_cast<std::size_t>(DyadicTree(op.depth).leaf_count());
  // Materialize A = D_v^{1/2} T D_u^{-1/2} column by column.
  auto A = std::make_shared<std::vector<double>>(m * m);
  {
    std::vector<double> e(m, 0.0), col(m);
    for (std::size_t j = 0; j < m; ++j) {
      e[j] = 1.0 / std::sqrt(u.w.values[j]);
      op.apply(e, col);
      e[j] = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        (*A)[i * m + j] = col[i] * std::sqrt(v.w.values[i]);
      }
    }
  }
  auto normal = [A, m](const std::vector<double>& x, std::vector<double>& z) {
    std::vector<double> y(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const double* row = A->data() + i * m;
      double s = 0.0;
      for (std::size_t j = 0; j < m; ++j) s += row[j] * x[j];
      y[i] = s;
    }
    z.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const double* row = A->data() + i * m;
      const double yi = y[i];
      for (std::size_t j = 0; j < m; ++j) z[j] += yi * row[j];
    }
  };
  const PowerOutcome out = power_iterate(default_starts(m, seed, witnesses, u), normal, tol, 10000);
  return NormEstimate{std::sqrt(std::max(0.0, out.lambda)), "exact", out.iters, out.residual, seed};
}

NormEstimate op_norm_power(const LinearOp& op, const Weight& u, const Weight& v, double tol,
                           int max_iters, std::uint64_t seed, const StartVectors* witnesses) {
  if (op.depth != u.depth() || op.depth != v.depth()) {
    throw std::invalid_argument("depth mismatch in op_norm_power");
  }
  const std::size_t m = static_cast<std::size_t>(DyadicTree(op.depth).leaf_count());
  std::vector<double> usqrt(m), vw(m);
  for (std::size_t i = 0; i < m; ++i) {
    usqrt[i] = std::sqrt(u.w.values[i]);
    vw[i] = v.w.values[i];
  }
  auto normal = [&op, usqrt, vw, m](const std::vector<double>& x, std::vector<double>& z) {
    std::vector<double> f(m), g(m), t(m);
    for (std::size_t i = 0; i < m; ++i) f[i] = x[i] / usqrt[i];
    op.apply(f, g);
    for (std::size_t i = 0; i < m; ++i) g[i] *= vw[i];
    op.apply_tr(g, t);
    z.resize(m);
    for (std::size_t i = 0; i < m; ++i) z[i] = t[i] / usqrt[i];
  };
  const PowerOutcome out = power_iterate(default_starts(m, seed, witnesses, u), normal, tol, max_iters);
  return NormEstimate{std::sqrt(std::max(0.0, out.lambda)), "exact", out.iters, out.residual, seed};
}

NormEstimate sq_norm(const Weight& u, const Weight& v, double tol, int max_iters,
                     const StartVectors* witnesses) {
  if (u.depth() != v.depth()) throw std::invalid_argument("depth mismatch in sq_norm");
  const int depth = u.depth();
  const DyadicTree tree(depth);
  const std::size_t m = static_cast<std::size_t>(tree.leaf_count());
  std::vector<double> usqrt(m);
  for (std::size_t i = 0; i < m; ++i) usqrt[i] = std::sqrt(u.w.values[i]);
  const NodeScalars form = sq_form_coeffs(v);
  // ||S f||^2_{L2(v)} = sum_I m_I v <f,h_I>^2 is diagonal in Haar coordinates,
  // so the normal operator is analysis -> scale -> synthesis.
  auto normal = [&, m](const std::vector<double>& x, std::vector<double>& z) {
    LeafFn g{depth, std::vector<double>(m)};
    for (std::size_t i = 0; i < m; ++i) g.values[i] = x[i] / usqrt[i];
    HaarDecomposition d = haar_analysis(g);
    d.mean = 0.0;
    for (std::size_t n = 0; n < d.coeff.size(); ++n) d.coeff[n] *= form[n];
    const LeafFn bg = haar_synthesis(d);
    z.resize(m);
    for (std::size_t i = 0; i < m; ++i) z[i] = bg.values[i] / usqrt[i];
  };
  const PowerOutcome out =
      power_iterate(default_starts(m, 0x5157u + static_cast<unsigned>(depth), witnesses, u), normal,
                    tol, max_iters);
  return NormEstimate{std::sqrt(std::max(0.0, out.lambda)), "exact", out.iters, out.residual, 0};
}

NormEstimate inverse_sq_ratio(const Weight& w, double tol, int max_iters) {
  const int depth = w.depth();
  const DyadicTree tree(depth);
  const std::size_t dim = static_cast<std::size_t>(tree.internal_count());
  std::vector<double> inv_sqrt_m(dim);
  for (std::size_t n = 0; n < dim; ++n) inv_sqrt_m[n] = 1.0 / std::sqrt(w.avg[n]);
  // Iterate on mean-free Haar coefficient vectors: the square-function form is
  // diag(m_I w) there, while ||f||^2_{L2(w)} pulls in the leaf Gram.
  auto normal = [&, dim](const std::vector<double>& x, std::vector<double>& z) {
    HaarDecomposition d{depth, 0.0, NodeScalars(dim)};
    for (std::size_t n = 0; n < dim; ++n) d.coeff[n] = x[n] * inv_sqrt_m[n];
    LeafFn f = haar_synthesis(d);
    for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] *= w.w.values[i];
    const HaarDecomposition g = haar_analysis(f);
    z.resize(dim);
    for (std::size_t n = 0; n < dim; ++n) z[n] = g.coeff[n] * inv_sqrt_m[n];
  };
  std::vector<std::vector<double>> starts;
  starts.push_back(alternating_start(dim));
  starts.push_back(random_start(dim, mix_seed(0xB0B, dim)));
  const PowerOutcome out = power_iterate(starts, normal, tol, max_iters);
  return NormEstimate{std::sqrt(std::max(0.0, out.lambda)), "exact", out.iters, out.residual, 0};
}

namespace {

// Shared machinery for the maximal-function ascent. averaging == nullptr uses
// plain cell averages; otherwise averages are taken in that weight.
struct MaximalAscent {
  const Weight& u;
  const Weight& v;
  const Weight* averaging;
  const DyadicTree tree;
  NodeScalars mu_avg;  // averages of the averaging weight (all ones when flat)

  MaximalAscent(const Weight& u_, const Weight& v_, const Weight* averaging_)
      : u(u_), v(v_), averaging(averaging_), tree(u_.depth()) {
    if (averaging) {
      mu_avg = averaging->avg;
    } else {
      mu_avg.assign(static_cast<std::size_t>(tree.node_count()), 1.0);
    }
  }

  double mu_leaf(std::size_t i) const { return averaging ? averaging->w.values[i] : 1.0; }

  LeafFn apply_maximal(const LeafFn& f) const {
    return averaging ? weighted_maximal_function(*averaging, f) : maximal_function(f);
  }

  double true_ratio(const LeafFn& f) const {
    const double den = weighted_norm(f, u);
    if (!(den > 0.0)) return 0.0;
    return weighted_norm(apply_maximal(f), v) / den;
  }

  // Maximizing ancestor per leaf for the current (nonnegative) profile.
  std::vector<NodeId> selection(const LeafFn& f) const {
    std::vector<double> fm(f.values.size());
    for (std::size_t i = 0; i < fm.size(); ++i) fm[i] = std::abs(f.values[i]) * mu_leaf(i);
    const NodeScalars num = dyadic_averages_of(tree, fm);
    std::vector<double> bestval(static_cast<std::size_t>(tree.node_count()));
    std::vector<NodeId> bestnode(static_cast<std::size_t>(tree.node_count()));
    bestval[0] = num[0] / mu_avg[0];
    bestnode[0] = 0;
    for (NodeId n = 0; n < tree.internal_count(); ++n) {
      for (NodeId c : {DyadicTree::left(n), DyadicTree::right(n)}) {
        const double q = num[static_cast<std::size_t>(c)] / mu_avg[static_cast<std::size_t>(c)];
        if (q > bestval[static_cast<std::size_t>(n)]) {
          bestval[static_cast<std::size_t>(c)] = q;
          bestnode[static_cast<std::size_t>(c)] = c;
        } else {
          bestval[static_cast<std::size_t>(c)] = bestval[static_cast<std::size_t>(n)];
          bestnode[static_cast<std::size_t>(c)] = bestnode[static_cast<std::size_t>(n)];
        }
      }
    }
    const std::int64_t fl = tree.first_leaf();
    std::vector<NodeId> sel(static_cast<std::size_t>(tree.leaf_count()));
    for (std::int64_t i = 0; i < tree.leaf_count(); ++i) {
      sel[static_cast<std::size_t>(i)] = bestnode[static_cast<std::size_t>(fl + i)];
    }
    return sel;
  }

  // Fixed-selection linearization L f(x) = m_sel(x)(f mu)/m_sel(x)(mu) and its
  // transpose, wrapped into the scaled normal operator.
  void linearized_normal(const std::vector<NodeId>& sel, const std::vector<double>& x,
                         std::vector<double>& z) const {
    const std::size_t m = static_cast<std::size_t>(tree.leaf_count());
    const std::int64_t fl = tree.first_leaf();
    std::vector<double> f(m), fm(m);
    for (std::size_t i = 0; i < m; ++i) {
      f[i] = x[i] / std::sqrt(u.w.values[i]);
      fm[i] = f[i] * mu_leaf(i);
    }
    const NodeScalars num = dyadic_averages_of(tree, fm);
    std::vector<double> g(m);
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t s = static_cast<std::size_t>(sel[i]);
      g[i] = (num[s] / mu_avg[s]) * v.w.values[i];  // D_v L f
    }
    // Transpose: scatter g to selected nodes, then accumulate down ancestors.
    NodeScalars acc(static_cast<std::size_t>(tree.node_count()), 0.0);
    for (std::size_t i = 0; i < m; ++i) acc[static_cast<std::size_t>(sel[i])] += g[i];
    NodeScalars down(static_cast<std::size_t>(tree.node_count()), 0.0);
    for (NodeId n = 0; n < tree.node_count(); ++n) {
      const double own = acc[static_cast<std::size_t>(n)] *
                         std::ldexp(1.0, DyadicTree::level_of(n) - tree.depth) /
                         mu_avg[static_cast<std::size_t>(n)];
      down[static_cast<std::size_t>(n)] = own + (n == 0 ? 0.0 : down[static_cast<std::size_t>(DyadicTree::parent(n))]);
    }
    z.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      z[i] = mu_leaf(i) * down[static_cast<std::size_t>(fl + static_cast<std::int64_t>(i))] /
             std::sqrt(u.w.values[i]);
    }
  }
};

NormEstimate maximal_ascent(const Weight& u, const Weight& v, const Weight* averaging, int budget,
                            std::uint64_t seed) {
  if (u.depth() != v.depth()) throw std::invalid_argument("depth mismatch in maximal ascent");
  MaximalAscent eng(u, v, averaging);
  const DyadicTree& tree = eng.tree;
  const std::size_t m = static_cast<std::size_t>(tree.leaf_count());

  // Candidate pool: u^{-1} on the highest-scoring test intervals (scored by
  // the localized testing values), the constant, and seeded random profiles.
  std::vector<LeafFn> candidates;
  {
    const NodeScalars scores = sawyer_values(u, v);
    std::vector<NodeId> order(scores.size());
    for (std::size_t n = 0; n < order.size(); ++n) order[n] = static_cast<NodeId>(n);
    std::partial_sort(order.begin(), order.begin() + std::min<std::size_t>(8, order.size()),
                      order.end(),
                      [&scores](NodeId a, NodeId b) {
                        return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
                      });
    std::vector<NodeId> picks(order.begin(), order.begin() + std::min<std::size_t>(8, order.size()));
    picks.push_back(DyadicTree::root);
    for (NodeId n : picks) {
      LeafFn f{tree.depth, std::vector<double>(m, 0.0)};
      const auto [lo, hi] = tree.leaf_span(n);
      for (std::int64_t i = lo; i < hi; ++i) {
        f.values[static_cast<std::size_t>(i)] = 1.0 / u.w.values[static_cast<std::size_t>(i)];
      }
      candidates.push_back(std::move(f));
    }
  }
  candidates.push_back(LeafFn{tree.depth, std::vector<double>(m, 1.0)});
  for (int k = 0; k < 2; ++k) {
    SplitMix rng(mix_seed(seed, 0xCAFE + static_cast<std::uint64_t>(k)));
    LeafFn f{tree.depth, std::vector<double>(m)};
    for (double& c : f.values) c = rng.next_u01() + 0.01;
    candidates.push_back(std::move(f));
  }

  LeafFn best_f = candidates.front();
  double best = -1.0;
  for (const auto& f : candidates) {
    const double r = eng.true_ratio(f);
    if (r > best) {
      best = r;
      best_f = f;
    }
  }

  int iters = 0;
  double residual = 0.0;
  LeafFn f = best_f;
  for (int round = 0; round < budget; ++round) {
    const std::vector<NodeId> sel = eng.selection(f);
    auto normal = [&eng, &sel](const std::vector<double>& x, std::vector<double>& z) {
      eng.linearized_normal(sel, x, z);
    };
    std::vector<std::vector<double>> starts;
    starts.push_back(witness_start(f, u));
    if (round == 0) starts.push_back(random_start(m, mix_seed(seed, 0xF00D)));
    const PowerOutcome out = power_iterate(starts, normal, 1e-9, 1000);
    iters += out.iters;
    residual = out.residual;
    if (out.vec.empty()) break;
    LeafFn next{tree.depth, std::vector<double>(m)};
    for (std::size_t i = 0; i < m; ++i) {
      next.values[i] = std::abs(out.vec[i]) / std::sqrt(u.w.values[i]);
    }
    const double r = eng.true_ratio(next);
    if (r > best + 1e-12) {
      best = r;
      f = std::move(next);
    } else {
      break;
    }
  }
  return NormEstimate{best, "lower-bound", iters, residual, seed};
}

}  // namespace

NormEstimate maximal_norm_lower(const Weight& u, const Weight& v, int budget, std::uint64_t seed) {
  return maximal_ascent(u, v, nullptr, budget, seed);
}

NormEstimate weighted_maximal_norm_lower(const Weight& v, int budget, std::uint64_t seed) {
  return maximal_ascent(v, v, &v, budget, seed);
}

MartingaleSupResult martingale_sup_norm_lower(const Weight& u, const Weight& v, int restarts,
                                              std::uint64_t seed) {
  if (u.depth() != v.depth()) throw std::invalid_argument("depth mismatch in martingale_sup_norm_lower");
  const int depth = u.depth();
  const DyadicTree tree(depth);
  const std::size_t m = static_cast<std::size_t>(tree.leaf_count());
  const std::size_t dim = static_cast<std::size_t>(tree.internal_count());

  MartingaleSupResult result;
  result.signs = SignAssignment::all_plus(depth);
  result.estimate = NormEstimate{0.0, "lower-bound", 0, 0.0, seed};

  for (int attempt = 0; attempt < std::max(1, restarts); ++attempt) {
    SignAssignment r = attempt == 0
                           ? SignAssignment::all_plus(depth)
                           : SignAssignment::random(depth, mix_seed(seed, static_cast<std::uint64_t>(attempt)));
    std::vector<double> warm;
    for (int round = 0; round < 12; ++round) {
      const LinearOp op = make_martingale_op(r);
      std::vector<double> usqrt(m);
      for (std::size_t i = 0; i < m; ++i) usqrt[i] = std::sqrt(u.w.values[i]);
      auto normal = [&op, &usqrt, &v, m](const std::vector<double>& x, std::vector<double>& z) {
        std::vector<double> f(m), g(m), t(m);
        for (std::size_t i = 0; i < m; ++i) f[i] = x[i] / usqrt[i];
        op.apply(f, g);
        for (std::size_t i = 0; i < m; ++i) g[i] *= v.w.values[i];
        op.apply_tr(g, t);
        z.resize(m);
        for (std::size_t i = 0; i < m; ++i) z[i] = t[i] / usqrt[i];
      };
      std::vector<std::vector<double>> starts;
      if (!warm.empty()) starts.push_back(warm);
      starts.push_back(alternating_start(m));
      starts.push_back(random_start(m, mix_seed(seed, 0x1234 + static_cast<std::uint64_t>(round))));
      const PowerOutcome out = power_iterate(starts, normal, 1e-8, 1500);
      result.estimate.iterations += out.iters;
      const double sigma = std::sqrt(std::max(0.0, out.lambda));
      if (sigma > result.estimate.value) {
        result.estimate.value = sigma;
        result.estimate.residual = out.residual;
        result.signs = r;
      }
      if (out.vec.empty()) break;
      warm = out.vec;
      // Optimal signs for the converged singular pair: with f = D_u^{-1/2} x
      // and y the left vector, each sign multiplies <f,h_I> <sqrt(v) y, h_I>.
      LeafFn f{depth, std::vector<double>(m)};
      for (std::size_t i = 0; i < m; ++i) f.values[i] = out.vec[i] / usqrt[i];
      std::vector<double> ax(m);
      op.apply(f.values, ax);
      LeafFn vy{depth, std::vector<double>(m)};
      for (std::size_t i = 0; i < m; ++i) vy.values[i] = ax[i] * v.w.values[i];
      const HaarDecomposition cf = haar_analysis(f);
      const HaarDecomposition cg = haar_analysis(vy);
      bool changed = false;
      for (std::size_t n = 0; n < dim; ++n) {
        const double t = cf.coeff[n] * cg.coeff[n] * r.r[n];
        // t is the current signed contribution; flip when negative.
        if (t < 0.0) {
          r.r[n] = -r.r[n];
          changed = true;
        }
      }
      if (!changed) break;
    }
  }
  return result;
}

}  // namespace dyweights
