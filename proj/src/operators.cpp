#include "dyweights/operators.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "dyweights/rng.hpp"

namespace dyweights {

namespace {

// Bottom-up averages of a raw leaf span into a full node array.
void averages_span(const DyadicTree& tree, std::span<const double> leaves, NodeScalars& out) {
  out.resize(static_cast<std::size_t>(tree.node_count()));
  const std::int64_t fl = tree.first_leaf();
  for (std::int64_t i = 0; i < tree.leaf_count(); ++i) {
    out[static_cast<std::size_t>(fl + i)] = leaves[static_cast<std::size_t>(i)];
  }
  for (NodeId n = tree.internal_count() - 1; n >= 0; --n) {
    out[static_cast<std::size_t>(n)] = 0.5 * (out[static_cast<std::size_t>(DyadicTree::left(n))] +
                                              out[static_cast<std::size_t>(DyadicTree::right(n))]);
  }
}

// Haar coefficients from an average tree: coeff_I = (sqrt|I|/2) * jump.
void coeffs_from_averages(const DyadicTree& tree, const NodeScalars& avg, NodeScalars& coeff) {
  coeff.resize(static_cast<std::size_t>(tree.internal_count()));
  for (NodeId n = 0; n < tree.internal_count(); ++n) {
    const double jump = avg[static_cast<std::size_t>(DyadicTree::right(n))] -
                        avg[static_cast<std::size_t>(DyadicTree::left(n))];
    coeff[static_cast<std::size_t>(n)] = 0.5 * std::sqrt(tree.node_length(n)) * jump;
  }
}

// Top-down pass: out(leaf) = sum over ancestors I of step_signed contributions.
// add_same adds step[I] to both children, add_signed adds -step on the left
// and +step on the right.
void descend_same(const DyadicTree& tree, const NodeScalars& step, std::span<double> out) {
  NodeScalars acc(static_cast<std::size_t>(tree.node_count()), 0.0);
  for (NodeId n = 0; n < tree.internal_count(); ++n) {
    const double next = acc[static_cast<std::size_t>(n)] + step[static_cast<std::size_t>(n)];
    acc[static_cast<std::size_t>(DyadicTree::left(n))] = next;
    acc[static_cast<std::size_t>(DyadicTree::right(n))] = next;
  }
  const std::int64_t fl = tree.first_leaf();
  for (std::int64_t i = 0; i < tree.leaf_count(); ++i) {
    out[static_cast<std::size_t>(i)] = acc[static_cast<std::size_t>(fl + i)];
  }
}

void descend_signed(const DyadicTree& tree, const NodeScalars& step, std::span<double> out) {
  NodeScalars acc(static_cast<std::size_t>(tree.node_count()), 0.0);
  for (NodeId n = 0; n < tree.internal_count(); ++n) {
    const double base = acc[static_cast<std::size_t>(n)];
    const double s = step[static_cast<std::size_t>(n)];
    acc[static_cast<std::size_t>(DyadicTree::left(n))] = base - s;
    acc[static_cast<std::size_t>(DyadicTree::right(n))] = base + s;
  }
  const std::int64_t fl = tree.first_leaf();
  for (std::int64_t i = 0; i < tree.leaf_count(); ++i) {
    out[static_cast<std::size_t>(i)] = acc[static_cast<std::size_t>(fl + i)];
  }
}

void paraproduct_span(const DyadicTree& tree, const NodeScalars& bcoeff,
                      std::span<const double> f, std::span<double> out) {
  NodeScalars avg;
  averages_span(tree, f, avg);
  // pi_b f = sum_I m_I f * b_I * h_I: signed step b_I m_I f / sqrt(|I|).
  NodeScalars step(static_cast<std::size_t>(tree.internal_count()));
  for (NodeId n = 0; n < tree.internal_count(); ++n) {
    step[static_cast<std::size_t>(n)] = bcoeff[static_cast<std::size_t>(n)] *
                                        avg[static_cast<std::size_t>(n)] /
                                        std::sqrt(tree.node_length(n));
  }
  descend_signed(tree, step, out);
}

void paraproduct_adjoint_span(const DyadicTree& tree, const NodeScalars& bcoeff,
                              std::span<const double> g, std::span<double> out) {
  NodeScalars avg, gcoeff;
  averages_span(tree, g, avg);
  coeffs_from_averages(tree, avg, gcoeff);
  // pi*_b g = sum_I b_I <g, h_I> 1_I / |I|: flat step on the whole of I.
  NodeScalars step(static_cast<std::size_t>(tree.internal_count()));
  for (NodeId n = 0; n < tree.internal_count(); ++n) {
    step[static_cast<std::size_t>(n)] = bcoeff[static_cast<std::size_t>(n)] *
                                        gcoeff[static_cast<std::size_t>(n)] /
                                        tree.node_length(n);
  }
  descend_same(tree, step, out);
}

void martingale_span(const DyadicTree& tree, const std::vector<double>& r,
                     std::span<const double> f, std::span<double> out) {
  NodeScalars avg, coeff;
  averages_span(tree, f, avg);
  coeffs_from_averages(tree, avg, coeff);
  NodeScalars step(static_cast<std::size_t>(tree.internal_count()));
  for (NodeId n = 0; n < tree.internal_count(); ++n) {
    step[static_cast<std::size_t>(n)] = r[static_cast<std::size_t>(n)] *
                                        coeff[static_cast<std::size_t>(n)] /
                                        std::sqrt(tree.node_length(n));
  }
  descend_signed(tree, step, out);
}

void t0_span(const DyadicTree& tree, const NodeScalars& alpha, std::span<const double> f,
             std::span<double> out) {
  NodeScalars avg;
  averages_span(tree, f, avg);
  NodeScalars step(static_cast<std::size_t>(tree.internal_count()));
  for (NodeId n = 0; n < tree.internal_count(); ++n) {
    step[static_cast<std::size_t>(n)] = alpha[static_cast<std::size_t>(n)] *
                                        avg[static_cast<std::size_t>(n)] /
                                        tree.node_length(n);
  }
  descend_same(tree, step, out);
}

}  // namespace

SignAssignment SignAssignment::all_plus(int depth) {
  DyadicTree tree(depth);
  return SignAssignment{depth, std::vector<double>(static_cast<std::size_t>(tree.internal_count()), 1.0)};
}

SignAssignment SignAssignment::random(int depth, std::uint64_t seed) {
  DyadicTree tree(depth);
  SignAssignment s{depth, std::vector<double>(static_cast<std::size_t>(tree.internal_count()))};
  for (NodeId n = 0; n < tree.internal_count(); ++n) {
    s.r[static_cast<std::size_t>(n)] = (mix_seed(seed, static_cast<std::uint64_t>(n)) & 1u) ? 1.0 : -1.0;
  }
  return s;
}

LeafFn apply_paraproduct(const HaarDecomposition& b, const LeafFn& f) {
  if (b.depth != f.depth) throw std::invalid_argument("depth mismatch in apply_paraproduct");
  DyadicTree tree(f.depth);
  LeafFn out{f.depth, std::vector<double>(f.values.size())};
  paraproduct_span(tree, b.coeff, f.values, out.values);
  return out;
}

LeafFn apply_paraproduct(const LeafFn& b, const LeafFn& f) {
  return apply_paraproduct(haar_analysis(b), f);
}

LeafFn apply_paraproduct_adjoint(const HaarDecomposition& b, const LeafFn& g) {
  if (b.depth != g.depth) throw std::invalid_argument("depth mismatch in apply_paraproduct_adjoint");
  DyadicTree tree(g.depth);
  LeafFn out{g.depth, std::vector<double>(g.values.size())};
  paraproduct_adjoint_span(tree, b.coeff, g.values, out.values);
  return out;
}

LeafFn apply_paraproduct_adjoint(const LeafFn& b, const LeafFn& g) {
  return apply_paraproduct_adjoint(haar_analysis(b), g);
}

LeafFn apply_martingale(const SignAssignment& r, const LeafFn& f) {
  if (r.depth != f.depth) throw std::invalid_argument("depth mismatch in apply_martingale");
  DyadicTree tree(f.depth);
  LeafFn out{f.depth, std::vector<double>(f.values.size())};
  martingale_span(tree, r.r, f.values, out.values);
  return out;
}

NodeScalars t0_coefficients(const Weight& u, const Weight& v) {
  if (u.depth() != v.depth()) throw std::invalid_argument("depth mismatch in t0_coefficients");
  DyadicTree tree = v.tree();
  NodeScalars alpha(static_cast<std::size_t>(tree.internal_count()));
  for (NodeId n = 0; n < tree.internal_count(); ++n) {
    const std::size_t i = static_cast<std::size_t>(n);
    alpha[i] = (std::abs(v.avg_jump(n)) / v.avg[i]) * (std::abs(u.inv_avg_jump(n)) / u.inv_avg[i]) *
               tree.node_length(n);
  }
  return alpha;
}

LeafFn apply_t0(const Weight& u, const Weight& v, const LeafFn& f) {
  if (u.depth() != f.depth) throw std::invalid_argument("depth mismatch in apply_t0");
  DyadicTree tree(f.depth);
  const NodeScalars alpha = t0_coefficients(u, v);
  LeafFn out{f.depth, std::vector<double>(f.values.size())};
  t0_span(tree, alpha, f.values, out.values);
  return out;
}

LeafFn square_function(const LeafFn& f) {
  DyadicTree tree(f.depth);
  const NodeScalars avg = dyadic_averages(f);
  // Running sum of squared average increments along the ancestor chain.
  NodeScalars acc(static_cast<std::size_t>(tree.node_count()), 0.0);
  for (NodeId n = 0; n < tree.internal_count(); ++n) {
    for (NodeId c : {DyadicTree::left(n), DyadicTree::right(n)}) {
      const double d = avg[static_cast<std::size_t>(c)] - avg[static_cast<std::size_t>(n)];
      acc[static_cast<std::size_t>(c)] = acc[static_cast<std::size_t>(n)] + d * d;
    }
  }
  LeafFn out{f.depth, std::vector<double>(f.values.size())};
  const std::int64_t fl = tree.first_leaf();
  for (std::int64_t i = 0; i < tree.leaf_count(); ++i) {
    out.values[static_cast<std::size_t>(i)] = std::sqrt(acc[static_cast<std::size_t>(fl + i)]);
  }
  return out;
}

NodeScalars sq_form_coeffs(const Weight& v) {
  DyadicTree tree = v.tree();
  return NodeScalars(v.avg.begin(), v.avg.begin() + static_cast<std::ptrdiff_t>(tree.internal_count()));
}

LeafFn maximal_function(const LeafFn& f) {
  DyadicTree tree(f.depth);
  std::vector<double> absf(f.values.size());
  for (std::size_t i = 0; i < absf.size(); ++i) absf[i] = std::abs(f.values[i]);
  const NodeScalars avg = dyadic_averages_of(tree, absf);
  NodeScalars best(static_cast<std::size_t>(tree.node_count()));
  best[0] = avg[0];
  for (NodeId n = 0; n < tree.internal_count(); ++n) {
    for (NodeId c : {DyadicTree::left(n), DyadicTree::right(n)}) {
      best[static_cast<std::size_t>(c)] = std::max(best[static_cast<std::size_t>(n)],
                                                   avg[static_cast<std::size_t>(c)]);
    }
  }
  LeafFn out{f.depth, std::vector<double>(f.values.size())};
  const std::int64_t fl = tree.first_leaf();
  for (std::int64_t i = 0; i < tree.leaf_count(); ++i) {
    out.values[static_cast<std::size_t>(i)] = best[static_cast<std::size_t>(fl + i)];
  }
  return out;
}

LeafFn weighted_maximal_function(const Weight& v, const LeafFn& f) {
  if (v.depth() != f.depth) throw std::invalid_argument("depth mismatch in weighted_maximal_function");
  DyadicTree tree(f.depth);
  std::vector<double> absfv(f.values.size());
  for (std::size_t i = 0; i < absfv.size(); ++i) absfv[i] = std::abs(f.values[i]) * v.w.values[i];
  const NodeScalars num = dyadic_averages_of(tree, absfv);
  NodeScalars best(static_cast<std::size_t>(tree.node_count()));
  best[0] = num[0] / v.avg[0];
  for (NodeId n = 0; n < tree.internal_count(); ++n) {
    for (NodeId c : {DyadicTree::left(n), DyadicTree::right(n)}) {
      best[static_cast<std::size_t>(c)] = std::max(best[static_cast<std::size_t>(n)],
                                                   num[static_cast<std::size_t>(c)] /
                                                       v.avg[static_cast<std::size_t>(c)]);
    }
  }
  LeafFn out{f.depth, std::vector<double>(f.values.size())};
  const std::int64_t fl = tree.first_leaf();
  for (std::int64_t i = 0; i < tree.leaf_count(); ++i) {
    out.values[static_cast<std::size_t>(i)] = best[static_cast<std::size_t>(fl + i)];
  }
  return out;
}

NodeScalars sawyer_values(const Weight& u, const Weight& v) {
  if (u.depth() != v.depth()) throw std::invalid_argument("depth mismatch in sawyer_values");
  const DyadicTree tree = u.tree();
  const int N = tree.depth;
  const std::int64_t leaves = tree.leaf_count();
  const double h = DyadicTree::length_at(N);
  // rmax[x] = max of m_I(u^{-1}) over nodes I with x in I and level(I) >= l;
  // descending l extends every running max by one coarser ancestor, so all
  // top levels share one O(2^N) sweep per level.
  std::vector<double> rmax(static_cast<std::size_t>(leaves));
  const std::int64_t fl = tree.first_leaf();
  for (std::int64_t x = 0; x < leaves; ++x) {
    rmax[static_cast<std::size_t>(x)] = u.inv_avg[static_cast<std::size_t>(fl + x)];
  }
  NodeScalars out(static_cast<std::size_t>(tree.node_count()));
  for (int level = N; level >= 0; --level) {
    if (level < N) {
      for (std::int64_t x = 0; x < leaves; ++x) {
        const NodeId anc = DyadicTree::id_at(level, x >> (N - level));
        rmax[static_cast<std::size_t>(x)] =
            std::max(rmax[static_cast<std::size_t>(x)], u.inv_avg[static_cast<std::size_t>(anc)]);
      }
    }
    const std::int64_t span = std::int64_t{1} << (N - level);
    const std::int64_t count = std::int64_t{1} << level;
    for (std::int64_t k = 0; k < count; ++k) {
      const NodeId n = DyadicTree::id_at(level, k);
      double integral = 0.0;
      for (std::int64_t x = k * span; x < (k + 1) * span; ++x) {
        const double m = rmax[static_cast<std::size_t>(x)];
        integral += m * m * v.w.values[static_cast<std::size_t>(x)];
      }
      out[static_cast<std::size_t>(n)] = integral * h / u.inv_mass(n);
    }
  }
  return out;
}

SupResult sawyer_constant(const Weight& u, const Weight& v) {
  const NodeScalars vals = sawyer_values(u, v);
  SupResult best{-1.0, 0};
  for (std::size_t n = 0; n < vals.size(); ++n) {
    if (vals[n] > best.value) best = {vals[n], static_cast<NodeId>(n)};
  }
  return best;
}

LinearOp make_paraproduct_op(const LeafFn& b) {
  auto coeff = std::make_shared<NodeScalars>(haar_analysis(b).coeff);
  const DyadicTree tree(b.depth);
  LinearOp op;
  op.name = "paraproduct";
  op.depth = b.depth;
  op.apply = [tree, coeff](std::span<const double> x, std::span<double> y) {
    paraproduct_span(tree, *coeff, x, y);
  };
  op.apply_tr = [tree, coeff](std::span<const double> x, std::span<double> y) {
    paraproduct_adjoint_span(tree, *coeff, x, y);
  };
  return op;
}

LinearOp make_paraproduct_adjoint_op(const LeafFn& b) {
  LinearOp op = make_paraproduct_op(b);
  std::swap(op.apply, op.apply_tr);
  op.name = "paraproduct-adjoint";
  return op;
}

LinearOp make_martingale_op(SignAssignment r) {
  const DyadicTree tree(r.depth);
  auto signs = std::make_shared<std::vector<double>>(std::move(r.r));
  LinearOp op;
  op.name = "martingale";
  op.depth = tree.depth;
  auto fn = [tree, signs](std::span<const double> x, std::span<double> y) {
    martingale_span(tree, *signs, x, y);
  };
  op.apply = fn;
  op.apply_tr = fn;  // self-adjoint in flat L2
  return op;
}

LinearOp make_t0_op(const Weight& u, const Weight& v) {
  const DyadicTree tree = u.tree();
  auto alpha = std::make_shared<NodeScalars>(t0_coefficients(u, v));
  LinearOp op;
  op.name = "t0";
  op.depth = tree.depth;
  auto fn = [tree, alpha](std::span<const double> x, std::span<double> y) {
    t0_span(tree, *alpha, x, y);
  };
  op.apply = fn;
  op.apply_tr = fn;  // self-adjoint in flat L2
  return op;
}

}  // namespace dyweights
