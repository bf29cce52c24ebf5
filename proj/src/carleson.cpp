#include "dyweights/carleson.hpp"

#include <cmath>
#include <stdexcept>

namespace dyweights {

namespace {

void check_seq(const CarlesonSequence& seq) {
  DyadicTree tree(seq.depth);
  if (static_cast<std::int64_t>(seq.lambda.size()) != tree.internal_count()) {
    throw std::invalid_argument("carleson sequence needs one entry per internal node");
  }
}

IntensityResult intensity_against(const CarlesonSequence& seq, const NodeScalars& mass_avg) {
  check_seq(seq);
  DyadicTree tree(seq.depth);
  const NodeScalars sums = subtree_sums(seq);
  IntensityResult best{-1.0, 0};
  for (NodeId n = 0; n < tree.node_count(); ++n) {
    const double mu = tree.node_length(n) * mass_avg[static_cast<std::size_t>(n)];
    const double r = sums[static_cast<std::size_t>(n)] / mu;
    if (r > best.value) best = {r, n};
  }
  return best;
}

}  // namespace

NodeScalars subtree_sums(const CarlesonSequence& seq) {
  check_seq(seq);
  DyadicTree tree(seq.depth);
  NodeScalars s(static_cast<std::size_t>(tree.node_count()), 0.0);
  for (NodeId n = tree.internal_count() - 1; n >= 0; --n) {
    s[static_cast<std::size_t>(n)] = seq.lambda[static_cast<std::size_t>(n)] +
                                     s[static_cast<std::size_t>(DyadicTree::left(n))] +
                                     s[static_cast<std::size_t>(DyadicTree::right(n))];
  }
  return s;
}

IntensityResult intensity(const CarlesonSequence& seq, const Weight& mu) {
  if (mu.depth() != seq.depth) throw std::invalid_argument("depth mismatch in intensity");
  return intensity_against(seq, mu.avg);
}

IntensityResult intensity_flat(const CarlesonSequence& seq) {
  return intensity_against(seq, NodeScalars(static_cast<std::size_t>(DyadicTree(seq.depth).node_count()), 1.0));
}

CarlesonSequence carl_sequence(const HaarDecomposition& b, const Weight& v) {
  if (b.depth != v.depth()) throw std::invalid_argument("depth mismatch in carl_sequence");
  CarlesonSequence seq{b.depth, NodeScalars(b.coeff.size())};
  for (std::size_t n = 0; n < b.coeff.size(); ++n) {
    seq.lambda[n] = b.coeff[n] * b.coeff[n] / v.avg[n];
  }
  return seq;
}

CarlesonSequence delta_sequence(const Weight& x, const Weight& y) {
  if (x.depth() != y.depth()) throw std::invalid_argument("depth mismatch in delta_sequence");
  DyadicTree tree = x.tree();
  CarlesonSequence seq{x.depth(), NodeScalars(static_cast<std::size_t>(tree.internal_count()))};
  for (NodeId n = 0; n < tree.internal_count(); ++n) {
    const double jump = x.avg_jump(n);
    seq.lambda[static_cast<std::size_t>(n)] =
        jump * jump * tree.node_length(n) * y.avg[static_cast<std::size_t>(n)];
  }
  return seq;
}

CarlesonSequence buckley_sequence(const Weight& v) {
  DyadicTree tree = v.tree();
  CarlesonSequence seq{v.depth(), NodeScalars(static_cast<std::size_t>(tree.internal_count()))};
  for (NodeId n = 0; n < tree.internal_count(); ++n) {
    const double jump = v.avg_jump(n);
    seq.lambda[static_cast<std::size_t>(n)] =
        jump * jump * tree.node_length(n) / v.avg[static_cast<std::size_t>(n)];
  }
  return seq;
}

CarlesonSequence little_lemma_map(const CarlesonSequence& seq, const Weight& v) {
  check_seq(seq);
  if (v.depth() != seq.depth) throw std::invalid_argument("depth mismatch in little_lemma_map");
  CarlesonSequence out{seq.depth, NodeScalars(seq.lambda.size())};
  for (std::size_t n = 0; n < seq.lambda.size(); ++n) {
    out.lambda[n] = seq.lambda[n] / v.inv_avg[n];
  }
  return out;
}

PairingBound wcl_pairing(const CarlesonSequence& seq, const LeafFn& F, const Weight& v) {
  check_seq(seq);
  if (F.depth != seq.depth || v.depth() != seq.depth) {
    throw std::invalid_argument("depth mismatch in wcl_pairing");
  }
  for (double x : F.values) {
    if (!(x >= 0.0)) throw std::invalid_argument("wcl_pairing needs F >= 0");
  }
  DyadicTree tree(seq.depth);
  const NodeScalars mins = subtree_min(F);
  PairingBound out;
  for (NodeId n = 0; n < tree.internal_count(); ++n) {
    out.lhs += mins[static_cast<std::size_t>(n)] * seq.lambda[static_cast<std::size_t>(n)];
  }
  out.carleson = intensity(seq, v);
  out.rhs = out.carleson.value * flat_inner(F, v.w);
  return out;
}

double bmo_norm_sq(const HaarDecomposition& b) {
  DyadicTree tree(b.depth);
  CarlesonSequence sq{b.depth, NodeScalars(b.coeff.size())};
  for (std::size_t n = 0; n < b.coeff.size(); ++n) sq.lambda[n] = b.coeff[n] * b.coeff[n];
  const NodeScalars sums = subtree_sums(sq);
  double best = 0.0;
  for (NodeId n = 0; n < tree.internal_count(); ++n) {
    best = std::max(best, sums[static_cast<std::size_t>(n)] / tree.node_length(n));
  }
  return best;
}

double bmo_norm(const HaarDecomposition& b) { return std::sqrt(bmo_norm_sq(b)); }

double bmo_norm_sq_osc(const LeafFn& b) {
  DyadicTree tree(b.depth);
  const NodeScalars avg = dyadic_averages(b);
  std::vector<double> b2(b.values.size());
  for (std::size_t i = 0; i < b2.size(); ++i) b2[i] = b.values[i] * b.values[i];
  const NodeScalars avg2 = dyadic_averages_of(tree, b2);
  double best = 0.0;
  for (std::size_t n = 0; n < avg.size(); ++n) {
    best = std::max(best, avg2[n] - avg[n] * avg[n]);
  }
  return best;
}

double bloom_bmo_norm(const LeafFn& b, const Weight& mu) {
  if (b.depth != mu.depth()) throw std::invalid_argument("depth mismatch in bloom_bmo_norm");
  DyadicTree tree(b.depth);
  const NodeScalars avg = dyadic_averages(b);
  const double h = DyadicTree::length_at(b.depth);
  double best = 0.0;
  for (int level = 0; level <= tree.depth; ++level) {
    const std::int64_t count = std::int64_t{1} << level;
    const std::int64_t span = std::int64_t{1} << (tree.depth - level);
    for (std::int64_t k = 0; k < count; ++k) {
      const NodeId n = DyadicTree::id_at(level, k);
      const double m = avg[static_cast<std::size_t>(n)];
      double osc = 0.0;
      for (std::int64_t j = k * span; j < (k + 1) * span; ++j) {
        osc += std::abs(b.values[static_cast<std::size_t>(j)] - m);
      }
      best = std::max(best, osc * h / mu.mass(n));
    }
  }
  return best;
}

IntensityResult b2_constant(const HaarDecomposition& b, const Weight& u, const Weight& v) {
  if (b.depth != u.depth() || b.depth != v.depth()) {
    throw std::invalid_argument("depth mismatch in b2_constant");
  }
  CarlesonSequence seq{b.depth, NodeScalars(b.coeff.size())};
  for (std::size_t n = 0; n < b.coeff.size(); ++n) {
    const double mi = u.inv_avg[n];
    seq.lambda[n] = b.coeff[n] * b.coeff[n] * mi * mi * v.avg[n];
  }
  return intensity_against(seq, u.inv_avg);
}

}  // namespace dyweights
