#include "dyweights/tree.hpp"

#include <algorithm>
#include <cstddef>

namespace dyweights {

LeafFn make_leaf_fn(int depth, std::vector<double> values) {
  DyadicTree tree(depth);
  if (static_cast<std::int64_t>(values.size()) != tree.leaf_count()) {
    throw std::invalid_argument("leaf function needs 2^depth values");
  }
  return LeafFn{depth, std::move(values)};
}

double flat_inner(const LeafFn& f, const LeafFn& g) {
  if (f.depth != g.depth) throw std::invalid_argument("depth mismatch in flat_inner");
  const double h = DyadicTree::length_at(f.depth);
  double s = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) s += f.values[i] * g.values[i];
  return s * h;
}

double flat_norm_sq(const LeafFn& f) { return flat_inner(f, f); }

double flat_integral(const LeafFn& f) {
  const double h = DyadicTree::length_at(f.depth);
  double s = 0.0;
  for (double x : f.values) s += x;
  return s * h;
}

NodeScalars dyadic_averages_of(const DyadicTree& tree, const std::vector<double>& leaf_values) {
  if (static_cast<std::int64_t>(leaf_values.size()) != tree.leaf_count()) {
    throw std::invalid_argument("leaf count mismatch in dyadic_averages_of");
  }
  NodeScalars avg(static_cast<std::size_t>(tree.node_count()));
  std::copy(leaf_values.begin(), leaf_values.end(),
            avg.begin() + static_cast<std::ptrdiff_t>(tree.first_leaf()));
  for (NodeId n = tree.internal_count() - 1; n >= 0; --n) {
    avg[static_cast<std::size_t>(n)] =
        0.5 * (avg[static_cast<std::size_t>(DyadicTree::left(n))] +
               avg[static_cast<std::size_t>(DyadicTree::right(n))]);
  }
  return avg;
}

NodeScalars dyadic_averages(const LeafFn& f) {
  return dyadic_averages_of(DyadicTree(f.depth), f.values);
}

NodeScalars subtree_min(const LeafFn& f) {
  DyadicTree tree(f.depth);
  NodeScalars m(static_cast<std::size_t>(tree.node_count()));
  std::copy(f.values.begin(), f.values.end(),
            m.begin() + static_cast<std::ptrdiff_t>(tree.first_leaf()));
  for (NodeId n = tree.internal_count() - 1; n >= 0; --n) {
    m[static_cast<std::size_t>(n)] = std::min(m[static_cast<std::size_t>(DyadicTree::left(n))],
                                              m[static_cast<std::size_t>(DyadicTree::right(n))]);
  }
  return m;
}

}  // namespace dyweights
