#include "dyweights/haar.hpp"

#include <cmath>

namespace dyweights {

HaarDecomposition haar_analysis(const LeafFn& f) {
  DyadicTree tree(f.depth);
  const NodeScalars avg = dyadic_averages(f);
  HaarDecomposition d;
  d.depth = f.depth;
  d.mean = avg[0];
  d.coeff.resize(static_cast<std::size_t>(tree.internal_count()));
  for (NodeId n = 0; n < tree.internal_count(); ++n) {
    const double len = tree.node_length(n);
    const double jump = avg[static_cast<std::size_t>(DyadicTree::right(n))] -
                        avg[static_cast<std::size_t>(DyadicTree::left(n))];
    d.coeff[static_cast<std::size_t>(n)] = 0.5 * std::sqrt(len) * jump;
  }
  return d;
}

LeafFn haar_synthesis(const HaarDecomposition& d) {
  DyadicTree tree(d.depth);
  if (static_cast<std::int64_t>(d.coeff.size()) != tree.internal_count()) {
    throw std::invalid_argument("coefficient count mismatch in haar_synthesis");
  }
  // Averages descend: m_{I+-} = m_I +- coeff_I / sqrt(|I|).
  NodeScalars val(static_cast<std::size_t>(tree.node_count()));
  val[0] = d.mean;
  for (NodeId n = 0; n < tree.internal_count(); ++n) {
    const double step = d.coeff[static_cast<std::size_t>(n)] / std::sqrt(tree.node_length(n));
    val[static_cast<std::size_t>(DyadicTree::left(n))] = val[static_cast<std::size_t>(n)] - step;
    val[static_cast<std::size_t>(DyadicTree::right(n))] = val[static_cast<std::size_t>(n)] + step;
  }
  LeafFn f;
  f.depth = d.depth;
  f.values.assign(val.begin() + static_cast<std::ptrdiff_t>(tree.first_leaf()), val.end());
  return f;
}

LeafFn haar_fn(const DyadicTree& tree, NodeId n) {
  if (n < 0 || n >= tree.internal_count()) {
    throw std::invalid_argument("haar_fn needs an internal node");
  }
  LeafFn h;
  h.depth = tree.depth;
  h.values.assign(static_cast<std::size_t>(tree.leaf_count()), 0.0);
  const double amp = 1.0 / std::sqrt(tree.node_length(n));
  const auto [llo, lhi] = tree.leaf_span(DyadicTree::left(n));
  const auto [rlo, rhi] = tree.leaf_span(DyadicTree::right(n));
  for (std::int64_t i = llo; i < lhi; ++i) h.values[static_cast<std::size_t>(i)] = -amp;
  for (std::int64_t i = rlo; i < rhi; ++i) h.values[static_cast<std::size_t>(i)] = amp;
  return h;
}

double coefficient_mass(const HaarDecomposition& d) {
  double s = d.mean * d.mean;
  for (double c : d.coeff) s += c * c;
  return s;
}

}  // namespace dyweights
