#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dyweights {

using NodeId = std::int64_t;

// One real value per tree node, heap order (see DyadicTree).
using NodeScalars = std::vector<double>;

// Complete binary tree of the dyadic subintervals of [0,1) down to a fixed
// leaf level N. Heap addressing: root is node 0, node n has children 2n+1
// (left half of the interval) and 2n+2 (right half). The node at level l with
// in-level index k covers [k*2^-l, (k+1)*2^-l) and has id 2^l - 1 + k, so ids
// are independent of N and internal nodes occupy the prefix [0, 2^N - 1).
struct DyadicTree {
  int depth;

  explicit DyadicTree(int n) : depth(n) {
    if (n < 1 || n > 24) throw std::invalid_argument("dyadic tree depth must be in [1, 24]");
  }

  std::int64_t node_count() const { return (std::int64_t{1} << (depth + 1)) - 1; }
  std::int64_t leaf_count() const { return std::int64_t{1} << depth; }
  std::int64_t internal_count() const { return (std::int64_t{1} << depth) - 1; }
  NodeId first_leaf() const { return internal_count(); }

  static constexpr NodeId root = 0;
  static NodeId left(NodeId n) { return 2 * n + 1; }
  static NodeId right(NodeId n) { return 2 * n + 2; }
  static NodeId parent(NodeId n) { return (n - 1) / 2; }
  static int level_of(NodeId n) {
    return std::bit_width(static_cast<std::uint64_t>(n) + 1) - 1;
  }
  static std::int64_t index_in_level(NodeId n) {
    return n + 1 - (std::int64_t{1} << level_of(n));
  }
  static NodeId id_at(int level, std::int64_t k) { return (NodeId{1} << level) - 1 + k; }

  bool is_leaf(NodeId n) const { return n >= first_leaf(); }
  bool is_internal(NodeId n) const { return n < internal_count(); }

  static double length_at(int level) { return std::ldexp(1.0, -level); }
  double node_length(NodeId n) const { return length_at(level_of(n)); }

  // Endpoints [a, b) of the interval covered by node n.
  std::pair<double, double> interval(NodeId n) const {
    const int l = level_of(n);
    const double h = length_at(l);
    const double a = static_cast<double>(index_in_level(n)) * h;
    return {a, a + h};
  }

  // Half-open range of leaf offsets (0-based within the leaf level) under n.
  std::pair<std::int64_t, std::int64_t> leaf_span(NodeId n) const {
    const int l = level_of(n);
    const std::int64_t w = std::int64_t{1} << (depth - l);
    const std::int64_t lo = index_in_level(n) * w;
    return {lo, lo + w};
  }
};

// Function on [0,1) that is constant on the depth-N leaf cells.
struct LeafFn {
  int depth = 0;
  std::vector<double> values;
};

LeafFn make_leaf_fn(int depth, std::vector<double> values);

// Lebesgue inner product on [0,1): sum of leaf products times cell width.
double flat_inner(const LeafFn& f, const LeafFn& g);
double flat_norm_sq(const LeafFn& f);
double flat_integral(const LeafFn& f);

// Cell averages m_I f for every node; avg[leaf] is the leaf value and each
// internal average is the mean of its two children.
NodeScalars dyadic_averages(const LeafFn& f);

// Same bottom-up pass applied to an arbitrary pointwise transform of the
// leaves (used for averages of |f|, f*w, log f, ...).
NodeScalars dyadic_averages_of(const DyadicTree& tree, const std::vector<double>& leaf_values);

// Minimum of f over the leaves under each node.
NodeScalars subtree_min(const LeafFn& f);

}  // namespace dyweights
