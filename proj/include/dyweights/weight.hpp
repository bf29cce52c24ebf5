#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dyweights/haar.hpp"
#include "dyweights/tree.hpp"

namespace dyweights {

// Positive leaf function together with the cached cell averages of itself and
// of its pointwise reciprocal. The reciprocal convention is pointwise on the
// leaves first, then averaged; inv_avg[I] is m_I(w^{-1}) in that sense.
struct Weight {
  LeafFn w;
  NodeScalars avg;      // m_I w, all nodes
  NodeScalars inv_avg;  // m_I (w^{-1}), all nodes

  int depth() const { return w.depth; }
  DyadicTree tree() const { return DyadicTree(w.depth); }

  // w(I) = |I| m_I w and (w^{-1})(I), used as measures of nodes.
  double mass(NodeId n) const { return DyadicTree::length_at(DyadicTree::level_of(n)) * avg[static_cast<std::size_t>(n)]; }
  double inv_mass(NodeId n) const { return DyadicTree::length_at(DyadicTree::level_of(n)) * inv_avg[static_cast<std::size_t>(n)]; }

  // Child-average difference, right minus left.
  double avg_jump(NodeId n) const {
    return avg[static_cast<std::size_t>(DyadicTree::right(n))] - avg[static_cast<std::size_t>(DyadicTree::left(n))];
  }
  double inv_avg_jump(NodeId n) const {
    return inv_avg[static_cast<std::size_t>(DyadicTree::right(n))] - inv_avg[static_cast<std::size_t>(DyadicTree::left(n))];
  }

  // Pointwise reciprocal as a Weight; the average caches swap roles exactly.
  Weight reciprocal() const;

  static Weight flat(int depth);
};

// Validates positivity and builds both average caches.
Weight weight_from_leaves(LeafFn leaves);

// Serializable recipe for a weight. Families:
//   power             w(x) = x^alpha, |alpha| < 1; leaves are exact cell averages
//   random-martingale multiplicative top-down jumps uniform in (-delta, delta)
//   step              piecewise constant with arbitrary breakpoints; exact cell averages
//   leaf-values       explicit leaf array
struct WeightSpec {
  std::string family;
  int depth = 0;
  double alpha = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> values;
  std::vector<double> breakpoints;

  std::string to_json() const;
  static WeightSpec from_json(const std::string& text);
  void validate() const;
};

Weight materialize(const WeightSpec& spec, std::optional<int> depth_override = std::nullopt);

Weight make_power_weight(double alpha, int depth);
Weight make_random_martingale_weight(int depth, double delta, std::uint64_t seed);
Weight make_step_weight(int depth, const std::vector<double>& breakpoints,
                        const std::vector<double>& values);

// Depth-(N-1) conditional expectation: adjacent leaf pairs replaced by their
// mean. Characteristics never increase under this map.
Weight coarsen(const Weight& v);

// sup_I m_I(u^{-1}) m_I(v) over all nodes, leaves included.
double char_joint_a2(const Weight& u, const Weight& v);

// Same sup when the two factors are given directly as average trees. The
// power-weight scaling sweep feeds the exact average trees of x^alpha and
// x^-alpha through this to reproduce the closed form 1/(1-alpha^2).
double joint_a2_of_avgs(const NodeScalars& uinv_avg, const NodeScalars& v_avg);

// sup_I m_I((v/m_I v) log(v/m_I v)); zero for constant weights.
double char_rh1(const Weight& v);

// sup_I m_I(v) exp(m_I(log v^{-1})); equals 1 for constant weights.
double char_ainfty(const Weight& v);

// max over non-root nodes of v(parent)/v(I); equals 2 for constant weights.
double char_doubling(const Weight& v);

// Weighted Haar function h^v_I: supported on I, v-mean zero, unit L2(v) norm,
// positive on the right child.
LeafFn weighted_haar_fn(const Weight& v, NodeId n);

// Coefficients of h_I = alpha * h^v_I + beta * 1_I / sqrt(|I|), solved exactly
// from the values on the two children. |alpha| <= sqrt(m_I v) and
// |beta| <= |Delta_I v| / m_I v always hold.
struct WhbCoefficients {
  double alpha = 0.0;
  double beta = 0.0;
};
WhbCoefficients whb_decompose(const Weight& v, NodeId n);

}  // namespace dyweights
