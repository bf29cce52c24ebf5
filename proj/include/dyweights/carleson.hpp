#pragma once

#include "dyweights/haar.hpp"
#include "dyweights/weight.hpp"

namespace dyweights {

// Nonnegative sequence indexed by the internal nodes (heap order).
struct CarlesonSequence {
  int depth = 0;
  NodeScalars lambda;  // size 2^depth - 1
};

struct IntensityResult {
  double value = 0.0;
  NodeId argmax = 0;
};

// Subtree sums S(J) = sum of lambda over internal nodes inside J, every node.
NodeScalars subtree_sums(const CarlesonSequence& seq);

// Carleson intensity sup_J S(J)/mu(J) with its argmax node.
IntensityResult intensity(const CarlesonSequence& seq, const Weight& mu);

// Intensity against Lebesgue measure, mu(J) = |J|.
IntensityResult intensity_flat(const CarlesonSequence& seq);

// lambda_I = b_I^2 / m_I v. Its intensity against u^{-1} is the quantity
// controlling the paraproduct bound.
CarlesonSequence carl_sequence(const HaarDecomposition& b, const Weight& v);

// lambda_I = (Delta_I x)^2 |I| m_I y built from two average trees. With
// (x, y) = (v, u^{-1}) and intensity against v this is the adjoint-side
// sequence; with (x, y) = (u^{-1}, v) and intensity against u^{-1} it is the
// square-function testing sequence.
CarlesonSequence delta_sequence(const Weight& x, const Weight& y);

// lambda_I = (Delta_I v)^2 |I| / m_I v; intensity against v is comparable to
// the reverse-Holder characteristic of v.
CarlesonSequence buckley_sequence(const Weight& v);

// lambda_I -> lambda_I / m_I(v^{-1}). Maps flat Carleson sequences to
// v-Carleson sequences at a factor-4 cost.
CarlesonSequence little_lemma_map(const CarlesonSequence& seq, const Weight& v);

// Weighted Carleson pairing: lhs = sum_I (min of F under I) lambda_I,
// rhs = intensity(seq, v) * integral of F v. lhs <= rhs for F >= 0.
struct PairingBound {
  double lhs = 0.0;
  double rhs = 0.0;
  IntensityResult carleson;
};
PairingBound wcl_pairing(const CarlesonSequence& seq, const LeafFn& F, const Weight& v);

// sup_I (1/|I|) sum of b_J^2 over J inside I; equals
// sup_I (1/|I|) int_I |b - m_I b|^2 exactly (subtree Plancherel).
double bmo_norm_sq(const HaarDecomposition& b);
double bmo_norm(const HaarDecomposition& b);

// Oscillation form of the same sup, computed from leaf values.
double bmo_norm_sq_osc(const LeafFn& b);

// sup_I (1/mu(I)) int_I |b - m_I b| dx, the mu-weighted L1 oscillation.
double bloom_bmo_norm(const LeafFn& b, const Weight& mu);

// sup_J (1/u^{-1}(J)) sum_{I inside J} b_I^2 (m_I u^{-1})^2 m_I v.
IntensityResult b2_constant(const HaarDecomposition& b, const Weight& u, const Weight& v);

}  // namespace dyweights
