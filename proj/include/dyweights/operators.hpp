#pragma once

#include <functional>
#include <span>
#include <string>

#include "dyweights/haar.hpp"
#include "dyweights/weight.hpp"

namespace dyweights {

// +-1 per internal node, heap order.
struct SignAssignment {
  int depth = 0;
  std::vector<double> r;

  static SignAssignment all_plus(int depth);
  static SignAssignment random(int depth, std::uint64_t seed);
};

// pi_b f = sum_I (m_I f) b_I h_I.
LeafFn apply_paraproduct(const LeafFn& b, const LeafFn& f);
LeafFn apply_paraproduct(const HaarDecomposition& b, const LeafFn& f);

// pi*_b g = sum_I b_I <g, h_I> 1_I / |I|, the flat-L2 adjoint of pi_b.
LeafFn apply_paraproduct_adjoint(const LeafFn& b, const LeafFn& g);
LeafFn apply_paraproduct_adjoint(const HaarDecomposition& b, const LeafFn& g);

// T_r f = sum_I r_I <f, h_I> h_I; the global mean is annihilated.
LeafFn apply_martingale(const SignAssignment& r, const LeafFn& f);

// alpha_I = (|Delta_I v| / m_I v) (|Delta_I u^{-1}| / m_I u^{-1}) |I| per
// internal node: the coefficients of the stopping-form test operator.
NodeScalars t0_coefficients(const Weight& u, const Weight& v);

// T0 f = sum_I (alpha_I / |I|) (m_I f) 1_I; self-adjoint in flat L2.
LeafFn apply_t0(const Weight& u, const Weight& v, const LeafFn& f);

// (S f)(x) = sqrt( sum over nodes I containing x below the root of
// (m_I f - m_parent(I) f)^2 ).
LeafFn square_function(const LeafFn& f);

// m_I v on internal nodes: coefficients of the quadratic form
// ||S f||^2_{L2(v)} = sum_I m_I v <f, h_I>^2.
NodeScalars sq_form_coeffs(const Weight& v);

// Dyadic maximal function: max over ancestors (leaf included) of m_I |f|.
LeafFn maximal_function(const LeafFn& f);

// Weighted variant: max over ancestors of m_I(|f| v) / m_I v.
LeafFn weighted_maximal_function(const Weight& v, const LeafFn& f);

struct SupResult {
  double value = 0.0;
  NodeId argmax = 0;
};

// Per-node testing values (1/u^{-1}(J)) int_J ( M_J(1_J u^{-1}) )^2 v, where
// M_J restricts the maximal function to averages over subintervals of J.
// Computed level by level in O(N 2^N).
NodeScalars sawyer_values(const Weight& u, const Weight& v);

// sup over nodes of sawyer_values with its argmax.
SupResult sawyer_constant(const Weight& u, const Weight& v);

// Matrix-free linear operator on leaf vectors with its flat-L2 adjoint.
struct LinearOp {
  std::string name;
  int depth = 0;
  std::function<void(std::span<const double>, std::span<double>)> apply;
  std::function<void(std::span<const double>, std::span<double>)> apply_tr;
};

LinearOp make_paraproduct_op(const LeafFn& b);
LinearOp make_paraproduct_adjoint_op(const LeafFn& b);
LinearOp make_martingale_op(SignAssignment r);
LinearOp make_t0_op(const Weight& u, const Weight& v);

}  // namespace dyweights
