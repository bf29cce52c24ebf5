#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dyweights/operators.hpp"
#include "dyweights/weight.hpp"

namespace dyweights {

// kind is "exact" when the value is an iteratively converged top singular
// value / Rayleigh quotient, "lower-bound" when it comes from an ascent that
// only ever certifies one direction.
struct NormEstimate {
  double value = 0.0;
  std::string kind;
  int iterations = 0;
  double residual = 0.0;
  std::uint64_t seed = 0;
};

// ||f||_{L2(w)}.
double weighted_norm(const LeafFn& f, const Weight& w);
double weighted_norm_sq(const LeafFn& f, const Weight& w);

// Optional extra start vectors for the power iterations (leaf functions in
// the source space); the Rayleigh quotient of a power iteration on a PSD
// matrix never drops below its start value, so a witness start turns a
// converged value into a certified lower bound at that witness.
using StartVectors = std::vector<LeafFn>;

// Dense route: materializes D_v^{1/2} T D_u^{-1/2} column by column and runs
// power iteration on its normal matrix from a deterministic alternating-sign
// start plus one seeded random restart. Depth <= 12.
NormEstimate op_norm_exact(const LinearOp& op, const Weight& u, const Weight& v,
                           double tol = 1e-10, std::uint64_t seed = 1,
                           const StartVectors* witnesses = nullptr);

// Matrix-free route: same normal operator assembled from apply/apply_tr.
NormEstimate op_norm_power(const LinearOp& op, const Weight& u, const Weight& v,
                           double tol = 1e-8, int max_iters = 10000, std::uint64_t seed = 1,
                           const StartVectors* witnesses = nullptr);

// ||S||_{L2(u) -> L2(v)} via power iteration on the quadratic form
// sum_I m_I v <f, h_I>^2; exact at any depth.
NormEstimate sq_norm(const Weight& u, const Weight& v, double tol = 1e-10,
                     int max_iters = 10000, const StartVectors* witnesses = nullptr);

// Lower bound for ||M||_{L2(u) -> L2(v)} by alternating ascent: evaluate the
// candidate set {u^{-1} 1_J} plus seeded random nonnegative functions, then
// repeatedly linearize the maximal operator at the current selection, take
// the top singular vector, and re-evaluate the true ratio. budget bounds the
// outer rounds.
NormEstimate maximal_norm_lower(const Weight& u, const Weight& v, int budget = 6,
                                std::uint64_t seed = 1);

// Same ascent for the weighted maximal M_v acting on L2(v).
NormEstimate weighted_maximal_norm_lower(const Weight& v, int budget = 6,
                                         std::uint64_t seed = 1);

// Lower bound for sup over sign choices of ||T_r||_{L2(u) -> L2(v)}:
// alternate between the top singular pair at fixed signs and the exact sign
// optimum at a fixed pair.
struct MartingaleSupResult {
  SignAssignment signs;
  NormEstimate estimate;
};
MartingaleSupResult martingale_sup_norm_lower(const Weight& u, const Weight& v,
                                              int restarts = 4, std::uint64_t seed = 1);

// sup over mean-zero f of ||f||_{L2(w)} / ||S f||_{L2(w)}; the square-function
// form is diagonal in Haar coordinates, so this is another exact power
// iteration.
NormEstimate inverse_sq_ratio(const Weight& w, double tol = 1e-10, int max_iters = 10000);

}  // namespace dyweights
