#pragma once

#include "dyweights/tree.hpp"

namespace dyweights {

// Expansion f = mean + sum_I coeff[I] * h_I over internal nodes I, where
// h_I = |I|^{-1/2} (1_{I+} - 1_{I-}) and I+ is the RIGHT half of I.
struct HaarDecomposition {
  int depth = 0;
  double mean = 0.0;
  NodeScalars coeff;  // internal nodes only, heap order, size 2^depth - 1
};

// coeff[I] = <f, h_I> = (sqrt(|I|)/2) * (m_{I+} f - m_{I-} f).
HaarDecomposition haar_analysis(const LeafFn& f);

// Exact inverse of haar_analysis: descends averages from the mean.
LeafFn haar_synthesis(const HaarDecomposition& d);

// h_I as a leaf function (zero outside I).
LeafFn haar_fn(const DyadicTree& tree, NodeId n);

// Parseval on [0,1): mean^2 + sum coeff^2 == flat_norm_sq(f).
double coefficient_mass(const HaarDecomposition& d);

}  // namespace dyweights
