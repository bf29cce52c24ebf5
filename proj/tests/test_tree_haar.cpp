#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "dyweights/haar.hpp"
#include "dyweights/rng.hpp"
#include "dyweights/tree.hpp"

using namespace dyweights;

namespace {

LeafFn random_fn(int depth, std::uint64_t seed) {
  DyadicTree tree(depth);
  std::vector<double> v(static_cast<std::size_t>(tree.leaf_count()));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = usym(mix_seed(seed, i));
  return make_leaf_fn(depth, std::move(v));
}

}  // namespace

TEST_CASE("heap addressing round trips") {
  DyadicTree tree(5);
  CHECK(tree.node_count() == 63);
  CHECK(tree.leaf_count() == 32);
  CHECK(tree.internal_count() == 31);
  CHECK(tree.first_leaf() == 31);
  for (NodeId n = 0; n < tree.node_count(); ++n) {
    const int l = DyadicTree::level_of(n);
    const std::int64_t k = DyadicTree::index_in_level(n);
    CHECK(DyadicTree::id_at(l, k) == n);
    if (n != DyadicTree::root) {
      const NodeId p = DyadicTree::parent(n);
      CHECK((DyadicTree::left(p) == n || DyadicTree::right(p) == n));
      CHECK(DyadicTree::level_of(p) == l - 1);
    }
  }
}

TEST_CASE("node ids are depth independent") {
  // The node covering [3/8, 4/8) is id 10 no matter how deep the tree goes.
  CHECK(DyadicTree::id_at(3, 3) == 10);
  for (int depth : {4, 7, 12}) {
    DyadicTree tree(depth);
    const auto [a, b] = tree.interval(10);
    CHECK(a == doctest::Approx(3.0 / 8).epsilon(1e-15));
    CHECK(b == doctest::Approx(4.0 / 8).epsilon(1e-15));
  }
}

TEST_CASE("intervals nest and leaf spans tile") {
  DyadicTree tree(6);
  for (NodeId n = 0; n < tree.internal_count(); ++n) {
    const auto [a, b] = tree.interval(n);
    const auto [la, lb] = tree.interval(DyadicTree::left(n));
    const auto [ra, rb] = tree.interval(DyadicTree::right(n));
    CHECK(la == a);
    CHECK(lb == ra);  // left child is the left half
    CHECK(rb == b);
    const auto [lo, hi] = tree.leaf_span(n);
    const auto [llo, lhi] = tree.leaf_span(DyadicTree::left(n));
    const auto [rlo, rhi] = tree.leaf_span(DyadicTree::right(n));
    CHECK(llo == lo);
    CHECK(lhi == rlo);
    CHECK(rhi == hi);
  }
  CHECK(tree.leaf_span(DyadicTree::root) == std::pair<std::int64_t, std::int64_t>{0, 64});
}

TEST_CASE("depth bounds rejected") {
  CHECK_THROWS_AS(DyadicTree(0), std::invalid_argument);
  CHECK_THROWS_AS(DyadicTree(25), std::invalid_argument);
  CHECK_NOTHROW(DyadicTree(1));
  CHECK_NOTHROW(DyadicTree(24));
}

TEST_CASE("averages of a hand example") {
  // N=2, f = (1,1,2,2): leaf averages themselves, level-1 averages (1,2),
  // root average 3/2.
  const LeafFn f = make_leaf_fn(2, {1, 1, 2, 2});
  const NodeScalars avg = dyadic_averages(f);
  CHECK(avg[0] == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(avg[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(avg[2] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(avg[3] == 1.0);
  CHECK(avg[6] == 2.0);
  CHECK(flat_integral(f) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(flat_norm_sq(f) == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("haar analysis of the hand example") {
  const LeafFn f = make_leaf_fn(2, {1, 1, 2, 2});
  const HaarDecomposition d = haar_analysis(f);
  CHECK(d.mean == doctest::Approx(1.5).epsilon(1e-15));
  // Root: (sqrt(1)/2) * (2 - 1) = 1/2; both level-1 coefficients vanish.
  CHECK(d.coeff[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(d.coeff[1] == doctest::Approx(0.0));
  CHECK(d.coeff[2] == doctest::Approx(0.0));
  CHECK(coefficient_mass(d) == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("haar function sign convention: positive on the right half") {
  DyadicTree tree(1);
  const LeafFn h = haar_fn(tree, DyadicTree::root);
  CHECK(h.values[0] == doctest::Approx(-1.0));
  CHECK(h.values[1] == doctest::Approx(1.0));
}

TEST_CASE("haar functions are a flat orthonormal system") {
  DyadicTree tree(4);
  std::vector<LeafFn> hs;
  for (NodeId n = 0; n < tree.internal_count(); ++n) hs.push_back(haar_fn(tree, n));
  for (std::size_t i = 0; i < hs.size(); ++i) {
    CHECK(flat_norm_sq(hs[i]) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(flat_integral(hs[i]) == doctest::Approx(0.0));
    for (std::size_t j = i + 1; j < hs.size(); ++j) {
      CHECK(flat_inner(hs[i], hs[j]) == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("analysis inverts synthesis and vice versa") {
  for (int depth : {1, 3, 6, 9}) {
    const LeafFn f = random_fn(depth, 0x9001 + static_cast<std::uint64_t>(depth));
    const HaarDecomposition d = haar_analysis(f);
    const LeafFn g = haar_synthesis(d);
    REQUIRE(g.values.size() == f.values.size());
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      CHECK(g.values[i] == doctest::Approx(f.values[i]).epsilon(1e-12));
    }
    const HaarDecomposition d2 = haar_analysis(g);
    CHECK(d2.mean == doctest::Approx(d.mean).epsilon(1e-12));
    for (std::size_t n = 0; n < d.coeff.size(); ++n) {
      CHECK(d2.coeff[n] == doctest::Approx(d.coeff[n]).epsilon(1e-10));
    }
  }
}

TEST_CASE("parseval over random functions") {
  for (std::uint64_t s = 1; s <= 8; ++s) {
    const LeafFn f = random_fn(7, mix_seed(0xABCD, s));
    CHECK(coefficient_mass(haar_analysis(f)) ==
          doctest::Approx(flat_norm_sq(f)).epsilon(1e-12));
  }
}

TEST_CASE("coefficients are the flat inner products with haar functions") {
  DyadicTree tree(5);
  const LeafFn f = random_fn(5, 0xFEED);
  const HaarDecomposition d = haar_analysis(f);
  for (NodeId n = 0; n < tree.internal_count(); ++n) {
    CHECK(d.coeff[static_cast<std::size_t>(n)] ==
          doctest::Approx(flat_inner(f, haar_fn(tree, n))).epsilon(1e-12));
  }
}

TEST_CASE("dyadic_averages_of matches a brute-force span sum") {
  DyadicTree tree(4);
  const LeafFn f = random_fn(4, 0xBEEF);
  std::vector<double> squares(f.values.size());
  for (std::size_t i = 0; i < squares.size(); ++i) squares[i] = f.values[i] * f.values[i];
  const NodeScalars avg = dyadic_averages_of(tree, squares);
  for (NodeId n = 0; n < tree.node_count(); ++n) {
    const auto [lo, hi] = tree.leaf_span(n);
    double s = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) s += squares[static_cast<std::size_t>(i)];
    CHECK(avg[static_cast<std::size_t>(n)] ==
          doctest::Approx(s / static_cast<double>(hi - lo)).epsilon(1e-13));
  }
}

TEST_CASE("subtree_min agrees with direct scan") {
  const LeafFn f = make_leaf_fn(3, {5, 1, 4, 4, 0.5, 9, 2, 8});
  const NodeScalars mins = subtree_min(f);
  CHECK(mins[0] == 0.5);
  CHECK(mins[1] == 1.0);   // [0, 1/2): leaves 5,1,4,4
  CHECK(mins[2] == 0.5);   // [1/2, 1)
  CHECK(mins[4] == 4.0);   // [1/4, 1/2)
  CHECK(mins[6] == 2.0);   // [3/4, 1)
  CHECK(mins[11] == 0.5);  // leaf [1/2, 5/8)
}

TEST_CASE("mean rescaling is linear in the haar domain") {
  const LeafFn f = random_fn(6, 0x7777);
  HaarDecomposition d = haar_analysis(f);
  LeafFn g = f;
  for (double& x : g.values) x = 3.0 * x + 2.0;
  const HaarDecomposition dg = haar_analysis(g);
  CHECK(dg.mean == doctest::Approx(3.0 * d.mean + 2.0).epsilon(1e-12));
  for (std::size_t n = 0; n < d.coeff.size(); ++n) {
    CHECK(dg.coeff[n] == doctest::Approx(3.0 * d.coeff[n]).epsilon(1e-12));
  }
}
