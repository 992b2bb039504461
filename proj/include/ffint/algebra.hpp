#pragma once

#include <vector>

#include "ffint/forest.hpp"
#include "ffint/lincomb.hpp"

namespace ffint {

// Interleaving pattern for the roots of a binary product: entry 0 takes the
// next root of the left operand, entry 1 the next root of the right operand.
// Internal root orders of both operands are preserved by construction.
struct RootOrdering {
  std::vector<int> pattern;

  static RootOrdering left_then_right(int nleft, int nright);
  // All admissible interleavings of nleft + nright roots.
  static std::vector<RootOrdering> all(int nleft, int nright);
};

// Concatenation. Liana ids of the right operand are renamed away from the
// left operand's before merging; the result is canonical.
ExoticForest concat(const ExoticForest& a, const ExoticForest& b);
ExoticForest concat_ordered(const ExoticForest& a, const ExoticForest& b, const RootOrdering& w);

// Shuffle product: sum of concat_ordered over all admissible interleavings.
LinComb shuffle(const ExoticForest& a, const ExoticForest& b);
LinComb shuffle(const LinComb& a, const LinComb& b);

// Deshuffle coproduct, the adjoint of the shuffle product in the canonical
// basis: splits the roots into complementary subsequences, discarding splits
// that would sever a liana.
TensorLinComb deshuffle(const ExoticForest& f);

// Left grafting, extended from single trees by the Guin-Oudom process.
// Grafting onto the empty forest gives zero; grafting a liana-decorated node
// under another liana node is forbidden and such terms vanish.
LinComb graft(const ExoticForest& a, const ExoticForest& b);

// Grossman-Larson product, and the variant with the surviving roots of the
// left operand interleaved among the right operand's roots according to w.
LinComb grossman_larson(const ExoticForest& a, const ExoticForest& b);
LinComb grossman_larson(const LinComb& a, const LinComb& b);
LinComb grossman_larson_ordered(const ExoticForest& a, const ExoticForest& b,
                                const RootOrdering& w);

// Deconcatenation coproduct: splits at the cut points between irreducible
// factors (n factors give n+1 terms).
TensorLinComb deconcat(const ExoticForest& f);

// Munthe-Kaas-Wright coproduct, computed by admissible cuts of the forest
// hung under a virtual root. A cut takes at most one edge per leaf-to-root
// path, is closed under "all sibling edges to the left", and severs either
// both endpoints of a liana or neither. Cut subtrees from the same node keep
// their order; subtrees from different nodes are shuffled.
TensorLinComb mkw_coproduct(const ExoticForest& f);

}  // namespace ffint
