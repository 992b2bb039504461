#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "ffint/rational.hpp"

namespace ffint {

// Node decoration: 0 is a black (drift) node, a positive value is a liana id.
// Each liana id must decorate exactly two leaves of the forest.
using Decoration = int;
constexpr Decoration kBlack = 0;

struct PlanarTree {
  Decoration deco = kBlack;
  std::vector<PlanarTree> children;

  PlanarTree() = default;
  explicit PlanarTree(Decoration d) : deco(d) {}
  PlanarTree(Decoration d, std::vector<PlanarTree> ch) : deco(d), children(std::move(ch)) {}

  bool is_leaf() const { return children.empty(); }
  int node_count() const;

  friend bool operator==(const PlanarTree&, const PlanarTree&) = default;
};

// Ordered sequence of trees; the empty forest is the unit element.
using PlanarForest = std::vector<PlanarTree>;

int node_count(const PlanarForest& f);

// Order of a forest: half-integers are kept exact as twice the value.
struct ForestOrder {
  int twice = 0;

  static ForestOrder of(int blacks, int lianas) { return ForestOrder{2 * blacks + lianas}; }
  bool is_integer() const { return twice % 2 == 0; }
  int integer() const { return twice / 2; }
  double value() const { return 0.5 * twice; }
  std::string str() const;

  friend auto operator<=>(const ForestOrder&, const ForestOrder&) = default;
};

// A planar forest in canonical form: liana ids are 1,2,3,... in order of first
// appearance in a left-to-right depth-first traversal. Immutable after
// construction; the canonical text encoding doubles as the comparison key.
class ExoticForest {
 public:
  ExoticForest();  // the empty forest (unit)

  // Canonicalizes and validates: every liana id on exactly two nodes, all of
  // them leaves. Throws std::invalid_argument otherwise.
  static ExoticForest canonicalize(const PlanarForest& f);

  const PlanarForest& forest() const { return forest_; }
  const std::string& encoding() const { return key_; }

  bool empty() const { return forest_.empty(); }
  int root_count() const { return static_cast<int>(forest_.size()); }
  int black_count() const { return blacks_; }
  int liana_node_count() const { return lianas_; }
  int node_count() const { return blacks_ + lianas_; }
  ForestOrder order() const { return ForestOrder::of(blacks_, lianas_); }

  bool is_tree() const { return forest_.size() == 1; }

  friend bool operator==(const ExoticForest& a, const ExoticForest& b) { return a.key_ == b.key_; }
  friend bool operator!=(const ExoticForest& a, const ExoticForest& b) { return !(a == b); }
  // Deterministic total order: (order, node count, encoding).
  friend bool operator<(const ExoticForest& a, const ExoticForest& b);

 private:
  PlanarForest forest_;
  std::string key_;
  int blacks_ = 0;
  int lianas_ = 0;
};

// Bracket text encoding: "b" for a black node, the id digits for a liana leaf,
// children in [..], roots joined by commas. Examples: "b[1,1]", "2,2,1,1".
std::string encode(const PlanarForest& f);
PlanarForest parse_forest(const std::string& text);

// Renames liana ids to 1,2,... by first appearance in left-to-right DFS.
// Purely the relabeling step; no validation.
PlanarForest relabel_canonical(const PlanarForest& f);

// All canonical exotic forests of order exactly p, in deterministic order.
// Half-integer orders yield an empty list (lianas always pair up).
std::vector<ExoticForest> enumerate_forests(ForestOrder p);
// Same restricted to a single root.
std::vector<ExoticForest> enumerate_trees(ForestOrder p);

// Splits a forest into its irreducible factors (maximal root blocks not
// linked across the cut by any liana). The concatenation of the factors,
// left to right, recovers the forest.
std::vector<PlanarForest> irreducible_factors(const ExoticForest& f);

// A forest is irreducible when it is not a concatenation of two nonempty
// exotic forests; connected when no root interleaving splits it either.
bool is_irreducible(const ExoticForest& f);
bool is_connected(const ExoticForest& f);

}  // namespace ffint
