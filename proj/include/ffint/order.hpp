#pragma once

#include <functional>
#include <mutex>
#include <vector>

#include "ffint/algebra.hpp"
#include "ffint/forest.hpp"
#include "ffint/lincomb.hpp"
#include "ffint/tableau.hpp"

namespace ffint {

// A labelling assigns each node an exponential index in 1..K. Within every
// sibling group (children of one parent; roots count as siblings under a
// virtual root) labels are nondecreasing from left to right. The weight is
// the product over sibling groups of 1/(multiplicity factorials).
struct Labelling {
  std::vector<int> labels;  // 1-based, in depth-first node order
  Rational weight;
};

// Flat node view of a forest used by the coefficient evaluators.
struct NodeTable {
  struct Node {
    Decoration deco = kBlack;
    int parent = -1;  // -1 for roots
  };
  std::vector<Node> nodes;                     // depth-first, roots left to right
  std::vector<std::vector<int>> sibling_groups;  // roots group first, then per parent
  std::vector<std::pair<int, int>> lianas;       // paired leaf indices

  explicit NodeTable(const ExoticForest& f);
};

std::vector<Labelling> labellings(const ExoticForest& f, int K);

// Exact-flow coefficient map e = exp of (black node + liana pair) under the
// Grossman-Larson product; memoizes the GL powers per order. The lazy build
// is serialized so the table can be read concurrently afterwards.
class ExactFlowCoeffs {
 public:
  Rational operator()(const ExoticForest& f) const;

 private:
  const LinComb& power(int n) const;
  mutable std::mutex build_mutex_;
  mutable std::vector<LinComb> powers_;  // powers_[n] = generator^{GL n}
};

Rational exact_coeff(const ExoticForest& f);

// Identifies one noise row of a tableau: the final update's exponential k,
// or stage i's exponential k.
struct NoiseRole {
  bool final_update = true;
  int stage = 0;  // 0-based, ignored for final_update
  int k = 0;      // 0-based exponential index
  static NoiseRole final(int k) { return {true, 0, k}; }
  static NoiseRole stage_row(int i, int k) { return {false, i, k}; }
};

// Single-channel covariance of the two identified noise rows, summed over
// the L noise channels. Independent of any dimension parameter.
double stochastic_covariance(const Tableau& t, const NoiseRole& a, const NoiseRole& b);

// Talay-Tubaro coefficient of an explicit tableau on one exotic forest:
// sum over stage assignments of black nodes and admissible labellings of the
// products of drift weights and one covariance factor per liana.
double numerical_coeff(const ExoticForest& f, const Tableau& t);

struct ConditionRow {
  ExoticForest forest;
  double a = 0.0;
  double e = 0.0;
  double residual = 0.0;
};

// One row per canonical exotic forest of order 1..p.
std::vector<ConditionRow> order_conditions(int p, const Tableau& t);

using CoeffMap = std::function<double(const ExoticForest&)>;

struct CharacterReport {
  double max_deviation = 0.0;
  ExoticForest worst_left, worst_right;
  std::size_t pairs_checked = 0;
};

// Checks c(pi shuffle eta) = c(pi) c(eta) over all basis pairs with
// |pi| + |eta| <= p.
CharacterReport shuffle_character_check(const CoeffMap& c, int p);

}  // namespace ffint
