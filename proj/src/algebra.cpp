#include "ffint/algebra.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

namespace ffint {

namespace {

// The binary products work on "raw" decorated forests: liana ids are bound
// names shared across a whole expression, and intermediate terms of the
// Guin-Oudom recursion may hold only one endpoint of a pair. Raw terms are
// keyed by their literal encoding; canonicalization happens at the public
// boundary only.
using Raw = PlanarForest;

struct RawComb {
  std::map<std::string, std::pair<Raw, Rational>> terms;

  void add(const Raw& f, Rational c) {
    if (c.is_zero()) return;
    std::string key = encode(f);
    auto it = terms.find(key);
    if (it == terms.end()) {
      terms.emplace(std::move(key), std::make_pair(f, c));
    } else {
      it->second.second += c;
      if (it->second.second.is_zero()) terms.erase(it);
    }
  }
  void add(const RawComb& o, Rational scale = Rational(1)) {
    for (const auto& [k, fc] : o.terms) add(fc.first, fc.second * scale);
  }
};

int max_liana_id(const PlanarTree& t) {
  int m = t.deco;
  for (const auto& c : t.children) m = std::max(m, max_liana_id(c));
  return m;
}

int max_liana_id(const Raw& f) {
  int m = 0;
  for (const auto& t : f) m = std::max(m, max_liana_id(t));
  return m;
}

void shift_ids(PlanarTree& t, int offset) {
  if (t.deco != kBlack) t.deco += offset;
  for (auto& c : t.children) shift_ids(c, offset);
}

Raw shifted_disjoint(const Raw& left, const Raw& right) {
  Raw out = right;
  int offset = max_liana_id(left);
  if (offset > 0)
    for (auto& t : out) shift_ids(t, offset);
  return out;
}

Raw concat_raw(const Raw& a, const Raw& b) {
  Raw out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// All splits of the roots into complementary subsequences (raw deshuffle).
std::vector<std::pair<Raw, Raw>> raw_root_splits(const Raw& f) {
  int n = static_cast<int>(f.size());
  std::vector<std::pair<Raw, Raw>> out;
  out.reserve(std::size_t(1) << n);
  for (int mask = 0; mask < (1 << n); ++mask) {
    Raw a, b;
    for (int i = 0; i < n; ++i)
      (mask >> i & 1 ? a : b).push_back(f[i]);
    out.emplace_back(std::move(a), std::move(b));
  }
  return out;
}

// sigma grafted onto every admissible position of the tree target:
// prepended as the leftmost child of the root, or recursively deeper.
// A liana node accepts no children, so targets decorated by an id vanish.
RawComb graft_tree_tree(const PlanarTree& sigma, const PlanarTree& target) {
  RawComb out;
  if (target.deco != kBlack) return out;
  PlanarTree top = target;
  top.children.insert(top.children.begin(), sigma);
  out.add(Raw{top}, Rational(1));
  for (std::size_t i = 0; i < target.children.size(); ++i) {
    RawComb inner = graft_tree_tree(sigma, target.children[i]);
    for (const auto& [k, fc] : inner.terms) {
      PlanarTree t = target;
      t.children[i] = fc.first[0];
      out.add(Raw{t}, fc.second);
    }
  }
  return out;
}

RawComb graft_raw(const Raw& pi, const Raw& target);

// Forest grafted onto a single tree, peeling the leftmost tree of pi:
// (sigma . rest) -> sigma |> (rest |> target) - (sigma |> rest) |> target.
RawComb graft_forest_tree(const Raw& pi, const PlanarTree& target) {
  RawComb out;
  if (pi.empty()) {
    out.add(Raw{target}, Rational(1));
    return out;
  }
  if (pi.size() == 1) return graft_tree_tree(pi[0], target);
  Raw rest(pi.begin() + 1, pi.end());
  RawComb inner = graft_forest_tree(rest, target);
  for (const auto& [k, fc] : inner.terms)
    out.add(graft_tree_tree(pi[0], fc.first[0]), fc.second);
  RawComb left = graft_raw(Raw{pi[0]}, rest);
  for (const auto& [k, fc] : left.terms) {
    RawComb g = graft_forest_tree(fc.first, target);
    out.add(g, -fc.second);
  }
  return out;
}

// Full Guin-Oudom grafting of a forest onto a forest. The left operand's
// roots distribute over the target's trees through the raw deshuffle.
RawComb graft_raw(const Raw& pi, const Raw& target) {
  RawComb out;
  if (target.empty()) {
    if (pi.empty()) out.add(Raw{}, Rational(1));
    return out;
  }
  if (pi.empty()) {
    out.add(target, Rational(1));
    return out;
  }
  if (target.size() == 1) return graft_forest_tree(pi, target[0]);
  Raw rest(target.begin() + 1, target.end());
  for (auto& [p1, p2] : raw_root_splits(pi)) {
    RawComb head = graft_forest_tree(p1, target[0]);
    if (head.terms.empty()) continue;
    RawComb tail = graft_raw(p2, rest);
    for (const auto& [hk, hfc] : head.terms)
      for (const auto& [tk, tfc] : tail.terms)
        out.add(concat_raw(hfc.first, tfc.first), hfc.second * tfc.second);
  }
  return out;
}

// Merges surviving left-operand roots (those in `keep`) with the grafted
// right-operand trees following the interleaving pattern.
Raw merge_by_ordering(const Raw& left, const std::vector<bool>& keep, const Raw& grafted,
                      const RootOrdering& w) {
  Raw out;
  std::size_t li = 0, ri = 0;
  for (int side : w.pattern) {
    if (side == 0) {
      if (keep[li]) out.push_back(left[li]);
      ++li;
    } else {
      out.push_back(grafted[ri++]);
    }
  }
  return out;
}

LinComb canonicalize_comb(const RawComb& rc) {
  LinComb out;
  for (const auto& [k, fc] : rc.terms) out.add(ExoticForest::canonicalize(fc.first), fc.second);
  return out;
}

void liana_ids_of(const PlanarTree& t, std::set<int>& ids) {
  if (t.deco != kBlack) ids.insert(t.deco);
  for (const auto& c : t.children) liana_ids_of(c, ids);
}

}  // namespace

RootOrdering RootOrdering::left_then_right(int nleft, int nright) {
  RootOrdering w;
  w.pattern.assign(nleft, 0);
  w.pattern.insert(w.pattern.end(), nright, 1);
  return w;
}

std::vector<RootOrdering> RootOrdering::all(int nleft, int nright) {
  std::vector<RootOrdering> out;
  std::vector<int> pattern(nleft + nright);
  // lexicographic enumeration of 0/1 patterns with fixed counts
  std::fill(pattern.begin(), pattern.begin() + nleft, 0);
  std::fill(pattern.begin() + nleft, pattern.end(), 1);
  std::sort(pattern.begin(), pattern.end());
  do {
    out.push_back(RootOrdering{pattern});
  } while (std::next_permutation(pattern.begin(), pattern.end()));
  return out;
}

ExoticForest concat(const ExoticForest& a, const ExoticForest& b) {
  return concat_ordered(a, b, RootOrdering::left_then_right(a.root_count(), b.root_count()));
}

ExoticForest concat_ordered(const ExoticForest& a, const ExoticForest& b, const RootOrdering& w) {
  if (static_cast<int>(w.pattern.size()) != a.root_count() + b.root_count())
    throw std::invalid_argument("concat_ordered: pattern length mismatch");
  Raw right = shifted_disjoint(a.forest(), b.forest());
  Raw out;
  std::size_t ai = 0, bi = 0;
  for (int side : w.pattern) {
    if (side == 0) {
      if (ai >= a.forest().size()) throw std::invalid_argument("concat_ordered: bad pattern");
      out.push_back(a.forest()[ai++]);
    } else {
      if (bi >= right.size()) throw std::invalid_argument("concat_ordered: bad pattern");
      out.push_back(right[bi++]);
    }
  }
  return ExoticForest::canonicalize(out);
}

LinComb shuffle(const ExoticForest& a, const ExoticForest& b) {
  LinComb out;
  for (const auto& w : RootOrdering::all(a.root_count(), b.root_count()))
    out.add(concat_ordered(a, b, w), Rational(1));
  return out;
}

LinComb shuffle(const LinComb& a, const LinComb& b) {
  LinComb out;
  for (const auto& [fa, ca] : a)
    for (const auto& [fb, cb] : b.terms()) out += shuffle(fa, fb).scaled(ca * cb);
  return out;
}

TensorLinComb deshuffle(const ExoticForest& f) {
  TensorLinComb out;
  const Raw& trees = f.forest();
  int n = f.root_count();
  std::vector<std::set<int>> ids(n);
  for (int i = 0; i < n; ++i) liana_ids_of(trees[i], ids[i]);
  for (int mask = 0; mask < (1 << n); ++mask) {
    std::set<int> left_ids, right_ids;
    Raw a, b;
    for (int i = 0; i < n; ++i) {
      if (mask >> i & 1) {
        a.push_back(trees[i]);
        left_ids.insert(ids[i].begin(), ids[i].end());
      } else {
        b.push_back(trees[i]);
        right_ids.insert(ids[i].begin(), ids[i].end());
      }
    }
    bool severed = false;
    for (int id : left_ids)
      if (right_ids.count(id)) { severed = true; break; }
    if (severed) continue;
    out.add(ExoticForest::canonicalize(a), ExoticForest::canonicalize(b), Rational(1));
  }
  return out;
}

LinComb graft(const ExoticForest& a, const ExoticForest& b) {
  Raw right = shifted_disjoint(a.forest(), b.forest());
  return canonicalize_comb(graft_raw(a.forest(), right));
}

LinComb grossman_larson(const ExoticForest& a, const ExoticForest& b) {
  return grossman_larson_ordered(
      a, b, RootOrdering::left_then_right(a.root_count(), b.root_count()));
}

LinComb grossman_larson_ordered(const ExoticForest& a, const ExoticForest& b,
                                const RootOrdering& w) {
  if (static_cast<int>(w.pattern.size()) != a.root_count() + b.root_count())
    throw std::invalid_argument("grossman_larson_ordered: pattern length mismatch");
  const Raw& left = a.forest();
  Raw right = shifted_disjoint(left, b.forest());
  int n = static_cast<int>(left.size());
  RawComb result;
  for (int mask = 0; mask < (1 << n); ++mask) {
    std::vector<bool> keep(n);
    Raw grafting;
    for (int i = 0; i < n; ++i) {
      keep[i] = (mask >> i & 1) != 0;
      if (!keep[i]) grafting.push_back(left[i]);
    }
    RawComb g = graft_raw(grafting, right);
    for (const auto& [k, fc] : g.terms)
      result.add(merge_by_ordering(left, keep, fc.first, w), fc.second);
  }
  return canonicalize_comb(result);
}

LinComb grossman_larson(const LinComb& a, const LinComb& b) {
  LinComb out;
  for (const auto& [fa, ca] : a)
    for (const auto& [fb, cb] : b.terms()) out += grossman_larson(fa, fb).scaled(ca * cb);
  return out;
}

TensorLinComb deconcat(const ExoticForest& f) {
  TensorLinComb out;
  auto factors = irreducible_factors(f);
  int n = static_cast<int>(factors.size());
  for (int k = 0; k <= n; ++k) {
    Raw a, b;
    for (int i = 0; i < k; ++i) a.insert(a.end(), factors[i].begin(), factors[i].end());
    for (int i = k; i < n; ++i) b.insert(b.end(), factors[i].begin(), factors[i].end());
    out.add(ExoticForest::canonicalize(a), ExoticForest::canonicalize(b), Rational(1));
  }
  return out;
}

namespace {

// Flat node table of the forest hung under a virtual root (index 0).
struct CutTable {
  struct Node {
    Decoration deco = kBlack;
    int parent = -1;
    std::vector<int> children;
  };
  std::vector<Node> nodes;
  std::vector<int> edge_child;            // edge e: nodes[edge_child[e]] -> its parent
  std::vector<std::vector<int>> paths;    // for each leaf: edges on its path to the root
  std::vector<std::pair<int, int>> lianas;  // paired leaf node indices

  explicit CutTable(const PlanarForest& f) {
    nodes.emplace_back();
    for (const auto& t : f) build(t, 0);
    std::map<int, std::vector<int>> by_id;
    for (std::size_t v = 0; v < nodes.size(); ++v)
      if (nodes[v].deco != kBlack) by_id[nodes[v].deco].push_back(static_cast<int>(v));
    for (const auto& [id, vs] : by_id) lianas.emplace_back(vs[0], vs[1]);
    for (std::size_t v = 1; v < nodes.size(); ++v) {
      if (!nodes[v].children.empty()) continue;
      std::vector<int> path;
      for (int cur = static_cast<int>(v); cur != 0; cur = nodes[cur].parent)
        path.push_back(edge_of(cur));
      paths.push_back(std::move(path));
    }
  }

  int edge_of(int child_node) const { return child_node - 1; }  // node v owns edge v-1

  int build(const PlanarTree& t, int parent) {
    int idx = static_cast<int>(nodes.size());
    nodes.push_back(Node{t.deco, parent, {}});
    nodes[parent].children.push_back(idx);
    edge_child.push_back(idx);
    for (const auto& c : t.children) build(c, idx);
    return idx;
  }

  PlanarTree subtree(int v, const std::vector<bool>& cut) const {
    PlanarTree t{nodes[v].deco};
    for (int c : nodes[v].children) {
      if (cut[edge_of(c)]) continue;
      t.children.push_back(subtree(c, cut));
    }
    return t;
  }
};

// All interleavings of the groups, each group keeping its internal order.
void interleave_groups(const std::vector<Raw>& groups, std::vector<std::size_t>& pos, Raw& cur,
                       std::vector<Raw>& out) {
  bool done = true;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (pos[g] < groups[g].size()) {
      done = false;
      cur.push_back(groups[g][pos[g]]);
      ++pos[g];
      interleave_groups(groups, pos, cur, out);
      --pos[g];
      cur.pop_back();
    }
  }
  if (done) out.push_back(cur);
}

}  // namespace

TensorLinComb mkw_coproduct(const ExoticForest& f) {
  TensorLinComb out;
  CutTable tab(f.forest());
  int ne = static_cast<int>(tab.edge_child.size());
  if (ne > 24) throw std::invalid_argument("mkw_coproduct: forest too large");
  for (std::uint32_t mask = 0; mask < (1u << ne); ++mask) {
    std::vector<bool> cut(ne);
    for (int e = 0; e < ne; ++e) cut[e] = (mask >> e & 1) != 0;

    // at most one cut edge on each leaf-to-root path
    bool ok = true;
    std::vector<char> path_has_cut(tab.paths.size(), 0);
    for (std::size_t p = 0; p < tab.paths.size() && ok; ++p) {
      int cnt = 0;
      for (int e : tab.paths[p]) cnt += cut[e] ? 1 : 0;
      if (cnt > 1) ok = false;
      path_has_cut[p] = cnt > 0;
    }
    if (!ok) continue;

    // cutting an edge cuts every sibling edge to its left
    for (std::size_t v = 0; v < tab.nodes.size() && ok; ++v) {
      const auto& ch = tab.nodes[v].children;
      for (std::size_t i = 1; i < ch.size() && ok; ++i)
        if (cut[tab.edge_of(ch[i])] && !cut[tab.edge_of(ch[i - 1])]) ok = false;
    }
    if (!ok) continue;

    // a liana is severed on both sides or on neither
    std::map<int, std::size_t> leaf_to_path;
    {
      std::size_t p = 0;
      for (std::size_t v = 1; v < tab.nodes.size(); ++v)
        if (tab.nodes[v].children.empty()) leaf_to_path[static_cast<int>(v)] = p++;
    }
    for (const auto& [u, v] : tab.lianas) {
      if (path_has_cut[leaf_to_path.at(u)] != path_has_cut[leaf_to_path.at(v)]) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;

    // root part: remaining forest under the virtual root
    PlanarTree rooted = tab.subtree(0, cut);
    ExoticForest rpart = ExoticForest::canonicalize(rooted.children);

    // cut-off components, grouped by the node they were cut from
    std::vector<Raw> groups;
    for (std::size_t v = 0; v < tab.nodes.size(); ++v) {
      Raw group;
      for (int c : tab.nodes[v].children)
        if (cut[tab.edge_of(c)]) group.push_back(tab.subtree(c, cut));
      if (!group.empty()) groups.push_back(std::move(group));
    }
    if (groups.empty()) {
      out.add(ExoticForest(), rpart, Rational(1));
      continue;
    }
    std::vector<std::size_t> pos(groups.size(), 0);
    Raw cur;
    std::vector<Raw> shuffled;
    interleave_groups(groups, pos, cur, shuffled);
    for (const auto& p : shuffled)
      out.add(ExoticForest::canonicalize(p), rpart, Rational(1));
  }
  return out;
}

}  // namespace ffint
