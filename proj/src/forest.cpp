#include "ffint/forest.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace ffint {

int PlanarTree::node_count() const {
  int n = 1;
  for (const auto& c : children) n += c.node_count();
  return n;
}

int node_count(const PlanarForest& f) {
  int n = 0;
  for (const auto& t : f) n += t.node_count();
  return n;
}

std::string ForestOrder::str() const {
  if (is_integer()) return std::to_string(integer());
  return std::to_string(twice) + "/2";
}

namespace {

void encode_tree(const PlanarTree& t, std::string& out) {
  if (t.deco == kBlack)
    out += 'b';
  else
    out += std::to_string(t.deco);
  if (!t.children.empty()) {
    out += '[';
    for (std::size_t i = 0; i < t.children.size(); ++i) {
      if (i) out += ',';
      encode_tree(t.children[i], out);
    }
    out += ']';
  }
}

struct Parser {
  const std::string& s;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }

  PlanarTree tree() {
    skip_ws();
    if (pos >= s.size()) throw std::invalid_argument("forest parse: unexpected end");
    PlanarTree t;
    if (s[pos] == 'b') {
      ++pos;
      t.deco = kBlack;
    } else if (std::isdigit(static_cast<unsigned char>(s[pos]))) {
      int id = 0;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
        id = 10 * id + (s[pos++] - '0');
      if (id <= 0) throw std::invalid_argument("forest parse: liana ids are positive");
      t.deco = id;
    } else {
      throw std::invalid_argument(std::string("forest parse: unexpected character '") + s[pos] + "'");
    }
    skip_ws();
    if (pos < s.size() && s[pos] == '[') {
      ++pos;
      while (true) {
        t.children.push_back(tree());
        skip_ws();
        if (pos < s.size() && s[pos] == ',') { ++pos; continue; }
        break;
      }
      skip_ws();
      if (pos >= s.size() || s[pos] != ']') throw std::invalid_argument("forest parse: expected ']'");
      ++pos;
    }
    return t;
  }
};

void relabel_tree(const PlanarTree& t, std::map<int, int>& rename, int& next, PlanarTree& out) {
  if (t.deco == kBlack) {
    out.deco = kBlack;
  } else {
    auto [it, inserted] = rename.try_emplace(t.deco, next);
    if (inserted) ++next;
    out.deco = it->second;
  }
  out.children.resize(t.children.size());
  for (std::size_t i = 0; i < t.children.size(); ++i)
    relabel_tree(t.children[i], rename, next, out.children[i]);
}

void count_decorations(const PlanarTree& t, int& blacks, std::map<int, int>& liana_count,
                       bool& liana_on_inner) {
  if (t.deco == kBlack) {
    ++blacks;
  } else {
    ++liana_count[t.deco];
    if (!t.children.empty()) liana_on_inner = true;
  }
  for (const auto& c : t.children) count_decorations(c, blacks, liana_count, liana_on_inner);
}

}  // namespace

std::string encode(const PlanarForest& f) {
  std::string out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) out += ',';
    encode_tree(f[i], out);
  }
  return out;
}

PlanarForest parse_forest(const std::string& text) {
  PlanarForest f;
  Parser p{text};
  p.skip_ws();
  if (p.pos == text.size()) return f;  // empty forest
  while (true) {
    f.push_back(p.tree());
    p.skip_ws();
    if (p.pos < text.size() && text[p.pos] == ',') { ++p.pos; continue; }
    break;
  }
  p.skip_ws();
  if (p.pos != text.size()) throw std::invalid_argument("forest parse: trailing input");
  return f;
}

PlanarForest relabel_canonical(const PlanarForest& f) {
  PlanarForest out(f.size());
  std::map<int, int> rename;
  int next = 1;
  for (std::size_t i = 0; i < f.size(); ++i) relabel_tree(f[i], rename, next, out[i]);
  return out;
}

ExoticForest::ExoticForest() = default;

ExoticForest ExoticForest::canonicalize(const PlanarForest& f) {
  int blacks = 0;
  std::map<int, int> liana_count;
  bool liana_on_inner = false;
  for (const auto& t : f) count_decorations(t, blacks, liana_count, liana_on_inner);
  if (liana_on_inner)
    throw std::invalid_argument("exotic forest: liana decoration on a non-leaf node");
  for (const auto& [id, n] : liana_count)
    if (n != 2)
      throw std::invalid_argument("exotic forest: liana id " + std::to_string(id) +
                                  " occurs " + std::to_string(n) + " times (need 2)");
  ExoticForest ef;
  ef.forest_ = relabel_canonical(f);
  ef.key_ = encode(ef.forest_);
  ef.blacks_ = blacks;
  ef.lianas_ = static_cast<int>(2 * liana_count.size());
  return ef;
}

bool operator<(const ExoticForest& a, const ExoticForest& b) {
  int oa = a.order().twice, ob = b.order().twice;
  if (oa != ob) return oa < ob;
  if (a.node_count() != b.node_count()) return a.node_count() < b.node_count();
  return a.key_ < b.key_;
}

namespace {

// All planar forests with n undecorated nodes (ordered trees, ordered roots).
std::vector<PlanarForest> shapes_forest(int n);

std::vector<PlanarTree> shapes_tree(int n) {
  std::vector<PlanarTree> out;
  if (n <= 0) return out;
  for (auto& f : shapes_forest(n - 1)) out.emplace_back(kBlack, std::move(f));
  return out;
}

std::vector<PlanarForest> shapes_forest(int n) {
  std::vector<PlanarForest> out;
  if (n == 0) {
    out.emplace_back();
    return out;
  }
  for (int first = 1; first <= n; ++first) {
    auto heads = shapes_tree(first);
    auto tails = shapes_forest(n - first);
    for (const auto& h : heads)
      for (const auto& t : tails) {
        PlanarForest f;
        f.reserve(1 + t.size());
        f.push_back(h);
        f.insert(f.end(), t.begin(), t.end());
        out.push_back(std::move(f));
      }
  }
  return out;
}

void collect_leaf_ptrs(PlanarTree& t, std::vector<PlanarTree*>& leaves) {
  if (t.is_leaf()) leaves.push_back(&t);
  for (auto& c : t.children) collect_leaf_ptrs(c, leaves);
}

// All ways to partition slots 0..2j-1 into j unordered pairs.
void pairings(std::vector<int>& slots, std::vector<std::pair<int, int>>& cur,
              std::vector<std::vector<std::pair<int, int>>>& out) {
  if (slots.empty()) {
    out.push_back(cur);
    return;
  }
  int a = slots.front();
  for (std::size_t i = 1; i < slots.size(); ++i) {
    int b = slots[i];
    std::vector<int> rest;
    for (std::size_t k = 1; k < slots.size(); ++k)
      if (k != i) rest.push_back(slots[k]);
    cur.emplace_back(a, b);
    pairings(rest, cur, out);
    cur.pop_back();
  }
}

std::vector<ExoticForest> enumerate_impl(ForestOrder p, bool trees_only) {
  std::set<ExoticForest> found;
  if (!p.is_integer() || p.twice <= 0) return {};
  int order = p.integer();
  for (int j = 0; j <= order; ++j) {
    int blacks = order - j;
    int liana_nodes = 2 * j;
    int n = blacks + liana_nodes;
    for (auto& shape : shapes_forest(n)) {
      if (trees_only && shape.size() != 1) continue;
      std::vector<PlanarTree*> leaves;
      PlanarForest work = shape;
      for (auto& t : work) collect_leaf_ptrs(t, leaves);
      int L = static_cast<int>(leaves.size());
      if (L < liana_nodes) continue;
      // choose which leaves carry lianas
      std::vector<int> pick(L, 0);
      std::fill(pick.begin(), pick.begin() + liana_nodes, 1);
      std::sort(pick.begin(), pick.end());
      do {
        std::vector<int> slots;
        for (int i = 0; i < L; ++i)
          if (pick[i]) slots.push_back(i);
        std::vector<std::vector<std::pair<int, int>>> pairs_list;
        std::vector<std::pair<int, int>> cur;
        pairings(slots, cur, pairs_list);
        if (liana_nodes == 0) pairs_list.push_back({});
        for (const auto& pl : pairs_list) {
          for (auto* leaf : leaves) leaf->deco = kBlack;
          int id = 1;
          for (auto [a, b] : pl) {
            leaves[a]->deco = id;
            leaves[b]->deco = id;
            ++id;
          }
          found.insert(ExoticForest::canonicalize(work));
        }
      } while (std::next_permutation(pick.begin(), pick.end()));
    }
  }
  return {found.begin(), found.end()};
}

void liana_ids_of_tree(const PlanarTree& t, std::set<int>& ids) {
  if (t.deco != kBlack) ids.insert(t.deco);
  for (const auto& c : t.children) liana_ids_of_tree(c, ids);
}

}  // namespace

std::vector<ExoticForest> enumerate_forests(ForestOrder p) { return enumerate_impl(p, false); }
std::vector<ExoticForest> enumerate_trees(ForestOrder p) { return enumerate_impl(p, true); }

std::vector<PlanarForest> irreducible_factors(const ExoticForest& f) {
  const PlanarForest& trees = f.forest();
  int n = static_cast<int>(trees.size());
  std::vector<std::set<int>> ids(n);
  for (int i = 0; i < n; ++i) liana_ids_of_tree(trees[i], ids[i]);
  // last root index where each id occurs
  std::map<int, int> last;
  for (int i = 0; i < n; ++i)
    for (int id : ids[i]) last[id] = i;

  std::vector<PlanarForest> factors;
  int start = 0;
  while (start < n) {
    int end = start;  // block covers [start, end]
    for (int i = start; i <= end; ++i)
      for (int id : ids[i]) end = std::max(end, last.at(id));
    factors.emplace_back(trees.begin() + start, trees.begin() + end + 1);
    start = end + 1;
  }
  return factors;
}

bool is_irreducible(const ExoticForest& f) {
  if (f.empty()) return false;
  return irreducible_factors(f).size() == 1;
}

bool is_connected(const ExoticForest& f) {
  if (f.empty()) return false;
  const PlanarForest& trees = f.forest();
  int n = static_cast<int>(trees.size());
  if (n == 1) return true;
  std::vector<std::set<int>> ids(n);
  for (int i = 0; i < n; ++i) liana_ids_of_tree(trees[i], ids[i]);
  // union roots linked by a shared liana id
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::map<int, int> first_seen;
  for (int i = 0; i < n; ++i)
    for (int id : ids[i]) {
      auto [it, inserted] = first_seen.try_emplace(id, i);
      if (!inserted) parent[find(i)] = find(it->second);
    }
  int root = find(0);
  for (int i = 1; i < n; ++i)
    if (find(i) != root) return false;
  return true;
}

}  // namespace ffint
