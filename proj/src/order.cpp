#include "ffint/order.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace ffint {

namespace {

int build_nodes(const PlanarTree& t, int parent, NodeTable& tab) {
  int idx = static_cast<int>(tab.nodes.size());
  tab.nodes.push_back({t.deco, parent});
  std::vector<int> group;
  for (const auto& c : t.children) group.push_back(build_nodes(c, idx, tab));
  if (!group.empty()) tab.sibling_groups.push_back(std::move(group));
  return idx;
}

}  // namespace

NodeTable::NodeTable(const ExoticForest& f) {
  std::vector<int> roots;
  for (const auto& t : f.forest()) roots.push_back(build_nodes(t, -1, *this));
  sibling_groups.insert(sibling_groups.begin(), std::move(roots));
  std::map<int, std::vector<int>> by_id;
  for (std::size_t v = 0; v < nodes.size(); ++v)
    if (nodes[v].deco != kBlack) by_id[nodes[v].deco].push_back(static_cast<int>(v));
  for (const auto& [id, vs] : by_id) lianas.emplace_back(vs[0], vs[1]);
}

std::vector<Labelling> labellings(const ExoticForest& f, int K) {
  if (K < 1) throw std::invalid_argument("labellings: K must be >= 1");
  NodeTable tab(f);
  int n = static_cast<int>(tab.nodes.size());

  // nondecreasing label sequences per sibling group, with factorial weights
  std::vector<std::vector<std::pair<std::vector<int>, Rational>>> group_choices;
  for (const auto& group : tab.sibling_groups) {
    std::vector<std::pair<std::vector<int>, Rational>> choices;
    std::vector<int> cur(group.size(), 1);
    while (true) {
      bool ok = true;
      for (std::size_t i = 1; i < cur.size(); ++i)
        if (cur[i] < cur[i - 1]) { ok = false; break; }
      if (ok) {
        Rational w(1);
        int run = 1;
        for (std::size_t i = 1; i <= cur.size(); ++i) {
          if (i < cur.size() && cur[i] == cur[i - 1]) {
            ++run;
          } else {
            w = w / Rational::factorial(run);
            run = 1;
          }
        }
        choices.emplace_back(cur, w);
      }
      // next tuple in {1..K}^m
      std::size_t pos = cur.size();
      while (pos > 0 && cur[pos - 1] == K) cur[--pos] = 1;
      if (pos == 0) break;
      ++cur[pos - 1];
    }
    group_choices.push_back(std::move(choices));
  }

  std::vector<Labelling> out;
  std::vector<std::size_t> pick(group_choices.size(), 0);
  while (true) {
    Labelling lab;
    lab.labels.assign(n, 1);
    lab.weight = Rational(1);
    for (std::size_t g = 0; g < group_choices.size(); ++g) {
      const auto& [vals, w] = group_choices[g][pick[g]];
      const auto& group = tab.sibling_groups[g];
      for (std::size_t i = 0; i < group.size(); ++i) lab.labels[group[i]] = vals[i];
      lab.weight *= w;
    }
    out.push_back(std::move(lab));
    std::size_t g = pick.size();
    while (g > 0 && pick[g - 1] + 1 == group_choices[g - 1].size()) pick[--g] = 0;
    if (g == 0) break;
    ++pick[g - 1];
  }
  return out;
}

const LinComb& ExactFlowCoeffs::power(int n) const {
  std::scoped_lock lock(build_mutex_);
  if (powers_.empty()) {
    LinComb unit(ExoticForest{});
    powers_.push_back(unit);
  }
  while (static_cast<int>(powers_.size()) <= n) {
    LinComb generator;
    generator.add(ExoticForest::canonicalize(parse_forest("b")), Rational(1));
    generator.add(ExoticForest::canonicalize(parse_forest("1,1")), Rational(1));
    powers_.push_back(grossman_larson(powers_.back(), generator));
  }
  return powers_[n];
}

Rational ExactFlowCoeffs::operator()(const ExoticForest& f) const {
  if (f.empty()) return Rational(1);
  ForestOrder p = f.order();
  if (!p.is_integer()) return Rational(0);
  int n = p.integer();
  return power(n).coeff(f) / Rational::factorial(n);
}

Rational exact_coeff(const ExoticForest& f) {
  static const ExactFlowCoeffs e;
  return e(f);
}

double stochastic_covariance(const Tableau& t, const NoiseRole& a, const NoiseRole& b) {
  double sum = 0.0;
  for (int l = 0; l < t.L; ++l) {
    double va = a.final_update ? t.zhat_at(a.k, l) : t.Zhat_at(a.stage, a.k, l);
    double vb = b.final_update ? t.zhat_at(b.k, l) : t.Zhat_at(b.stage, b.k, l);
    sum += va * vb;
  }
  return sum;
}

double numerical_coeff(const ExoticForest& f, const Tableau& t) {
  if (!t.is_explicit()) throw std::invalid_argument("numerical_coeff: tableau must be explicit");
  if (f.empty()) return 1.0;
  NodeTable tab(f);
  int n = static_cast<int>(tab.nodes.size());

  std::vector<int> blacks;
  for (int v = 0; v < n; ++v)
    if (tab.nodes[v].deco == kBlack) blacks.push_back(v);
  auto labs = labellings(f, t.K);

  // stage index per black node; lianas carry no stage of their own
  std::vector<int> stage(n, -1);
  double total = 0.0;
  std::vector<int> assign(blacks.size(), 0);
  while (true) {
    for (std::size_t i = 0; i < blacks.size(); ++i) stage[blacks[i]] = assign[i];
    for (const auto& lab : labs) {
      double term = lab.weight.to_double();
      for (int v : blacks) {
        int kv = lab.labels[v] - 1;
        int parent = tab.nodes[v].parent;
        term *= parent < 0 ? t.z0_at(stage[v], kv) : t.Z0_at(stage[parent], stage[v], kv);
        if (term == 0.0) break;
      }
      if (term != 0.0) {
        for (const auto& [u, v] : tab.lianas) {
          auto role = [&](int node) {
            int parent = tab.nodes[node].parent;
            int k = lab.labels[node] - 1;
            return parent < 0 ? NoiseRole::final(k) : NoiseRole::stage_row(stage[parent], k);
          };
          term *= stochastic_covariance(t, role(u), role(v));
          if (term == 0.0) break;
        }
      }
      total += term;
    }
    std::size_t pos = assign.size();
    while (pos > 0 && assign[pos - 1] + 1 == t.s) assign[--pos] = 0;
    if (pos == 0) break;
    ++assign[pos - 1];
  }
  return total;
}

std::vector<ConditionRow> order_conditions(int p, const Tableau& t) {
  std::vector<ConditionRow> rows;
  for (int order = 1; order <= p; ++order) {
    for (const auto& f : enumerate_forests(ForestOrder{2 * order})) {
      ConditionRow row;
      row.forest = f;
      row.a = numerical_coeff(f, t);
      row.e = exact_coeff(f).to_double();
      row.residual = row.a - row.e;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

CharacterReport shuffle_character_check(const CoeffMap& c, int p) {
  CharacterReport rep;
  std::vector<ExoticForest> basis;
  for (int order = 1; order <= p; ++order)
    for (const auto& f : enumerate_forests(ForestOrder{2 * order})) basis.push_back(f);
  for (const auto& a : basis)
    for (const auto& b : basis) {
      if (a.order().twice + b.order().twice > 2 * p) continue;
      double lhs = 0.0;
      for (const auto& [f, coeff] : shuffle(a, b)) lhs += coeff.to_double() * c(f);
      double rhs = c(a) * c(b);
      double dev = std::abs(lhs - rhs);
      ++rep.pairs_checked;
      if (dev > rep.max_deviation) {
        rep.max_deviation = dev;
        rep.worst_left = a;
        rep.worst_right = b;
      }
    }
  return rep;
}

}  // namespace ffint
