#include "ffint/tableau.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ffint {

Tableau Tableau::zeros(int s, int K, int L) {
  Tableau t;
  t.s = s;
  t.K = K;
  t.L = L;
  t.Z0.assign(std::size_t(s) * s * K, 0.0);
  t.z0.assign(std::size_t(s) * K, 0.0);
  t.Zhat.assign(std::size_t(s) * K * L, 0.0);
  t.zhat.assign(std::size_t(K) * L, 0.0);
  return t;
}

bool Tableau::is_explicit() const {
  for (int i = 0; i < s; ++i)
    for (int j = i; j < s; ++j)
      for (int k = 0; k < K; ++k)
        if (Z0_at(i, j, k) != 0.0) return false;
  return true;
}

bool Tableau::stage_exp_used(int i, int k) const {
  for (int j = 0; j < s; ++j)
    if (Z0_at(i, j, k) != 0.0) return true;
  for (int l = 0; l < L; ++l)
    if (Zhat_at(i, k, l) != 0.0) return true;
  return false;
}

bool Tableau::final_exp_used(int k) const {
  for (int i = 0; i < s; ++i)
    if (z0_at(i, k) != 0.0) return true;
  for (int l = 0; l < L; ++l)
    if (zhat_at(k, l) != 0.0) return true;
  return false;
}

Tableau euler_ff_tableau() {
  Tableau t = Tableau::zeros(1, 1, 1);
  t.z0_ref(0, 0) = 1.0;
  t.zhat_ref(0, 0) = std::sqrt(2.0);
  return t;
}

Tableau sff2_tableau() {
  const double r2 = std::sqrt(2.0);
  Tableau t = Tableau::zeros(2, 2, 2);
  // stage 2, first exponential
  t.zZ0(1, 0, 0) = 0.5;
  t.Zhat_ref(1, 0, 0) = 1.0;
  // final update, first exponential (applied first)
  t.z0_ref(0, 0) = 1.0 - r2 / 2.0;
  t.z0_ref(1, 0) = r2 - 1.0;
  t.zhat_ref(0, 0) = r2;
  // final update, second exponential
  t.z0_ref(0, 1) = r2 / 2.0 - 1.0;
  t.z0_ref(1, 1) = 2.0 - r2;
  t.zhat_ref(1, 0) = 1.0 - r2;
  t.zhat_ref(1, 1) = 1.0;
  return t;
}

Tableau brownian2_lie_tableau() {
  const double r2 = std::sqrt(2.0);
  Tableau t = Tableau::zeros(1, 2, 2);
  t.zhat_ref(0, 0) = r2;
  t.zhat_ref(1, 0) = 1.0 - r2;
  t.zhat_ref(1, 1) = 1.0;
  return t;
}

namespace {

std::vector<double>* block_of(Tableau& t, const std::string& name) {
  if (name == "z0") return &t.z0;
  if (name == "zhat") return &t.zhat;
  if (name == "Z0") return &t.Z0;
  if (name == "Zhat") return &t.Zhat;
  return nullptr;
}

}  // namespace

Tableau read_tableau(std::istream& in) {
  std::string line;
  Tableau t;
  bool have_header = false;
  std::vector<double>* block = nullptr;
  std::size_t filled = 0;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (!have_header) {
      int s = std::stoi(first), K = 0, L = 0;
      if (!(ls >> K >> L)) throw std::runtime_error("tableau: expected 's K L' header");
      if (s <= 0 || K <= 0 || L <= 0) throw std::runtime_error("tableau: bad dimensions");
      t = Tableau::zeros(s, K, L);
      have_header = true;
      continue;
    }
    if (auto* b = block_of(t, first)) {
      block = b;
      filled = 0;
      continue;
    }
    if (!block) throw std::runtime_error("tableau: values before a block label");
    std::istringstream vs(line);
    double v;
    while (vs >> v) {
      if (filled >= block->size()) throw std::runtime_error("tableau: too many values in block");
      (*block)[filled++] = v;
    }
  }
  if (!have_header) throw std::runtime_error("tableau: empty input");
  return t;
}

Tableau read_tableau_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("tableau: cannot open " + path);
  return read_tableau(in);
}

void write_tableau(std::ostream& out, const Tableau& t) {
  auto v = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  out << t.s << ' ' << t.K << ' ' << t.L << "\n";
  out << "z0\n";
  for (int i = 0; i < t.s; ++i) {
    for (int k = 0; k < t.K; ++k) out << (k ? " " : "") << v(t.z0_at(i, k));
    out << "\n";
  }
  out << "zhat\n";
  for (int k = 0; k < t.K; ++k) {
    for (int l = 0; l < t.L; ++l) out << (l ? " " : "") << v(t.zhat_at(k, l));
    out << "\n";
  }
  out << "Z0\n";
  for (int i = 0; i < t.s; ++i)
    for (int j = 0; j < t.s; ++j) {
      for (int k = 0; k < t.K; ++k) out << (k ? " " : "") << v(t.Z0_at(i, j, k));
      out << "\n";
    }
  out << "Zhat\n";
  for (int i = 0; i < t.s; ++i)
    for (int k = 0; k < t.K; ++k) {
      for (int l = 0; l < t.L; ++l) out << (l ? " " : "") << v(t.Zhat_at(i, k, l));
      out << "\n";
    }
}

}  // namespace ffint
