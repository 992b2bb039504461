#pragma once

#include <map>
#include <utility>

#include "ffint/forest.hpp"
#include "ffint/rational.hpp"

namespace ffint {

// Finite linear combination of exotic forests with exact rational
// coefficients. Zero coefficients are never stored.
class LinComb {
 public:
  LinComb() = default;
  explicit LinComb(const ExoticForest& f, Rational c = Rational(1)) { add(f, c); }

  void add(const ExoticForest& f, Rational c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(f, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Rational coeff(const ExoticForest& f) const {
    auto it = terms_.find(f);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  LinComb& operator+=(const LinComb& o) {
    for (const auto& [f, c] : o.terms_) add(f, c);
    return *this;
  }
  friend LinComb operator+(LinComb a, const LinComb& b) { return a += b; }

  LinComb scaled(Rational c) const {
    LinComb out;
    if (c.is_zero()) return out;
    for (const auto& [f, v] : terms_) out.terms_.emplace(f, v * c);
    return out;
  }

  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const std::map<ExoticForest, Rational>& terms() const { return terms_; }
  auto begin() const { return terms_.begin(); }
  auto end() const { return terms_.end(); }

  friend bool operator==(const LinComb& a, const LinComb& b) { return a.terms_ == b.terms_; }

 private:
  std::map<ExoticForest, Rational> terms_;
};

// Linear combination of forest pairs (coproduct target).
class TensorLinComb {
 public:
  using Key = std::pair<ExoticForest, ExoticForest>;

  void add(const ExoticForest& a, const ExoticForest& b, Rational c) {
    if (c.is_zero()) return;
    Key k{a, b};
    auto [it, inserted] = terms_.try_emplace(k, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Rational coeff(const ExoticForest& a, const ExoticForest& b) const {
    auto it = terms_.find(Key{a, b});
    return it == terms_.end() ? Rational(0) : it->second;
  }

  TensorLinComb& operator+=(const TensorLinComb& o) {
    for (const auto& [k, c] : o.terms_) add(k.first, k.second, c);
    return *this;
  }

  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const std::map<Key, Rational>& terms() const { return terms_; }
  auto begin() const { return terms_.begin(); }
  auto end() const { return terms_.end(); }

  friend bool operator==(const TensorLinComb& a, const TensorLinComb& b) {
    return a.terms_ == b.terms_;
  }

 private:
  std::map<Key, Rational> terms_;
};

}  // namespace ffint
