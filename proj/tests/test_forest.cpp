#include "ffint/forest.hpp"

#include <algorithm>
#include <set>

#include "doctest.h"
#include "ffint/algebra.hpp"

using namespace ffint;

namespace {
ExoticForest ef(const std::string& s) { return ExoticForest::canonicalize(parse_forest(s)); }
}

TEST_CASE("encoding round trips") {
  for (const char* s : {"b", "1,1", "b[1,1]", "b[b[1,b[2,2]],1]", "2,2,1,1", "b[b],b[1,1]"}) {
    CHECK(encode(parse_forest(s)) == s);
  }
  CHECK(parse_forest("").empty());
  CHECK(encode(PlanarForest{}) == "");
}

TEST_CASE("canonicalize renames lianas by first DFS appearance") {
  CHECK(ef("b[b[3,b[1,1]],3]").encoding() == "b[b[1,b[2,2]],1]");
  CHECK(ef("").encoding() == "");
  CHECK(ef("2,2,1,1") == ef("1,1,2,2"));
  CHECK(ef("5,7,5,7") == ef("1,2,1,2"));
  // idempotence on everything of order <= 3
  for (int p = 1; p <= 3; ++p)
    for (const auto& f : enumerate_forests(ForestOrder{2 * p}))
      CHECK(ExoticForest::canonicalize(f.forest()) == f);
}

TEST_CASE("canonicalize rejects malformed forests") {
  CHECK_THROWS(ef("1"));
  CHECK_THROWS(ef("1,1,1"));
  CHECK_THROWS(ef("b[1],2"));
  CHECK_THROWS(ef("1[b],1"));  // liana with a child
}

TEST_CASE("order counts black nodes plus half the liana nodes") {
  CHECK(ef("b").order() == ForestOrder{2});
  CHECK(ef("b[1,1]").order() == ForestOrder{4});
  CHECK(ef("1,1").order() == ForestOrder{2});
  CHECK(ef("b[1,2,2,1]").order() == ForestOrder{6});
  CHECK(ForestOrder{3}.str() == "3/2");
}

TEST_CASE("enumeration counts are 2, 11, 95") {
  auto p1 = enumerate_forests(ForestOrder{2});
  REQUIRE(p1.size() == 2);
  CHECK(p1[0] == ef("b"));
  CHECK(p1[1] == ef("1,1"));

  auto p2 = enumerate_forests(ForestOrder{4});
  CHECK(p2.size() == 11);
  std::set<std::string> expected = {"b[b]", "b[1,1]", "b,b",   "b[1],1",  "1,b[1]", "b,1,1",
                                    "1,b,1", "1,1,b",  "1,1,2,2", "1,2,1,2", "1,2,2,1"};
  std::set<std::string> got;
  for (const auto& f : p2) got.insert(f.encoding());
  CHECK(got == expected);

  CHECK(enumerate_forests(ForestOrder{6}).size() == 95);
  // half-integer orders are empty: lianas always pair up
  CHECK(enumerate_forests(ForestOrder{1}).empty());
  CHECK(enumerate_forests(ForestOrder{3}).empty());
}

TEST_CASE("enumerated forests are pairwise distinct and sorted") {
  for (int p = 1; p <= 3; ++p) {
    auto fs = enumerate_forests(ForestOrder{2 * p});
    std::set<std::string> keys;
    for (const auto& f : fs) keys.insert(f.encoding());
    CHECK(keys.size() == fs.size());
    CHECK(std::is_sorted(fs.begin(), fs.end()));
  }
}

TEST_CASE("tree enumeration matches the classic list") {
  auto t1 = enumerate_trees(ForestOrder{2});
  REQUIRE(t1.size() == 1);
  CHECK(t1[0] == ef("b"));

  auto t2 = enumerate_trees(ForestOrder{4});
  REQUIRE(t2.size() == 2);
  CHECK(t2[0] == ef("b[b]"));
  CHECK(t2[1] == ef("b[1,1]"));

  auto t3 = enumerate_trees(ForestOrder{6});
  CHECK(t3.size() == 11);
  std::set<std::string> expected = {"b[b,b]",    "b[b[b]]",  "b[b,1,1]",  "b[1,b,1]",
                                    "b[1,1,b]",  "b[b[1],1]", "b[1,b[1]]", "b[b[1,1]]",
                                    "b[1,1,2,2]", "b[1,2,2,1]", "b[1,2,1,2]"};
  std::set<std::string> got;
  for (const auto& f : t3) got.insert(f.encoding());
  CHECK(got == expected);
}

TEST_CASE("irreducibility and connectedness") {
  CHECK(is_irreducible(ef("1,1")));
  CHECK(is_connected(ef("1,1")));
  CHECK(is_irreducible(ef("b")));
  CHECK(is_connected(ef("b")));
  CHECK_FALSE(is_irreducible(ef("b,b")));
  CHECK_FALSE(is_connected(ef("b,b")));
  // a liana hopping over a middle tree blocks every concatenation split but
  // not the interleaved one
  CHECK(is_irreducible(ef("1,b,1")));
  CHECK_FALSE(is_connected(ef("1,b,1")));

  for (int p = 1; p <= 3; ++p)
    for (const auto& f : enumerate_forests(ForestOrder{2 * p}))
      if (is_connected(f)) CHECK(is_irreducible(f));
}

TEST_CASE("irreducible factors recompose") {
  auto f = ef("b,1,b[1],2,2,b");
  auto factors = irreducible_factors(f);
  REQUIRE(factors.size() == 4);
  CHECK(encode(factors[0]) == "b");
  CHECK(encode(factors[1]) == "1,b[1]");
  CHECK(encode(factors[2]) == "2,2");
  CHECK(encode(factors[3]) == "b");
}

TEST_CASE("order is additive under concatenation") {
  std::vector<ExoticForest> basis;
  for (int p = 1; p <= 2; ++p)
    for (const auto& f : enumerate_forests(ForestOrder{2 * p})) basis.push_back(f);
  for (const auto& a : basis)
    for (const auto& b : basis)
      CHECK(concat(a, b).order().twice == a.order().twice + b.order().twice);
}
