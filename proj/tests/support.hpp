#pragma once

#include <map>
#include <string>
#include <vector>

#include "qstab/qstab.hpp"

// The four-contract reference market used across the suite:
//   a=(w1,f1)  b=(w1,f2)  c=(w2,f1)  d=(w2,f2)
// every agent greedy with quota 1, everything acceptable,
//   w1: a > b   w2: d > c   f1: c > a   f2: b > d
// Stable allocations: {a,d} and {b,c}.
inline qstab::Market make_m1() {
  using namespace qstab;
  std::map<AgentId, ChoiceSpec> specs;
  specs.emplace("w1", GreedyMatroid{1, {"a", "b"}, {"a", "b"}});
  specs.emplace("w2", GreedyMatroid{1, {"d", "c"}, {"c", "d"}});
  specs.emplace("f1", GreedyMatroid{1, {"c", "a"}, {"a", "c"}});
  specs.emplace("f2", GreedyMatroid{1, {"b", "d"}, {"b", "d"}});
  return Market::create({"w1", "w2"}, {"f1", "f2"},
                        {{"a", "w1", "f1", ""},
                         {"b", "w1", "f2", ""},
                         {"c", "w2", "f1", ""},
                         {"d", "w2", "f2", ""}},
                        std::move(specs));
}

// One firm g over workers u, v with the ranking {x,y} > {}: accepts the two
// contracts together but neither alone. Violates substitutability (and path
// independence and rejection monotonicity) but satisfies the law of
// aggregate demand. The empty allocation has a blocking set {x,y} yet no
// blocking contract.
inline qstab::Market make_pair_or_nothing() {
  using namespace qstab;
  std::map<AgentId, ChoiceSpec> specs;
  specs.emplace("u", GreedyMatroid{1, {"x"}, {"x"}});
  specs.emplace("v", GreedyMatroid{1, {"y"}, {"y"}});
  specs.emplace("g", RankedTable{{{"x", "y"}, {}}});
  return Market::create({"u", "v"}, {"g"},
                        {{"x", "u", "g", ""}, {"y", "v", "g", ""}}, std::move(specs));
}

// One firm g over three workers with the ranking {x,y} > {z} > {x} > {y} > {}.
// Satisfies the law of aggregate demand but not substitutability:
// C({x,y,z}) = {x,y} keeps x, yet C({x,z}) = {z} drops it.
inline qstab::Market make_lad_not_subst() {
  using namespace qstab;
  std::map<AgentId, ChoiceSpec> specs;
  specs.emplace("u", GreedyMatroid{1, {"x"}, {"x"}});
  specs.emplace("v", GreedyMatroid{1, {"y"}, {"y"}});
  specs.emplace("t", GreedyMatroid{1, {"z"}, {"z"}});
  specs.emplace("g", RankedTable{{{"x", "y"}, {"z"}, {"x"}, {"y"}, {}}});
  return Market::create({"t", "u", "v"}, {"g"},
                        {{"x", "u", "g", ""}, {"y", "v", "g", ""}, {"z", "t", "g", ""}},
                        std::move(specs));
}

inline std::vector<std::string> ids(std::initializer_list<std::string> list) {
  return std::vector<std::string>(list);
}
