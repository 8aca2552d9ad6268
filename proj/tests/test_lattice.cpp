#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace qstab;

namespace {

// Quasi-stable family of the reference market, canonical order.
std::vector<Allocation> m1_quasi_stable() {
  return {{}, {"b"}, {"c"}, {"a", "d"}, {"b", "c"}};
}

}  // namespace

TEST_CASE("Blair comparisons on the reference market") {
  Market m = make_m1();
  SubmarketView v = full_view(m);

  CHECK(blair_dominates(v, Allocation{"a", "d"}, Allocation{"b", "c"}, Side::workers));
  CHECK_FALSE(blair_dominates(v, Allocation{"b", "c"}, Allocation{"a", "d"}, Side::workers));
  CHECK(blair_dominates(v, Allocation{"b", "c"}, Allocation{"a", "d"}, Side::firms));
  CHECK_FALSE(blair_dominates(v, Allocation{"a", "d"}, Allocation{"b", "c"}, Side::firms));

  // reflexive on IR allocations; every IR allocation dominates the empty one
  for (const auto& y : std::vector<Allocation>{{}, {"a"}, {"b"}, {"c"}, {"d"}, {"a", "d"}}) {
    CHECK(blair_dominates(v, y, y, Side::workers));
    CHECK(blair_dominates(v, y, Allocation{}, Side::workers));
    CHECK(blair_dominates(v, y, Allocation{}, Side::firms));
  }

  CHECK_THROWS_WITH(blair_dominates(v, Allocation{"b", "d"}, Allocation{}, Side::workers),
                    Catch::Matchers::ContainsSubstring("not individually rational"));
}

TEST_CASE("Blair comparison over an explicit agent subset") {
  Market m = make_m1();
  SubmarketView v = full_view(m);

  CHECK(blair_dominates(v, Allocation{"a"}, Allocation{"b"}, {"w1"}));
  CHECK_FALSE(blair_dominates(v, Allocation{"b"}, Allocation{"a"}, {"w1"}));
  // the dominator must consist of the subset's own contracts: equality is
  // against the whole allocation, not its restriction
  CHECK(blair_dominates(v, Allocation{}, Allocation{"b"}, {"w2"}));
  CHECK_FALSE(blair_dominates(v, Allocation{"a"}, Allocation{"b"}, {"w2"}));

  CHECK_THROWS_WITH(blair_dominates(v, Allocation{"a"}, Allocation{"b"}, {"w1", "f1"}),
                    Catch::Matchers::ContainsSubstring("one-sided"));
  CHECK_THROWS_WITH(blair_dominates(v, Allocation{"a"}, Allocation{"b"},
                                    std::vector<AgentId>{}),
                    Catch::Matchers::ContainsSubstring("one-sided"));
}

TEST_CASE("worker-side join") {
  Market m = make_m1();
  SubmarketView v = full_view(m);

  CHECK(join_w(v, Allocation{"a", "d"}, Allocation{"b", "c"}) == Allocation{"a", "d"});
  CHECK(join_w(v, Allocation{"c"}, Allocation{"b"}) == Allocation{"b", "c"});
  CHECK(join_w(v, Allocation{}, Allocation{"c"}) == Allocation{"c"});
  CHECK(join_w(v, Allocation{"b", "c"}, Allocation{"b", "c"}) == Allocation{"b", "c"});

  // operands must be firm-quasi-stable
  CHECK_THROWS_WITH(join_w(v, Allocation{"a"}, Allocation{"b"}),
                    Catch::Matchers::ContainsSubstring("not firm-quasi-stable"));
}

TEST_CASE("worker-side meet against the enumerated family") {
  Market m = make_m1();
  SubmarketView v = full_view(m);
  auto family = m1_quasi_stable();

  CHECK(meet_w(v, Allocation{"a", "d"}, Allocation{"b", "c"}, family) == Allocation{"b", "c"});
  CHECK(meet_w(v, Allocation{"c"}, Allocation{"b"}, family) == Allocation{});
  CHECK(meet_w(v, Allocation{"b", "c"}, Allocation{"c"}, family) == Allocation{"c"});

  std::vector<Allocation> no_empty = {{"b"}, {"c"}, {"a", "d"}, {"b", "c"}};
  CHECK_THROWS_WITH(meet_w(v, Allocation{"c"}, Allocation{"b"}, no_empty),
                    Catch::Matchers::ContainsSubstring("enumeration incomplete"));
  CHECK_THROWS_WITH(meet_w(v, Allocation{"a", "d"}, Allocation{"a"}, family),
                    Catch::Matchers::ContainsSubstring("belong to the supplied family"));
}

TEST_CASE("join and meet bound their operands") {
  Market m = make_m1();
  SubmarketView v = full_view(m);
  auto family = m1_quasi_stable();
  for (const auto& y : family)
    for (const auto& z : family) {
      Allocation j = join_w(v, y, z);
      Allocation w = meet_w(v, y, z, family);
      CHECK(blair_dominates(v, j, y, Side::workers));
      CHECK(blair_dominates(v, j, z, Side::workers));
      CHECK(blair_dominates(v, y, w, Side::workers));
      CHECK(blair_dominates(v, z, w, Side::workers));
      // commutativity
      CHECK(join_w(v, z, y) == j);
      CHECK(meet_w(v, z, y, family) == w);
    }
}

TEST_CASE("re-equilibration operator") {
  Market m = make_m1();
  SubmarketView v = full_view(m);

  CHECK(tarski(v, Allocation{}) == Allocation{"b", "c"});
  CHECK(tarski(v, Allocation{"c"}) == Allocation{"b", "c"});
  CHECK(tarski(v, Allocation{"b", "c"}) == Allocation{"b", "c"});
  CHECK(tarski(v, Allocation{"a", "d"}) == Allocation{"a", "d"});

  CHECK_THROWS_WITH(tarski(v, Allocation{"a"}),
                    Catch::Matchers::ContainsSubstring("not firm-quasi-stable"));
}

TEST_CASE("operator iteration reaches a stable fixed point") {
  Market m = make_m1();
  SubmarketView v = full_view(m);

  TarskiTrace t = tarski_iterate(v, Allocation{});
  CHECK(t.iterates == std::vector<Allocation>{{}, {"b", "c"}});
  CHECK(t.fixed_point == Allocation{"b", "c"});

  TarskiTrace u = tarski_iterate(v, Allocation{"a", "d"});
  CHECK(u.iterates == std::vector<Allocation>{{"a", "d"}});
  CHECK(u.fixed_point == Allocation{"a", "d"});

  // fixed points over the whole quasi-stable family are exactly the stable set
  for (const auto& y : m1_quasi_stable()) {
    bool fixed = tarski(v, y) == y;
    CHECK(fixed == is_stable(v, y));
  }
}

TEST_CASE("operator monotonicity between comparable points") {
  Market m = make_m1();
  SubmarketView v = full_view(m);

  CHECK(isotone_check(v, Allocation{"a", "d"}, Allocation{}));
  CHECK(isotone_check(v, Allocation{"b", "c"}, Allocation{"c"}));
  CHECK(isotone_check(v, Allocation{"b", "c"}, Allocation{"b"}));

  CHECK_THROWS_WITH(isotone_check(v, Allocation{"c"}, Allocation{"b"}),
                    Catch::Matchers::ContainsSubstring("must dominate"));
  CHECK_THROWS_WITH(isotone_check(v, Allocation{"a"}, Allocation{}),
                    Catch::Matchers::ContainsSubstring("must be firm-quasi-stable"));
}

TEST_CASE("lattice operations inside a restricted view") {
  Market m = make_m1();
  SubmarketView v1 = submarket(m, {"w1", "w2"}, {"f1"});
  std::vector<Allocation> family = {{}, {"c"}};

  CHECK(join_w(v1, Allocation{}, Allocation{"c"}) == Allocation{"c"});
  CHECK(meet_w(v1, Allocation{}, Allocation{"c"}, family) == Allocation{});
  CHECK(tarski(v1, Allocation{}) == Allocation{"c"});
  CHECK(tarski_iterate(v1, Allocation{}).fixed_point == Allocation{"c"});

  // contracts outside the view are rejected up front
  CHECK_THROWS_WITH(tarski(v1, Allocation{"b"}),
                    Catch::Matchers::ContainsSubstring("outside the view"));
}
