#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "support.hpp"

using namespace qstab;

namespace {

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& name, const std::string& content)
      : path(std::filesystem::temp_directory_path() / name) {
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::error_code ec; std::filesystem::remove(path, ec); }
};

}  // namespace

TEST_CASE("markets round-trip through json") {
  Market m = make_m1();
  std::string text = save_market(m);
  Market back = market_from_json(json::parse(text));
  CHECK(save_market(back) == text);
  CHECK(back.workers() == m.workers());
  CHECK(back.contract_count() == m.contract_count());
  // semantics preserved, not just shape
  CHECK(choose(back, "f1", ids({"a", "c"})) == Allocation{"c"});

  Market table = make_pair_or_nothing();
  CHECK(save_market(market_from_json(json::parse(save_market(table)))) ==
        save_market(table));
}

TEST_CASE("serialization is stable across repeated calls") {
  Market m = make_m1();
  CHECK(save_market(m) == save_market(m));
  GenParams p;
  p.seed = 5;
  CHECK(save_market(gen_market(p).market) == save_market(gen_market(p).market));
}

TEST_CASE("market schema errors carry a path") {
  auto parse = [](const char* text) { return market_from_json(json::parse(text)); };

  CHECK_THROWS_WITH(parse(R"({"firms":["f"],"contracts":[],"choices":{}})"),
                    Catch::Matchers::ContainsSubstring("market.workers: missing"));
  CHECK_THROWS_WITH(parse(R"({"workers":"w","firms":["f"],"contracts":[],"choices":{}})"),
                    Catch::Matchers::ContainsSubstring("expected an array"));
  CHECK_THROWS_WITH(
      parse(R"({"workers":["w"],"firms":["f"],"contracts":[{"id":"x","worker":"w"}],"choices":{}})"),
      Catch::Matchers::ContainsSubstring("contracts[0].firm: missing"));
  CHECK_THROWS_WITH(
      parse(R"({"workers":["w"],"firms":["f"],"contracts":[],"choices":{"w":{"kind":"odd"}}})"),
      Catch::Matchers::ContainsSubstring("choices.w.kind"));
  CHECK_THROWS_WITH(
      parse(
          R"({"workers":["w"],"firms":["f"],"contracts":[],
              "choices":{"w":{"kind":"greedy","quota":0,"priority":[],"acceptable":[]}}})"),
      Catch::Matchers::ContainsSubstring("positive integer"));
  CHECK_THROWS_WITH(
      parse(R"({"workers":["w"],"firms":["f"],"contracts":[],
                "choices":{"w":{"kind":"table","ranking":"x"}}})"),
      Catch::Matchers::ContainsSubstring("ranking: expected an array"));
}

TEST_CASE("loading from disk wraps errors with the file path") {
  CHECK_THROWS_WITH(load_market("/nonexistent/market.json"),
                    Catch::Matchers::ContainsSubstring("cannot open"));
  TempFile bad("qstab-test-bad.json", "{not json");
  CHECK_THROWS_WITH(load_market(bad.path.string()),
                    Catch::Matchers::ContainsSubstring(bad.path.string()));
  TempFile incomplete("qstab-test-incomplete.json", R"({"workers":["w"]})");
  CHECK_THROWS_WITH(load_market(incomplete.path.string()),
                    Catch::Matchers::ContainsSubstring(incomplete.path.string()));
}

TEST_CASE("scenario files parse") {
  json j = {{"market", "market.json"},
            {"event", {{"kind", "add-firms"}, {"firms", {"f2"}}}},
            {"start", {"c"}},
            {"strategy", "random"},
            {"seed", 7}};
  ScenarioSpec s = scenario_from_json(j);
  CHECK(s.market_path == "market.json");
  CHECK(s.kind == DisruptionKind::add_firms);
  CHECK(s.added_firms == std::vector<AgentId>{"f2"});
  CHECK_FALSE(s.start_worker_pessimal);
  CHECK(s.start == Allocation{"c"});
  CHECK(strategy_name(s.strategy) == "random:7");

  json pessimal = {{"market", "m.json"},
                   {"event", {{"kind", "remove-workers"}, {"workers", {"w2"}}}},
                   {"start", "worker-pessimal"}};
  ScenarioSpec t = scenario_from_json(pessimal);
  CHECK(t.kind == DisruptionKind::remove_workers);
  CHECK(t.removed_workers == std::vector<AgentId>{"w2"});
  CHECK(t.start_worker_pessimal);
  CHECK(strategy_name(t.strategy) == "full");

  json combined = {{"market", "m.json"},
                   {"event",
                    {{"kind", "combined"}, {"firms", {"f2"}}, {"workers", {"w1"}}}},
                   {"start", json::array()}};
  CHECK(scenario_from_json(combined).kind == DisruptionKind::combined);

  json bad_kind = {{"market", "m.json"},
                   {"event", {{"kind", "merge"}, {"firms", {"f2"}}}},
                   {"start", json::array()}};
  CHECK_THROWS_WITH(scenario_from_json(bad_kind),
                    Catch::Matchers::ContainsSubstring("event.kind"));

  json bad_start = {{"market", "m.json"},
                    {"event", {{"kind", "add-firms"}, {"firms", {"f2"}}}},
                    {"start", "best"}};
  CHECK_THROWS_WITH(scenario_from_json(bad_start),
                    Catch::Matchers::ContainsSubstring("worker-pessimal"));

  json bad_seed = {{"market", "m.json"},
                   {"event", {{"kind", "add-firms"}, {"firms", {"f2"}}}},
                   {"start", json::array()},
                   {"seed", -1}};
  CHECK_THROWS_WITH(scenario_from_json(bad_seed),
                    Catch::Matchers::ContainsSubstring("nonnegative"));

  json bad_strategy = {{"market", "m.json"},
                       {"event", {{"kind", "add-firms"}, {"firms", {"f2"}}}},
                       {"start", json::array()},
                       {"strategy", "eager"}};
  CHECK_THROWS_WITH(scenario_from_json(bad_strategy),
                    Catch::Matchers::ContainsSubstring("strategy"));
}

TEST_CASE("report serializers expose the full structure") {
  Market m = make_m1();
  SubmarketView v = full_view(m);

  json e = enumeration_to_json(enumerate_allocations(v));
  CHECK(e["counts"]["allocations"] == 16);
  CHECK(e["counts"]["individually_rational"] == 7);
  CHECK(e["counts"]["quasi_stable"] == 5);
  CHECK(e["counts"]["stable"] == 2);
  CHECK(e["stable"][0] == json::array({"a", "d"}));

  json t = trace_to_json(da_run(v, Allocation{}, SingleLexProposal{}));
  CHECK(t["strategy"] == "single-lex");
  CHECK(t["start"] == json::array());
  CHECK(t["steps"].size() == 2);
  CHECK(t["steps"][0]["offers"] == json::array({"b"}));
  CHECK(t["outcome"] == json::array({"b", "c"}));

  json c = certification_to_json(certify(v));
  CHECK(c["passed"] == true);
  CHECK(c["checks"].size() == 5);
  CHECK(c["suspect_agents"] == json::array());

  json verif = verification_to_json(verify_agent(m, "w1"));
  CHECK(verif.size() == 4);
  CHECK(verif[0]["agent"] == "w1");
  CHECK(verif[0]["passed"] == true);

  DisruptionEvent ev = make_disruption(m, {"f2"}, {});
  json sr = scenario_report_to_json(new_entrant_report(ev, Allocation{"c"}));
  CHECK(sr["start"] == json::array({"c"}));
  CHECK(sr["outcome"] == json::array({"b", "c"}));
  CHECK(sr["workers_weakly_gain"] == true);
  CHECK(sr["firms_weakly_lose"] == true);
  CHECK(sr["entrant_slices"]["f2"]["outcome"] == json::array({"b"}));
  // repeated serialization is byte-identical
  CHECK(sr.dump(2) == scenario_report_to_json(new_entrant_report(ev, Allocation{"c"})).dump(2));
}
