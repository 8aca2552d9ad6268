#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qstab/base.hpp"
#include "qstab/da.hpp"
#include "qstab/gen.hpp"
#include "qstab/model.hpp"
#include "qstab/oracle.hpp"
#include "qstab/scenario.hpp"

namespace qstab {

using json = nlohmann::ordered_json;

namespace detail {

inline const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw InputError(path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw InputError(path + "." + key + ": missing");
  return *it;
}

inline std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw InputError(path + ": expected a string");
  return j.get<std::string>();
}

inline std::vector<std::string> as_string_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw InputError(path + ": expected an array");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(as_string(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace detail

inline json allocation_to_json(const Allocation& a) { return json(a.members()); }

inline json market_to_json(const Market& m) {
  json j;
  j["workers"] = m.workers();
  j["firms"] = m.firms();
  j["contracts"] = json::array();
  for (const auto& c : m.contracts())
    j["contracts"].push_back(
        {{"id", c.id}, {"worker", c.worker}, {"firm", c.firm}, {"terms", c.terms}});
  j["choices"] = json::object();
  auto emit = [&](const AgentId& a) {
    const ChoiceSpec& spec = m.choice_spec(a);
    if (const auto* g = std::get_if<GreedyMatroid>(&spec)) {
      j["choices"][a] = {{"kind", "greedy"},
                         {"quota", g->quota},
                         {"priority", g->priority},
                         {"acceptable", g->acceptable}};
    } else {
      j["choices"][a] = {{"kind", "table"},
                         {"ranking", std::get<RankedTable>(spec).ranking}};
    }
  };
  for (const auto& w : m.workers()) emit(w);
  for (const auto& f : m.firms()) emit(f);
  return j;
}

inline Market market_from_json(const json& j) {
  auto workers = detail::as_string_array(detail::field(j, "workers", "market"), "workers");
  auto firms = detail::as_string_array(detail::field(j, "firms", "market"), "firms");
  const json& jc = detail::field(j, "contracts", "market");
  if (!jc.is_array()) throw InputError("contracts: expected an array");
  std::vector<Contract> contracts;
  for (std::size_t i = 0; i < jc.size(); ++i) {
    std::string path = "contracts[" + std::to_string(i) + "]";
    Contract c;
    c.id = detail::as_string(detail::field(jc[i], "id", path), path + ".id");
    c.worker = detail::as_string(detail::field(jc[i], "worker", path), path + ".worker");
    c.firm = detail::as_string(detail::field(jc[i], "firm", path), path + ".firm");
    if (auto it = jc[i].find("terms"); it != jc[i].end())
      c.terms = detail::as_string(*it, path + ".terms");
    contracts.push_back(std::move(c));
  }
  const json& jch = detail::field(j, "choices", "market");
  if (!jch.is_object()) throw InputError("choices: expected an object");
  std::map<AgentId, ChoiceSpec> specs;
  for (const auto& [agent, spec] : jch.items()) {
    std::string path = "choices." + agent;
    std::string kind = detail::as_string(detail::field(spec, "kind", path), path + ".kind");
    if (kind == "greedy") {
      GreedyMatroid g;
      const json& q = detail::field(spec, "quota", path);
      if (!q.is_number_integer() || q.get<int>() < 1)
        throw InputError(path + ".quota: expected a positive integer");
      g.quota = q.get<int>();
      g.priority =
          detail::as_string_array(detail::field(spec, "priority", path), path + ".priority");
      g.acceptable = detail::as_string_array(detail::field(spec, "acceptable", path),
                                             path + ".acceptable");
      specs.emplace(agent, std::move(g));
    } else if (kind == "table") {
      const json& rk = detail::field(spec, "ranking", path);
      if (!rk.is_array()) throw InputError(path + ".ranking: expected an array");
      RankedTable t;
      for (std::size_t i = 0; i < rk.size(); ++i)
        t.ranking.push_back(detail::as_string_array(
            rk[i], path + ".ranking[" + std::to_string(i) + "]"));
      specs.emplace(agent, std::move(t));
    } else {
      throw InputError(path + ".kind: expected \"greedy\" or \"table\", got \"" + kind +
                       "\"");
    }
  }
  return Market::create(std::move(workers), std::move(firms), std::move(contracts),
                        std::move(specs));
}

inline std::string save_market(const Market& m) { return market_to_json(m).dump(2) + "\n"; }

inline json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open");
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return json::parse(text.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

inline Market load_market(const std::string& path) {
  try {
    return market_from_json(parse_json_file(path));
  } catch (const InputError& e) {
    if (std::string(e.what()).rfind(path, 0) == 0) throw;
    throw InputError(path + ": " + e.what());
  }
}

struct ScenarioSpec {
  std::string market_path;
  DisruptionKind kind = DisruptionKind::add_firms;
  std::vector<AgentId> added_firms;
  std::vector<AgentId> removed_workers;
  bool start_worker_pessimal = false;
  Allocation start;
  ProposalStrategy strategy = FullProposal{};
};

inline ScenarioSpec scenario_from_json(const json& j) {
  ScenarioSpec s;
  s.market_path = detail::as_string(detail::field(j, "market", "scenario"), "market");
  const json& ev = detail::field(j, "event", "scenario");
  std::string kind = detail::as_string(detail::field(ev, "kind", "event"), "event.kind");
  if (kind == "add-firms") {
    s.kind = DisruptionKind::add_firms;
    s.added_firms = detail::as_string_array(detail::field(ev, "firms", "event"), "event.firms");
  } else if (kind == "remove-workers") {
    s.kind = DisruptionKind::remove_workers;
    s.removed_workers =
        detail::as_string_array(detail::field(ev, "workers", "event"), "event.workers");
  } else if (kind == "combined") {
    s.kind = DisruptionKind::combined;
    s.added_firms = detail::as_string_array(detail::field(ev, "firms", "event"), "event.firms");
    s.removed_workers =
        detail::as_string_array(detail::field(ev, "workers", "event"), "event.workers");
  } else {
    throw InputError(
        "event.kind: expected \"add-firms\", \"remove-workers\" or \"combined\", got \"" +
        kind + "\"");
  }
  const json& st = detail::field(j, "start", "scenario");
  if (st.is_string()) {
    if (st.get<std::string>() != "worker-pessimal")
      throw InputError("start: expected an allocation or \"worker-pessimal\"");
    s.start_worker_pessimal = true;
  } else {
    s.start = Allocation(detail::as_string_array(st, "start"));
  }
  std::uint64_t seed = 0;
  if (auto it = j.find("seed"); it != j.end()) {
    if (it->is_number_unsigned())
      seed = it->get<std::uint64_t>();
    else if (it->is_number_integer() && it->get<std::int64_t>() >= 0)
      seed = static_cast<std::uint64_t>(it->get<std::int64_t>());
    else
      throw InputError("seed: expected a nonnegative integer");
  }
  std::string strat = "full";
  if (auto it = j.find("strategy"); it != j.end())
    strat = detail::as_string(*it, "strategy");
  if (strat == "full")
    s.strategy = FullProposal{};
  else if (strat == "single-lex")
    s.strategy = SingleLexProposal{};
  else if (strat == "random")
    s.strategy = RandomSubsetProposal{seed};
  else
    throw InputError("strategy: expected \"full\", \"single-lex\" or \"random\", got \"" +
                     strat + "\"");
  return s;
}

inline ScenarioSpec load_scenario(const std::string& path) {
  try {
    return scenario_from_json(parse_json_file(path));
  } catch (const InputError& e) {
    if (std::string(e.what()).rfind(path, 0) == 0) throw;
    throw InputError(path + ": " + e.what());
  }
}

inline json trace_to_json(const DATrace& t) {
  json steps = json::array();
  for (const auto& s : t.steps)
    steps.push_back({{"offers", allocation_to_json(s.offers)},
                     {"held", allocation_to_json(s.held)},
                     {"satisfied", allocation_to_json(s.satisfied)}});
  return {{"strategy", t.strategy},
          {"start", allocation_to_json(t.start)},
          {"steps", steps},
          {"outcome", allocation_to_json(t.outcome)}};
}

inline json enumeration_to_json(const EnumerationResult& r) {
  auto list = [](const std::vector<Allocation>& as) {
    json out = json::array();
    for (const auto& a : as) out.push_back(allocation_to_json(a));
    return out;
  };
  return {{"allocations", list(r.allocations)},
          {"individually_rational", list(r.individually_rational)},
          {"quasi_stable", list(r.quasi_stable)},
          {"stable", list(r.stable)},
          {"counts",
           {{"allocations", r.allocations.size()},
            {"individually_rational", r.individually_rational.size()},
            {"quasi_stable", r.quasi_stable.size()},
            {"stable", r.stable.size()}}}};
}

inline json certification_to_json(const CertificationReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"witness", c.witness}});
  return {{"passed", r.passed}, {"checks", checks}, {"suspect_agents", r.suspect_agents}};
}

inline json verification_to_json(const std::vector<VerificationReport>& reports) {
  json out = json::array();
  for (const auto& r : reports)
    out.push_back({{"agent", r.agent},
                   {"property", r.property},
                   {"passed", r.passed},
                   {"witness_y", r.witness_y},
                   {"witness_z", r.witness_z}});
  return out;
}

inline json scenario_report_to_json(const ScenarioReport& r) {
  json slices = json::object();
  for (const auto& [firm, pair] : r.entrant_slices)
    slices[firm] = {{"outcome", allocation_to_json(pair.first)},
                    {"worker_pessimal", allocation_to_json(pair.second)}};
  return {{"start", allocation_to_json(r.start)},
          {"restart", allocation_to_json(r.restart)},
          {"trace", trace_to_json(r.trace)},
          {"outcome", allocation_to_json(r.outcome)},
          {"workers_weakly_gain", r.workers_weakly_gain},
          {"firms_weakly_lose", r.firms_weakly_lose},
          {"entrant_slices", slices}};
}

}  // namespace qstab
