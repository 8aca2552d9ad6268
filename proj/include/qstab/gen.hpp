#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qstab/base.hpp"
#include "qstab/model.hpp"
#include "qstab/verify.hpp"

namespace qstab {

enum class GenFamily { greedy_only, mixed };

struct GenParams {
  int n_workers = 2;
  int n_firms = 2;
  int max_contracts_per_pair = 1;
  double density = 1.0;            // chance each potential contract exists
  int quota_min = 1;
  int quota_max = 1;
  double acceptability_rate = 1.0;  // chance a contract is acceptable to an agent
  GenFamily family = GenFamily::greedy_only;
  std::uint64_t seed = 0;
};

struct GeneratedMarket {
  Market market;
  std::vector<VerificationReport> reports;  // four per agent, workers then firms
};

namespace detail {

inline std::string padded(int value, int width) {
  std::string s = std::to_string(value);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

inline int digits(int n) {
  int d = 1;
  while (n >= 10) {
    n /= 10;
    ++d;
  }
  return d;
}

template <typename T>
void seeded_shuffle(std::vector<T>& items, SplitMix64& rng) {
  for (std::size_t i = items.size(); i > 1; --i)
    std::swap(items[i - 1], items[rng.next_below(i)]);
}

// All subsets of the agent's contracts with at most one per counterpart.
inline void collect_entries(const std::vector<std::pair<ContractId, AgentId>>& incident,
                            std::size_t from, std::vector<ContractId>& current,
                            std::vector<AgentId>& used,
                            std::vector<std::vector<ContractId>>& out) {
  out.push_back(current);
  for (std::size_t i = from; i < incident.size(); ++i) {
    if (std::find(used.begin(), used.end(), incident[i].second) != used.end()) continue;
    current.push_back(incident[i].first);
    used.push_back(incident[i].second);
    collect_entries(incident, i + 1, current, used, out);
    current.pop_back();
    used.pop_back();
  }
}

}  // namespace detail

// Deterministic seeded market. Every random draw comes from a stream keyed
// by (seed, entity label), so one agent's preferences do not move when
// other agents or contracts are added. The greedy family is certified
// against all four preference verifiers at generation time; the mixed
// family carries its verification reports instead, since arbitrary tables
// are usually not substitutable.
inline GeneratedMarket gen_market(const GenParams& p) {
  if (p.n_workers < 1 || p.n_firms < 1)
    throw InputError("gen: both sides need at least one agent");
  if (p.max_contracts_per_pair < 1)
    throw InputError("gen: max contracts per pair must be at least 1");
  if (p.density < 0.0 || p.density > 1.0) throw InputError("gen: density must be in [0,1]");
  if (p.acceptability_rate < 0.0 || p.acceptability_rate > 1.0)
    throw InputError("gen: acceptability rate must be in [0,1]");
  if (p.quota_min < 1 || p.quota_max < p.quota_min)
    throw InputError("gen: quota range must satisfy 1 <= min <= max");

  const int wpad = detail::digits(p.n_workers);
  const int fpad = detail::digits(p.n_firms);
  std::vector<AgentId> workers, firms;
  for (int i = 1; i <= p.n_workers; ++i) workers.push_back("w" + detail::padded(i, wpad));
  for (int i = 1; i <= p.n_firms; ++i) firms.push_back("f" + detail::padded(i, fpad));

  const int grid = p.n_workers * p.n_firms * p.max_contracts_per_pair;
  const int xpad = detail::digits(grid);
  std::vector<Contract> contracts;
  for (int wi = 0; wi < p.n_workers; ++wi)
    for (int fi = 0; fi < p.n_firms; ++fi)
      for (int s = 0; s < p.max_contracts_per_pair; ++s) {
        auto rng = seeded_stream(p.seed, "slot:" + std::to_string(wi) + ":" +
                                             std::to_string(fi) + ":" + std::to_string(s));
        if (rng.next_unit() >= p.density) continue;
        int pos = (wi * p.n_firms + fi) * p.max_contracts_per_pair + s;
        contracts.push_back({"x" + detail::padded(pos + 1, xpad), workers[wi], firms[fi],
                             "t" + std::to_string(s)});
      }
  if (contracts.size() > static_cast<std::size_t>(kMaxContracts))
    throw InputError("gen: parameters admit " + std::to_string(contracts.size()) +
                     " contracts, above the representation limit of " +
                     std::to_string(kMaxContracts));

  std::map<AgentId, std::vector<std::pair<ContractId, AgentId>>> incident;
  for (const auto& c : contracts) {
    incident[c.worker].push_back({c.id, c.firm});
    incident[c.firm].push_back({c.id, c.worker});
  }

  std::map<AgentId, ChoiceSpec> specs;
  auto all_agents = workers;
  all_agents.insert(all_agents.end(), firms.begin(), firms.end());
  for (const auto& agent : all_agents) {
    const auto& inc = incident[agent];  // sorted by contract id via contract grid order
    bool table = false;
    if (p.family == GenFamily::mixed && inc.size() <= 10) {
      auto coin = seeded_stream(p.seed, "family:" + agent);
      table = coin.next() & 1;
    }
    if (table) {
      auto rng = seeded_stream(p.seed, "table:" + agent);
      std::vector<std::vector<ContractId>> entries;
      std::vector<ContractId> cur;
      std::vector<AgentId> used;
      detail::collect_entries(inc, 0, cur, used, entries);
      detail::seeded_shuffle(entries, rng);
      std::size_t keep = 1 + rng.next_below(entries.size());
      entries.resize(keep);
      if (std::find(entries.begin(), entries.end(), std::vector<ContractId>{}) ==
          entries.end())
        entries.push_back({});
      specs.emplace(agent, RankedTable{std::move(entries)});
    } else {
      auto rng = seeded_stream(p.seed, "choice:" + agent);
      GreedyMatroid g;
      g.quota = p.quota_min +
                static_cast<int>(rng.next_below(
                    static_cast<std::uint64_t>(p.quota_max - p.quota_min + 1)));
      for (const auto& [id, _] : inc) g.priority.push_back(id);
      detail::seeded_shuffle(g.priority, rng);
      for (const auto& [id, _] : inc)
        if (rng.next_unit() < p.acceptability_rate) g.acceptable.push_back(id);
      specs.emplace(agent, std::move(g));
    }
  }

  GeneratedMarket out{Market::create(std::move(workers), std::move(firms),
                                     std::move(contracts), std::move(specs)),
                      {}};
  out.reports = verify_market(out.market);
  if (p.family == GenFamily::greedy_only)
    for (const auto& r : out.reports)
      if (!r.passed)
        throw PropertyViolation("gen: greedy agent '" + r.agent + "' failed " + r.property +
                                " verification");
  return out;
}

}  // namespace qstab
