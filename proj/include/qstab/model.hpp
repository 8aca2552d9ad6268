#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qstab/base.hpp"
#include "qstab/choice.hpp"

namespace qstab {

// A bilateral contract. `terms` is an opaque label; two contracts between
// the same pair with different terms are distinct.
struct Contract {
  ContractId id;
  AgentId worker;
  AgentId firm;
  std::string terms;

  friend bool operator==(const Contract&, const Contract&) = default;
};

// Immutable sorted set of contract ids. Ordering between allocations is
// canonical: by size, then lexicographically by members.
class Allocation {
 public:
  Allocation() = default;
  Allocation(std::vector<ContractId> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  }
  Allocation(std::initializer_list<ContractId> members)
      : Allocation(std::vector<ContractId>(members)) {}

  const std::vector<ContractId>& members() const { return members_; }
  bool empty() const { return members_.empty(); }
  std::size_t size() const { return members_.size(); }
  bool contains(const ContractId& id) const {
    return std::binary_search(members_.begin(), members_.end(), id);
  }

  friend bool operator==(const Allocation&, const Allocation&) = default;
  friend bool operator<(const Allocation& a, const Allocation& b) {
    if (a.members_.size() != b.members_.size())
      return a.members_.size() < b.members_.size();
    return a.members_ < b.members_;
  }

 private:
  std::vector<ContractId> members_;
};

inline std::string to_string(const Allocation& a) {
  std::string out = "{";
  for (std::size_t i = 0; i < a.members().size(); ++i) {
    if (i) out += ",";
    out += a.members()[i];
  }
  return out + "}";
}

inline std::string join_ids(const std::vector<ContractId>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ",";
    out += ids[i];
  }
  return out;
}

/// A matching market: two disjoint agent sides, contracts between them, and
/// one choice function per agent. Construction canonicalizes order (agents
/// and contracts sorted by id) and validates every cross-reference, so a
/// Market value is always internally consistent.
class Market {
 public:
  static Market create(std::vector<AgentId> workers, std::vector<AgentId> firms,
                       std::vector<Contract> contracts,
                       std::map<AgentId, ChoiceSpec> choices) {
    Market m;
    validate_side(workers, "workers");
    validate_side(firms, "firms");
    std::sort(workers.begin(), workers.end());
    std::sort(firms.begin(), firms.end());
    for (const auto& f : firms)
      if (std::binary_search(workers.begin(), workers.end(), f))
        throw InputError("agent '" + f + "' appears on both sides");

    if (contracts.size() > static_cast<std::size_t>(kMaxContracts))
      throw InputError("too many contracts: " + std::to_string(contracts.size()) +
                       " (limit " + std::to_string(kMaxContracts) + ")");
    std::sort(contracts.begin(), contracts.end(),
              [](const Contract& a, const Contract& b) { return a.id < b.id; });
    for (std::size_t i = 0; i + 1 < contracts.size(); ++i)
      if (contracts[i].id == contracts[i + 1].id)
        throw InputError("duplicate contract id '" + contracts[i].id + "'");

    m.contracts_ = std::move(contracts);

    for (std::size_t i = 0; i < workers.size(); ++i)
      m.agents_.push_back({workers[i], true, {}, 0});
    for (std::size_t i = 0; i < firms.size(); ++i)
      m.agents_.push_back({firms[i], false, {}, 0});
    for (std::uint32_t i = 0; i < m.agents_.size(); ++i)
      m.agent_index_[m.agents_[i].id] = i;
    m.n_workers_ = workers.size();

    m.contract_pair_.resize(m.contracts_.size());
    m.contract_worker_.resize(m.contracts_.size());
    m.contract_firm_.resize(m.contracts_.size());
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint8_t> pair_ids;
    for (std::size_t c = 0; c < m.contracts_.size(); ++c) {
      const Contract& x = m.contracts_[c];
      if (x.id.empty()) throw InputError("contract with empty id");
      auto wi = m.agent_index_.find(x.worker);
      if (wi == m.agent_index_.end() || !m.agents_[wi->second].worker)
        throw InputError("contract '" + x.id + "': unknown worker '" + x.worker + "'");
      auto fi = m.agent_index_.find(x.firm);
      if (fi == m.agent_index_.end() || m.agents_[fi->second].worker)
        throw InputError("contract '" + x.id + "': unknown firm '" + x.firm + "'");
      m.contract_worker_[c] = wi->second;
      m.contract_firm_[c] = fi->second;
      m.agents_[wi->second].incident |= bit(static_cast<int>(c));
      m.agents_[fi->second].incident |= bit(static_cast<int>(c));
      auto [it, _] = pair_ids.try_emplace({wi->second, fi->second},
                                          static_cast<std::uint8_t>(pair_ids.size()));
      m.contract_pair_[c] = it->second;
      m.contract_index_[x.id] = static_cast<std::uint32_t>(c);
    }

    for (const auto& [agent, _] : choices)
      if (!m.agent_index_.contains(agent))
        throw InputError("choice spec for unknown agent '" + agent + "'");
    for (const auto& rec : m.agents_)
      if (!choices.contains(rec.id))
        throw InputError("missing choice spec for agent '" + rec.id + "'");

    for (auto& rec : m.agents_) {
      auto node = choices.extract(rec.id);
      rec.choice = m.compile(rec.id, rec.incident, node.mapped());
      m.specs_.emplace(rec.id, std::move(node.mapped()));
    }
    return m;
  }

  std::vector<AgentId> workers() const {
    std::vector<AgentId> out;
    for (std::size_t i = 0; i < n_workers_; ++i) out.push_back(agents_[i].id);
    return out;
  }
  std::vector<AgentId> firms() const {
    std::vector<AgentId> out;
    for (std::size_t i = n_workers_; i < agents_.size(); ++i) out.push_back(agents_[i].id);
    return out;
  }

  const std::vector<Contract>& contracts() const { return contracts_; }
  std::size_t contract_count() const { return contracts_.size(); }
  const Contract& contract(std::uint32_t index) const { return contracts_[index]; }
  Mask full_mask() const {
    return contracts_.empty() ? 0 : (~Mask{0} >> (kMaxContracts - contracts_.size()));
  }

  bool has_contract(const ContractId& id) const { return contract_index_.contains(id); }
  std::uint32_t contract_index(const ContractId& id) const {
    auto it = contract_index_.find(id);
    if (it == contract_index_.end()) throw InputError("unknown contract id '" + id + "'");
    return it->second;
  }

  bool has_agent(const AgentId& id) const { return agent_index_.contains(id); }
  bool is_worker(const AgentId& id) const {
    auto it = agent_index_.find(id);
    return it != agent_index_.end() && agents_[it->second].worker;
  }
  bool is_firm(const AgentId& id) const {
    auto it = agent_index_.find(id);
    return it != agent_index_.end() && !agents_[it->second].worker;
  }
  std::uint32_t agent_index(const AgentId& id) const {
    auto it = agent_index_.find(id);
    if (it == agent_index_.end()) throw InputError("unknown agent id '" + id + "'");
    return it->second;
  }
  std::size_t agent_count() const { return agents_.size(); }
  std::size_t worker_count() const { return n_workers_; }
  const AgentId& agent_id(std::uint32_t index) const { return agents_[index].id; }
  bool agent_is_worker(std::uint32_t index) const { return agents_[index].worker; }
  Mask incident_mask(std::uint32_t index) const { return agents_[index].incident; }
  const CompiledChoice& choice(std::uint32_t index) const { return agents_[index].choice; }
  const CompiledChoice& choice(const AgentId& id) const { return choice(agent_index(id)); }
  const ChoiceSpec& choice_spec(const AgentId& id) const { return specs_.at(id); }

  std::uint32_t worker_of(std::uint32_t contract) const { return contract_worker_[contract]; }
  std::uint32_t firm_of(std::uint32_t contract) const { return contract_firm_[contract]; }
  std::uint8_t pair_id(std::uint32_t contract) const { return contract_pair_[contract]; }

  Mask mask_of(const std::vector<ContractId>& ids) const {
    Mask m = 0;
    for (const auto& id : ids) m |= bit(static_cast<int>(contract_index(id)));
    return m;
  }
  Mask mask_of(const Allocation& a) const { return mask_of(a.members()); }

  std::vector<ContractId> ids_of(Mask m) const {
    std::vector<ContractId> out;
    for_each_bit(m, [&](int i) { out.push_back(contracts_[i].id); });
    return out;
  }
  Allocation allocation_of(Mask m) const { return Allocation(ids_of(m)); }

 private:
  struct AgentRecord {
    AgentId id;
    bool worker;
    CompiledChoice choice;
    Mask incident;
  };

  static void validate_side(const std::vector<AgentId>& side, const char* name) {
    if (side.empty()) throw InputError(std::string(name) + ": must be nonempty");
    std::set<AgentId> seen;
    for (const auto& id : side) {
      if (id.empty()) throw InputError(std::string(name) + ": empty agent id");
      if (!seen.insert(id).second)
        throw InputError(std::string(name) + ": duplicate agent id '" + id + "'");
    }
  }

  CompiledChoice compile(const AgentId& agent, Mask incident, const ChoiceSpec& spec) const {
    CompiledChoice cc;
    cc.ground = incident;
    if (const auto* g = std::get_if<GreedyMatroid>(&spec)) {
      cc.greedy = true;
      if (g->quota < 1)
        throw InputError("agent '" + agent + "': quota must be at least 1");
      cc.quota = g->quota;
      Mask seen = 0;
      std::map<std::uint32_t, std::uint8_t> groups;
      for (const auto& id : g->priority) {
        std::uint32_t c = contract_of_agent(agent, incident, id, "priority");
        if (seen & bit(static_cast<int>(c)))
          throw InputError("agent '" + agent + "': duplicate contract '" + id +
                           "' in priority");
        seen |= bit(static_cast<int>(c));
        std::uint32_t other = agents_[contract_worker_[c]].id == agent ? contract_firm_[c]
                                                                       : contract_worker_[c];
        auto [it, _] = groups.try_emplace(other, static_cast<std::uint8_t>(groups.size()));
        cc.order.push_back(static_cast<std::uint8_t>(c));
        cc.group.push_back(it->second);
      }
      if (seen != incident)
        throw InputError("agent '" + agent +
                         "': priority must list every contract of the agent exactly once");
      Mask acc = 0;
      for (const auto& id : g->acceptable) {
        std::uint32_t c = contract_of_agent(agent, incident, id, "acceptable");
        if (acc & bit(static_cast<int>(c)))
          throw InputError("agent '" + agent + "': duplicate contract '" + id +
                           "' in acceptable");
        acc |= bit(static_cast<int>(c));
      }
      cc.acceptable = acc;
      return cc;
    }

    const auto& table = std::get<RankedTable>(spec);
    bool has_empty = false;
    std::set<Mask> distinct;
    for (const auto& entry : table.ranking) {
      Mask em = 0;
      Mask pairs = 0;
      for (const auto& id : entry) {
        std::uint32_t c = contract_of_agent(agent, incident, id, "ranking entry");
        if (em & bit(static_cast<int>(c)))
          throw InputError("agent '" + agent + "': duplicate contract '" + id +
                           "' in ranking entry");
        Mask p = Mask{1} << contract_pair_[c];
        if (pairs & p)
          throw InputError("agent '" + agent +
                           "': ranking entry holds two contracts of the same pair");
        pairs |= p;
        em |= bit(static_cast<int>(c));
      }
      if (!distinct.insert(em).second)
        throw InputError("agent '" + agent + "': ranking lists the same set twice");
      if (em == 0) has_empty = true;
      cc.ranked.push_back(em);
    }
    if (!has_empty)
      throw InputError("agent '" + agent + "': ranking must include the empty set");
    return cc;
  }

  std::uint32_t contract_of_agent(const AgentId& agent, Mask incident, const ContractId& id,
                                  const char* where) const {
    auto it = contract_index_.find(id);
    if (it == contract_index_.end() || !(incident & bit(static_cast<int>(it->second))))
      throw InputError("agent '" + agent + "': " + where + " references contract '" + id +
                       "' not incident to the agent");
    return it->second;
  }

  std::vector<AgentRecord> agents_;  // workers first, each side sorted by id
  std::size_t n_workers_ = 0;
  std::vector<Contract> contracts_;  // sorted by id
  std::map<AgentId, std::uint32_t> agent_index_;
  std::map<ContractId, std::uint32_t> contract_index_;
  std::map<AgentId, ChoiceSpec> specs_;
  std::vector<std::uint32_t> contract_worker_;
  std::vector<std::uint32_t> contract_firm_;
  std::vector<std::uint8_t> contract_pair_;
};

inline bool is_allocation_mask(const Market& m, Mask s) {
  Mask used = 0;
  bool ok = true;
  for_each_bit(s, [&](int i) {
    Mask p = Mask{1} << m.pair_id(i);
    if (used & p) ok = false;
    used |= p;
  });
  return ok;
}

// True iff the members form a valid allocation: known ids, at most one
// contract per worker-firm pair.
inline bool is_allocation(const Market& m, const std::vector<ContractId>& members) {
  return is_allocation_mask(m, m.mask_of(members));
}
inline bool is_allocation(const Market& m, const Allocation& a) {
  return is_allocation_mask(m, m.mask_of(a));
}

inline Allocation agent_slice(const Market& m, const Allocation& y, const AgentId& agent) {
  return m.allocation_of(m.mask_of(y) & m.incident_mask(m.agent_index(agent)));
}

// Y restricted to the contracts touching any of the given agents.
inline Allocation restrict_allocation(const Market& m, const Allocation& y,
                                      const std::vector<AgentId>& agents) {
  Mask keep = 0;
  for (const auto& a : agents) keep |= m.incident_mask(m.agent_index(a));
  return m.allocation_of(m.mask_of(y) & keep);
}

inline Mask choose_mask(const Market& m, std::uint32_t agent, Mask y) {
  return m.choice(agent).evaluate(y);
}

inline Mask side_choose_mask(const Market& m, std::span<const std::uint32_t> agents, Mask y) {
  Mask out = 0;
  for (auto a : agents) out |= m.choice(a).evaluate(y);
  return out;
}

inline Mask side_reject_mask(const Market& m, std::span<const std::uint32_t> agents, Mask y) {
  Mask out = 0;
  for (auto a : agents) {
    const CompiledChoice& cc = m.choice(a);
    out |= (y & cc.ground) & ~cc.evaluate(y);
  }
  return out;
}

inline Allocation choose(const Market& m, const AgentId& agent,
                         const std::vector<ContractId>& set) {
  return m.allocation_of(choose_mask(m, m.agent_index(agent), m.mask_of(set)));
}

inline std::vector<ContractId> reject(const Market& m, const AgentId& agent,
                                      const std::vector<ContractId>& set) {
  std::uint32_t a = m.agent_index(agent);
  Mask y = m.mask_of(set);
  const CompiledChoice& cc = m.choice(a);
  return m.ids_of((y & cc.ground) & ~cc.evaluate(y));
}

namespace detail {
inline std::vector<std::uint32_t> side_indices(const Market& m,
                                               const std::vector<AgentId>& agents,
                                               bool* all_workers = nullptr,
                                               bool* all_firms = nullptr) {
  std::vector<std::uint32_t> idx;
  bool w = true, f = true;
  for (const auto& a : agents) {
    std::uint32_t i = m.agent_index(a);
    (m.agent_is_worker(i) ? f : w) = false;
    idx.push_back(i);
  }
  if (all_workers) *all_workers = w;
  if (all_firms) *all_firms = f;
  return idx;
}
}  // namespace detail

// Union of the agents' choices. For agents of one side this is itself an
// allocation (distinct counterpart pairs).
inline Allocation choose_side(const Market& m, const std::vector<AgentId>& agents,
                              const std::vector<ContractId>& set) {
  auto idx = detail::side_indices(m, agents);
  return m.allocation_of(side_choose_mask(m, idx, m.mask_of(set)));
}

inline std::vector<ContractId> reject_side(const Market& m, const std::vector<AgentId>& agents,
                                           const std::vector<ContractId>& set) {
  auto idx = detail::side_indices(m, agents);
  return m.ids_of(side_reject_mask(m, idx, m.mask_of(set)));
}

// Swaps the two sides; contracts and choice specs carry over unchanged.
// Involutive, and maps firm-side notions to worker-side ones.
inline Market dualize(const Market& m) {
  std::vector<Contract> contracts;
  for (const auto& c : m.contracts()) contracts.push_back({c.id, c.firm, c.worker, c.terms});
  std::map<AgentId, ChoiceSpec> specs;
  for (const auto& w : m.workers()) specs.emplace(w, m.choice_spec(w));
  for (const auto& f : m.firms()) specs.emplace(f, m.choice_spec(f));
  return Market::create(m.firms(), m.workers(), std::move(contracts), std::move(specs));
}

/// A submarket (W', F', X') of a base market: the agents of both restricted
/// sides and the contracts they share. Holds a pointer to the base market,
/// which must outlive the view.
class SubmarketView {
 public:
  SubmarketView(const Market& m, std::vector<AgentId> workers, std::vector<AgentId> firms)
      : market_(&m), workers_(std::move(workers)), firms_(std::move(firms)) {
    if (workers_.empty()) throw InputError("submarket: worker side must be nonempty");
    if (firms_.empty()) throw InputError("submarket: firm side must be nonempty");
    std::sort(workers_.begin(), workers_.end());
    std::sort(firms_.begin(), firms_.end());
    check_side(m, workers_, true);
    check_side(m, firms_, false);
    for (const auto& w : workers_) {
      std::uint32_t i = m.agent_index(w);
      widx_.push_back(i);
      wmask_ |= m.incident_mask(i);
    }
    for (const auto& f : firms_) {
      std::uint32_t i = m.agent_index(f);
      fidx_.push_back(i);
      fmask_ |= m.incident_mask(i);
    }
  }

  const Market& market() const { return *market_; }
  const std::vector<AgentId>& workers() const { return workers_; }
  const std::vector<AgentId>& firms() const { return firms_; }
  std::span<const std::uint32_t> worker_indices() const { return widx_; }
  std::span<const std::uint32_t> firm_indices() const { return fidx_; }

  Mask contracts_mask() const { return wmask_ & fmask_; }  // X'
  Mask worker_side_mask() const { return wmask_; }         // X_{W'}
  Mask firm_side_mask() const { return fmask_; }           // X_{F'}

  bool is_full() const {
    return workers_.size() == market_->worker_count() &&
           firms_.size() == market_->agent_count() - market_->worker_count();
  }

 private:
  static void check_side(const Market& m, const std::vector<AgentId>& side, bool worker) {
    for (std::size_t i = 0; i < side.size(); ++i) {
      if (i && side[i] == side[i - 1])
        throw InputError("submarket: duplicate agent '" + side[i] + "'");
      bool ok = worker ? m.is_worker(side[i]) : m.is_firm(side[i]);
      if (!ok)
        throw InputError("submarket: '" + side[i] + "' is not a " +
                         (worker ? "worker" : "firm") + " of the market");
    }
  }

  const Market* market_;
  std::vector<AgentId> workers_, firms_;
  std::vector<std::uint32_t> widx_, fidx_;
  Mask wmask_ = 0, fmask_ = 0;
};

inline SubmarketView submarket(const Market& m, std::vector<AgentId> workers,
                               std::vector<AgentId> firms) {
  return SubmarketView(m, std::move(workers), std::move(firms));
}

inline SubmarketView full_view(const Market& m) {
  return SubmarketView(m, m.workers(), m.firms());
}

namespace detail {

// Binds a contract set to a view: ids resolved, subset of X' enforced.
inline Mask set_mask_in_view(const SubmarketView& v, const std::vector<ContractId>& ids,
                             const char* what) {
  Mask m = v.market().mask_of(ids);
  Mask outside = m & ~v.contracts_mask();
  if (outside)
    throw InputError(std::string(what) + ": contract '" +
                     v.market().contract(lowest_bit_index(outside)).id +
                     "' is outside the view");
  return m;
}

// Same, plus the pair-uniqueness invariant.
inline Mask allocation_mask_in_view(const SubmarketView& v, const Allocation& y,
                                    const char* what) {
  Mask m = set_mask_in_view(v, y.members(), what);
  if (!is_allocation_mask(v.market(), m))
    throw InputError(std::string(what) +
                     ": two contracts share a worker-firm pair in " + to_string(y));
  return m;
}

}  // namespace detail

}  // namespace qstab
