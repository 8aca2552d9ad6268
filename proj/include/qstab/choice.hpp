#pragma once

#include <string>
#include <variant>
#include <vector>

#include "qstab/base.hpp"

namespace qstab {

// Explicit strict ranking of allocations over the agent's contracts,
// best first. Must contain the empty allocation; entries listed after it
// are never chosen. Anything unlisted ranks below empty.
struct RankedTable {
  std::vector<std::vector<ContractId>> ranking;
};

// Responsive-style choice: scan acceptable contracts in priority order,
// take one per counterpart agent up to the quota.
struct GreedyMatroid {
  int quota = 1;
  std::vector<ContractId> priority;    // total order over the agent's contracts
  std::vector<ContractId> acceptable;  // subset of the agent's contracts
};

using ChoiceSpec = std::variant<RankedTable, GreedyMatroid>;

// Per-agent evaluator over whole-market bitmasks, built when a market is
// assembled. Greedy specs keep priority order as contract indices with the
// counterpart agent compressed to a group id (the pair-uniqueness unit);
// tables keep the ranked allocations as masks.
struct CompiledChoice {
  Mask ground = 0;  // the agent's incident contracts
  bool greedy = false;

  // greedy form
  int quota = 0;
  Mask acceptable = 0;
  std::vector<std::uint8_t> order;  // contract indices, best first
  std::vector<std::uint8_t> group;  // counterpart group per order entry

  // table form, best first
  std::vector<Mask> ranked;

  Mask evaluate(Mask y) const {
    y &= ground;
    if (!greedy) {
      for (Mask r : ranked)
        if ((r & y) == r) return r;
      return 0;
    }
    Mask out = 0;
    Mask used = 0;
    int taken = 0;
    for (std::size_t k = 0; k < order.size() && taken < quota; ++k) {
      Mask b = bit(order[k]);
      if (!(y & b) || !(acceptable & b)) continue;
      Mask g = Mask{1} << group[k];
      if (used & g) continue;
      out |= b;
      used |= g;
      ++taken;
    }
    return out;
  }
};

// Outcome of one preference-property check on one agent. On failure the
// witness pair (Y, Z) replays the violated condition.
struct VerificationReport {
  AgentId agent;
  std::string property;
  bool passed = true;
  std::vector<ContractId> witness_y;
  std::vector<ContractId> witness_z;
};

}  // namespace qstab
