#pragma once

#include <string>
#include <vector>

#include "qstab/base.hpp"
#include "qstab/model.hpp"

namespace qstab {

// Exhaustive verification is exponential in the agent's contract count;
// above this we refuse rather than sample.
inline constexpr int kVerifierCap = 12;

namespace detail {

// The agent's choice memoized over every subset of its ground set, in a
// compacted local index space.
struct DenseChoice {
  Mask positions = 0;
  int k = 0;
  std::vector<std::uint16_t> table;

  std::uint16_t reject(std::uint16_t y) const { return y & ~table[y]; }
};

inline DenseChoice densify(const Market& m, const AgentId& agent, int cap,
                           const std::string& property) {
  const CompiledChoice& cc = m.choice(m.agent_index(agent));
  DenseChoice d;
  d.positions = cc.ground;
  d.k = bit_count(cc.ground);
  if (d.k > cap)
    throw InputError("verify " + property + ": agent '" + agent + "' has " +
                     std::to_string(d.k) + " contracts, above the exhaustive cap of " +
                     std::to_string(cap));
  d.table.resize(std::size_t{1} << d.k);
  for (std::uint32_t u = 0; u < d.table.size(); ++u)
    d.table[u] =
        static_cast<std::uint16_t>(gather_bits(cc.evaluate(scatter_bits(u, cc.ground)), cc.ground));
  return d;
}

inline VerificationReport verdict(const Market& m, const AgentId& agent,
                                  const std::string& property, const DenseChoice& d,
                                  bool failed, std::uint32_t y, std::uint32_t z) {
  VerificationReport r{agent, property, !failed, {}, {}};
  if (failed) {
    r.witness_y = m.ids_of(scatter_bits(y, d.positions));
    r.witness_z = m.ids_of(scatter_bits(z, d.positions));
  }
  return r;
}

}  // namespace detail

// C_i(Y) ∩ Z ⊆ C_i(Z) for every Z ⊆ Y ⊆ X_i.
inline VerificationReport verify_substitutable(const Market& m, const AgentId& agent,
                                               int cap = kVerifierCap) {
  auto d = detail::densify(m, agent, cap, "substitutability");
  const std::uint32_t n = std::uint32_t{1} << d.k;
  for (std::uint32_t y = 0; y < n; ++y) {
    std::uint32_t cy = d.table[y];
    for (std::uint32_t z = y;; z = (z - 1) & y) {
      if ((cy & z) & ~d.table[z])
        return detail::verdict(m, agent, "substitutability", d, true, y, z);
      if (z == 0) break;
    }
  }
  return detail::verdict(m, agent, "substitutability", d, false, 0, 0);
}

// C_i(Y ∪ Z) = C_i(C_i(Y) ∪ Z) for every Y, Z ⊆ X_i.
inline VerificationReport verify_path_independent(const Market& m, const AgentId& agent,
                                                  int cap = kVerifierCap) {
  auto d = detail::densify(m, agent, cap, "path-independence");
  const std::uint32_t n = std::uint32_t{1} << d.k;
  for (std::uint32_t y = 0; y < n; ++y)
    for (std::uint32_t z = 0; z < n; ++z)
      if (d.table[y | z] != d.table[d.table[y] | z])
        return detail::verdict(m, agent, "path-independence", d, true, y, z);
  return detail::verdict(m, agent, "path-independence", d, false, 0, 0);
}

// R_i(Z) ⊆ R_i(Y) for every Z ⊆ Y ⊆ X_i.
inline VerificationReport verify_rejection_monotone(const Market& m, const AgentId& agent,
                                                    int cap = kVerifierCap) {
  auto d = detail::densify(m, agent, cap, "rejection-monotonicity");
  const std::uint32_t n = std::uint32_t{1} << d.k;
  for (std::uint32_t y = 0; y < n; ++y) {
    std::uint32_t ry = d.reject(static_cast<std::uint16_t>(y));
    for (std::uint32_t z = y;; z = (z - 1) & y) {
      if (d.reject(static_cast<std::uint16_t>(z)) & ~ry)
        return detail::verdict(m, agent, "rejection-monotonicity", d, true, y, z);
      if (z == 0) break;
    }
  }
  return detail::verdict(m, agent, "rejection-monotonicity", d, false, 0, 0);
}

// |C_i(Z)| ≤ |C_i(Y)| for every Z ⊆ Y ⊆ X_i.
inline VerificationReport verify_lad(const Market& m, const AgentId& agent,
                                     int cap = kVerifierCap) {
  auto d = detail::densify(m, agent, cap, "law-of-aggregate-demand");
  const std::uint32_t n = std::uint32_t{1} << d.k;
  for (std::uint32_t y = 0; y < n; ++y) {
    int cy = bit_count(d.table[y]);
    for (std::uint32_t z = y;; z = (z - 1) & y) {
      if (bit_count(d.table[z]) > cy)
        return detail::verdict(m, agent, "law-of-aggregate-demand", d, true, y, z);
      if (z == 0) break;
    }
  }
  return detail::verdict(m, agent, "law-of-aggregate-demand", d, false, 0, 0);
}

// All four properties for one agent.
inline std::vector<VerificationReport> verify_agent(const Market& m, const AgentId& agent,
                                                    int cap = kVerifierCap) {
  return {verify_substitutable(m, agent, cap), verify_path_independent(m, agent, cap),
          verify_rejection_monotone(m, agent, cap), verify_lad(m, agent, cap)};
}

// All four properties for every agent, workers then firms.
inline std::vector<VerificationReport> verify_market(const Market& m, int cap = kVerifierCap) {
  std::vector<VerificationReport> out;
  for (const auto& w : m.workers())
    for (auto& r : verify_agent(m, w, cap)) out.push_back(std::move(r));
  for (const auto& f : m.firms())
    for (auto& r : verify_agent(m, f, cap)) out.push_back(std::move(r));
  return out;
}

}  // namespace qstab
