#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "qstab/base.hpp"
#include "qstab/da.hpp"
#include "qstab/lattice.hpp"
#include "qstab/model.hpp"
#include "qstab/stability.hpp"
#include "qstab/verify.hpp"

namespace qstab {

// Full enumeration is exponential in |X'|; refuse above this.
inline constexpr int kOracleCap = 16;

namespace detail {

// Definitional classification of every allocation of the view by direct
// search, no shared shortcuts with the fast predicates: quasi-stability via
// the blocking-contract definition, stability via exhaustive blocking-set
// search.
struct OracleScan {
  std::vector<Mask> allocs;
  std::vector<std::uint8_t> ir, quasi, stable;
  std::vector<std::uint8_t> pair_blocked, set_blocked;
};

inline bool has_blocking_set(const SubmarketView& v, Mask y) {
  const Market& m = v.market();
  Mask rest = v.contracts_mask() & ~y;
  int r = bit_count(rest);
  for (std::uint64_t u = 1; u < (std::uint64_t{1} << r); ++u) {
    Mask z = scatter_bits(u, rest);
    Mask with = y | z;
    if ((z & ~side_choose_mask(m, v.worker_indices(), with)) == 0 &&
        (z & ~side_choose_mask(m, v.firm_indices(), with)) == 0)
      return true;
  }
  return false;
}

inline OracleScan oracle_scan(const SubmarketView& v, int cap) {
  const Market& m = v.market();
  Mask active = v.contracts_mask();
  if (bit_count(active) > cap)
    throw InputError("enumerate: view has " + std::to_string(bit_count(active)) +
                     " contracts, above the oracle cap of " + std::to_string(cap));
  OracleScan s;
  for_each_submask(active, [&](Mask a) {
    if (is_allocation_mask(m, a)) s.allocs.push_back(a);
  });
  s.ir.resize(s.allocs.size());
  s.quasi.resize(s.allocs.size());
  s.stable.resize(s.allocs.size());
  s.pair_blocked.resize(s.allocs.size());
  s.set_blocked.resize(s.allocs.size());
  for (std::size_t i = 0; i < s.allocs.size(); ++i) {
    Mask y = s.allocs[i];
    Mask b = blocking_mask(v, y);
    s.pair_blocked[i] = b != 0;
    s.set_blocked[i] = b != 0 || has_blocking_set(v, y);
    s.ir[i] = side_choose_mask(m, v.worker_indices(), y) == y &&
              side_choose_mask(m, v.firm_indices(), y) == y;
    if (!s.ir[i]) continue;
    s.quasi[i] = (y & ~side_choose_mask(m, v.firm_indices(), y | b)) == 0;
    s.stable[i] = !s.set_blocked[i];
  }
  return s;
}

inline std::vector<Allocation> canonical(const Market& m, const std::vector<Mask>& masks) {
  std::vector<Allocation> out;
  for (Mask a : masks) out.push_back(m.allocation_of(a));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

struct EnumerationResult {
  std::vector<Allocation> allocations;
  std::vector<Allocation> individually_rational;
  std::vector<Allocation> quasi_stable;
  std::vector<Allocation> stable;
};

// Classifies every subset of X' by direct definition. Lists come back in
// canonical order: by size, then lexicographically.
inline EnumerationResult enumerate_allocations(const SubmarketView& v, int cap = kOracleCap) {
  auto s = detail::oracle_scan(v, cap);
  std::vector<Mask> ir, qs, st;
  for (std::size_t i = 0; i < s.allocs.size(); ++i) {
    if (s.ir[i]) ir.push_back(s.allocs[i]);
    if (s.quasi[i]) qs.push_back(s.allocs[i]);
    if (s.stable[i]) st.push_back(s.allocs[i]);
  }
  const Market& m = v.market();
  return {detail::canonical(m, s.allocs), detail::canonical(m, ir), detail::canonical(m, qs),
          detail::canonical(m, st)};
}

// Elements of the family no other member strictly Blair-dominates. All
// members must be individually rational in the view.
inline std::vector<Allocation> maximal_elements(const SubmarketView& v,
                                                const std::vector<Allocation>& family,
                                                Side side) {
  const Market& m = v.market();
  std::vector<Mask> masks;
  for (const auto& a : family) {
    Mask am = detail::allocation_mask_in_view(v, a, "family member");
    if (!detail::is_ir_mask(v, am))
      throw InputError("maximal_elements: member " + to_string(a) +
                       " is not individually rational in the view");
    masks.push_back(am);
  }
  auto agents = side == Side::workers ? v.worker_indices() : v.firm_indices();
  std::vector<Mask> out;
  for (std::size_t i = 0; i < masks.size(); ++i) {
    bool maximal = true;
    for (std::size_t j = 0; j < masks.size() && maximal; ++j)
      if (masks[j] != masks[i] && detail::blair_mask(m, agents, masks[j], masks[i]))
        maximal = false;
    if (maximal) out.push_back(masks[i]);
  }
  return detail::canonical(m, out);
}

struct CertifyCheck {
  std::string name;
  bool passed = true;
  std::string witness;
};

struct CertificationReport {
  std::vector<CertifyCheck> checks;
  bool passed = true;
  // Agents failing substitutability, reported when certification fails and
  // the agent is small enough to verify exhaustively.
  std::vector<AgentId> suspect_agents;
};

// Cross-checks every structural claim on one view against the enumeration:
// fast predicates against definitional classification, Tarski fixed points
// against the stable set, lattice laws over all quasi-stable pairs,
// maximality, and the pairwise/setwise blocking equivalence. On a market
// with substitutable preferences everything passes; a failed check names
// the offending agents when it can.
inline CertificationReport certify(const SubmarketView& v, int cap = kOracleCap) {
  const Market& m = v.market();
  auto s = detail::oracle_scan(v, cap);
  CertificationReport report;

  auto add = [&](std::string name, bool passed, std::string witness) {
    report.checks.push_back({std::move(name), passed, passed ? "" : std::move(witness)});
    report.passed = report.passed && report.checks.back().passed;
  };

  {
    bool ok = true;
    std::string w;
    for (std::size_t i = 0; i < s.allocs.size() && ok; ++i) {
      Allocation a = m.allocation_of(s.allocs[i]);
      bool lib_ir = is_individually_rational(v, a);
      bool lib_qs = is_quasi_stable(v, a);
      bool lib_st = is_stable(v, a);
      if (lib_ir != static_cast<bool>(s.ir[i]) || lib_qs != static_cast<bool>(s.quasi[i]) ||
          lib_st != static_cast<bool>(s.stable[i])) {
        ok = false;
        w = "predicates disagree with the definitional classification on " + to_string(a);
      }
    }
    add("predicate-agreement", ok, std::move(w));
  }

  std::vector<Mask> qs;
  std::map<Mask, std::size_t> qs_index;
  for (std::size_t i = 0; i < s.allocs.size(); ++i)
    if (s.quasi[i]) {
      qs_index[s.allocs[i]] = qs.size();
      qs.push_back(s.allocs[i]);
    }
  std::vector<Allocation> qs_family = detail::canonical(m, qs);
  std::map<Mask, std::uint8_t> stable_of;
  for (std::size_t i = 0; i < s.allocs.size(); ++i)
    if (s.quasi[i]) stable_of[s.allocs[i]] = s.stable[i];

  {
    bool ok = true;
    std::string w;
    for (Mask y : qs) {
      Allocation a = m.allocation_of(y);
      try {
        bool fixed = tarski(v, a) == a;
        if (fixed != static_cast<bool>(stable_of[y])) {
          ok = false;
          w = "fixed-point status of " + to_string(a) + " disagrees with stability";
          break;
        }
      } catch (const PropertyViolation& e) {
        ok = false;
        w = e.what();
        break;
      }
    }
    add("tarski-fixed-points", ok, std::move(w));
  }

  {
    bool ok = true;
    std::string w;
    const std::size_t n = qs.size();
    std::vector<std::vector<std::uint8_t>> dom(n, std::vector<std::uint8_t>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        dom[i][j] = detail::blair_mask(m, v.worker_indices(), qs[i], qs[j]);
    for (std::size_t i = 0; i < n && ok; ++i) {
      for (std::size_t j = i; j < n && ok; ++j) {
        Allocation yi = m.allocation_of(qs[i]);
        Allocation yj = m.allocation_of(qs[j]);
        try {
          Mask jm = m.mask_of(join_w(v, yi, yj));
          auto jit = qs_index.find(jm);
          if (jit == qs_index.end()) {
            ok = false;
            w = "join of " + to_string(yi) + " and " + to_string(yj) +
                " is outside the quasi-stable family";
            break;
          }
          Mask mm = m.mask_of(meet_w(v, yi, yj, qs_family));
          auto mit = qs_index.find(mm);
          if (mit == qs_index.end()) {
            ok = false;
            w = "meet of " + to_string(yi) + " and " + to_string(yj) +
                " is outside the quasi-stable family";
            break;
          }
          for (std::size_t k = 0; k < n; ++k) {
            if (dom[k][i] && dom[k][j] && !dom[k][jit->second]) {
              ok = false;
              w = "join of " + to_string(yi) + " and " + to_string(yj) +
                  " is not the least upper bound; " + to_string(m.allocation_of(qs[k])) +
                  " is a smaller one";
              break;
            }
            if (dom[i][k] && dom[j][k] && !dom[mit->second][k]) {
              ok = false;
              w = "meet of " + to_string(yi) + " and " + to_string(yj) +
                  " is not the greatest lower bound; " + to_string(m.allocation_of(qs[k])) +
                  " is a larger one";
              break;
            }
          }
        } catch (const std::runtime_error& e) {
          ok = false;
          w = e.what();
        }
      }
    }
    add("lattice-laws", ok, std::move(w));
  }

  {
    bool ok = true;
    std::string w;
    try {
      for (const auto& top : maximal_elements(v, qs_family, Side::workers))
        if (!stable_of[m.mask_of(top)]) {
          ok = false;
          w = "Blair-maximal quasi-stable allocation " + to_string(top) + " is not stable";
          break;
        }
    } catch (const std::runtime_error& e) {
      ok = false;
      w = e.what();
    }
    add("maximal-stable", ok, std::move(w));
  }

  {
    bool ok = true;
    std::string w;
    for (std::size_t i = 0; i < s.allocs.size(); ++i)
      if (s.pair_blocked[i] != s.set_blocked[i]) {
        ok = false;
        w = "allocation " + to_string(m.allocation_of(s.allocs[i])) +
            " is blocked by a set but by no single contract";
        break;
      }
    add("pairwise-setwise", ok, std::move(w));
  }

  if (!report.passed) {
    for (std::uint32_t a = 0; a < m.agent_count(); ++a) {
      try {
        if (!verify_substitutable(m, m.agent_id(a)).passed)
          report.suspect_agents.push_back(m.agent_id(a));
      } catch (const InputError&) {
        // agent too large to verify exhaustively; leave unnamed
      }
    }
  }
  return report;
}

}  // namespace qstab
