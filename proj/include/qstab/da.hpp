#pragma once

#include <string>
#include <variant>
#include <vector>

#include "qstab/base.hpp"
#include "qstab/lattice.hpp"
#include "qstab/model.hpp"
#include "qstab/stability.hpp"

namespace qstab {

// How each round picks the offered set X^t with Y^{t-1} ⊊ X^t ⊆ C_{F'}(Γ).
// Full offers everything; SingleLex adds the lexicographically least new
// contract; RandomSubset adds a seeded nonempty subset of the new ones.
struct FullProposal {};
struct SingleLexProposal {};
struct RandomSubsetProposal {
  std::uint64_t seed = 0;
};
using ProposalStrategy = std::variant<FullProposal, SingleLexProposal, RandomSubsetProposal>;

inline std::string strategy_name(const ProposalStrategy& s) {
  if (std::holds_alternative<FullProposal>(s)) return "full";
  if (std::holds_alternative<SingleLexProposal>(s)) return "single-lex";
  return "random:" + std::to_string(std::get<RandomSubsetProposal>(s).seed);
}

struct DAStep {
  Allocation offers;     // X^t
  Allocation held;       // Y^t = C_{W'}(X^t)
  Allocation satisfied;  // Z^t = Y^t ∖ Y^{t-1}, a blocking set for Y^{t-1}
};

struct DATrace {
  std::string strategy;
  Allocation start;
  std::vector<DAStep> steps;
  Allocation outcome;
};

namespace detail {

inline Mask draw_offers(const ProposalStrategy& strategy, SplitMix64& rng, Mask held,
                        Mask eligible) {
  if (std::holds_alternative<FullProposal>(strategy)) return held | eligible;
  if (std::holds_alternative<SingleLexProposal>(strategy))
    return held | (eligible & (~eligible + 1));
  int k = bit_count(eligible);
  Mask pick = 0;
  do {
    pick = rng.next() & (k >= 64 ? ~Mask{0} : (Mask{1} << k) - 1);
  } while (pick == 0);
  return held | scatter_bits(pick, eligible);
}

}  // namespace detail

// Generalized firm-proposing deferred acceptance from a firm-quasi-stable
// start. Each round offers some X^t between the held set and
// C_{F'}(Γ(Y^{t-1})); workers keep C_{W'}(X^t). Stops at the first stable
// iterate. Every iterate is checked quasi-stable and the round count is
// capped at 2^|X'|, so a preference bug surfaces as a raised violation
// rather than a wrong answer or a hang.
inline DATrace da_run(const SubmarketView& v, const Allocation& y0,
                      const ProposalStrategy& strategy = FullProposal{}) {
  const Market& m = v.market();
  Mask y = detail::allocation_mask_in_view(v, y0, "start allocation");
  if (!detail::is_quasi_stable_mask(v, y))
    throw InputError("da_run: start " + to_string(y0) +
                     " is not firm-quasi-stable in the view");
  DATrace trace;
  trace.strategy = strategy_name(strategy);
  trace.start = y0;
  SplitMix64 rng(std::holds_alternative<RandomSubsetProposal>(strategy)
                     ? std::get<RandomSubsetProposal>(strategy).seed
                     : 0);
  const std::uint64_t cap = std::uint64_t{1} << std::min(63, bit_count(v.contracts_mask()));
  while (true) {
    Mask target = side_choose_mask(m, v.firm_indices(), detail::gamma_mask(v, y));
    if (target == y) break;  // stable: IR holds and the firms keep exactly Y
    if (y & ~target)
      throw PropertyViolation(
          "da_run: held allocation " + to_string(m.allocation_of(y)) +
          " is not contained in the firms' choice over its candidate set");
    Mask offers = detail::draw_offers(strategy, rng, y, target & ~y);
    Mask held = side_choose_mask(m, v.worker_indices(), offers);
    DAStep step{m.allocation_of(offers), m.allocation_of(held), m.allocation_of(held & ~y)};
    if (!detail::is_quasi_stable_mask(v, held))
      throw PropertyViolation("da_run: round " + std::to_string(trace.steps.size() + 1) +
                              " produced " + to_string(step.held) +
                              ", which is not firm-quasi-stable");
    trace.steps.push_back(std::move(step));
    y = held;
    if (trace.steps.size() > cap)
      throw PropertyViolation("da_run: no stable allocation within " + std::to_string(cap) +
                              " rounds from " + to_string(y0));
  }
  trace.outcome = m.allocation_of(y);
  return trace;
}

inline Allocation da_outcome(const SubmarketView& v, const Allocation& y0,
                             const ProposalStrategy& strategy = FullProposal{}) {
  return da_run(v, y0, strategy).outcome;
}

// DA(∅): the worker-pessimal (firm-optimal) stable allocation of the view.
inline Allocation worker_pessimal(const SubmarketView& v) {
  return da_outcome(v, Allocation{});
}

struct TraceCheck {
  bool passed = true;
  std::string diagnostic;
  explicit operator bool() const { return passed; }
};

// Re-derives every invariant of a recorded run: round shape, worker choice,
// quasi-stability and Blair ascent of the iterates, that each round's new
// contracts block the previous iterate and that satisfying them yields the
// next one, and stability of the final outcome.
inline TraceCheck verify_trace(const SubmarketView& v, const DATrace& trace) {
  const Market& m = v.market();
  auto fail = [](std::string msg) { return TraceCheck{false, std::move(msg)}; };
  Mask y = detail::allocation_mask_in_view(v, trace.start, "start allocation");
  if (!detail::is_quasi_stable_mask(v, y))
    return fail("start " + to_string(trace.start) + " is not firm-quasi-stable");
  for (std::size_t t = 0; t < trace.steps.size(); ++t) {
    const DAStep& step = trace.steps[t];
    std::string at = "round " + std::to_string(t + 1) + ": ";
    Mask offers = detail::allocation_mask_in_view(v, step.offers, "offers");
    Mask target = side_choose_mask(m, v.firm_indices(), detail::gamma_mask(v, y));
    if (y & ~offers) return fail(at + "offers do not contain the held allocation");
    if (offers == y) return fail(at + "offers must strictly grow the held set");
    if (offers & ~target)
      return fail(at + "offers exceed the firms' choice over the candidate set");
    Mask held = side_choose_mask(m, v.worker_indices(), offers);
    if (held != m.mask_of(step.held))
      return fail(at + "held set is not the workers' choice of the offers; expected " +
                  to_string(m.allocation_of(held)));
    if ((held & ~y) != m.mask_of(step.satisfied))
      return fail(at + "satisfied set is not the newly held contracts");
    if (m.mask_of(step.satisfied) == 0) return fail(at + "no contract was newly satisfied");
    if (!detail::is_quasi_stable_mask(v, held))
      return fail(at + "held allocation " + to_string(step.held) +
                  " is not firm-quasi-stable");
    if (!detail::blair_mask(m, v.worker_indices(), held, y))
      return fail(at + "held allocation does not dominate the previous one");
    if (!is_blocking_set(v, m.allocation_of(y), step.satisfied.members()))
      return fail(at + "satisfied set does not block the previous allocation");
    if (satisfy(v, m.allocation_of(y), step.satisfied.members()) != step.held)
      return fail(at + "satisfying the blocking set does not yield the held allocation");
    y = held;
  }
  if (m.mask_of(trace.outcome) != y)
    return fail("outcome does not match the last held allocation");
  if (!detail::is_stable_mask(v, y))
    return fail("outcome " + to_string(trace.outcome) + " is not stable");
  return {};
}

}  // namespace qstab
