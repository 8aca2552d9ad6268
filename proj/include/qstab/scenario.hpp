#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qstab/base.hpp"
#include "qstab/da.hpp"
#include "qstab/lattice.hpp"
#include "qstab/model.hpp"
#include "qstab/stability.hpp"
#include "qstab/verify.hpp"

namespace qstab {

enum class DisruptionKind { add_firms, remove_workers, combined };

// A market disruption: firms enter, workers leave, or both at once. The base
// market holds the union population; the before-view excludes the entrants
// and the after-view excludes the leavers.
struct DisruptionEvent {
  DisruptionKind kind;
  std::vector<AgentId> added_firms;
  std::vector<AgentId> removed_workers;
  SubmarketView before;  // (W, F', X_{F'})
  SubmarketView after;   // (W', F, X_{W'})
};

inline DisruptionEvent make_disruption(const Market& m, std::vector<AgentId> added_firms,
                                       std::vector<AgentId> removed_workers) {
  std::sort(added_firms.begin(), added_firms.end());
  std::sort(removed_workers.begin(), removed_workers.end());
  for (const auto& f : added_firms)
    if (!m.is_firm(f)) throw InputError("disruption: '" + f + "' is not a firm of the market");
  for (const auto& w : removed_workers)
    if (!m.is_worker(w))
      throw InputError("disruption: '" + w + "' is not a worker of the market");
  std::vector<AgentId> before_firms;
  for (const auto& f : m.firms())
    if (!std::binary_search(added_firms.begin(), added_firms.end(), f))
      before_firms.push_back(f);
  std::vector<AgentId> after_workers;
  for (const auto& w : m.workers())
    if (!std::binary_search(removed_workers.begin(), removed_workers.end(), w))
      after_workers.push_back(w);
  if (before_firms.empty())
    throw InputError("disruption: every firm would be an entrant; the pre-entry market "
                     "needs at least one firm");
  if (after_workers.empty())
    throw InputError("disruption: every worker would leave; the post-exit market needs at "
                     "least one worker");
  DisruptionKind kind = removed_workers.empty() ? DisruptionKind::add_firms
                        : added_firms.empty()   ? DisruptionKind::remove_workers
                                                : DisruptionKind::combined;
  return {kind, std::move(added_firms), std::move(removed_workers),
          SubmarketView(m, m.workers(), std::move(before_firms)),
          SubmarketView(m, std::move(after_workers), m.firms())};
}

// The moment of disruption: the surviving workers keep their contracts.
// Quasi-stability of the restriction in the after-view is a theorem and is
// asserted, so re-equilibration can always restart from it.
inline Allocation apply_disruption(const DisruptionEvent& e, const Allocation& y) {
  if (!is_quasi_stable(e.before, y))
    throw InputError("apply_disruption: " + to_string(y) +
                     " is not firm-quasi-stable in the pre-event market");
  const Market& m = e.before.market();
  Allocation restart = m.allocation_of(m.mask_of(y) & e.after.worker_side_mask());
  if (!is_quasi_stable(e.after, restart))
    throw PropertyViolation("apply_disruption: restart " + to_string(restart) +
                            " is not firm-quasi-stable in the post-event market");
  return restart;
}

struct ScenarioReport {
  Allocation start;    // stable before the event
  Allocation restart;  // its surviving slice
  DATrace trace;       // re-equilibration in the after-view
  Allocation outcome;
  bool workers_weakly_gain = false;  // outcome dominates start for surviving workers
  bool firms_weakly_lose = false;    // start dominates outcome for incumbent firms
  // entrant -> (slice of the outcome, slice of the after-view worker-pessimal)
  std::map<AgentId, std::pair<Allocation, Allocation>> entrant_slices;
};

// Disrupt a stable allocation and run deferred acceptance to a new stable
// one. Welfare polarity (surviving workers weakly gain, incumbent firms
// weakly lose, in the Blair sense) is asserted.
inline ScenarioReport reequilibrate(const DisruptionEvent& e, const Allocation& start,
                                    const ProposalStrategy& strategy = FullProposal{}) {
  if (!is_stable(e.before, start))
    throw InputError("reequilibrate: " + to_string(start) +
                     " is not stable in the pre-event market");
  ScenarioReport r;
  r.start = start;
  r.restart = apply_disruption(e, start);
  r.trace = da_run(e.after, r.restart, strategy);
  r.outcome = r.trace.outcome;
  SubmarketView ambient = full_view(e.before.market());
  r.workers_weakly_gain = blair_dominates(ambient, r.outcome, start, e.after.workers());
  r.firms_weakly_lose = blair_dominates(ambient, start, r.outcome, e.before.firms());
  if (!r.workers_weakly_gain)
    throw PropertyViolation("reequilibrate: outcome " + to_string(r.outcome) +
                            " does not dominate " + to_string(start) +
                            " for the surviving workers");
  if (!r.firms_weakly_lose)
    throw PropertyViolation("reequilibrate: start " + to_string(start) +
                            " does not dominate " + to_string(r.outcome) +
                            " for the incumbent firms");
  return r;
}

// The worker-pessimal stable allocation survives disruption: restarting
// deferred acceptance from its surviving slice lands exactly on the
// after-view's worker-pessimal stable allocation. Asserted and returned.
inline Allocation worker_pessimal_transfer(const DisruptionEvent& e) {
  Allocation before_pessimal = worker_pessimal(e.before);
  Allocation outcome = da_outcome(e.after, apply_disruption(e, before_pessimal));
  Allocation expected = worker_pessimal(e.after);
  if (outcome != expected)
    throw PropertyViolation("worker_pessimal_transfer: restarting from " +
                            to_string(before_pessimal) + " reached " + to_string(outcome) +
                            " instead of the post-event worker-pessimal " +
                            to_string(expected));
  return outcome;
}

// Interrupt a pre-event deferred-acceptance run after `interrupt_at` rounds
// (clamped to the run's length) and re-equilibrate the surviving slice.
// Asserts that each prefix round restricts to a valid round of the
// after-view and that the final outcome is independent of the interrupt
// point. Returns (outcome from the interrupted slice, outcome from the
// start's slice).
inline std::pair<Allocation, Allocation> mid_run_disruption(const DisruptionEvent& e,
                                                            const Allocation& y0,
                                                            std::size_t interrupt_at) {
  const Market& m = e.before.market();
  DATrace trace = da_run(e.before, y0, FullProposal{});
  std::size_t t = std::min(interrupt_at, trace.steps.size());
  Mask keep = e.after.worker_side_mask();
  Mask prev = m.mask_of(y0) & keep;
  for (std::size_t s = 0; s < t; ++s) {
    Mask offers = m.mask_of(trace.steps[s].offers) & keep;
    Mask held = m.mask_of(trace.steps[s].held) & keep;
    std::string at = "round " + std::to_string(s + 1) + ": ";
    if (!detail::is_quasi_stable_mask(e.after, prev))
      throw PropertyViolation("mid_run_disruption: " + at +
                              "surviving slice of the previous iterate is not "
                              "firm-quasi-stable post-event");
    if (prev & ~offers)
      throw PropertyViolation("mid_run_disruption: " + at +
                              "restricted offers lose surviving contracts");
    Mask target = side_choose_mask(m, e.after.firm_indices(),
                                   detail::gamma_mask(e.after, prev));
    if (offers & ~target)
      throw PropertyViolation("mid_run_disruption: " + at +
                              "restricted offers exceed the post-event candidate choice");
    if (held != side_choose_mask(m, e.after.worker_indices(), offers))
      throw PropertyViolation("mid_run_disruption: " + at +
                              "restricted held set is not the surviving workers' choice of "
                              "the restricted offers");
    prev = held;
  }
  Allocation from_interrupt = da_outcome(e.after, m.allocation_of(prev));
  Allocation from_start = da_outcome(e.after, m.allocation_of(m.mask_of(y0) & keep));
  if (from_interrupt != from_start)
    throw PropertyViolation("mid_run_disruption: outcome depends on the interrupt point: " +
                            to_string(from_interrupt) + " from round " + std::to_string(t) +
                            " vs " + to_string(from_start) + " from the start");
  return {from_interrupt, from_start};
}

// Pure firm entry under the law of aggregate demand: the outcome is the
// join of the old stable allocation with the post-entry worker-pessimal
// one, and every entrant receives exactly its worker-pessimal slice. Both
// are asserted; all agents must verifiably satisfy the law.
inline ScenarioReport new_entrant_report(const DisruptionEvent& e, const Allocation& start,
                                         const ProposalStrategy& strategy = FullProposal{}) {
  if (!e.removed_workers.empty())
    throw InputError("new_entrant_report: the event must be pure firm entry");
  const Market& m = e.before.market();
  for (std::uint32_t a = 0; a < m.agent_count(); ++a)
    if (!verify_lad(m, m.agent_id(a)).passed)
      throw InputError("new_entrant_report: agent '" + m.agent_id(a) +
                       "' fails the law of aggregate demand");
  ScenarioReport r = reequilibrate(e, start, strategy);
  Allocation pessimal = worker_pessimal(e.after);
  Allocation expected = join_w(e.after, r.restart, pessimal);
  if (r.outcome != expected)
    throw PropertyViolation("new_entrant_report: outcome " + to_string(r.outcome) +
                            " is not the join " + to_string(expected) +
                            " of the surviving slice with the post-entry worker-pessimal");
  for (const auto& f : e.added_firms) {
    Allocation got = agent_slice(m, r.outcome, f);
    Allocation best = agent_slice(m, pessimal, f);
    if (got != best)
      throw PropertyViolation("new_entrant_report: entrant '" + f + "' received " +
                              to_string(got) + " instead of its firm-optimal slice " +
                              to_string(best));
    r.entrant_slices[f] = {got, best};
  }
  return r;
}

// For Y stable pre-event and Y' stable post-event: the surviving workers
// prefer Y' exactly when the incumbent firms prefer Y. Asserted; returns
// the (equal) truth value of the two comparisons.
inline bool polarity_check(const DisruptionEvent& e, const Allocation& y,
                           const Allocation& yp) {
  if (!is_stable(e.before, y))
    throw InputError("polarity_check: " + to_string(y) +
                     " is not stable in the pre-event market");
  if (!is_stable(e.after, yp))
    throw InputError("polarity_check: " + to_string(yp) +
                     " is not stable in the post-event market");
  SubmarketView ambient = full_view(e.before.market());
  bool workers_prefer_new = blair_dominates(ambient, yp, y, e.after.workers());
  bool firms_prefer_old = blair_dominates(ambient, y, yp, e.before.firms());
  if (workers_prefer_new != firms_prefer_old)
    throw PropertyViolation("polarity_check: surviving workers " +
                            std::string(workers_prefer_new ? "prefer" : "do not prefer") +
                            " " + to_string(yp) + " but incumbent firms " +
                            std::string(firms_prefer_old ? "prefer" : "do not prefer") + " " +
                            to_string(y));
  return workers_prefer_new;
}

}  // namespace qstab
