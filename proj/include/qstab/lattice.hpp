#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "qstab/base.hpp"
#include "qstab/model.hpp"
#include "qstab/stability.hpp"

namespace qstab {

enum class Side { workers, firms };

namespace detail {

// Y dominates Y' for the given agents iff those agents, offered both, keep
// exactly Y. Callers guarantee individual rationality of both operands.
inline bool blair_mask(const Market& m, std::span<const std::uint32_t> agents, Mask y,
                       Mask yp) {
  return side_choose_mask(m, agents, y | yp) == y;
}

inline void require_ir(const SubmarketView& v, Mask ym, const Allocation& y,
                       const char* op) {
  if (!is_ir_mask(v, ym))
    throw InputError(std::string(op) + ": allocation " + to_string(y) +
                     " is not individually rational in the view");
}

}  // namespace detail

// The Blair order for one full side of the view.
inline bool blair_dominates(const SubmarketView& v, const Allocation& y, const Allocation& yp,
                            Side side) {
  Mask ym = detail::allocation_mask_in_view(v, y, "allocation");
  Mask ypm = detail::allocation_mask_in_view(v, yp, "allocation");
  detail::require_ir(v, ym, y, "blair_dominates");
  detail::require_ir(v, ypm, yp, "blair_dominates");
  auto agents = side == Side::workers ? v.worker_indices() : v.firm_indices();
  return detail::blair_mask(v.market(), agents, ym, ypm);
}

// The Blair order for an explicit one-sided agent subset of the view. Used
// for cross-view comparisons, where the ambient view is the full market.
inline bool blair_dominates(const SubmarketView& v, const Allocation& y, const Allocation& yp,
                            const std::vector<AgentId>& side_agents) {
  Mask ym = detail::allocation_mask_in_view(v, y, "allocation");
  Mask ypm = detail::allocation_mask_in_view(v, yp, "allocation");
  detail::require_ir(v, ym, y, "blair_dominates");
  detail::require_ir(v, ypm, yp, "blair_dominates");
  bool all_workers = false, all_firms = false;
  auto idx = detail::side_indices(v.market(), side_agents, &all_workers, &all_firms);
  if (idx.empty() || !(all_workers || all_firms))
    throw InputError("blair_dominates: agent subset must be nonempty and one-sided");
  return detail::blair_mask(v.market(), idx, ym, ypm);
}

// Join of two firm-quasi-stable allocations in the worker Blair order:
// C_{W'}(Y ∪ Y'). The result is again firm-quasi-stable and is the least
// upper bound; both facts are asserted.
inline Allocation join_w(const SubmarketView& v, const Allocation& y, const Allocation& yp) {
  Mask ym = detail::allocation_mask_in_view(v, y, "allocation");
  Mask ypm = detail::allocation_mask_in_view(v, yp, "allocation");
  if (!detail::is_quasi_stable_mask(v, ym))
    throw InputError("join_w: " + to_string(y) + " is not firm-quasi-stable in the view");
  if (!detail::is_quasi_stable_mask(v, ypm))
    throw InputError("join_w: " + to_string(yp) + " is not firm-quasi-stable in the view");
  Mask jm = side_choose_mask(v.market(), v.worker_indices(), ym | ypm);
  Allocation j = v.market().allocation_of(jm);
  if (!detail::is_quasi_stable_mask(v, jm))
    throw PropertyViolation("join_w: " + to_string(j) + " = join of " + to_string(y) +
                            " and " + to_string(yp) + " is not firm-quasi-stable");
  if (!detail::blair_mask(v.market(), v.worker_indices(), jm, ym) ||
      !detail::blair_mask(v.market(), v.worker_indices(), jm, ypm))
    throw PropertyViolation("join_w: " + to_string(j) + " does not dominate both " +
                            to_string(y) + " and " + to_string(yp));
  return j;
}

// Meet in the worker Blair order: C_{W'} of the union of every common lower
// bound in Q, the full family of firm-quasi-stable allocations of the view.
// Q must come from an exhaustive enumeration; membership of the operands and
// of the empty allocation is validated as a cheap completeness proxy.
inline Allocation meet_w(const SubmarketView& v, const Allocation& y, const Allocation& yp,
                         const std::vector<Allocation>& quasi_stable_family) {
  const Market& m = v.market();
  Mask ym = detail::allocation_mask_in_view(v, y, "allocation");
  Mask ypm = detail::allocation_mask_in_view(v, yp, "allocation");
  auto member = [&](const Allocation& a) {
    return std::find(quasi_stable_family.begin(), quasi_stable_family.end(), a) !=
           quasi_stable_family.end();
  };
  if (!member(Allocation{}))
    throw InputError("meet_w: family lacks the empty allocation; enumeration incomplete?");
  if (!member(y) || !member(yp))
    throw InputError("meet_w: both operands must belong to the supplied family");
  Mask lower = 0;
  for (const auto& z : quasi_stable_family) {
    Mask zm = detail::allocation_mask_in_view(v, z, "family member");
    if (detail::blair_mask(m, v.worker_indices(), ym, zm) &&
        detail::blair_mask(m, v.worker_indices(), ypm, zm))
      lower |= zm;
  }
  Mask mm = side_choose_mask(m, v.worker_indices(), lower);
  Allocation meet = m.allocation_of(mm);
  if (!detail::is_quasi_stable_mask(v, mm))
    throw PropertyViolation("meet_w: " + to_string(meet) + " = meet of " + to_string(y) +
                            " and " + to_string(yp) + " is not firm-quasi-stable");
  if (!detail::blair_mask(m, v.worker_indices(), ym, mm) ||
      !detail::blair_mask(m, v.worker_indices(), ypm, mm))
    throw PropertyViolation("meet_w: both operands must dominate " + to_string(meet));
  return meet;
}

// One application of the re-equilibration operator C_{W'}(C_{F'}(Γ(Y))).
// Maps firm-quasi-stable to firm-quasi-stable, weakly up in the worker
// Blair order; fixed points are exactly the stable allocations.
inline Allocation tarski(const SubmarketView& v, const Allocation& y) {
  Mask ym = detail::allocation_mask_in_view(v, y, "allocation");
  if (!detail::is_quasi_stable_mask(v, ym))
    throw InputError("tarski: " + to_string(y) + " is not firm-quasi-stable in the view");
  const Market& m = v.market();
  Mask tm = side_choose_mask(
      m, v.worker_indices(),
      side_choose_mask(m, v.firm_indices(), detail::gamma_mask(v, ym)));
  Allocation t = m.allocation_of(tm);
  if (!detail::is_quasi_stable_mask(v, tm))
    throw PropertyViolation("tarski: image " + to_string(t) + " of " + to_string(y) +
                            " is not firm-quasi-stable");
  if (!detail::blair_mask(m, v.worker_indices(), tm, ym))
    throw PropertyViolation("tarski: image " + to_string(t) +
                            " does not dominate the argument " + to_string(y));
  return t;
}

struct TarskiTrace {
  std::vector<Allocation> iterates;  // starts at the argument, ends at the fixed point
  Allocation fixed_point;
};

// Iterates the operator to its fixed point. Termination within 2^|X'| steps
// and stability of the fixed point are asserted.
inline TarskiTrace tarski_iterate(const SubmarketView& v, const Allocation& y0) {
  TarskiTrace trace;
  trace.iterates.push_back(y0);
  std::uint64_t cap = std::uint64_t{1} << std::min(63, bit_count(v.contracts_mask()));
  Allocation y = y0;
  for (std::uint64_t steps = 0;; ++steps) {
    if (steps > cap)
      throw PropertyViolation("tarski_iterate: no fixed point within " + std::to_string(cap) +
                              " steps from " + to_string(y0));
    Allocation t = tarski(v, y);
    if (t == y) break;
    trace.iterates.push_back(t);
    y = std::move(t);
  }
  trace.fixed_point = trace.iterates.back();
  if (!is_stable(v, trace.fixed_point))
    throw PropertyViolation("tarski_iterate: fixed point " + to_string(trace.fixed_point) +
                            " is not stable");
  return trace;
}

// Isotonicity of the operator between two comparable quasi-stable points:
// the candidate sets shrink upward and images stay ordered. Returns true;
// a violated conclusion raises with the witness.
inline bool isotone_check(const SubmarketView& v, const Allocation& y, const Allocation& yp) {
  Mask ym = detail::allocation_mask_in_view(v, y, "allocation");
  Mask ypm = detail::allocation_mask_in_view(v, yp, "allocation");
  if (!detail::is_quasi_stable_mask(v, ym) || !detail::is_quasi_stable_mask(v, ypm))
    throw InputError("isotone_check: both allocations must be firm-quasi-stable");
  const Market& m = v.market();
  if (!detail::blair_mask(m, v.worker_indices(), ym, ypm))
    throw InputError("isotone_check: " + to_string(y) + " must dominate " + to_string(yp) +
                     " in the worker Blair order");
  Mask gy = detail::gamma_mask(v, ym);
  Mask gyp = detail::gamma_mask(v, ypm);
  if (gy & ~gyp)
    throw PropertyViolation(
        "isotone_check: candidate set of the dominant allocation is not contained in the "
        "other; extra contract '" +
        m.contract(lowest_bit_index(gy & ~gyp)).id + "'");
  Allocation ty = tarski(v, y);
  Allocation typ = tarski(v, yp);
  if (!detail::blair_mask(m, v.worker_indices(), m.mask_of(ty), m.mask_of(typ)))
    throw PropertyViolation("isotone_check: images " + to_string(ty) + " and " +
                            to_string(typ) + " are not ordered");
  return true;
}

}  // namespace qstab
