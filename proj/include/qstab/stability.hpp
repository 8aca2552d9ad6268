#pragma once

#include <string>
#include <vector>

#include "qstab/base.hpp"
#include "qstab/model.hpp"

namespace qstab {

namespace detail {

inline bool is_ir_mask(const SubmarketView& v, Mask y) {
  const Market& m = v.market();
  return side_choose_mask(m, v.worker_indices(), y) == y &&
         side_choose_mask(m, v.firm_indices(), y) == y;
}

// {x ∈ X' : x ∈ C_{W'}(Y ∪ {x})}. Only the owning worker can pick x, so the
// membership test reduces to that worker's choice. Requires Y individually
// rational, which makes Y itself a subset of the result.
inline Mask gamma_mask(const SubmarketView& v, Mask y) {
  const Market& m = v.market();
  Mask out = y;
  for_each_bit(v.contracts_mask() & ~y, [&](int i) {
    if (choose_mask(m, m.worker_of(i), y | bit(i)) & bit(i)) out |= bit(i);
  });
  return out;
}

// Blocking contracts: x ∈ X'∖Y wanted by both of its endpoints given Y.
inline Mask blocking_mask(const SubmarketView& v, Mask y) {
  const Market& m = v.market();
  Mask out = 0;
  for_each_bit(v.contracts_mask() & ~y, [&](int i) {
    Mask with = y | bit(i);
    if ((choose_mask(m, m.worker_of(i), with) & bit(i)) &&
        (choose_mask(m, m.firm_of(i), with) & bit(i)))
      out |= bit(i);
  });
  return out;
}

inline bool is_quasi_stable_mask(const SubmarketView& v, Mask y) {
  if (!is_ir_mask(v, y)) return false;
  Mask target = side_choose_mask(v.market(), v.firm_indices(), gamma_mask(v, y));
  return (y & ~target) == 0;
}

inline bool is_stable_mask(const SubmarketView& v, Mask y) {
  if (!is_ir_mask(v, y)) return false;
  return side_choose_mask(v.market(), v.firm_indices(), gamma_mask(v, y)) == y;
}

}  // namespace detail

struct GammaSet {
  Allocation base;
  std::vector<ContractId> members;
};

inline bool is_individually_rational(const SubmarketView& v, const Allocation& y) {
  return detail::is_ir_mask(v, detail::allocation_mask_in_view(v, y, "allocation"));
}

// Contracts any of whose workers would keep them alongside Y. Input must be
// individually rational; otherwise the set is not well defined here.
inline GammaSet gamma(const SubmarketView& v, const Allocation& y) {
  Mask ym = detail::allocation_mask_in_view(v, y, "allocation");
  if (!detail::is_ir_mask(v, ym))
    throw InputError("gamma: allocation " + to_string(y) +
                     " is not individually rational in the view");
  return {y, v.market().ids_of(detail::gamma_mask(v, ym))};
}

inline std::vector<ContractId> blocking_contracts(const SubmarketView& v, const Allocation& y) {
  Mask ym = detail::allocation_mask_in_view(v, y, "allocation");
  return v.market().ids_of(detail::blocking_mask(v, ym));
}

// Individually rational and no held contract is abandoned by its firm once
// every blocking contract is on the table. Non-IR input is simply "no".
inline bool is_quasi_stable(const SubmarketView& v, const Allocation& y) {
  return detail::is_quasi_stable_mask(v, detail::allocation_mask_in_view(v, y, "allocation"));
}

inline bool is_stable(const SubmarketView& v, const Allocation& y) {
  return detail::is_stable_mask(v, detail::allocation_mask_in_view(v, y, "allocation"));
}

// Z blocks Y: nonempty, disjoint from Y, and kept in full by both sides when
// offered on top of Y.
inline bool is_blocking_set(const SubmarketView& v, const Allocation& y,
                            const std::vector<ContractId>& z) {
  const Market& m = v.market();
  Mask ym = detail::allocation_mask_in_view(v, y, "allocation");
  Mask zm = detail::set_mask_in_view(v, z, "blocking set");
  if (zm == 0) throw InputError("blocking set must be nonempty");
  if (zm & ym)
    throw InputError("blocking set must be disjoint from the allocation; '" +
                     m.contract(lowest_bit_index(zm & ym)).id + "' is in both");
  Mask with = ym | zm;
  return (zm & ~side_choose_mask(m, v.worker_indices(), with)) == 0 &&
         (zm & ~side_choose_mask(m, v.firm_indices(), with)) == 0;
}

// Y^Z: offer Y ∪ Z, drop everything some owner rejects. Z must block Y.
inline Allocation satisfy(const SubmarketView& v, const Allocation& y,
                          const std::vector<ContractId>& z) {
  if (!is_blocking_set(v, y, z))
    throw InputError("satisfy: " + to_string(Allocation(z)) + " is not a blocking set for " +
                     to_string(y));
  const Market& m = v.market();
  Mask with = m.mask_of(y) | m.mask_of(z);
  Mask rejected = side_reject_mask(m, v.worker_indices(), with) |
                  side_reject_mask(m, v.firm_indices(), with);
  return m.allocation_of(with & ~rejected);
}

struct BlockReport {
  Allocation allocation;
  bool individually_rational = false;
  std::vector<ContractId> blocking;
  bool quasi_stable = false;
  bool stable = false;
};

inline BlockReport check_allocation(const SubmarketView& v, const Allocation& y) {
  Mask ym = detail::allocation_mask_in_view(v, y, "allocation");
  BlockReport r;
  r.allocation = y;
  r.individually_rational = detail::is_ir_mask(v, ym);
  r.blocking = v.market().ids_of(detail::blocking_mask(v, ym));
  r.quasi_stable = detail::is_quasi_stable_mask(v, ym);
  r.stable = detail::is_stable_mask(v, ym);
  return r;
}

}  // namespace qstab
