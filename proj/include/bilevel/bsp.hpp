#ifndef BILEVEL_BSP_HPP
#define BILEVEL_BSP_HPP

#include <algorithm>
#include <utility>

#include "bilevel/core.hpp"

namespace bilevel {

struct BilevelSolution {
  ItemSet leader_set;
  ItemSet follower_set;
  Rational value;
  int leader_count = 0;
};

namespace detail {

// Capacity split enumeration for instances with E_l disjoint from E_f or
// E_l a subset of E_f: sort both sides, try every b_l, keep the best pair.
inline BilevelSolution solve_bsp_sorted(const Instance& inst, const Scenario& d) {
  GreedyOrder pl = greedy_order(inst.leader_items, inst.leader_cost);
  GreedyOrder pf = greedy_order(inst.follower_items, d.follower_cost,
                                inst.leader_cost, inst.policy);
  int b = inst.capacity;
  int lo = std::max(0, b - inst.n_f());
  int hi = std::min(b, inst.n_l());
  bool have = false;
  BilevelSolution best;
  for (int bl = lo; bl <= hi; ++bl) {
    ItemSet X(pl.sequence.begin(), pl.sequence.begin() + bl);
    std::sort(X.begin(), X.end());
    ItemSet Y;
    for (ItemId e : pf.sequence) {
      if (static_cast<int>(Y.size()) == b - bl) break;
      if (!set_contains(X, e)) Y.push_back(e);
    }
    std::sort(Y.begin(), Y.end());
    Rational v = leader_value(inst, X, Y);
    if (!have || v < best.value) {
      best = {std::move(X), std::move(Y), std::move(v), bl};
      have = true;
    }
  }
  return best;
}

}  // namespace detail

// Certain-case solver. Disjoint and subset instances are handled directly;
// everything else is first rewritten so that E_l is a subset of E_f.
inline BilevelSolution solve_bsp(const Instance& inst, const Scenario& d) {
  validate_instance(inst);
  ItemSet overlap;
  std::set_intersection(inst.leader_items.begin(), inst.leader_items.end(),
                        inst.follower_items.begin(), inst.follower_items.end(),
                        std::back_inserter(overlap));
  bool disjoint = overlap.empty();
  bool subset = static_cast<int>(overlap.size()) == inst.n_l();
  if (disjoint || subset) return detail::solve_bsp_sorted(inst, d);
  auto [ninst, nd] = normalize_subset(inst, d);
  BilevelSolution sol = detail::solve_bsp_sorted(ninst, nd);
  // The follower may have been forced onto appended leader items only if the
  // original X was infeasible; the optimum never is, so X stays within E_l.
  return sol;
}

}  // namespace bilevel

#endif  // BILEVEL_BSP_HPP
