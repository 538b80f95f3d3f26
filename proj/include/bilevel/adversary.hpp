#ifndef BILEVEL_ADVERSARY_HPP
#define BILEVEL_ADVERSARY_HPP

#include <algorithm>
#include <utility>
#include <variant>
#include <vector>

#include "bilevel/core.hpp"

namespace bilevel {

struct AdversaryOutcome {
  Scenario scenario;
  ItemSet follower_set;                     // binary operations
  std::map<ItemId, Rational> follower_vector;  // continuous operations
  Rational value;                           // leader objective c(X u Y)
};

// Worst scenario from an explicit list; ties go to the lowest index.
inline AdversaryOutcome adversary_discrete(const Instance& inst, const DiscreteU& U,
                                           const ItemSet& X) {
  if (U.scenarios.empty()) throw ValidationError("discrete uncertainty set is empty");
  bool have = false;
  AdversaryOutcome best;
  for (const Scenario& d : U.scenarios) {
    ItemSet Y = follower_respond(inst, X, d);
    Rational v = leader_value(inst, X, Y);
    if (!have || v > best.value) {
      best.scenario = d;
      best.follower_set = std::move(Y);
      best.value = std::move(v);
      have = true;
    }
  }
  return best;
}

// e1 precedes e2 in every realizable follower order iff the whole interval
// of e1 lies strictly below the interval of e2.
inline bool interval_precedes(const IntervalU& U, ItemId e1, ItemId e2) {
  return cost_at(U.hi, e1, "interval hi") < cost_at(U.lo, e2, "interval lo");
}

namespace detail {

inline void check_interval(const IntervalU& U) {
  for (const auto& [e, lo] : U.lo)
    if (lo > cost_at(U.hi, e, "interval hi"))
      throw ValidationError("interval with lo > hi at item " + std::to_string(e));
}

// One-point intersections (some d-(e1) equal to some d+(e2), e1 != e2)
// break the optimistic analysis; the pessimistic one tolerates them.
inline void check_one_point(const Instance& inst, const IntervalU& U) {
  if (inst.policy != Policy::Optimistic) return;
  for (ItemId e1 : inst.follower_items)
    for (ItemId e2 : inst.follower_items) {
      if (e1 == e2) continue;
      if (cost_at(U.lo, e1, "interval lo") == cost_at(U.hi, e2, "interval hi"))
        throw ValidationError(
            "one-point interval intersection between items " + std::to_string(e1) +
            " and " + std::to_string(e2) + " is not supported under the optimistic policy");
    }
}

}  // namespace detail

// Worst scenario under interval uncertainty: guess the most expensive
// realizable follower prefix by its last flexible item, then realize it
// with extreme endpoints.
inline AdversaryOutcome adversary_interval(const Instance& inst, const IntervalU& U,
                                           const ItemSet& X) {
  detail::check_interval(U);
  detail::check_one_point(inst, U);
  ItemSet pool = set_difference(inst.follower_items, X);
  int bf = inst.capacity - static_cast<int>(X.size());
  if (bf < 0) throw InfeasibleError("leader set larger than capacity");
  if (bf > static_cast<int>(pool.size()))
    throw InfeasibleError("follower cannot complete the selection");

  AdversaryOutcome best;
  bool have = false;
  ItemSet best_Y;
  for (ItemId head : pool) {
    const Rational& ref = cost_at(U.lo, head, "interval lo");
    ItemSet below, spanning;
    for (ItemId e : pool) {
      if (cost_at(U.hi, e, "interval hi") < ref)
        below.push_back(e);
      else if (cost_at(U.lo, e, "interval lo") <= ref &&
               ref <= cost_at(U.hi, e, "interval hi"))
        spanning.push_back(e);
    }
    int need = bf - static_cast<int>(below.size());
    if (need < 0 || need > static_cast<int>(spanning.size())) continue;
    // Most expensive feasible fill: take the `need` items of largest c.
    CostMap neg;
    for (ItemId e : spanning) neg[e] = -cost_at(inst.leader_cost, e, "leader cost");
    ItemSet fill = solve_selection(spanning, need, neg);
    ItemSet Y;
    std::set_union(below.begin(), below.end(), fill.begin(), fill.end(),
                   std::back_inserter(Y));
    Rational v = leader_value(inst, X, Y);
    if (!have || v > best.value) {
      best.value = std::move(v);
      best_Y = std::move(Y);
      have = true;
    }
  }
  if (!have) {
    if (bf == 0) {
      AdversaryOutcome out;
      out.scenario.follower_cost = U.hi;
      out.value = leader_value(inst, X, {});
      return out;
    }
    throw InfeasibleError("no admissible follower prefix");
  }
  best.follower_set = best_Y;
  for (ItemId e : inst.follower_items)
    best.scenario.follower_cost[e] =
        set_contains(best_Y, e) ? U.lo.at(e) : U.hi.at(e);
  return best;
}

// Interval hull of a discrete-uncorrelated set; preserves binary values.
inline IntervalU du_to_interval(const DiscreteUncorrelatedU& U) {
  IntervalU iv;
  for (const auto& [e, vs] : U.values) {
    if (vs.empty())
      throw ValidationError("empty value set at item " + std::to_string(e));
    iv.lo[e] = *std::min_element(vs.begin(), vs.end());
    iv.hi[e] = *std::max_element(vs.begin(), vs.end());
  }
  return iv;
}

// Dispatch on the uncertainty kind (binary leader solution).
inline AdversaryOutcome adversary(const Instance& inst, const UncertaintySet& U,
                                  const ItemSet& X) {
  if (const auto* d = std::get_if<DiscreteU>(&U)) return adversary_discrete(inst, *d, X);
  if (const auto* iv = std::get_if<IntervalU>(&U)) return adversary_interval(inst, *iv, X);
  const auto& du = std::get<DiscreteUncorrelatedU>(U);
  AdversaryOutcome out = adversary_interval(inst, du_to_interval(du), X);
  // Hull endpoints are members of the original value sets, so the witness
  // scenario is componentwise feasible as returned.
  return out;
}

}  // namespace bilevel

#endif  // BILEVEL_ADVERSARY_HPP
