#ifndef BILEVEL_ORACLE_HPP
#define BILEVEL_ORACLE_HPP

#include <algorithm>
#include <bit>
#include <functional>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "bilevel/adversary.hpp"
#include "bilevel/core.hpp"
#include "bilevel/knapsack.hpp"
#include "bilevel/leader_binary.hpp"

namespace bilevel {

namespace oracle_detail {

// Every follower order the uncertainty set can realize, as explicit
// permutations of E_f. Discrete and discrete-uncorrelated sets enumerate
// scenarios and take the canonical greedy order; interval sets enumerate
// all permutations and keep the linear extensions of the interval order.
struct RealizableOrders {
  std::vector<std::vector<ItemId>> orders;
  std::vector<Scenario> scenarios;  // parallel to orders when available
};

inline long count_product(const DiscreteUncorrelatedU& U, const ItemSet& items,
                          long limit) {
  long count = 1;
  for (ItemId e : items) {
    count *= static_cast<long>(U.values.at(e).size());
    if (count > limit) return count;
  }
  return count;
}

inline RealizableOrders realizable_orders(const Instance& inst,
                                          const UncertaintySet& U,
                                          const OracleBudget& budget) {
  RealizableOrders out;
  auto add_scenario = [&](const Scenario& d) {
    out.orders.push_back(greedy_order(inst.follower_items, d.follower_cost,
                                      inst.leader_cost, inst.policy)
                             .sequence);
    out.scenarios.push_back(d);
  };
  if (const auto* dsc = std::get_if<DiscreteU>(&U)) {
    if (static_cast<long>(dsc->scenarios.size()) > budget.max_scenarios)
      throw BudgetExceededError("scenario list exceeds oracle budget");
    for (const Scenario& d : dsc->scenarios) add_scenario(d);
  } else if (const auto* du = std::get_if<DiscreteUncorrelatedU>(&U)) {
    if (count_product(*du, inst.follower_items, budget.max_scenarios) >
        budget.max_scenarios)
      throw BudgetExceededError("scenario product exceeds oracle budget");
    Scenario d;
    std::function<void(size_t)> rec = [&](size_t i) {
      if (i == inst.follower_items.size()) {
        add_scenario(d);
        return;
      }
      ItemId e = inst.follower_items[i];
      for (const Rational& v : du->values.at(e)) {
        d.follower_cost[e] = v;
        rec(i + 1);
      }
    };
    rec(0);
  } else {
    const auto& iv = std::get<IntervalU>(U);
    long perms = 1;
    for (size_t i = 2; i <= inst.follower_items.size(); ++i) {
      perms *= static_cast<long>(i);
      if (perms > budget.max_scenarios)
        throw BudgetExceededError("permutation count exceeds oracle budget");
    }
    std::vector<ItemId> perm = inst.follower_items;
    do {
      bool ok = true;
      for (size_t i = 0; ok && i < perm.size(); ++i)
        for (size_t j = i + 1; ok && j < perm.size(); ++j)
          if (interval_precedes(iv, perm[j], perm[i])) ok = false;
      if (ok) out.orders.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return out;
}

}  // namespace oracle_detail

// Exact worst case for a binary leader set by enumerating every realizable
// follower order.
inline AdversaryOutcome oracle_adversary(const Instance& inst, const UncertaintySet& U,
                                         const ItemSet& X,
                                         const OracleBudget& budget) {
  auto ro = oracle_detail::realizable_orders(inst, U, budget);
  int bf = inst.capacity - static_cast<int>(X.size());
  if (bf < 0) throw InfeasibleError("leader set larger than capacity");
  bool have = false;
  AdversaryOutcome best;
  for (size_t i = 0; i < ro.orders.size(); ++i) {
    ItemSet Y;
    for (ItemId e : ro.orders[i]) {
      if (static_cast<int>(Y.size()) == bf) break;
      if (!set_contains(X, e)) Y.push_back(e);
    }
    if (static_cast<int>(Y.size()) < bf)
      throw InfeasibleError("follower cannot complete the selection");
    std::sort(Y.begin(), Y.end());
    Rational v = leader_value(inst, X, Y);
    if (!have || v > best.value) {
      best.value = std::move(v);
      best.follower_set = std::move(Y);
      if (i < ro.scenarios.size()) best.scenario = ro.scenarios[i];
      have = true;
    }
  }
  if (!have) {
    if (bf == 0) {
      best.value = leader_value(inst, X, {});
      return best;
    }
    throw InfeasibleError("no realizable follower order");
  }
  return best;
}

// Continuous counterpart: worst fractional prefix over realizable orders.
inline AdversaryOutcome oracle_adversary_continuous(
    const Instance& inst, const UncertaintySet& U, const std::map<ItemId, Rational>& x,
    const OracleBudget& budget) {
  Rational bf = Rational(inst.capacity);
  Rational cx = 0;
  for (const auto& [e, w] : x) {
    bf -= w;
    cx += w * cost_at(inst.leader_cost, e, "leader cost");
  }
  if (bf < 0 || bf > Rational(inst.n_f()))
    throw InfeasibleError("follower share out of range");
  auto ro = oracle_detail::realizable_orders(inst, U, budget);
  bool have = false;
  AdversaryOutcome best;
  for (size_t i = 0; i < ro.orders.size(); ++i) {
    std::map<ItemId, Rational> y;
    Rational left = bf;
    Rational v = cx;
    for (ItemId e : ro.orders[i]) {
      if (left == 0) break;
      Rational take = std::min(left, Rational(1));
      y[e] = take;
      v += take * cost_at(inst.leader_cost, e, "leader cost");
      left -= take;
    }
    if (!have || v > best.value) {
      best.value = std::move(v);
      best.follower_vector = std::move(y);
      if (i < ro.scenarios.size()) best.scenario = ro.scenarios[i];
      have = true;
    }
  }
  if (!have) {
    best.value = cx;  // no follower items and bf = 0
  }
  return best;
}

// Literal min-max by enumerating every feasible leader subset.
inline RobustSolution oracle_rbsp(const Instance& inst, const UncertaintySet& U,
                                  const OracleBudget& budget) {
  validate_instance(inst);
  int nl = inst.n_l();
  if (nl > budget.max_items)
    throw BudgetExceededError("leader set exceeds oracle item budget");
  long total = 1L << nl;
  if (total > budget.max_subsets)
    throw BudgetExceededError("leader subset count exceeds oracle budget");
  auto ro = oracle_detail::realizable_orders(inst, U, budget);
  bool have = false;
  RobustSolution best;
  for (long mask = 0; mask < total; ++mask) {
    int xc = std::popcount(static_cast<unsigned long>(mask));
    if (xc > inst.capacity) continue;
    ItemSet X;
    for (int i = 0; i < nl; ++i)
      if (mask >> i & 1) X.push_back(inst.leader_items[i]);
    int bf = inst.capacity - xc;
    bool worst_have = false;
    Rational worst;
    ItemSet worst_Y;
    size_t worst_idx = 0;
    bool infeasible = false;
    for (size_t i = 0; i < ro.orders.size(); ++i) {
      ItemSet Y;
      for (ItemId e : ro.orders[i]) {
        if (static_cast<int>(Y.size()) == bf) break;
        if (!set_contains(X, e)) Y.push_back(e);
      }
      if (static_cast<int>(Y.size()) < bf) {
        infeasible = true;
        break;
      }
      std::sort(Y.begin(), Y.end());
      Rational v = leader_value(inst, X, Y);
      if (!worst_have || v > worst) {
        worst = std::move(v);
        worst_Y = std::move(Y);
        worst_idx = i;
        worst_have = true;
      }
    }
    if (infeasible) continue;
    if (!worst_have) {
      if (bf != 0) continue;
      worst = leader_value(inst, X, {});
      worst_have = true;
    }
    if (!have || worst < best.worst_value) {
      best.leader_set = std::move(X);
      best.leader_count = xc;
      best.worst_value = std::move(worst);
      best.worst_follower_set = std::move(worst_Y);
      if (worst_idx < ro.scenarios.size()) best.worst_scenario = ro.scenarios[worst_idx];
      have = true;
    }
  }
  if (!have) throw InfeasibleError("no feasible leader subset");
  return best;
}

// Samples of the continuous leader objective: greedy leader prefix cost
// plus the continuous adversary optimum at the matching follower share.
inline std::vector<std::pair<Rational, Rational>> oracle_plf(
    const Instance& inst, const UncertaintySet& U,
    const std::vector<Rational>& sample_points, const OracleBudget& budget) {
  int b = inst.capacity;
  Rational lo = rat(std::max(0, b - inst.n_f()));
  Rational hi = rat(std::min(b, inst.n_l()));
  std::vector<std::pair<Rational, Rational>> out;
  for (const Rational& bl : sample_points) {
    if (bl < lo || bl > hi)
      throw ValidationError("sample point " + rat_str(bl) + " outside [" +
                            rat_str(lo) + ", " + rat_str(hi) + "]");
    auto x = solve_continuous_selection(inst.leader_items, bl, inst.leader_cost);
    AdversaryOutcome adv = oracle_adversary_continuous(inst, U, x, budget);
    out.emplace_back(bl, adv.value);
  }
  return out;
}

// Product-scenario reference for the knapsack variant: the adversary
// minimizes the leader's value of the follower's greedy fill.
inline KnapsackAdversaryOutcome oracle_knapsack_adversary(const KnapsackInstance& k,
                                                          const Rational& b,
                                                          const OracleBudget& budget) {
  validate_knapsack(k);
  if (oracle_detail::count_product(k.uncertainty, k.items, budget.max_scenarios) >
      budget.max_scenarios)
    throw BudgetExceededError("scenario product exceeds oracle budget");
  bool have = false;
  KnapsackAdversaryOutcome best;
  Scenario d;
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == k.items.size()) {
      auto y = follower_continuous_knapsack(k.items, k.size, d.follower_cost, b);
      Rational v = 0;
      for (const auto& [e, w] : y) v += w * cost_at(k.leader_value, e, "leader value");
      if (!have || v < best.value) {
        best.value = std::move(v);
        best.follower_vector = std::move(y);
        best.scenario = d;
        have = true;
      }
      return;
    }
    ItemId e = k.items[i];
    for (const Rational& val : k.uncertainty.values.at(e)) {
      d.follower_cost[e] = val;
      rec(i + 1);
    }
  };
  rec(0);
  if (!have) throw InfeasibleError("empty scenario product");
  return best;
}

}  // namespace bilevel

#endif  // BILEVEL_ORACLE_HPP
