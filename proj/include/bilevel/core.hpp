#ifndef BILEVEL_CORE_HPP
#define BILEVEL_CORE_HPP

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bilevel/errors.hpp"
#include "bilevel/rational.hpp"

namespace bilevel {

using ItemId = int;
using ItemSet = std::vector<ItemId>;  // sorted, unique
using CostMap = std::map<ItemId, Rational>;

enum class Policy { Optimistic, Pessimistic };

// Follower cost function d, total on the follower item set.
struct Scenario {
  CostMap follower_cost;
};

// A selection instance: the leader owns E_l, the follower completes the
// selection from E_f, the joint solution has exactly b items. Leader costs
// c are defined on the whole universe E_l u E_f.
struct Instance {
  ItemSet leader_items;
  ItemSet follower_items;
  int capacity = 0;
  CostMap leader_cost;
  Policy policy = Policy::Pessimistic;

  int n_l() const { return static_cast<int>(leader_items.size()); }
  int n_f() const { return static_cast<int>(follower_items.size()); }

  ItemSet universe() const {
    ItemSet u;
    std::set_union(leader_items.begin(), leader_items.end(), follower_items.begin(),
                   follower_items.end(), std::back_inserter(u));
    return u;
  }
  int n() const { return static_cast<int>(universe().size()); }
};

struct DiscreteU {
  std::vector<Scenario> scenarios;
};

struct IntervalU {
  CostMap lo;  // d-
  CostMap hi;  // d+
};

struct DiscreteUncorrelatedU {
  std::map<ItemId, std::vector<Rational>> values;  // each sorted ascending, unique

  int total_values() const {
    int u = 0;
    for (const auto& [id, vs] : values) u += static_cast<int>(vs.size());
    return u;
  }
};

using UncertaintySet = std::variant<DiscreteU, IntervalU, DiscreteUncorrelatedU>;

inline bool set_contains(const ItemSet& items, ItemId e) {
  return std::binary_search(items.begin(), items.end(), e);
}

inline ItemSet set_difference(const ItemSet& a, const ItemSet& b) {
  ItemSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline const Rational& cost_at(const CostMap& cost, ItemId e, const char* what) {
  auto it = cost.find(e);
  if (it == cost.end())
    throw ValidationError(std::string("missing ") + what + " entry for item " +
                          std::to_string(e));
  return it->second;
}

inline Rational total_cost(const CostMap& cost, const ItemSet& items) {
  Rational sum = 0;
  for (ItemId e : items) sum += cost_at(cost, e, "cost");
  return sum;
}

inline void validate_instance(const Instance& inst) {
  auto check_sorted = [](const ItemSet& s, const char* name) {
    for (size_t i = 0; i < s.size(); ++i) {
      if (s[i] < 0) throw ValidationError(std::string(name) + ": negative item id");
      if (i > 0 && s[i] <= s[i - 1])
        throw ValidationError(std::string(name) + ": item ids not strictly increasing");
    }
  };
  check_sorted(inst.leader_items, "leader_items");
  check_sorted(inst.follower_items, "follower_items");
  if (inst.capacity < 0 || inst.capacity > inst.n())
    throw ValidationError("capacity exceeds universe");
  for (ItemId e : inst.universe()) cost_at(inst.leader_cost, e, "leader cost");
}

// Items sorted by primary ascending, ties by secondary (ascending when
// Optimistic, descending when Pessimistic), remaining ties by id.
struct GreedyOrder {
  std::vector<ItemId> sequence;
};

inline GreedyOrder greedy_order(const ItemSet& items, const CostMap& primary,
                                const CostMap& secondary, Policy policy) {
  for (ItemId e : items) {
    cost_at(primary, e, "primary cost");
    cost_at(secondary, e, "secondary cost");
  }
  GreedyOrder order;
  order.sequence = items;
  std::sort(order.sequence.begin(), order.sequence.end(),
            [&](ItemId a, ItemId b) {
              const Rational& pa = primary.at(a);
              const Rational& pb = primary.at(b);
              if (pa != pb) return pa < pb;
              const Rational& sa = secondary.at(a);
              const Rational& sb = secondary.at(b);
              if (sa != sb)
                return policy == Policy::Optimistic ? sa < sb : sa > sb;
              return a < b;
            });
  return order;
}

// Greedy order with id-only tie-breaking.
inline GreedyOrder greedy_order(const ItemSet& items, const CostMap& primary) {
  CostMap zero;
  for (ItemId e : items) zero[e] = 0;
  return greedy_order(items, primary, zero, Policy::Optimistic);
}

// Cheapest `count`-subset: the first `count` items of the greedy order.
inline ItemSet solve_selection(const ItemSet& items, int count, const CostMap& cost,
                               const CostMap& secondary, Policy policy) {
  if (count < 0 || count > static_cast<int>(items.size()))
    throw InfeasibleError("selection count " + std::to_string(count) +
                          " out of range for " + std::to_string(items.size()) +
                          " items");
  GreedyOrder order = greedy_order(items, cost, secondary, policy);
  ItemSet chosen(order.sequence.begin(), order.sequence.begin() + count);
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

inline ItemSet solve_selection(const ItemSet& items, int count, const CostMap& cost) {
  CostMap zero;
  for (ItemId e : items) zero[e] = 0;
  return solve_selection(items, count, cost, zero, Policy::Optimistic);
}

// Fractional prefix of the greedy order: floor(amount) items at 1, the next
// item at the leftover fraction, everything else at 0.
inline std::map<ItemId, Rational> solve_continuous_selection(
    const ItemSet& items, const Rational& amount, const CostMap& cost,
    const CostMap& secondary, Policy policy) {
  if (amount < 0 || amount > Rational(static_cast<long>(items.size())))
    throw InfeasibleError("continuous selection amount " + rat_str(amount) +
                          " out of range for " + std::to_string(items.size()) +
                          " items");
  GreedyOrder order = greedy_order(items, cost, secondary, policy);
  std::map<ItemId, Rational> x;
  Rational whole = rat_floor(amount);
  Rational frac = amount - whole;
  long k = whole.get_num().get_si();
  for (long i = 0; i < k; ++i) x[order.sequence[i]] = 1;
  if (frac > 0) x[order.sequence[k]] = frac;
  return x;
}

inline std::map<ItemId, Rational> solve_continuous_selection(const ItemSet& items,
                                                             const Rational& amount,
                                                             const CostMap& cost) {
  CostMap zero;
  for (ItemId e : items) zero[e] = 0;
  return solve_continuous_selection(items, amount, cost, zero, Policy::Optimistic);
}

// The follower's optimal completion: the first b - |X| items of the greedy
// order of E_f \ X under d (ties by leader cost per policy, then by id).
inline ItemSet follower_respond(const Instance& inst, const ItemSet& X,
                                const Scenario& d) {
  for (ItemId e : X)
    if (!set_contains(inst.leader_items, e))
      throw ValidationError("leader set contains non-leader item " + std::to_string(e));
  ItemSet pool = set_difference(inst.follower_items, X);
  int need = inst.capacity - static_cast<int>(X.size());
  if (need < 0)
    throw InfeasibleError("leader set larger than capacity by " +
                          std::to_string(-need));
  if (need > static_cast<int>(pool.size()))
    throw InfeasibleError("follower cannot complete: needs " + std::to_string(need) +
                          " items but only " + std::to_string(pool.size()) +
                          " remain");
  GreedyOrder order = greedy_order(pool, d.follower_cost, inst.leader_cost, inst.policy);
  ItemSet Y(order.sequence.begin(), order.sequence.begin() + need);
  std::sort(Y.begin(), Y.end());
  return Y;
}

// Leader objective c(X u Y).
inline Rational leader_value(const Instance& inst, const ItemSet& X, const ItemSet& Y) {
  return total_cost(inst.leader_cost, X) + total_cost(inst.leader_cost, Y);
}

namespace detail {

// Sentinel base: one more than the largest follower cost seen anywhere in
// the payload, so appended items always sort strictly last.
inline Rational sentinel_base(const std::vector<const CostMap*>& maps) {
  Rational best = 0;
  bool any = false;
  for (const CostMap* m : maps)
    for (const auto& [id, v] : *m)
      if (!any || v > best) {
        best = v;
        any = true;
      }
  return best + 1;
}

}  // namespace detail

// Transform to an equivalent instance with E_l a subset of E_f: items of
// E_l \ E_f join E_f with follower costs strictly above everything existing,
// so the follower touches them only when forced.
inline std::pair<Instance, Scenario> normalize_subset(const Instance& inst,
                                                      const Scenario& d) {
  Instance out = inst;
  Scenario nd = d;
  ItemSet extra = set_difference(inst.leader_items, inst.follower_items);
  if (extra.empty()) return {out, nd};
  Rational m = detail::sentinel_base({&d.follower_cost});
  for (ItemId e : extra) nd.follower_cost[e] = m;
  ItemSet nf;
  std::set_union(inst.follower_items.begin(), inst.follower_items.end(), extra.begin(),
                 extra.end(), std::back_inserter(nf));
  out.follower_items = std::move(nf);
  return {out, nd};
}

inline std::pair<Instance, UncertaintySet> normalize_subset(const Instance& inst,
                                                            const UncertaintySet& U) {
  Instance out = inst;
  UncertaintySet nu = U;
  ItemSet extra = set_difference(inst.leader_items, inst.follower_items);
  if (extra.empty()) return {out, nu};
  if (auto* du = std::get_if<DiscreteU>(&nu)) {
    std::vector<const CostMap*> maps;
    for (const Scenario& s : du->scenarios) maps.push_back(&s.follower_cost);
    Rational m = detail::sentinel_base(maps);
    for (Scenario& s : du->scenarios)
      for (ItemId e : extra) s.follower_cost[e] = m;
  } else if (auto* iv = std::get_if<IntervalU>(&nu)) {
    // Distinct degenerate sentinels: equal points would be one-point
    // intersections, which the optimistic policy rejects.
    Rational m = detail::sentinel_base({&iv->lo, &iv->hi});
    for (ItemId e : extra) {
      iv->lo[e] = m;
      iv->hi[e] = m;
      m += 1;
    }
  } else {
    auto& duu = std::get<DiscreteUncorrelatedU>(nu);
    std::vector<CostMap> hulls(1);
    for (const auto& [id, vs] : duu.values)
      for (const Rational& v : vs)
        if (hulls[0].find(id) == hulls[0].end() || v > hulls[0][id]) hulls[0][id] = v;
    Rational m = detail::sentinel_base({&hulls[0]});
    for (ItemId e : extra) {
      duu.values[e] = {m};
      m += 1;
    }
  }
  ItemSet nf;
  std::set_union(inst.follower_items.begin(), inst.follower_items.end(), extra.begin(),
                 extra.end(), std::back_inserter(nf));
  out.follower_items = std::move(nf);
  return {out, nu};
}

}  // namespace bilevel

#endif  // BILEVEL_CORE_HPP
