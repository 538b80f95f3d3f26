#ifndef BILEVEL_LEADER_BINARY_HPP
#define BILEVEL_LEADER_BINARY_HPP

#include <algorithm>
#include <bit>
#include <functional>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "bilevel/adversary.hpp"
#include "bilevel/bsp.hpp"
#include "bilevel/core.hpp"

namespace bilevel {

struct RobustSolution {
  ItemSet leader_set;
  Scenario worst_scenario;
  ItemSet worst_follower_set;
  Rational worst_value;
  int leader_count = 0;
  std::vector<Rational> per_scenario_values;  // discrete uncertainty only
};

struct OracleBudget {
  int max_items = 12;
  long max_scenarios = 100000;
  long max_subsets = 100000;
};

namespace detail {

inline void fill_per_scenario(const Instance& inst, const UncertaintySet& U,
                              RobustSolution& sol) {
  if (const auto* du = std::get_if<DiscreteU>(&U)) {
    sol.per_scenario_values.clear();
    for (const Scenario& d : du->scenarios) {
      ItemSet Y = follower_respond(inst, sol.leader_set, d);
      sol.per_scenario_values.push_back(leader_value(inst, sol.leader_set, Y));
    }
  }
}

// Per-head tables for the interval adversary on a fixed follower pool,
// reusable across every capacity split.
struct IntervalHeadTables {
  struct Head {
    ItemId id;
    int below_count;
    Rational below_cost;
    std::vector<Rational> fill_prefix;  // best k-item fill cost from the spanning set
  };
  std::vector<Head> heads;

  // Highest follower cost reachable with exactly bf items, or nullopt.
  std::optional<Rational> worst(int bf) const {
    std::optional<Rational> best;
    for (const Head& h : heads) {
      int need = bf - h.below_count;
      if (need < 0 || need >= static_cast<int>(h.fill_prefix.size())) continue;
      Rational v = h.below_cost + h.fill_prefix[need];
      if (!best || v > *best) best = v;
    }
    return best;
  }
};

inline IntervalHeadTables interval_tables(const ItemSet& pool, const IntervalU& U,
                                          const CostMap& c) {
  IntervalHeadTables t;
  for (ItemId head : pool) {
    IntervalHeadTables::Head h;
    h.id = head;
    h.below_count = 0;
    h.below_cost = 0;
    const Rational& ref = cost_at(U.lo, head, "interval lo");
    std::vector<std::pair<Rational, ItemId>> spanning;
    for (ItemId e : pool) {
      if (cost_at(U.hi, e, "interval hi") < ref) {
        ++h.below_count;
        h.below_cost += cost_at(c, e, "leader cost");
      } else if (cost_at(U.lo, e, "interval lo") <= ref &&
                 ref <= cost_at(U.hi, e, "interval hi")) {
        spanning.emplace_back(-cost_at(c, e, "leader cost"), e);
      }
    }
    std::sort(spanning.begin(), spanning.end());
    h.fill_prefix.resize(spanning.size() + 1);
    h.fill_prefix[0] = 0;
    for (size_t k = 0; k < spanning.size(); ++k)
      h.fill_prefix[k + 1] = h.fill_prefix[k] - spanning[k].first;
    t.heads.push_back(std::move(h));
  }
  return t;
}

}  // namespace detail

// Polynomial solver for disjoint item sets: only the size of the greedy
// leader prefix matters, so enumerate it and query the adversary per size.
inline RobustSolution solve_disjoint(const Instance& inst, const UncertaintySet& U) {
  validate_instance(inst);
  ItemSet overlap;
  std::set_intersection(inst.leader_items.begin(), inst.leader_items.end(),
                        inst.follower_items.begin(), inst.follower_items.end(),
                        std::back_inserter(overlap));
  if (!overlap.empty())
    throw WrongVariantError(
        "solve_disjoint requires disjoint item sets; use approx2 or exact_enumerate");

  int b = inst.capacity;
  int lo = std::max(0, b - inst.n_f());
  int hi = std::min(b, inst.n_l());
  GreedyOrder pl = greedy_order(inst.leader_items, inst.leader_cost);
  std::vector<Rational> leader_prefix(hi + 1);
  leader_prefix[0] = 0;
  for (int k = 0; k < hi; ++k)
    leader_prefix[k + 1] =
        leader_prefix[k] + cost_at(inst.leader_cost, pl.sequence[k], "leader cost");

  // Worst follower cost as a function of the follower's share only.
  std::function<Rational(int)> worst_follower;
  const IntervalU* iv = std::get_if<IntervalU>(&U);
  IntervalU hull;
  if (const auto* du = std::get_if<DiscreteUncorrelatedU>(&U)) {
    hull = du_to_interval(*du);
    iv = &hull;
  }
  detail::IntervalHeadTables tables;
  std::vector<std::vector<Rational>> scenario_prefix;
  if (iv != nullptr) {
    detail::check_interval(*iv);
    detail::check_one_point(inst, *iv);
    tables = detail::interval_tables(inst.follower_items, *iv, inst.leader_cost);
    worst_follower = [&](int bf) -> Rational {
      if (bf == 0) return 0;
      auto v = tables.worst(bf);
      if (!v) throw InfeasibleError("no admissible follower prefix");
      return *v;
    };
  } else {
    const auto& dsc = std::get<DiscreteU>(U);
    if (dsc.scenarios.empty())
      throw ValidationError("discrete uncertainty set is empty");
    for (const Scenario& d : dsc.scenarios) {
      GreedyOrder pf = greedy_order(inst.follower_items, d.follower_cost,
                                    inst.leader_cost, inst.policy);
      std::vector<Rational> pre(inst.n_f() + 1);
      pre[0] = 0;
      for (int k = 0; k < inst.n_f(); ++k)
        pre[k + 1] =
            pre[k] + cost_at(inst.leader_cost, pf.sequence[k], "leader cost");
      scenario_prefix.push_back(std::move(pre));
    }
    worst_follower = [&](int bf) -> Rational {
      Rational best = scenario_prefix[0][bf];
      for (size_t i = 1; i < scenario_prefix.size(); ++i)
        best = std::max(best, scenario_prefix[i][bf]);
      return best;
    };
  }

  bool have = false;
  int best_bl = lo;
  Rational best_value;
  for (int bl = lo; bl <= hi; ++bl) {
    Rational v = leader_prefix[bl] + worst_follower(b - bl);
    if (!have || v < best_value) {
      best_value = std::move(v);
      best_bl = bl;
      have = true;
    }
  }
  if (!have) throw InfeasibleError("capacity cannot be split between the two sides");

  RobustSolution sol;
  sol.leader_count = best_bl;
  sol.leader_set.assign(pl.sequence.begin(), pl.sequence.begin() + best_bl);
  std::sort(sol.leader_set.begin(), sol.leader_set.end());
  AdversaryOutcome out = adversary(inst, U, sol.leader_set);
  sol.worst_scenario = out.scenario;
  sol.worst_follower_set = out.follower_set;
  sol.worst_value = out.value;
  detail::fill_per_scenario(inst, U, sol);
  return sol;
}

// Factor-2 approximation for arbitrary item sets and nonnegative leader
// costs: run the disjoint-style prefix enumeration on the normalized
// (E_l inside E_f) instance.
inline RobustSolution approx2(const Instance& inst, const UncertaintySet& U) {
  validate_instance(inst);
  for (const auto& [e, v] : inst.leader_cost)
    if (v < 0)
      throw ValidationError("approx2 requires nonnegative leader costs (item " +
                            std::to_string(e) + " has cost " + rat_str(v) + ")");
  auto [ninst, nu] = normalize_subset(inst, U);
  int b = ninst.capacity;
  int hi = std::min(b, ninst.n_l());
  GreedyOrder pl = greedy_order(ninst.leader_items, ninst.leader_cost);
  bool have = false;
  RobustSolution best;
  for (int bl = 0; bl <= hi; ++bl) {
    ItemSet X(pl.sequence.begin(), pl.sequence.begin() + bl);
    std::sort(X.begin(), X.end());
    AdversaryOutcome out = adversary(ninst, nu, X);
    if (!have || out.value < best.worst_value) {
      best.leader_set = std::move(X);
      best.leader_count = bl;
      best.worst_scenario = out.scenario;
      best.worst_follower_set = out.follower_set;
      best.worst_value = out.value;
      have = true;
    }
  }
  detail::fill_per_scenario(ninst, nu, best);
  return best;
}

// Exact optimum by enumerating every leader subset in colexicographic
// order (bitmask order over the sorted item list); first optimum wins.
inline RobustSolution exact_enumerate(const Instance& inst, const UncertaintySet& U,
                                      const std::optional<OracleBudget>& budget = {}) {
  validate_instance(inst);
  int nl = inst.n_l();
  if (nl > 62) throw ValidationError("leader set too large to enumerate");
  long total = 1L << nl;
  if (budget && total > budget->max_subsets)
    throw BudgetExceededError("leader subset enumeration needs " +
                              std::to_string(total) + " subsets, budget allows " +
                              std::to_string(budget->max_subsets));
  bool have = false;
  RobustSolution best;
  for (long mask = 0; mask < total; ++mask) {
    if (std::popcount(static_cast<unsigned long>(mask)) > inst.capacity) continue;
    ItemSet X;
    for (int i = 0; i < nl; ++i)
      if (mask >> i & 1) X.push_back(inst.leader_items[i]);
    ItemSet pool = set_difference(inst.follower_items, X);
    if (inst.capacity - static_cast<int>(X.size()) > static_cast<int>(pool.size()))
      continue;
    AdversaryOutcome out = adversary(inst, U, X);
    if (!have || out.value < best.worst_value) {
      best.leader_set = std::move(X);
      best.leader_count = static_cast<int>(best.leader_set.size());
      best.worst_scenario = out.scenario;
      best.worst_follower_set = out.follower_set;
      best.worst_value = out.value;
      have = true;
    }
  }
  if (!have) throw InfeasibleError("no feasible leader subset");
  detail::fill_per_scenario(inst, U, best);
  return best;
}

// Exact solver polynomial for fixed |U| (discrete uncertainty): guess one
// greedy-order prefix per scenario, then how many leader items to place in
// each cell of the prefix-membership partition.
inline RobustSolution exact_prefix_xp(const Instance& inst, const UncertaintySet& U) {
  validate_instance(inst);
  const auto* dsc = std::get_if<DiscreteU>(&U);
  if (dsc == nullptr)
    throw WrongVariantError("exact_prefix_xp requires discrete uncertainty");
  auto [ninst, nu] = normalize_subset(inst, U);
  const auto& scen = std::get<DiscreteU>(nu).scenarios;
  int s = static_cast<int>(scen.size());
  if (s == 0) throw ValidationError("discrete uncertainty set is empty");
  if (s > 10) throw ValidationError("too many scenarios for prefix enumeration");
  int b = ninst.capacity;
  int nf = ninst.n_f();

  std::vector<std::vector<ItemId>> order(s);
  std::vector<std::vector<Rational>> order_prefix(s);
  for (int i = 0; i < s; ++i) {
    order[i] = greedy_order(ninst.follower_items, scen[i].follower_cost,
                            ninst.leader_cost, ninst.policy)
                   .sequence;
    order_prefix[i].resize(nf + 1);
    order_prefix[i][0] = 0;
    for (int k = 0; k < nf; ++k)
      order_prefix[i][k + 1] =
          order_prefix[i][k] +
          cost_at(ninst.leader_cost, order[i][k], "leader cost");
  }

  int kmax = std::min(b, nf);
  int num_masks = 1 << s;
  bool have = false;
  Rational best_value;
  ItemSet best_X;

  std::vector<int> prefix_size(s, 0);
  std::function<void(int)> enum_prefixes = [&](int depth) {
    if (depth < s) {
      for (int k = 0; k <= kmax; ++k) {
        prefix_size[depth] = k;
        enum_prefixes(depth + 1);
      }
      return;
    }
    // Partition leader items by the set of scenarios whose prefix misses them.
    std::vector<std::vector<ItemId>> cells(num_masks);
    for (ItemId e : ninst.leader_items) {
      int mask = 0;
      for (int i = 0; i < s; ++i) {
        bool inside = false;
        for (int k = 0; k < prefix_size[i]; ++k)
          if (order[i][k] == e) {
            inside = true;
            break;
          }
        if (!inside) mask |= 1 << i;
      }
      cells[mask].push_back(e);
    }
    // Cheapest-first cost within each cell.
    std::vector<std::vector<Rational>> cell_prefix(num_masks);
    for (int m = 1; m < num_masks; ++m) {
      ItemSet sorted_cell = cells[m];
      std::sort(sorted_cell.begin(), sorted_cell.end(), [&](ItemId a, ItemId b2) {
        const Rational& ca = ninst.leader_cost.at(a);
        const Rational& cb = ninst.leader_cost.at(b2);
        if (ca != cb) return ca < cb;
        return a < b2;
      });
      cells[m] = sorted_cell;
      cell_prefix[m].resize(sorted_cell.size() + 1);
      cell_prefix[m][0] = 0;
      for (size_t k = 0; k < sorted_cell.size(); ++k)
        cell_prefix[m][k + 1] =
            cell_prefix[m][k] +
            cost_at(ninst.leader_cost, sorted_cell[k], "leader cost");
    }
    std::vector<int> need(s);
    for (int i = 0; i < s; ++i) {
      need[i] = b - prefix_size[i];
      if (need[i] < 0) return;
    }
    // Choose counts per nonempty cell subject to the per-scenario sums.
    std::vector<int> counts(num_masks, 0);
    std::vector<int> remaining = need;
    std::function<void(int)> enum_counts = [&](int mask) {
      if (mask == num_masks) {
        for (int i = 0; i < s; ++i)
          if (remaining[i] != 0) return;
        Rational value;
        bool first = true;
        for (int i = 0; i < s; ++i) {
          Rational v = order_prefix[i][prefix_size[i]];
          for (int m = 1; m < num_masks; ++m)
            if (m >> i & 1) v += cell_prefix[m][counts[m]];
          if (first || v > value) {
            value = std::move(v);
            first = false;
          }
        }
        if (!have || value < best_value) {
          best_value = std::move(value);
          best_X.clear();
          for (int m = 1; m < num_masks; ++m)
            for (int k = 0; k < counts[m]; ++k) best_X.push_back(cells[m][k]);
          std::sort(best_X.begin(), best_X.end());
          have = true;
        }
        return;
      }
      int cap = static_cast<int>(cells[mask].size());
      for (int i = 0; i < s; ++i)
        if (mask >> i & 1) cap = std::min(cap, remaining[i]);
      for (int cnt = 0; cnt <= cap; ++cnt) {
        counts[mask] = cnt;
        for (int i = 0; i < s; ++i)
          if (mask >> i & 1) remaining[i] -= cnt;
        enum_counts(mask + 1);
        for (int i = 0; i < s; ++i)
          if (mask >> i & 1) remaining[i] += cnt;
      }
      counts[mask] = 0;
    };
    enum_counts(1);
  };
  enum_prefixes(0);
  if (!have) throw InfeasibleError("no feasible prefix combination");

  RobustSolution sol;
  sol.leader_set = best_X;
  sol.leader_count = static_cast<int>(best_X.size());
  AdversaryOutcome out = adversary(ninst, nu, best_X);
  sol.worst_scenario = out.scenario;
  sol.worst_follower_set = out.follower_set;
  sol.worst_value = best_value;
  detail::fill_per_scenario(ninst, nu, sol);
  return sol;
}

struct Graph {
  int vertex_count = 0;
  std::vector<std::pair<int, int>> edges;  // 1-based vertex labels
};

// Hardness-family generator: robust instances whose optimal leader sets are
// exactly the minimum vertex covers of the input graph, with objective
// value |X| + n. Vertices v_1..v_n map to ids 0..n-1 and the auxiliary
// items h_1..h_{n+3} to ids n..2n+2. One scenario per edge puts the
// expensive item h_{n+3} just within the follower's reach unless the edge
// is covered; a final scenario makes the follower grab h_{n+3} always.
inline std::pair<Instance, DiscreteU> reduce_vertex_cover(const Graph& g) {
  int n = g.vertex_count;
  if (n < 1) throw ValidationError("graph must have at least one vertex");
  for (auto [a, bb] : g.edges)
    if (a < 1 || a > n || bb < 1 || bb > n || a == bb)
      throw ValidationError("invalid edge in graph");
  Instance inst;
  inst.policy = Policy::Pessimistic;
  inst.capacity = n + 1;
  for (int i = 0; i < n; ++i) inst.leader_items.push_back(i);
  for (int i = 0; i < 2 * n + 3; ++i) inst.follower_items.push_back(i);
  for (int i = 0; i < n; ++i) inst.leader_cost[i] = 1;          // vertices
  for (int j = 1; j <= n; ++j) inst.leader_cost[n + j - 1] = 0;  // h_1..h_n
  inst.leader_cost[2 * n] = 1;                                   // h_{n+1}
  inst.leader_cost[2 * n + 1] = 1;                               // h_{n+2}
  inst.leader_cost[2 * n + 2] = n;                               // h_{n+3}

  DiscreteU U;
  auto make_scenario = [&](const std::vector<ItemId>& front) {
    Scenario d;
    int pos = 1;
    for (ItemId e : front) d.follower_cost[e] = pos++;
    for (ItemId e : inst.follower_items)
      if (d.follower_cost.find(e) == d.follower_cost.end())
        d.follower_cost[e] = pos++;
    return d;
  };
  for (auto [a, bb] : g.edges) {
    std::vector<ItemId> front = {2 * n, 2 * n + 1};  // h_{n+1}, h_{n+2}
    for (int v = 1; v <= n; ++v)
      if (v != a && v != bb) front.push_back(v - 1);
    front.push_back(2 * n + 2);  // h_{n+3}
    U.scenarios.push_back(make_scenario(front));
  }
  std::vector<ItemId> last = {2 * n + 2};  // h_{n+3}
  for (int j = 1; j <= n; ++j) last.push_back(n + j - 1);
  U.scenarios.push_back(make_scenario(last));
  return {inst, U};
}

}  // namespace bilevel

#endif  // BILEVEL_LEADER_BINARY_HPP
