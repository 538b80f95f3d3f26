#ifndef BILEVEL_KNAPSACK_HPP
#define BILEVEL_KNAPSACK_HPP

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "bilevel/core.hpp"
#include "bilevel/plf.hpp"

namespace bilevel {

// Robust bilevel continuous knapsack data (max-min orientation): the leader
// picks the capacity b in [lo, hi], the follower fills a continuous
// knapsack maximizing his own value d, the adversary picks d from the
// per-item value sets to minimize the leader's value of the fill.
struct KnapsackInstance {
  ItemSet items;
  std::map<ItemId, long> size;          // a, positive integers
  CostMap leader_value;                  // c
  Rational capacity_lo;                  // b-
  Rational capacity_hi;                  // b+
  DiscreteUncorrelatedU uncertainty;     // U_e, positive rationals

  long total_size() const {
    long A = 0;
    for (const auto& [e, a] : size) A += a;
    return A;
  }
};

inline void validate_knapsack(const KnapsackInstance& k) {
  for (size_t i = 0; i < k.items.size(); ++i) {
    if (k.items[i] < 0) throw ValidationError("negative item id");
    if (i > 0 && k.items[i] <= k.items[i - 1])
      throw ValidationError("item ids not strictly increasing");
  }
  for (ItemId e : k.items) {
    auto it = k.size.find(e);
    if (it == k.size.end())
      throw ValidationError("missing size for item " + std::to_string(e));
    if (it->second <= 0)
      throw ValidationError("item " + std::to_string(e) +
                            " has non-positive size (zero-size items are rejected)");
    cost_at(k.leader_value, e, "leader value");
    auto vt = k.uncertainty.values.find(e);
    if (vt == k.uncertainty.values.end() || vt->second.empty())
      throw ValidationError("missing value set for item " + std::to_string(e));
    for (size_t i = 0; i < vt->second.size(); ++i) {
      if (vt->second[i] <= 0)
        throw ValidationError("follower values must be positive (item " +
                              std::to_string(e) + ")");
      if (i > 0 && vt->second[i] <= vt->second[i - 1])
        throw ValidationError("value set not strictly increasing at item " +
                              std::to_string(e));
    }
  }
  if (k.capacity_lo < 0 || k.capacity_lo > k.capacity_hi ||
      k.capacity_hi > Rational(k.total_size()))
    throw ValidationError("capacity range outside [0, a(E)]");
}

// Max-value subsets of exact total size, one DP table for all targets.
class EqualityKnapsackTable {
 public:
  EqualityKnapsackTable(const ItemSet& items, const std::map<ItemId, long>& size,
                        const CostMap& value)
      : items_(items), size_(&size) {
    long total = 0;
    for (ItemId e : items) total += size.at(e);
    // best_[i][s]: max value using a subset of the first i items with size s.
    best_.assign(items.size() + 1,
                 std::vector<std::optional<Rational>>(total + 1));
    best_[0][0] = Rational(0);
    for (size_t i = 0; i < items.size(); ++i) {
      long a = size.at(items[i]);
      const Rational& c = cost_at(value, items[i], "item value");
      for (long s = 0; s <= total; ++s) {
        best_[i + 1][s] = best_[i][s];
        if (s >= a && best_[i][s - a]) {
          Rational cand = *best_[i][s - a] + c;
          if (!best_[i + 1][s] || cand > *best_[i + 1][s]) best_[i + 1][s] = cand;
        }
      }
    }
  }

  long max_target() const { return static_cast<long>(best_[0].size()) - 1; }

  std::optional<Rational> value(long target) const {
    if (target < 0 || target > max_target()) return std::nullopt;
    return best_[items_.size()][target];
  }

  // Reconstructs one optimal subset deterministically: an item is taken
  // only when skipping it cannot reach the optimum.
  std::optional<ItemSet> solution(long target) const {
    if (!value(target)) return std::nullopt;
    ItemSet out;
    long s = target;
    for (size_t i = items_.size(); i > 0; --i) {
      if (best_[i - 1][s] && *best_[i - 1][s] == *best_[i][s]) continue;
      out.push_back(items_[i - 1]);
      s -= size_->at(items_[i - 1]);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  ItemSet items_;
  const std::map<ItemId, long>* size_;
  std::vector<std::vector<std::optional<Rational>>> best_;
};

inline std::optional<ItemSet> dp_equality_knapsack(const ItemSet& items,
                                                   const std::map<ItemId, long>& size,
                                                   long target, const CostMap& value) {
  if (target < 0) throw ValidationError("negative knapsack target");
  EqualityKnapsackTable table(items, size, value);
  return table.solution(target);
}

// Continuous knapsack follower: fill capacity exactly, greedy by value
// density d(e)/a(e) descending (ties by id), at most one fractional item.
inline std::map<ItemId, Rational> follower_continuous_knapsack(
    const ItemSet& items, const std::map<ItemId, long>& size, const CostMap& d,
    const Rational& b) {
  long A = 0;
  for (ItemId e : items) A += size.at(e);
  if (b < 0 || b > Rational(A))
    throw InfeasibleError("knapsack capacity " + rat_str(b) + " out of [0, " +
                          std::to_string(A) + "]");
  ItemSet order = items;
  std::sort(order.begin(), order.end(), [&](ItemId x, ItemId y) {
    // d(x)/a(x) > d(y)/a(y), cross-multiplied (sizes are positive).
    const Rational& dx = cost_at(d, x, "follower value");
    const Rational& dy = cost_at(d, y, "follower value");
    Rational lhs = dx * size.at(y);
    Rational rhs = dy * size.at(x);
    if (lhs != rhs) return lhs > rhs;
    return x < y;
  });
  std::map<ItemId, Rational> yv;
  Rational left = b;
  for (ItemId e : order) {
    if (left == 0) break;
    Rational a(size.at(e));
    if (left >= a) {
      yv[e] = 1;
      left -= a;
    } else {
      yv[e] = left / a;
      left = 0;
    }
  }
  return yv;
}

struct KnapsackAdversaryOutcome {
  Scenario scenario;                        // chosen d, componentwise in U_e
  std::map<ItemId, Rational> follower_vector;
  Rational value;                           // leader value of the fill
};

namespace detail {

struct KnapsackGuess {
  ItemId item;      // e*
  Rational delta;   // value guess in U_{e*}
  ItemSet below;    // E^- : guaranteed-denser items
  long below_size;
  Rational below_value;
  ItemSet spanning;  // E^0
  long spanning_size;
};

inline std::vector<KnapsackGuess> knapsack_guesses(const KnapsackInstance& k) {
  std::vector<KnapsackGuess> out;
  for (ItemId estar : k.items) {
    long astar = k.size.at(estar);
    for (const Rational& delta : k.uncertainty.values.at(estar)) {
      KnapsackGuess g;
      g.item = estar;
      g.delta = delta;
      g.below_size = 0;
      g.below_value = 0;
      g.spanning_size = 0;
      for (ItemId e : k.items) {
        if (e == estar) continue;
        const auto& vs = k.uncertainty.values.at(e);
        long a = k.size.at(e);
        // Compare d(e)/a(e) with delta/a(e*) by cross-multiplication. Exact
        // density ties follow the follower's id rule: the smaller id goes
        // first, so a tie at the lower endpoint pins the item before e*
        // when its id is smaller and after e* when its id is larger.
        Rational lo_lhs = vs.front() * astar;
        Rational hi_lhs = vs.back() * astar;
        Rational rhs = delta * a;
        bool can_after = lo_lhs < rhs || (lo_lhs == rhs && e > estar);
        bool can_before = hi_lhs > rhs || (hi_lhs == rhs && e < estar);
        if (!can_after) {
          g.below.push_back(e);
          g.below_size += a;
          g.below_value += cost_at(k.leader_value, e, "leader value");
        } else if (can_before) {
          g.spanning.push_back(e);
          g.spanning_size += a;
        }
      }
      out.push_back(std::move(g));
    }
  }
  return out;
}

}  // namespace detail

// Adversary for a fixed capacity: guess the fractional item, its value and
// the total size filled before it; one DP per guess serves all sizes. The
// adversary minimizes the leader's value (the leader maximizes).
inline KnapsackAdversaryOutcome rbckp_adversary_du(const KnapsackInstance& k,
                                                   const Rational& b) {
  validate_knapsack(k);
  if (b < k.capacity_lo || b > k.capacity_hi)
    throw InfeasibleError("capacity " + rat_str(b) + " outside [" +
                          rat_str(k.capacity_lo) + ", " + rat_str(k.capacity_hi) + "]");
  KnapsackAdversaryOutcome out;
  auto any_scenario = [&]() {
    Scenario d;
    for (ItemId e : k.items) d.follower_cost[e] = k.uncertainty.values.at(e).front();
    return d;
  };
  if (b == 0) {
    out.scenario = any_scenario();
    out.value = 0;
    return out;
  }
  if (b == Rational(k.total_size())) {
    out.scenario = any_scenario();
    for (ItemId e : k.items) out.follower_vector[e] = 1;
    out.value = total_cost(k.leader_value, k.items);
    return out;
  }

  Rational floor_b = rat_floor(b);
  bool have = false;
  Rational best_score;
  detail::KnapsackGuess best;
  ItemSet best_whole;
  long best_bstar = 0;
  CostMap neg;
  for (ItemId e : k.items) neg[e] = -cost_at(k.leader_value, e, "leader value");
  for (const auto& g : detail::knapsack_guesses(k)) {
    long astar = k.size.at(g.item);
    Rational blo_r = std::max(Rational(g.below_size),
                              Rational(rat_floor(b - astar) + 1));
    Rational bhi_r = std::min(Rational(g.below_size + g.spanning_size), floor_b);
    if (blo_r > bhi_r) continue;
    long blo = blo_r.get_num().get_si();
    long bhi = bhi_r.get_num().get_si();
    EqualityKnapsackTable table(g.spanning, k.size, neg);
    for (long bstar = blo; bstar <= bhi; ++bstar) {
      auto fill_neg = table.value(bstar - g.below_size);
      if (!fill_neg) continue;
      Rational cy = g.below_value - *fill_neg;
      Rational score =
          cy + cost_at(k.leader_value, g.item, "leader value") / astar * (b - bstar);
      if (!have || score < best_score) {
        best_score = std::move(score);
        best = g;
        best_bstar = bstar;
        auto fill = table.solution(bstar - g.below_size);
        best_whole.clear();
        std::set_union(g.below.begin(), g.below.end(), fill->begin(), fill->end(),
                       std::back_inserter(best_whole));
        have = true;
      }
    }
  }
  if (!have) throw InfeasibleError("no admissible follower configuration");

  for (ItemId e : k.items) {
    if (e == best.item)
      out.scenario.follower_cost[e] = best.delta;
    else if (set_contains(best_whole, e))
      out.scenario.follower_cost[e] = k.uncertainty.values.at(e).back();
    else
      out.scenario.follower_cost[e] = k.uncertainty.values.at(e).front();
  }
  for (ItemId e : best_whole) out.follower_vector[e] = 1;
  Rational frac = (b - best_bstar) / k.size.at(best.item);
  if (frac > 0) out.follower_vector[best.item] = frac;
  out.value = best_score;
  return out;
}

struct KnapsackLeaderSolution {
  Rational capacity;  // chosen b
  Rational value;
  PiecewiseLinearFunction objective;  // g restricted to [b-, b+]
};

// Leader: collect one linear piece per feasible guess, take the global
// pointwise minimum, then maximize it over the capacity range.
inline KnapsackLeaderSolution rbckp_leader_du(const KnapsackInstance& k) {
  validate_knapsack(k);
  CostMap neg;
  for (ItemId e : k.items) neg[e] = -cost_at(k.leader_value, e, "leader value");
  std::vector<PiecewiseLinearFunction> pieces;
  for (const auto& g : detail::knapsack_guesses(k)) {
    long astar = k.size.at(g.item);
    const Rational& cstar = cost_at(k.leader_value, g.item, "leader value");
    EqualityKnapsackTable table(g.spanning, k.size, neg);
    for (long bstar = g.below_size; bstar <= g.below_size + g.spanning_size; ++bstar) {
      auto fill_neg = table.value(bstar - g.below_size);
      if (!fill_neg) continue;
      Rational cy = g.below_value - *fill_neg;
      PiecewiseLinearFunction p;
      p.breakpoints.emplace_back(rat(bstar), cy);
      p.breakpoints.emplace_back(rat(bstar + astar), cy + cstar);
      pieces.push_back(std::move(p));
    }
  }
  // Endpoint pieces: the empty and the full selection are always available.
  {
    PiecewiseLinearFunction zero;
    zero.breakpoints.emplace_back(rat(0), rat(0));
    pieces.push_back(zero);
    PiecewiseLinearFunction full;
    full.breakpoints.emplace_back(Rational(k.total_size()),
                                  total_cost(k.leader_value, k.items));
    pieces.push_back(full);
  }
  PiecewiseLinearFunction g = detail::envelope_partial(pieces, EnvelopeMode::Min);

  // Restrict to [b-, b+] and maximize; ties go to the smallest b.
  PiecewiseLinearFunction clipped;
  clipped.breakpoints.emplace_back(k.capacity_lo, g.eval(k.capacity_lo));
  for (const auto& bp : g.breakpoints)
    if (bp.first > k.capacity_lo && bp.first < k.capacity_hi)
      clipped.breakpoints.push_back(bp);
  if (k.capacity_hi > k.capacity_lo)
    clipped.breakpoints.emplace_back(k.capacity_hi, g.eval(k.capacity_hi));
  auto [bstar, value] = plf_extremum(clipped, EnvelopeMode::Max);
  KnapsackLeaderSolution sol;
  sol.capacity = bstar;
  sol.value = value;
  sol.objective = clipped;
  return sol;
}

}  // namespace bilevel

#endif  // BILEVEL_KNAPSACK_HPP
