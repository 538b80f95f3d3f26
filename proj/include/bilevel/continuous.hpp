#ifndef BILEVEL_CONTINUOUS_HPP
#define BILEVEL_CONTINUOUS_HPP

#include <algorithm>
#include <utility>
#include <variant>
#include <vector>

#include "bilevel/adversary.hpp"
#include "bilevel/core.hpp"
#include "bilevel/plf.hpp"

namespace bilevel {

struct FractionalLeaderSolution {
  std::map<ItemId, Rational> x;
  Rational leader_mass;  // b_l = sum of x
  Rational value;
};

namespace detail {

inline void require_disjoint(const Instance& inst, const char* op) {
  ItemSet overlap;
  std::set_intersection(inst.leader_items.begin(), inst.leader_items.end(),
                        inst.follower_items.begin(), inst.follower_items.end(),
                        std::back_inserter(overlap));
  if (!overlap.empty())
    throw WrongVariantError(std::string(op) + " requires disjoint item sets");
}

inline Rational vector_mass(const std::map<ItemId, Rational>& x) {
  Rational m = 0;
  for (const auto& [e, v] : x) {
    if (v < 0 || v > 1)
      throw ValidationError("fractional entry out of [0,1] at item " +
                            std::to_string(e));
    m += v;
  }
  return m;
}

inline Rational vector_cost(const CostMap& c, const std::map<ItemId, Rational>& x) {
  Rational v = 0;
  for (const auto& [e, w] : x) v += w * cost_at(c, e, "leader cost");
  return v;
}

inline Rational follower_share(const Instance& inst,
                               const std::map<ItemId, Rational>& x) {
  for (const auto& [e, v] : x)
    if (!set_contains(inst.leader_items, e))
      throw ValidationError("fractional vector touches non-leader item " +
                            std::to_string(e));
  Rational bf = Rational(inst.capacity) - vector_mass(x);
  if (bf < 0 || bf > Rational(inst.n_f()))
    throw InfeasibleError("follower share " + rat_str(bf) + " out of [0, " +
                          std::to_string(inst.n_f()) + "]");
  return bf;
}

inline void check_du(const DiscreteUncorrelatedU& U, const Instance& inst) {
  for (ItemId e : inst.follower_items) {
    auto it = U.values.find(e);
    if (it == U.values.end() || it->second.empty())
      throw ValidationError("missing value set for item " + std::to_string(e));
    for (size_t i = 1; i < it->second.size(); ++i)
      if (it->second[i] <= it->second[i - 1])
        throw ValidationError("value set not strictly increasing at item " +
                              std::to_string(e));
  }
  if (inst.policy == Policy::Optimistic) {
    // The optimistic analysis needs pairwise-disjoint value sets.
    for (ItemId e1 : inst.follower_items)
      for (ItemId e2 : inst.follower_items) {
        if (e1 >= e2) continue;
        for (const Rational& v1 : U.values.at(e1))
          for (const Rational& v2 : U.values.at(e2))
            if (v1 == v2)
              throw ValidationError(
                  "overlapping value sets are not supported under the optimistic "
                  "policy (items " +
                  std::to_string(e1) + ", " + std::to_string(e2) + ")");
      }
  }
}

}  // namespace detail

// Worst scenario from an explicit list against a fractional leader vector.
inline AdversaryOutcome rcbsp_adversary_discrete(const Instance& inst,
                                                 const DiscreteU& U,
                                                 const std::map<ItemId, Rational>& x) {
  detail::require_disjoint(inst, "rcbsp_adversary_discrete");
  if (U.scenarios.empty()) throw ValidationError("discrete uncertainty set is empty");
  Rational bf = detail::follower_share(inst, x);
  Rational cx = detail::vector_cost(inst.leader_cost, x);
  bool have = false;
  AdversaryOutcome best;
  for (const Scenario& d : U.scenarios) {
    auto y = solve_continuous_selection(inst.follower_items, bf, d.follower_cost,
                                        inst.leader_cost, inst.policy);
    Rational v = cx + detail::vector_cost(inst.leader_cost, y);
    if (!have || v > best.value) {
      best.scenario = d;
      best.follower_vector = std::move(y);
      best.value = std::move(v);
      have = true;
    }
  }
  return best;
}

// Full leader objective against an explicit scenario list: the leader's
// own prefix curve plus the max-envelope of mirrored scenario curves.
inline PiecewiseLinearFunction rcbsp_objective_discrete(const Instance& inst,
                                                        const DiscreteU& U) {
  validate_instance(inst);
  detail::require_disjoint(inst, "rcbsp_leader_discrete");
  if (U.scenarios.empty()) throw ValidationError("discrete uncertainty set is empty");
  int b = inst.capacity;
  int lo = std::max(0, b - inst.n_f());
  int hi = std::min(b, inst.n_l());
  PiecewiseLinearFunction gl =
      plf_selection(inst.leader_items, inst.leader_cost, lo, hi);
  std::vector<PiecewiseLinearFunction> mirrored;
  for (const Scenario& d : U.scenarios)
    mirrored.push_back(plf_mirrored(inst.follower_items, d.follower_cost,
                                    inst.leader_cost, inst.policy, inst.leader_cost,
                                    lo, hi, b));
  return plf_sum(gl, plf_envelope(mirrored, EnvelopeMode::Max));
}

inline FractionalLeaderSolution rcbsp_leader_discrete(const Instance& inst,
                                                      const DiscreteU& U) {
  PiecewiseLinearFunction g = rcbsp_objective_discrete(inst, U);
  auto [bl, value] = plf_extremum(g, EnvelopeMode::Min);
  FractionalLeaderSolution sol;
  sol.leader_mass = bl;
  sol.value = value;
  sol.x = solve_continuous_selection(inst.leader_items, bl, inst.leader_cost);
  return sol;
}

// Worst interval scenario against a fractional leader vector: per head,
// fill the forced predecessors and continuously top up from the spanning
// set by descending leader cost.
inline AdversaryOutcome rcbsp_adversary_interval(const Instance& inst,
                                                 const IntervalU& U,
                                                 const std::map<ItemId, Rational>& x) {
  detail::require_disjoint(inst, "rcbsp_adversary_interval");
  detail::check_interval(U);
  detail::check_one_point(inst, U);
  if (inst.follower_items.empty())
    throw ValidationError("interval adversary needs a non-empty follower set");
  Rational bf = detail::follower_share(inst, x);
  Rational cx = detail::vector_cost(inst.leader_cost, x);

  bool have = false;
  AdversaryOutcome best;
  ItemId best_head = -1;
  ItemSet best_below, best_spanning;
  for (ItemId head : inst.follower_items) {
    const Rational& ref = cost_at(U.lo, head, "interval lo");
    ItemSet below, spanning;
    for (ItemId e : inst.follower_items) {
      if (cost_at(U.hi, e, "interval hi") < ref)
        below.push_back(e);
      else if (cost_at(U.lo, e, "interval lo") <= ref &&
               ref <= cost_at(U.hi, e, "interval hi"))
        spanning.push_back(e);
    }
    Rational need = bf - Rational(static_cast<long>(below.size()));
    if (need < 0 || need > Rational(static_cast<long>(spanning.size()))) continue;
    CostMap neg;
    for (ItemId e : spanning) neg[e] = -cost_at(inst.leader_cost, e, "leader cost");
    auto fill = solve_continuous_selection(spanning, need, neg);
    std::map<ItemId, Rational> y;
    for (ItemId e : below) y[e] = 1;
    for (const auto& [e, w] : fill) y[e] = w;
    Rational v = cx + detail::vector_cost(inst.leader_cost, y);
    if (!have || v > best.value) {
      best.follower_vector = std::move(y);
      best.value = std::move(v);
      best_head = head;
      best_below = below;
      best_spanning = spanning;
      have = true;
    }
  }
  if (!have) throw InfeasibleError("no admissible follower prefix");

  // Realizing scenario: lower endpoints on fully selected items, upper on
  // unselected ones, and a value just above the head's lower endpoint on
  // the fractional item.
  for (ItemId e : inst.follower_items) {
    auto it = best.follower_vector.find(e);
    if (it == best.follower_vector.end())
      best.scenario.follower_cost[e] = U.hi.at(e);
    else if (it->second == 1)
      best.scenario.follower_cost[e] = U.lo.at(e);
    else {
      Rational eps;
      bool first = true;
      for (ItemId e0 : best_spanning) {
        Rational gap = U.hi.at(best_head) - U.lo.at(e0);
        if (first || gap < eps) {
          eps = gap;
          first = false;
        }
      }
      eps /= 2;
      best.scenario.follower_cost[e] = U.lo.at(best_head) + eps;
    }
  }
  return best;
}

// Leader objective under interval uncertainty: one shifted mirrored curve
// per head, upper envelope over their partial domains, plus the leader's
// own curve.
inline PiecewiseLinearFunction rcbsp_objective_interval(const Instance& inst,
                                                        const IntervalU& U) {
  validate_instance(inst);
  detail::require_disjoint(inst, "rcbsp_leader_interval");
  detail::check_interval(U);
  detail::check_one_point(inst, U);
  int b = inst.capacity;
  int lo = std::max(0, b - inst.n_f());
  int hi = std::min(b, inst.n_l());
  PiecewiseLinearFunction gl =
      plf_selection(inst.leader_items, inst.leader_cost, lo, hi);

  PiecewiseLinearFunction gf;
  if (inst.follower_items.empty()) {
    for (int k = lo; k <= hi; ++k) gf.breakpoints.emplace_back(rat(k), rat(0));
    if (lo == hi) gf.breakpoints = {{rat(lo), rat(0)}};
  } else {
    int bf_lo = b - hi;
    int bf_hi = b - lo;
    std::vector<PiecewiseLinearFunction> curves;
    for (ItemId head : inst.follower_items) {
      const Rational& ref = cost_at(U.lo, head, "interval lo");
      ItemSet below;
      ItemSet spanning;
      Rational below_cost = 0;
      for (ItemId e : inst.follower_items) {
        if (cost_at(U.hi, e, "interval hi") < ref) {
          below.push_back(e);
          below_cost += cost_at(inst.leader_cost, e, "leader cost");
        } else if (cost_at(U.lo, e, "interval lo") <= ref &&
                   ref <= cost_at(U.hi, e, "interval hi")) {
          spanning.push_back(e);
        }
      }
      int nb = static_cast<int>(below.size());
      int share_lo = std::max(0, bf_lo - nb);
      int share_hi = std::min(bf_hi - nb, static_cast<int>(spanning.size()));
      if (share_lo > share_hi) continue;
      CostMap neg;
      for (ItemId e : spanning) neg[e] = -cost_at(inst.leader_cost, e, "leader cost");
      PiecewiseLinearFunction f =
          plf_mirrored(spanning, neg, neg, Policy::Optimistic, inst.leader_cost,
                       b - share_hi, b - share_lo, b);
      curves.push_back(plf_shift(f, rat(-nb), below_cost));
    }
    if (curves.empty()) throw InfeasibleError("no admissible follower prefix");
    gf = detail::envelope_partial(curves, EnvelopeMode::Max);
    if (gf.domain_lo() != rat(lo) || gf.domain_hi() != rat(hi))
      throw ValidationError("follower curve does not cover the capacity range");
  }

  return plf_sum(gl, gf);
}

inline FractionalLeaderSolution rcbsp_leader_interval(const Instance& inst,
                                                      const IntervalU& U) {
  PiecewiseLinearFunction g = rcbsp_objective_interval(inst, U);
  auto [bl, value] = plf_extremum(g, EnvelopeMode::Min);
  FractionalLeaderSolution sol;
  sol.leader_mass = bl;
  sol.value = value;
  sol.x = solve_continuous_selection(inst.leader_items, bl, inst.leader_cost);
  return sol;
}

namespace detail {

struct DuGuess {
  ItemId item;       // e*
  Rational delta;    // chosen value in U_{e*}
  ItemSet whole;     // items taken integrally (E- plus the binary fill)
  Rational whole_cost;
};

// All feasible (e*, delta*) guesses for taking `whole_count` full items;
// iteration order is (item id, delta) ascending, which is the tie rule.
inline std::vector<DuGuess> du_guesses(const Instance& inst,
                                       const DiscreteUncorrelatedU& U,
                                       int whole_count) {
  std::vector<DuGuess> out;
  for (ItemId estar : inst.follower_items) {
    for (const Rational& delta : U.values.at(estar)) {
      ItemSet below, spanning;
      for (ItemId e : inst.follower_items) {
        if (e == estar) continue;
        const auto& vs = U.values.at(e);
        const Rational& dlo = vs.front();
        const Rational& dhi = vs.back();
        if (dhi < delta)
          below.push_back(e);
        else if (dlo <= delta && delta <= dhi)
          spanning.push_back(e);
      }
      int need = whole_count - static_cast<int>(below.size());
      if (need < 0 || need > static_cast<int>(spanning.size())) continue;
      CostMap neg;
      for (ItemId e : spanning) neg[e] = -cost_at(inst.leader_cost, e, "leader cost");
      ItemSet fill = solve_selection(spanning, need, neg);
      DuGuess g;
      g.item = estar;
      g.delta = delta;
      std::set_union(below.begin(), below.end(), fill.begin(), fill.end(),
                     std::back_inserter(g.whole));
      g.whole_cost = total_cost(inst.leader_cost, g.whole);
      out.push_back(std::move(g));
    }
  }
  return out;
}

}  // namespace detail

// Worst discrete-uncorrelated scenario against a fractional leader vector.
// The witness scenario is componentwise inside the value sets.
inline AdversaryOutcome rcbsp_adversary_du(const Instance& inst,
                                           const DiscreteUncorrelatedU& U,
                                           const std::map<ItemId, Rational>& x) {
  detail::require_disjoint(inst, "rcbsp_adversary_du");
  detail::check_du(U, inst);
  Rational bf = detail::follower_share(inst, x);
  Rational cx = detail::vector_cost(inst.leader_cost, x);

  auto lo_scenario = [&]() {
    Scenario d;
    for (ItemId e : inst.follower_items) d.follower_cost[e] = U.values.at(e).front();
    return d;
  };
  AdversaryOutcome out;
  if (bf == 0) {
    out.scenario = lo_scenario();
    out.value = cx;
    return out;
  }
  if (bf == Rational(inst.n_f())) {
    out.scenario = lo_scenario();
    for (ItemId e : inst.follower_items) out.follower_vector[e] = 1;
    out.value = cx + total_cost(inst.leader_cost, inst.follower_items);
    return out;
  }

  Rational whole = rat_floor(bf);
  Rational frac = bf - whole;
  int whole_count = static_cast<int>(whole.get_num().get_si());
  bool have = false;
  detail::DuGuess best;
  Rational best_score;
  for (const auto& g : detail::du_guesses(inst, U, whole_count)) {
    Rational score = g.whole_cost + frac * cost_at(inst.leader_cost, g.item, "leader cost");
    if (!have || score > best_score) {
      best = g;
      best_score = std::move(score);
      have = true;
    }
  }
  if (!have) throw InfeasibleError("no admissible follower prefix");
  for (ItemId e : inst.follower_items) {
    if (e == best.item)
      out.scenario.follower_cost[e] = best.delta;
    else if (set_contains(best.whole, e))
      out.scenario.follower_cost[e] = U.values.at(e).front();
    else
      out.scenario.follower_cost[e] = U.values.at(e).back();
  }
  for (ItemId e : best.whole) out.follower_vector[e] = 1;
  if (frac > 0) out.follower_vector[best.item] = frac;
  out.value = cx + best_score;
  return out;
}

// Leader under discrete-uncorrelated uncertainty: one linear piece per
// guess per unit cell of the follower share, max-envelope within each
// cell, cells joined into one continuous curve.
inline PiecewiseLinearFunction rcbsp_objective_du(const Instance& inst,
                                                  const DiscreteUncorrelatedU& U) {
  validate_instance(inst);
  detail::require_disjoint(inst, "rcbsp_leader_du");
  detail::check_du(U, inst);
  int b = inst.capacity;
  int lo = std::max(0, b - inst.n_f());
  int hi = std::min(b, inst.n_l());
  if (lo == hi) {
    auto x = solve_continuous_selection(inst.leader_items, rat(lo), inst.leader_cost);
    PiecewiseLinearFunction g;
    g.breakpoints.emplace_back(rat(lo), rcbsp_adversary_du(inst, U, x).value);
    return g;
  }
  PiecewiseLinearFunction gl =
      plf_selection(inst.leader_items, inst.leader_cost, lo, hi);

  PiecewiseLinearFunction gf;
  int bf_lo = b - hi;
  int bf_hi = b - lo;
  for (int cell = bf_hi - 1; cell >= bf_lo; --cell) {
    // Follower share in [cell, cell+1], leader share in [b-cell-1, b-cell].
    std::vector<PiecewiseLinearFunction> pieces;
    for (const auto& g : detail::du_guesses(inst, U, cell)) {
      PiecewiseLinearFunction p;
      Rational cstar = cost_at(inst.leader_cost, g.item, "leader cost");
      p.breakpoints.emplace_back(rat(b - cell - 1), g.whole_cost + cstar);
      p.breakpoints.emplace_back(rat(b - cell), g.whole_cost);
      pieces.push_back(std::move(p));
    }
    if (cell == inst.n_f()) {
      // Follower takes everything; no guess needed at the full-share point.
      PiecewiseLinearFunction p;
      Rational all = total_cost(inst.leader_cost, inst.follower_items);
      p.breakpoints.emplace_back(rat(b - cell), all);
      pieces.push_back(std::move(p));
    }
    if (pieces.empty()) throw InfeasibleError("no admissible follower prefix");
    PiecewiseLinearFunction env = plf_envelope(pieces, EnvelopeMode::Max);
    if (gf.empty()) {
      gf = env;
    } else {
      // Join at the shared integer point; both sides agree by continuity.
      Rational joint = std::max(gf.breakpoints.back().second,
                                env.breakpoints.front().second);
      gf.breakpoints.back().second = joint;
      gf.breakpoints.insert(gf.breakpoints.end(), env.breakpoints.begin() + 1,
                            env.breakpoints.end());
    }
  }
  plf_check(gf);

  return plf_sum(gl, gf);
}

inline FractionalLeaderSolution rcbsp_leader_du(const Instance& inst,
                                                const DiscreteUncorrelatedU& U) {
  PiecewiseLinearFunction g = rcbsp_objective_du(inst, U);
  auto [bl, value] = plf_extremum(g, EnvelopeMode::Min);
  FractionalLeaderSolution sol;
  sol.leader_mass = bl;
  sol.value = value;
  sol.x = solve_continuous_selection(inst.leader_items, bl, inst.leader_cost);
  return sol;
}

// Dispatchers used by the CLI.
inline AdversaryOutcome rcbsp_adversary(const Instance& inst, const UncertaintySet& U,
                                        const std::map<ItemId, Rational>& x) {
  if (const auto* d = std::get_if<DiscreteU>(&U))
    return rcbsp_adversary_discrete(inst, *d, x);
  if (const auto* iv = std::get_if<IntervalU>(&U))
    return rcbsp_adversary_interval(inst, *iv, x);
  return rcbsp_adversary_du(inst, std::get<DiscreteUncorrelatedU>(U), x);
}

inline FractionalLeaderSolution rcbsp_leader(const Instance& inst,
                                             const UncertaintySet& U) {
  if (const auto* d = std::get_if<DiscreteU>(&U)) return rcbsp_leader_discrete(inst, *d);
  if (const auto* iv = std::get_if<IntervalU>(&U))
    return rcbsp_leader_interval(inst, *iv);
  return rcbsp_leader_du(inst, std::get<DiscreteUncorrelatedU>(U));
}

inline PiecewiseLinearFunction rcbsp_objective(const Instance& inst,
                                               const UncertaintySet& U) {
  if (const auto* d = std::get_if<DiscreteU>(&U))
    return rcbsp_objective_discrete(inst, *d);
  if (const auto* iv = std::get_if<IntervalU>(&U))
    return rcbsp_objective_interval(inst, *iv);
  return rcbsp_objective_du(inst, std::get<DiscreteUncorrelatedU>(U));
}

}  // namespace bilevel

#endif  // BILEVEL_CONTINUOUS_HPP
