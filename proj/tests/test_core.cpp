#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <bit>
#include <vector>

#include "bilevel/bsp.hpp"
#include "bilevel/core.hpp"
#include "fixtures.hpp"

using namespace bilevel;

TEST_CASE("rational parsing and formatting") {
  CHECK(rat_parse("1/2") == rat(1, 2));
  CHECK(rat_parse("-3") == rat(-3));
  CHECK(rat_parse("6/4") == rat(3, 2));
  CHECK_THROWS_AS(rat_parse("0.5"), ValidationError);
  CHECK_THROWS_AS(rat_parse(""), ValidationError);
  CHECK_THROWS_AS(rat_parse("1/0"), ValidationError);
  CHECK(rat_str(rat(3, 2)) == "3/2");
  CHECK(rat_frac_str(rat(-2)) == "-2/1");
  CHECK(rat_floor(rat(7, 2)) == rat(3));
  CHECK(rat_floor(rat(-7, 2)) == rat(-4));
}

TEST_CASE("greedy order follows primary, policy tie-break, then id") {
  Instance inst = fixtures::fig1_instance();
  Scenario d = fixtures::fig1_scenario();
  GreedyOrder pess = greedy_order(inst.follower_items, d.follower_cost,
                                  inst.leader_cost, Policy::Pessimistic);
  CHECK(pess.sequence == std::vector<ItemId>{4, 5, 6, 7});
  GreedyOrder opt = greedy_order(inst.follower_items, d.follower_cost,
                                 inst.leader_cost, Policy::Optimistic);
  CHECK(opt.sequence == std::vector<ItemId>{4, 5, 7, 6});
  CHECK(greedy_order({}, {}, {}, Policy::Optimistic).sequence.empty());
  CHECK_THROWS_AS(greedy_order({0}, {}, {}, Policy::Optimistic), ValidationError);
}

TEST_CASE("selection picks the cheapest count-subset") {
  Instance inst = fixtures::fig1_instance();
  ItemSet two = solve_selection(inst.leader_items, 2, inst.leader_cost);
  CHECK(two == ItemSet{0, 1});
  CHECK(total_cost(inst.leader_cost, two) == rat(-2));
  CHECK(solve_selection(inst.follower_items, 0, inst.leader_cost).empty());
  ItemSet all = solve_selection(inst.follower_items, 4, inst.leader_cost);
  CHECK(all == inst.follower_items);
  CHECK(total_cost(inst.leader_cost, all) == rat(-1));
  CHECK_THROWS_AS(solve_selection(inst.leader_items, 5, inst.leader_cost),
                  InfeasibleError);
}

TEST_CASE("selection cost is minimal over all subsets (exhaustive)") {
  Instance inst = fixtures::fig1_instance();
  ItemSet items = inst.universe();
  int n = static_cast<int>(items.size());
  for (int k = 0; k <= n; ++k) {
    Rational got = total_cost(inst.leader_cost,
                              solve_selection(items, k, inst.leader_cost));
    bool any = false;
    Rational best;
    for (int mask = 0; mask < (1 << n); ++mask) {
      if (std::popcount(static_cast<unsigned>(mask)) != k) continue;
      Rational v = 0;
      for (int i = 0; i < n; ++i)
        if (mask >> i & 1) v += inst.leader_cost.at(items[i]);
      if (!any || v < best) {
        best = v;
        any = true;
      }
    }
    CHECK(got == best);
  }
}

TEST_CASE("continuous selection is a fractional prefix") {
  Instance inst = fixtures::ex62_instance();
  Scenario d1 = fixtures::ex62_uncertainty().scenarios[0];
  auto x = solve_continuous_selection(inst.follower_items, rat(3, 2),
                                      d1.follower_cost, inst.leader_cost,
                                      inst.policy);
  CHECK(x.size() == 2);
  CHECK(x.at(3) == rat(1));
  CHECK(x.at(4) == rat(1, 2));

  auto whole = solve_continuous_selection(inst.follower_items, rat(2),
                                          d1.follower_cost, inst.leader_cost,
                                          inst.policy);
  for (const auto& [e, v] : whole) CHECK(v == rat(1));
  CHECK(solve_continuous_selection(inst.follower_items, rat(0), d1.follower_cost,
                                   inst.leader_cost, inst.policy)
            .empty());
  CHECK_THROWS_AS(solve_continuous_selection(inst.follower_items, rat(4),
                                             d1.follower_cost, inst.leader_cost,
                                             inst.policy),
                  InfeasibleError);

  // At most one entry strictly inside (0,1), and LP optimality against
  // every vertex of the feasible region (all 0/1 points plus one
  // fractional coordinate).
  auto frac = solve_continuous_selection(inst.follower_items, rat(5, 4),
                                         d1.follower_cost, inst.leader_cost,
                                         inst.policy);
  int interior = 0;
  Rational cost = 0;
  for (const auto& [e, v] : frac) {
    if (v > 0 && v < 1) ++interior;
    cost += v * d1.follower_cost.at(e);
  }
  CHECK(interior <= 1);
  ItemSet items = inst.follower_items;
  int n = static_cast<int>(items.size());
  for (int mask = 0; mask < (1 << n); ++mask) {
    for (int f = 0; f < n; ++f) {
      if (mask >> f & 1) continue;
      Rational base = 0;
      int count = 0;
      for (int i = 0; i < n; ++i)
        if (mask >> i & 1) {
          base += d1.follower_cost.at(items[i]);
          ++count;
        }
      Rational leftover = rat(5, 4) - count;
      if (leftover < 0 || leftover > 1) continue;
      Rational v = base + leftover * d1.follower_cost.at(items[f]);
      CHECK(cost <= v);
    }
  }
}

TEST_CASE("follower response completes the selection greedily") {
  Instance inst = fixtures::fig1_instance();
  Scenario d = fixtures::fig1_scenario();
  ItemSet Y = follower_respond(inst, {0, 1, 2}, d);
  CHECK(Y == ItemSet{4, 5});

  Instance small = inst;
  small.capacity = 3;
  CHECK(follower_respond(small, {0, 1, 2}, d).empty());

  Instance tight = inst;
  tight.capacity = 8;
  CHECK_THROWS_AS(follower_respond(tight, {0}, d), InfeasibleError);
  CHECK_THROWS_AS(follower_respond(inst, {4}, d), ValidationError);
}

TEST_CASE("follower response cost is the brute-force minimum") {
  Instance inst = fixtures::fig1_instance();
  Scenario d = fixtures::fig1_scenario();
  for (int xmask = 0; xmask < (1 << 4); ++xmask) {
    ItemSet X;
    for (int i = 0; i < 4; ++i)
      if (xmask >> i & 1) X.push_back(inst.leader_items[i]);
    if (static_cast<int>(X.size()) > inst.capacity) continue;
    if (inst.capacity - static_cast<int>(X.size()) >
        static_cast<int>(inst.follower_items.size()))
      continue;
    ItemSet Y = follower_respond(inst, X, d);
    Rational got = total_cost(d.follower_cost, Y);
    ItemSet pool = set_difference(inst.follower_items, X);
    int need = inst.capacity - static_cast<int>(X.size());
    bool any = false;
    Rational best;
    int pn = static_cast<int>(pool.size());
    for (int mask = 0; mask < (1 << pn); ++mask) {
      if (std::popcount(static_cast<unsigned>(mask)) != need) continue;
      Rational v = 0;
      for (int i = 0; i < pn; ++i)
        if (mask >> i & 1) v += d.follower_cost.at(pool[i]);
      if (!any || v < best) {
        best = v;
        any = true;
      }
    }
    CHECK(got == best);
  }
}

TEST_CASE("subset normalization appends sentinel-cost items") {
  Instance inst = fixtures::fig1_instance();
  Scenario d = fixtures::fig1_scenario();
  auto [ninst, nd] = normalize_subset(inst, d);
  CHECK(ninst.follower_items.size() == 8);
  for (ItemId e : inst.leader_items) CHECK(nd.follower_cost.at(e) == rat(2));

  auto sol_orig = solve_bsp(inst, d);
  auto sol_norm = solve_bsp(ninst, nd);
  CHECK(sol_orig.value == rat(-4));
  CHECK(sol_norm.value == rat(-4));

  Instance already = fixtures::approx_example_instance();
  Scenario ad = fixtures::approx_example_uncertainty().scenarios[0];
  auto [same_inst, same_d] = normalize_subset(already, ad);
  CHECK(same_inst.follower_items == already.follower_items);
  CHECK(same_d.follower_cost == ad.follower_cost);
}

TEST_CASE("uncertainty normalization covers all three kinds") {
  Instance inst = fixtures::fig1_instance();
  UncertaintySet disc(fixtures::fig2_uncertainty());
  auto [ni, nu] = normalize_subset(inst, disc);
  const auto& nd = std::get<DiscreteU>(nu);
  CHECK(ni.follower_items.size() == 8);
  for (const Scenario& s : nd.scenarios) {
    Rational sentinel = s.follower_cost.at(0);
    for (ItemId e : inst.follower_items) CHECK(s.follower_cost.at(e) < sentinel);
  }

  IntervalU iv;
  for (ItemId e : inst.follower_items) {
    iv.lo[e] = rat(0);
    iv.hi[e] = rat(1);
  }
  auto [ni2, nu2] = normalize_subset(inst, UncertaintySet(iv));
  const auto& niv = std::get<IntervalU>(nu2);
  std::vector<Rational> sentinels;
  for (ItemId e : inst.leader_items) {
    CHECK(niv.lo.at(e) == niv.hi.at(e));
    CHECK(niv.lo.at(e) > rat(1));
    sentinels.push_back(niv.lo.at(e));
  }
  for (size_t i = 1; i < sentinels.size(); ++i)
    CHECK(sentinels[i - 1] < sentinels[i]);
}

TEST_CASE("greedy order is deterministic") {
  Instance inst = fixtures::fig1_instance();
  Scenario d = fixtures::fig1_scenario();
  auto a = greedy_order(inst.follower_items, d.follower_cost, inst.leader_cost,
                        inst.policy);
  auto b = greedy_order(inst.follower_items, d.follower_cost, inst.leader_cost,
                        inst.policy);
  CHECK(a.sequence == b.sequence);
}
