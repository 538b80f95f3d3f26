#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <vector>

#include "bilevel/bsp.hpp"
#include "bilevel/io.hpp"
#include "fixtures.hpp"

using namespace bilevel;

namespace {

// Direct enumeration over all leader sets, independent of the capacity
// split used by solve_bsp.
Rational brute_force_value(const Instance& inst, const Scenario& d) {
  int nl = inst.n_l();
  bool any = false;
  Rational best;
  for (int mask = 0; mask < (1 << nl); ++mask) {
    ItemSet X;
    for (int i = 0; i < nl; ++i)
      if (mask >> i & 1) X.push_back(inst.leader_items[i]);
    if (static_cast<int>(X.size()) > inst.capacity) continue;
    ItemSet pool = set_difference(inst.follower_items, X);
    if (inst.capacity - static_cast<int>(X.size()) >
        static_cast<int>(pool.size()))
      continue;
    ItemSet Y = follower_respond(inst, X, d);
    Rational v = leader_value(inst, X, Y);
    if (!any || v < best) {
      best = v;
      any = true;
    }
  }
  REQUIRE(any);
  return best;
}

}  // namespace

TEST_CASE("disjoint example solves to the known optimum") {
  Instance inst = fixtures::fig1_instance();
  BilevelSolution sol = solve_bsp(inst, fixtures::fig1_scenario());
  CHECK(sol.value == rat(-4));
  CHECK(sol.leader_count == 3);
  CHECK(sol.leader_set == ItemSet{0, 1, 2});
  CHECK(sol.follower_set == ItemSet{4, 5});
}

TEST_CASE("per-split values of the disjoint example") {
  Instance inst = fixtures::fig1_instance();
  Scenario d = fixtures::fig1_scenario();
  // Frozen totals c(X)+c(Y) per leader count.
  std::vector<std::pair<int, Rational>> expected = {
      {1, rat(-2)}, {2, rat(-2)}, {3, rat(-4)}, {4, rat(2)}};
  GreedyOrder pl = greedy_order(inst.leader_items, inst.leader_cost);
  GreedyOrder pf = greedy_order(inst.follower_items, d.follower_cost,
                                inst.leader_cost, inst.policy);
  for (auto [bl, want] : expected) {
    ItemSet X(pl.sequence.begin(), pl.sequence.begin() + bl);
    std::sort(X.begin(), X.end());
    ItemSet Y;
    for (ItemId e : pf.sequence) {
      if (static_cast<int>(Y.size()) == inst.capacity - bl) break;
      if (!set_contains(X, e)) Y.push_back(e);
    }
    CHECK(leader_value(inst, X, Y) == want);
  }
}

TEST_CASE("ties prefer the smallest leader count") {
  Instance inst;
  inst.leader_items = {0};
  inst.follower_items = {1, 2};
  inst.capacity = 1;
  inst.policy = Policy::Pessimistic;
  inst.leader_cost = {{0, rat(0)}, {1, rat(0)}, {2, rat(5)}};
  Scenario d;
  d.follower_cost = {{1, rat(0)}, {2, rat(1)}};
  BilevelSolution sol = solve_bsp(inst, d);
  CHECK(sol.value == rat(0));
  CHECK(sol.leader_count == 0);
}

TEST_CASE("policy changes the follower tie-break") {
  Instance inst;
  inst.leader_items = {0};
  inst.follower_items = {1, 2};
  inst.capacity = 1;
  inst.leader_cost = {{0, rat(10)}, {1, rat(-2)}, {2, rat(2)}};
  Scenario d;
  d.follower_cost = {{1, rat(1)}, {2, rat(1)}};
  inst.policy = Policy::Optimistic;
  CHECK(solve_bsp(inst, d).value == rat(-2));
  inst.policy = Policy::Pessimistic;
  CHECK(solve_bsp(inst, d).value == rat(2));
}

TEST_CASE("subset instances keep leader picks out of the follower pool") {
  Instance inst;
  inst.leader_items = {0, 1};
  inst.follower_items = {0, 1, 2, 3};
  inst.capacity = 2;
  inst.policy = Policy::Pessimistic;
  inst.leader_cost = {{0, rat(-3)}, {1, rat(1)}, {2, rat(4)}, {3, rat(0)}};
  Scenario d;
  d.follower_cost = {{0, rat(5)}, {1, rat(6)}, {2, rat(1)}, {3, rat(2)}};
  BilevelSolution sol = solve_bsp(inst, d);
  CHECK(sol.value == brute_force_value(inst, d));
  ItemSet both;
  std::set_intersection(sol.leader_set.begin(), sol.leader_set.end(),
                        sol.follower_set.begin(), sol.follower_set.end(),
                        std::back_inserter(both));
  CHECK(both.empty());
}

TEST_CASE("general overlap instances match brute force") {
  for (unsigned long seed = 1; seed <= 120; ++seed) {
    GenerateParams p;
    p.kind = "bsp";
    p.n_l = 3;
    p.n_f = 5;
    p.overlap = static_cast<int>(seed % 4);
    p.policy = seed % 2 ? Policy::Pessimistic : Policy::Optimistic;
    InstanceFile f = generate_random(seed, p);
    REQUIRE(f.certain.has_value());
    BilevelSolution sol = solve_bsp(f.instance, *f.certain);
    CHECK(sol.value == brute_force_value(f.instance, *f.certain));
    // Replay: the reported sets must be consistent with the value.
    CHECK(leader_value(f.instance, sol.leader_set, sol.follower_set) ==
          sol.value);
    CHECK(static_cast<int>(sol.leader_set.size() + sol.follower_set.size()) ==
          f.instance.capacity);
  }
}

TEST_CASE("capacity above the universe is rejected") {
  Instance inst = fixtures::fig1_instance();
  inst.capacity = 9;
  CHECK_THROWS_AS(solve_bsp(inst, fixtures::fig1_scenario()), ValidationError);
}
