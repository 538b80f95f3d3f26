#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <vector>

#include "bilevel/io.hpp"
#include "bilevel/knapsack.hpp"
#include "bilevel/oracle.hpp"

using namespace bilevel;

namespace {

KnapsackInstance small_instance() {
  KnapsackInstance k;
  k.items = {0, 1, 2};
  k.size = {{0, 2}, {1, 3}, {2, 4}};
  k.leader_value = {{0, rat(5)}, {1, rat(1)}, {2, rat(7)}};
  k.capacity_lo = rat(0);
  k.capacity_hi = rat(9);
  k.uncertainty.values = {{0, {rat(1), rat(4)}}, {1, {rat(2)}}, {2, {rat(3), rat(6)}}};
  return k;
}

}  // namespace

TEST_CASE("instance validation") {
  KnapsackInstance k = small_instance();
  CHECK_NOTHROW(validate_knapsack(k));
  KnapsackInstance zero = small_instance();
  zero.size[1] = 0;
  CHECK_THROWS_AS(validate_knapsack(zero), ValidationError);
  KnapsackInstance neg = small_instance();
  neg.uncertainty.values[0] = {rat(-1), rat(2)};
  CHECK_THROWS_AS(validate_knapsack(neg), ValidationError);
  KnapsackInstance range = small_instance();
  range.capacity_hi = rat(10);
  CHECK_THROWS_AS(validate_knapsack(range), ValidationError);
  KnapsackInstance order = small_instance();
  order.uncertainty.values[2] = {rat(6), rat(3)};
  CHECK_THROWS_AS(validate_knapsack(order), ValidationError);
}

TEST_CASE("equality knapsack worked example") {
  ItemSet items = {0, 1, 2};
  std::map<ItemId, long> size = {{0, 2}, {1, 3}, {2, 4}};
  CostMap value = {{0, rat(5)}, {1, rat(1)}, {2, rat(7)}};
  EqualityKnapsackTable table(items, size, value);
  CHECK(table.value(5) == Rational(6));
  CHECK(*table.solution(5) == ItemSet{0, 1});
  CHECK(!table.value(1));
  CHECK(table.value(0) == Rational(0));
  CHECK(table.value(9) == Rational(13));
  auto direct = dp_equality_knapsack(items, size, 6, value);
  CHECK(*direct == ItemSet{0, 2});
}

TEST_CASE("equality knapsack matches subset enumeration") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 40; ++round) {
    int n = 2 + static_cast<int>(rng() % 4);
    ItemSet items;
    std::map<ItemId, long> size;
    CostMap value;
    long total = 0;
    for (int i = 0; i < n; ++i) {
      items.push_back(i);
      size[i] = 1 + static_cast<long>(rng() % 4);
      total += size[i];
      value[i] = rat(static_cast<long>(rng() % 15) - 7);
    }
    EqualityKnapsackTable table(items, size, value);
    for (long target = 0; target <= total; ++target) {
      std::optional<Rational> best;
      for (int mask = 0; mask < (1 << n); ++mask) {
        long s = 0;
        Rational v = 0;
        for (int i = 0; i < n; ++i)
          if (mask >> i & 1) {
            s += size[i];
            v += value[i];
          }
        if (s != target) continue;
        if (!best || v > *best) best = v;
      }
      CHECK(table.value(target) == best);
      if (best) {
        ItemSet sol = *table.solution(target);
        long s = 0;
        Rational v = 0;
        for (ItemId e : sol) {
          s += size[e];
          v += value[e];
        }
        CHECK(s == target);
        CHECK(v == *best);
      }
    }
  }
}

TEST_CASE("continuous knapsack follower fills by density") {
  ItemSet items = {0, 1};
  std::map<ItemId, long> size = {{0, 2}, {1, 3}};
  CostMap d = {{0, rat(4)}, {1, rat(3)}};
  auto y = follower_continuous_knapsack(items, size, d, rat(3));
  CHECK(y.at(0) == rat(1));
  CHECK(y.at(1) == rat(1, 3));
  CHECK_THROWS_AS(follower_continuous_knapsack(items, size, d, rat(6)),
                  InfeasibleError);
  CHECK(follower_continuous_knapsack(items, size, d, rat(0)).empty());
}

TEST_CASE("continuous knapsack follower is LP-optimal") {
  std::mt19937_64 rng(23);
  for (int round = 0; round < 60; ++round) {
    int n = 2 + static_cast<int>(rng() % 3);
    ItemSet items;
    std::map<ItemId, long> size;
    CostMap d;
    long total = 0;
    for (int i = 0; i < n; ++i) {
      items.push_back(i);
      size[i] = 1 + static_cast<long>(rng() % 3);
      total += size[i];
      d[i] = rat(1 + static_cast<long>(rng() % 9));
    }
    Rational b = rat(static_cast<long>(rng() % (2 * total + 1)), 2);
    auto y = follower_continuous_knapsack(items, size, d, b);
    Rational got = 0;
    Rational mass = 0;
    int interior = 0;
    for (const auto& [e, w] : y) {
      got += w * d.at(e);
      mass += w * size.at(e);
      if (w > 0 && w < 1) ++interior;
    }
    CHECK(mass == b);
    CHECK(interior <= 1);
    // Compare with every vertex: a 0/1 pattern plus one fractional item.
    for (int mask = 0; mask < (1 << n); ++mask) {
      long s = 0;
      Rational v = 0;
      for (int i = 0; i < n; ++i)
        if (mask >> i & 1) {
          s += size[i];
          v += d.at(i);
        }
      for (int f = -1; f < n; ++f) {
        Rational vv = v;
        Rational fill = b - s;
        if (f < 0) {
          if (fill != 0) continue;
        } else {
          if (mask >> f & 1) continue;
          if (fill < 0 || fill > Rational(size[f])) continue;
          vv += fill / size[f] * d.at(f);
        }
        CHECK(got >= vv);
      }
    }
  }
}

TEST_CASE("adversary minimizes the leader value of the fill") {
  OracleBudget budget;
  for (unsigned long seed = 1; seed <= 80; ++seed) {
    GenerateParams p;
    p.kind = "rbckp";
    p.n_f = 4;
    p.max_size = 3;
    p.max_values = 2;
    InstanceFile f = generate_random(seed, p);
    const KnapsackInstance& k = *f.knapsack;
    std::vector<Rational> bs = {k.capacity_lo, k.capacity_hi,
                                Rational((k.capacity_lo + k.capacity_hi) / 2)};
    for (const Rational& b : bs) {
      KnapsackAdversaryOutcome fast = rbckp_adversary_du(k, b);
      KnapsackAdversaryOutcome slow = oracle_knapsack_adversary(k, b, budget);
      CHECK(fast.value == slow.value);
      for (const auto& [e, v] : fast.scenario.follower_cost) {
        const auto& vs = k.uncertainty.values.at(e);
        CHECK(std::find(vs.begin(), vs.end(), v) != vs.end());
      }
    }
  }
}

TEST_CASE("leader curve matches the adversary pointwise") {
  OracleBudget budget;
  for (unsigned long seed = 1; seed <= 40; ++seed) {
    GenerateParams p;
    p.kind = "rbckp";
    p.n_f = 3;
    p.max_size = 3;
    p.max_values = 2;
    InstanceFile f = generate_random(seed, p);
    const KnapsackInstance& k = *f.knapsack;
    KnapsackLeaderSolution sol = rbckp_leader_du(k);
    CHECK(sol.capacity >= k.capacity_lo);
    CHECK(sol.capacity <= k.capacity_hi);
    std::vector<Rational> xs;
    for (const auto& [x, y] : sol.objective.breakpoints) xs.push_back(x);
    for (size_t i = 0; i + 1 < sol.objective.breakpoints.size(); ++i)
      xs.push_back((sol.objective.breakpoints[i].first +
                    sol.objective.breakpoints[i + 1].first) /
                   2);
    for (const Rational& x : xs) {
      Rational v = oracle_knapsack_adversary(k, x, budget).value;
      CHECK(sol.objective.eval(x) == v);
      CHECK(v <= sol.value);
    }
    CHECK(sol.objective.eval(sol.capacity) == sol.value);
  }
}

TEST_CASE("adversary rejects capacities outside the range") {
  KnapsackInstance k = small_instance();
  k.capacity_lo = rat(1);
  CHECK_THROWS_AS(rbckp_adversary_du(k, rat(0)), InfeasibleError);
  CHECK_THROWS_AS(rbckp_adversary_du(k, rat(19, 2)), InfeasibleError);
}
