#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "bilevel/adversary.hpp"
#include "bilevel/io.hpp"
#include "bilevel/oracle.hpp"
#include "fixtures.hpp"

using namespace bilevel;

namespace {

Instance three_item_instance(std::vector<Rational> costs, int bf) {
  Instance inst;
  inst.leader_items = {};
  inst.follower_items = {0, 1, 2};
  inst.capacity = bf;
  inst.policy = Policy::Pessimistic;
  for (int i = 0; i < 3; ++i) inst.leader_cost[i] = costs[i];
  return inst;
}

IntervalU three_item_intervals() {
  IntervalU U;
  U.lo = {{0, rat(0)}, {1, rat(2)}, {2, rat(3)}};
  U.hi = {{0, rat(1)}, {1, rat(5)}, {2, rat(4)}};
  return U;
}

}  // namespace

TEST_CASE("discrete adversary picks the worse scenario, first on ties") {
  Instance inst = fixtures::ex62_instance();
  DiscreteU U = fixtures::ex62_uncertainty();
  // All leader prefixes of the zero-cost items give worst value 0.
  std::vector<ItemSet> xs = {{}, {0}, {0, 1}, {0, 1, 2}};
  for (const ItemSet& X : xs) {
    AdversaryOutcome out = adversary_discrete(inst, U, X);
    CHECK(out.value == rat(0));
    // Replay the witness scenario through the follower.
    ItemSet Y = follower_respond(inst, X, out.scenario);
    CHECK(Y == out.follower_set);
    CHECK(leader_value(inst, X, Y) == out.value);
  }
  // X = {0}: scenario ties at the follower level break toward d1,
  // whose greedy order is (3,4,5).
  AdversaryOutcome out = adversary_discrete(inst, U, {0});
  CHECK(out.scenario.follower_cost == U.scenarios[0].follower_cost);
  CHECK(out.follower_set == ItemSet{3, 4});
}

TEST_CASE("interval adversary worked example") {
  Instance inst = three_item_instance({rat(0), rat(1), rat(10)}, 2);
  IntervalU U = three_item_intervals();
  AdversaryOutcome out = adversary_interval(inst, U, {});
  CHECK(out.value == rat(10));
  CHECK(out.follower_set == ItemSet{0, 2});
  CHECK(out.scenario.follower_cost.at(0) == rat(0));
  CHECK(out.scenario.follower_cost.at(2) == rat(3));
  CHECK(out.scenario.follower_cost.at(1) == rat(5));
  // The witness scenario must reproduce the claimed follower set.
  CHECK(follower_respond(inst, {}, out.scenario) == out.follower_set);
}

TEST_CASE("interval adversary matches order enumeration") {
  OracleBudget budget;
  for (unsigned long seed = 1; seed <= 100; ++seed) {
    GenerateParams p;
    p.kind = "rbsp";
    p.uncertainty = "interval";
    p.n_l = 2;
    p.n_f = 5;
    p.policy = seed % 2 ? Policy::Pessimistic : Policy::Optimistic;
    InstanceFile f = generate_random(seed, p);
    const auto& U = *f.uncertainty;
    int xc = std::max(0, f.instance.capacity - f.instance.n_f());
    ItemSet X(f.instance.leader_items.begin(),
              f.instance.leader_items.begin() + xc);
    AdversaryOutcome fast =
        adversary_interval(f.instance, std::get<IntervalU>(U), X);
    AdversaryOutcome slow = oracle_adversary(f.instance, U, X, budget);
    CHECK(fast.value == slow.value);
    if (f.instance.capacity > static_cast<int>(X.size())) {
      ItemSet Y = follower_respond(f.instance, X, fast.scenario);
      CHECK(leader_value(f.instance, X, Y) == fast.value);
    }
  }
}

TEST_CASE("one-point intersections are rejected only when optimistic") {
  Instance inst = three_item_instance({rat(0), rat(1), rat(2)}, 1);
  IntervalU U;
  U.lo = {{0, rat(0)}, {1, rat(1)}, {2, rat(5)}};
  U.hi = {{0, rat(1)}, {1, rat(3)}, {2, rat(6)}};
  CHECK_NOTHROW(adversary_interval(inst, U, {}));
  inst.policy = Policy::Optimistic;
  CHECK_THROWS_AS(adversary_interval(inst, U, {}), ValidationError);
}

TEST_CASE("malformed intervals are rejected") {
  Instance inst = three_item_instance({rat(0), rat(1), rat(2)}, 1);
  IntervalU U = three_item_intervals();
  U.hi[1] = rat(1);
  CHECK_THROWS_AS(adversary_interval(inst, U, {}), ValidationError);
}

TEST_CASE("hull of a value-set family keeps extreme points") {
  DiscreteUncorrelatedU du;
  du.values = {{0, {rat(1), rat(4)}}, {1, {rat(2)}}, {2, {rat(0), rat(3), rat(5)}}};
  IntervalU iv = du_to_interval(du);
  CHECK(iv.lo.at(0) == rat(1));
  CHECK(iv.hi.at(0) == rat(4));
  CHECK(iv.lo.at(1) == rat(2));
  CHECK(iv.hi.at(1) == rat(2));
  CHECK(iv.lo.at(2) == rat(0));
  CHECK(iv.hi.at(2) == rat(5));
}

TEST_CASE("value-set adversary returns componentwise feasible witnesses") {
  OracleBudget budget;
  for (unsigned long seed = 1; seed <= 60; ++seed) {
    GenerateParams p;
    p.kind = "rbsp";
    p.uncertainty = "discrete_uncorrelated";
    p.n_l = 2;
    p.n_f = 4;
    p.max_values = 2;
    InstanceFile f = generate_random(seed, p);
    const auto& du = std::get<DiscreteUncorrelatedU>(*f.uncertainty);
    int xc = std::max(0, f.instance.capacity - f.instance.n_f());
    ItemSet X(f.instance.leader_items.begin(),
              f.instance.leader_items.begin() + xc);
    AdversaryOutcome out = adversary(f.instance, *f.uncertainty, X);
    for (const auto& [e, v] : out.scenario.follower_cost) {
      const auto& vs = du.values.at(e);
      CHECK(std::find(vs.begin(), vs.end(), v) != vs.end());
    }
    AdversaryOutcome slow = oracle_adversary(f.instance, *f.uncertainty, X, budget);
    CHECK(out.value == slow.value);
  }
}

TEST_CASE("empty follower share falls back to the leader cost") {
  Instance inst = three_item_instance({rat(2), rat(3), rat(4)}, 0);
  AdversaryOutcome out = adversary_interval(inst, three_item_intervals(), {});
  CHECK(out.value == rat(0));
  CHECK(out.follower_set.empty());
}
