#ifndef TESTS_FIXTURES_HPP
#define TESTS_FIXTURES_HPP

#include "bilevel/core.hpp"

namespace fixtures {

using namespace bilevel;

// Four leader items (ids 0..3) and four follower items (ids 4..7),
// capacity 5, pessimistic ties. Certain follower costs in fig1_scenario;
// fig2_scenario is the second scenario used by the robust variant.
inline Instance fig1_instance() {
  Instance inst;
  inst.leader_items = {0, 1, 2, 3};
  inst.follower_items = {4, 5, 6, 7};
  inst.capacity = 5;
  inst.policy = Policy::Pessimistic;
  inst.leader_cost = {{0, rat(-1)}, {1, rat(-1)}, {2, rat(0)}, {3, rat(3)},
                      {4, rat(1)},  {5, rat(-3)}, {6, rat(2)}, {7, rat(-1)}};
  return inst;
}

inline Scenario fig1_scenario() {
  Scenario d;
  d.follower_cost = {{4, rat(-2)}, {5, rat(0)}, {6, rat(1)}, {7, rat(1)}};
  return d;
}

inline Scenario fig2_scenario() {
  Scenario d;
  d.follower_cost = {{4, rat(-1)}, {5, rat(3)}, {6, rat(0)}, {7, rat(-3)}};
  return d;
}

inline DiscreteU fig2_uncertainty() {
  return DiscreteU{{fig1_scenario(), fig2_scenario()}};
}

// Three zero-cost leader items (0..2) against followers 3..5 with leader
// costs -1, 1, 0; capacity 3; two scenarios whose greedy orders are
// (3,4,5) and (5,3,4).
inline Instance ex62_instance() {
  Instance inst;
  inst.leader_items = {0, 1, 2};
  inst.follower_items = {3, 4, 5};
  inst.capacity = 3;
  inst.policy = Policy::Pessimistic;
  inst.leader_cost = {{0, rat(0)}, {1, rat(0)}, {2, rat(0)},
                      {3, rat(-1)}, {4, rat(1)}, {5, rat(0)}};
  return inst;
}

inline DiscreteU ex62_uncertainty() {
  Scenario d1, d2;
  d1.follower_cost = {{3, rat(0)}, {4, rat(1)}, {5, rat(2)}};
  d2.follower_cost = {{3, rat(1)}, {4, rat(2)}, {5, rat(0)}};
  return DiscreteU{{d1, d2}};
}

// Tight 2-approximation family at n = 6, eps = 1/4: leader owns items
// 0 (e1, cost 3/4) and 1 (e2, cost 1), the follower can take anything.
// Scenario orders: d1 = e4,e5,e6,e3,e1,e2 and d2 = e2,e4,e5,e6,e1,e3,
// materialized as consecutive integer costs.
inline Instance approx_example_instance() {
  Instance inst;
  inst.leader_items = {0, 1};
  inst.follower_items = {0, 1, 2, 3, 4, 5};
  inst.capacity = 4;
  inst.policy = Policy::Pessimistic;
  inst.leader_cost = {{0, rat(3, 4)}, {1, rat(1)}, {2, rat(3)},
                      {3, rat(0)},    {4, rat(0)}, {5, rat(0)}};
  return inst;
}

inline DiscreteU approx_example_uncertainty() {
  Scenario d1, d2;
  d1.follower_cost = {{3, rat(1)}, {4, rat(2)}, {5, rat(3)},
                      {2, rat(4)}, {0, rat(5)}, {1, rat(6)}};
  d2.follower_cost = {{1, rat(1)}, {3, rat(2)}, {4, rat(3)},
                      {5, rat(4)}, {0, rat(5)}, {2, rat(6)}};
  return DiscreteU{{d1, d2}};
}

// Interval analogue of the same family: only e2's cost is uncertain, and
// its interval allows exactly the three orders of the worked example.
inline IntervalU approx_example_interval() {
  IntervalU U;
  U.lo = {{3, rat(1)}, {4, rat(2)}, {5, rat(3)}, {2, rat(4)},
          {0, rat(5)}, {1, rat(5, 2)}};
  U.hi = {{3, rat(1)}, {4, rat(2)}, {5, rat(3)}, {2, rat(4)},
          {0, rat(5)}, {1, rat(9, 2)}};
  return U;
}

}  // namespace fixtures

#endif  // TESTS_FIXTURES_HPP
