#ifndef BILEVEL_IO_HPP
#define BILEVEL_IO_HPP

#include <algorithm>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "bilevel/core.hpp"
#include "bilevel/knapsack.hpp"
#include "bilevel/leader_binary.hpp"

namespace bilevel {

using Json = nlohmann::ordered_json;

// Parsed instance file. `kind` decides which payload parts are present:
//   bsp   - instance + certain scenario
//   rbsp  - instance + uncertainty (binary leader)
//   rcbsp - instance + uncertainty (fractional leader, disjoint sets)
//   rbckp - knapsack instance
struct InstanceFile {
  int schema_version = 1;
  std::string kind;
  Instance instance;
  std::optional<Scenario> certain;
  std::optional<UncertaintySet> uncertainty;
  std::optional<KnapsackInstance> knapsack;
};

namespace io_detail {

inline Rational parse_rat_field(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return Rational(static_cast<long>(j.get<long>()));
  if (j.is_string()) return rat_parse(j.get<std::string>());
  throw ValidationError("expected rational (integer or \"p/q\" string) at " + where);
}

inline CostMap parse_cost_map(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ValidationError("expected object at " + where);
  CostMap m;
  for (const auto& [key, val] : j.items()) {
    ItemId e;
    try {
      size_t pos = 0;
      e = std::stoi(key, &pos);
      if (pos != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw ValidationError("non-integer item id '" + key + "' in " + where);
    }
    m[e] = parse_rat_field(val, where + "." + key);
  }
  return m;
}

inline Json dump_cost_map(const CostMap& m) {
  Json j = Json::object();
  for (const auto& [e, v] : m) j[std::to_string(e)] = rat_str(v);
  return j;
}

inline UncertaintySet parse_uncertainty(const Json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw ValidationError("uncertainty block needs a kind");
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "discrete") {
    DiscreteU U;
    if (!j.contains("scenarios") || !j.at("scenarios").is_array() ||
        j.at("scenarios").empty())
      throw ValidationError("discrete uncertainty needs a non-empty scenario list");
    int idx = 0;
    for (const auto& sj : j.at("scenarios")) {
      Scenario d;
      d.follower_cost =
          parse_cost_map(sj, "uncertainty.scenarios[" + std::to_string(idx) + "]");
      U.scenarios.push_back(std::move(d));
      ++idx;
    }
    return U;
  }
  if (kind == "interval") {
    IntervalU U;
    U.lo = parse_cost_map(j.at("lo"), "uncertainty.lo");
    U.hi = parse_cost_map(j.at("hi"), "uncertainty.hi");
    for (const auto& [e, lo] : U.lo)
      if (lo > cost_at(U.hi, e, "uncertainty.hi"))
        throw ValidationError("interval with lo > hi at item " + std::to_string(e));
    return U;
  }
  if (kind == "discrete_uncorrelated") {
    DiscreteUncorrelatedU U;
    if (!j.contains("values") || !j.at("values").is_object())
      throw ValidationError("discrete_uncorrelated uncertainty needs a values object");
    for (const auto& [key, arr] : j.at("values").items()) {
      ItemId e = std::stoi(key);
      if (!arr.is_array() || arr.empty())
        throw ValidationError("empty value set at item " + key);
      std::vector<Rational> vs;
      for (const auto& vj : arr)
        vs.push_back(parse_rat_field(vj, "uncertainty.values." + key));
      std::sort(vs.begin(), vs.end());
      vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
      U.values[e] = std::move(vs);
    }
    return U;
  }
  throw ValidationError("unknown uncertainty kind '" + kind + "'");
}

inline Json dump_uncertainty(const UncertaintySet& U) {
  Json j = Json::object();
  if (const auto* d = std::get_if<DiscreteU>(&U)) {
    j["kind"] = "discrete";
    j["scenarios"] = Json::array();
    for (const Scenario& s : d->scenarios)
      j["scenarios"].push_back(dump_cost_map(s.follower_cost));
  } else if (const auto* iv = std::get_if<IntervalU>(&U)) {
    j["kind"] = "interval";
    j["lo"] = dump_cost_map(iv->lo);
    j["hi"] = dump_cost_map(iv->hi);
  } else {
    const auto& du = std::get<DiscreteUncorrelatedU>(U);
    j["kind"] = "discrete_uncorrelated";
    j["values"] = Json::object();
    for (const auto& [e, vs] : du.values) {
      Json arr = Json::array();
      for (const Rational& v : vs) arr.push_back(rat_str(v));
      j["values"][std::to_string(e)] = arr;
    }
  }
  return j;
}

}  // namespace io_detail

inline InstanceFile parse_instance(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& err) {
    throw ValidationError(std::string("JSON parse error: ") + err.what());
  }
  InstanceFile f;
  if (!j.is_object()) throw ValidationError("instance file must be a JSON object");
  f.schema_version = j.value("schema_version", 1);
  if (f.schema_version != 1) throw ValidationError("unsupported schema_version");
  if (!j.contains("kind")) throw ValidationError("missing kind");
  f.kind = j.at("kind").get<std::string>();

  if (f.kind == "rbckp") {
    KnapsackInstance k;
    if (!j.contains("items") || !j.at("items").is_array())
      throw ValidationError("missing items array");
    DiscreteUncorrelatedU du;
    for (const auto& ij : j.at("items")) {
      ItemId e = ij.at("id").get<int>();
      k.items.push_back(e);
      k.size[e] = ij.at("size").get<long>();
      k.leader_value[e] = io_detail::parse_rat_field(ij.at("c"), "items.c");
      std::vector<Rational> vs;
      for (const auto& vj : ij.at("values"))
        vs.push_back(io_detail::parse_rat_field(vj, "items.values"));
      std::sort(vs.begin(), vs.end());
      vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
      du.values[e] = std::move(vs);
    }
    std::sort(k.items.begin(), k.items.end());
    k.uncertainty = std::move(du);
    k.capacity_lo = io_detail::parse_rat_field(j.at("capacity_lo"), "capacity_lo");
    k.capacity_hi = io_detail::parse_rat_field(j.at("capacity_hi"), "capacity_hi");
    validate_knapsack(k);
    f.knapsack = std::move(k);
    return f;
  }

  if (f.kind != "bsp" && f.kind != "rbsp" && f.kind != "rcbsp")
    throw ValidationError("unknown kind '" + f.kind + "'");
  Instance inst;
  std::string policy = j.value("policy", "pessimistic");
  if (policy == "optimistic")
    inst.policy = Policy::Optimistic;
  else if (policy == "pessimistic")
    inst.policy = Policy::Pessimistic;
  else
    throw ValidationError("unknown policy '" + policy + "'");
  if (!j.contains("capacity")) throw ValidationError("missing capacity");
  inst.capacity = j.at("capacity").get<int>();
  if (!j.contains("items") || !j.at("items").is_array())
    throw ValidationError("missing items array");
  for (const auto& ij : j.at("items")) {
    ItemId e = ij.at("id").get<int>();
    bool leader = ij.value("leader", false);
    bool follower = ij.value("follower", false);
    if (!leader && !follower)
      throw ValidationError("item " + std::to_string(e) +
                            " belongs to neither side");
    if (leader) inst.leader_items.push_back(e);
    if (follower) inst.follower_items.push_back(e);
    inst.leader_cost[e] = io_detail::parse_rat_field(ij.at("c"), "items.c");
  }
  std::sort(inst.leader_items.begin(), inst.leader_items.end());
  std::sort(inst.follower_items.begin(), inst.follower_items.end());
  validate_instance(inst);
  f.instance = std::move(inst);

  if (f.kind == "bsp") {
    if (!j.contains("follower_cost"))
      throw ValidationError("kind bsp needs follower_cost");
    Scenario d;
    d.follower_cost = io_detail::parse_cost_map(j.at("follower_cost"), "follower_cost");
    for (ItemId e : f.instance.follower_items)
      cost_at(d.follower_cost, e, "follower cost");
    f.certain = std::move(d);
  } else {
    if (!j.contains("uncertainty")) throw ValidationError("missing uncertainty block");
    f.uncertainty = io_detail::parse_uncertainty(j.at("uncertainty"));
  }
  return f;
}

inline std::string serialize_instance(const InstanceFile& f) {
  Json j = Json::object();
  j["schema_version"] = f.schema_version;
  j["kind"] = f.kind;
  if (f.kind == "rbckp") {
    const KnapsackInstance& k = *f.knapsack;
    j["items"] = Json::array();
    for (ItemId e : k.items) {
      Json ij = Json::object();
      ij["id"] = e;
      ij["size"] = k.size.at(e);
      ij["c"] = rat_str(k.leader_value.at(e));
      Json arr = Json::array();
      for (const Rational& v : k.uncertainty.values.at(e)) arr.push_back(rat_str(v));
      ij["values"] = arr;
      j["items"].push_back(ij);
    }
    j["capacity_lo"] = rat_str(k.capacity_lo);
    j["capacity_hi"] = rat_str(k.capacity_hi);
    return j.dump(2) + "\n";
  }
  const Instance& inst = f.instance;
  j["policy"] = inst.policy == Policy::Optimistic ? "optimistic" : "pessimistic";
  j["capacity"] = inst.capacity;
  j["items"] = Json::array();
  for (ItemId e : inst.universe()) {
    Json ij = Json::object();
    ij["id"] = e;
    ij["leader"] = set_contains(inst.leader_items, e);
    ij["follower"] = set_contains(inst.follower_items, e);
    ij["c"] = rat_str(inst.leader_cost.at(e));
    j["items"].push_back(ij);
  }
  if (f.certain) j["follower_cost"] = io_detail::dump_cost_map(f.certain->follower_cost);
  if (f.uncertainty) j["uncertainty"] = io_detail::dump_uncertainty(*f.uncertainty);
  return j.dump(2) + "\n";
}

// --- Random generation -----------------------------------------------------

struct GenerateParams {
  std::string kind = "rbsp";             // bsp | rbsp | rcbsp | rbckp
  std::string uncertainty = "discrete";  // discrete | interval | discrete_uncorrelated
  int n_l = 3;
  int n_f = 5;
  int overlap = 0;       // leader items shared with the follower set
  int scenarios = 2;     // discrete
  int max_values = 2;    // discrete_uncorrelated set size
  int cost_lo = -5;
  int cost_hi = 5;
  int capacity = -1;     // -1 picks a feasible capacity from the seed
  Policy policy = Policy::Pessimistic;
  int max_size = 3;      // rbckp item sizes
};

namespace io_detail {

// Engine-independent uniform draw, so fixtures are stable across platforms.
inline long draw(std::mt19937_64& rng, long lo, long hi) {
  return lo + static_cast<long>(rng() % static_cast<unsigned long>(hi - lo + 1));
}

}  // namespace io_detail

inline InstanceFile generate_random(unsigned long seed, const GenerateParams& p) {
  std::mt19937_64 rng(seed);
  InstanceFile f;
  f.kind = p.kind;
  if (p.kind == "rbckp") {
    KnapsackInstance k;
    DiscreteUncorrelatedU du;
    int n = std::max(1, p.n_f);
    long A = 0;
    for (int i = 0; i < n; ++i) {
      k.items.push_back(i);
      long a = io_detail::draw(rng, 1, std::max(1, p.max_size));
      k.size[i] = a;
      A += a;
      k.leader_value[i] = rat(io_detail::draw(rng, p.cost_lo, p.cost_hi));
      std::set<Rational> vals;
      int want = static_cast<int>(io_detail::draw(rng, 1, std::max(1, p.max_values)));
      while (static_cast<int>(vals.size()) < want)
        vals.insert(rat(io_detail::draw(rng, 1, 20), io_detail::draw(rng, 1, 2)));
      du.values[i] = std::vector<Rational>(vals.begin(), vals.end());
    }
    k.uncertainty = std::move(du);
    long lo2 = io_detail::draw(rng, 0, 2 * A);
    long hi2 = io_detail::draw(rng, lo2, 2 * A);
    k.capacity_lo = rat(lo2, 2);
    k.capacity_hi = rat(hi2, 2);
    f.knapsack = std::move(k);
    return f;
  }

  Instance inst;
  inst.policy = p.policy;
  int overlap = std::min(p.overlap, p.n_l);
  for (int i = 0; i < p.n_l; ++i) inst.leader_items.push_back(i);
  for (int i = 0; i < overlap; ++i) inst.follower_items.push_back(i);
  for (int i = 0; i < p.n_f - overlap; ++i) inst.follower_items.push_back(p.n_l + i);
  for (ItemId e : inst.universe())
    inst.leader_cost[e] = rat(io_detail::draw(rng, p.cost_lo, p.cost_hi));
  int n = inst.n();
  inst.capacity =
      p.capacity >= 0 ? p.capacity : static_cast<int>(io_detail::draw(rng, 1, n));
  f.instance = inst;

  auto random_scenario = [&]() {
    Scenario d;
    for (ItemId e : inst.follower_items)
      d.follower_cost[e] = rat(io_detail::draw(rng, -6, 6));
    return d;
  };
  if (p.kind == "bsp") {
    f.certain = random_scenario();
    return f;
  }
  if (p.uncertainty == "discrete") {
    DiscreteU U;
    for (int s = 0; s < std::max(1, p.scenarios); ++s)
      U.scenarios.push_back(random_scenario());
    f.uncertainty = UncertaintySet(std::move(U));
  } else if (p.uncertainty == "interval") {
    IntervalU U;
    for (ItemId e : inst.follower_items) {
      long lo2 = io_detail::draw(rng, -6, 6);
      long w = io_detail::draw(rng, 0, 5);
      U.lo[e] = rat(lo2);
      U.hi[e] = rat(lo2 + w);
    }
    if (inst.policy == Policy::Optimistic) {
      // Shift endpoints to odd halves so no two intervals touch in a point.
      int idx = 0;
      for (ItemId e : inst.follower_items) {
        U.lo[e] += rat(idx, 2 * inst.n_f() + 1);
        U.hi[e] += rat(idx, 2 * inst.n_f() + 1);
        ++idx;
      }
    }
    f.uncertainty = UncertaintySet(std::move(U));
  } else if (p.uncertainty == "discrete_uncorrelated") {
    DiscreteUncorrelatedU U;
    int idx = 0;
    for (ItemId e : inst.follower_items) {
      std::set<Rational> vals;
      int want = static_cast<int>(io_detail::draw(rng, 1, std::max(1, p.max_values)));
      while (static_cast<int>(vals.size()) < want) {
        Rational v = rat(io_detail::draw(rng, -6, 6));
        // Same trick as for intervals: under the optimistic policy keep the
        // value sets pairwise disjoint so the hull has no touching endpoints.
        if (inst.policy == Policy::Optimistic) v += rat(idx, 2 * inst.n_f() + 1);
        vals.insert(v);
      }
      U.values[e] = std::vector<Rational>(vals.begin(), vals.end());
      ++idx;
    }
    f.uncertainty = UncertaintySet(std::move(U));
  } else {
    throw ValidationError("unknown uncertainty kind '" + p.uncertainty + "'");
  }
  return f;
}

// Named graphs and "n:a-b,c-d,..." edge-list syntax for the reduction
// generator.
inline Graph parse_graph(const std::string& text) {
  Graph g;
  if (text == "C4") {
    g.vertex_count = 4;
    g.edges = {{1, 2}, {2, 3}, {3, 4}, {4, 1}};
    return g;
  }
  if (text == "K4") {
    g.vertex_count = 4;
    g.edges = {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}};
    return g;
  }
  auto colon = text.find(':');
  if (colon == std::string::npos)
    throw ValidationError("graph must be C4, K4 or 'n:a-b,c-d,...'");
  g.vertex_count = std::stoi(text.substr(0, colon));
  std::string rest = text.substr(colon + 1);
  size_t pos = 0;
  while (pos < rest.size()) {
    size_t comma = rest.find(',', pos);
    std::string edge = rest.substr(pos, comma == std::string::npos ? std::string::npos
                                                                   : comma - pos);
    auto dash = edge.find('-');
    if (dash == std::string::npos) throw ValidationError("bad edge '" + edge + "'");
    g.edges.emplace_back(std::stoi(edge.substr(0, dash)),
                         std::stoi(edge.substr(dash + 1)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return g;
}

inline InstanceFile vertex_cover_file(const Graph& g) {
  auto [inst, U] = reduce_vertex_cover(g);
  InstanceFile f;
  f.kind = "rbsp";
  f.instance = std::move(inst);
  f.uncertainty = UncertaintySet(std::move(U));
  return f;
}

}  // namespace bilevel

#endif  // BILEVEL_IO_HPP
