#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bilevel/bsp.hpp"
#include "bilevel/continuous.hpp"
#include "bilevel/io.hpp"
#include "bilevel/knapsack.hpp"
#include "bilevel/leader_binary.hpp"
#include "bilevel/oracle.hpp"
#include "bilevel/plf.hpp"

namespace {

using namespace bilevel;

struct CommonOpts {
  std::string format = "json";
  std::string policy;  // empty = keep the file's policy
  long budget = 100000;
};

InstanceFile load(const std::string& path, const CommonOpts& opts) {
  std::ifstream in(path);
  if (!in.good()) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  InstanceFile f = parse_instance(ss.str());
  if (!opts.policy.empty()) {
    if (opts.policy == "opt" || opts.policy == "optimistic")
      f.instance.policy = Policy::Optimistic;
    else if (opts.policy == "pess" || opts.policy == "pessimistic")
      f.instance.policy = Policy::Pessimistic;
    else
      throw ValidationError("unknown policy '" + opts.policy + "'");
  }
  return f;
}

OracleBudget make_budget(const CommonOpts& opts) {
  OracleBudget b;
  b.max_scenarios = opts.budget;
  b.max_subsets = opts.budget;
  return b;
}

Json set_json(const ItemSet& s) {
  Json arr = Json::array();
  for (ItemId e : s) arr.push_back(e);
  return arr;
}

Json vec_json(const std::map<ItemId, Rational>& x) {
  Json obj = Json::object();
  for (const auto& [e, v] : x) obj[std::to_string(e)] = rat_frac_str(v);
  return obj;
}

Json scenario_json(const Scenario& d) {
  Json obj = Json::object();
  for (const auto& [e, v] : d.follower_cost) obj[std::to_string(e)] = rat_frac_str(v);
  return obj;
}

void emit(const CommonOpts& opts, const std::string& algorithm,
          const Rational& value, Json solution, Json witness, double runtime_ms) {
  if (opts.format == "json") {
    Json out = Json::object();
    out["value"] = rat_frac_str(value);
    out["solution"] = std::move(solution);
    out["witness"] = std::move(witness);
    out["algorithm"] = algorithm;
    out["runtime_ms"] = runtime_ms;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "value " << rat_frac_str(value) << "\n";
    std::cout << "algorithm " << algorithm << "\n";
  }
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                   t0)
      .count();
}

std::string default_algorithm(const InstanceFile& f) {
  if (f.kind == "bsp") return "bsp";
  if (f.kind == "rcbsp") return "continuous";
  if (f.kind == "rbckp") return "rbckp-leader";
  ItemSet overlap;
  std::set_intersection(f.instance.leader_items.begin(),
                        f.instance.leader_items.end(),
                        f.instance.follower_items.begin(),
                        f.instance.follower_items.end(),
                        std::back_inserter(overlap));
  return overlap.empty() ? "disjoint" : "enum";
}

void check_pairing(const std::string& kind, const std::string& algorithm) {
  static const std::map<std::string, std::vector<std::string>> valid = {
      {"bsp", {"bsp"}},
      {"rbsp", {"disjoint", "approx2", "enum", "prefix-xp"}},
      {"rcbsp", {"continuous"}},
      {"rbckp", {"rbckp-leader", "rbckp-adversary"}},
  };
  auto it = valid.find(kind);
  if (it != valid.end()) {
    for (const std::string& a : it->second)
      if (a == algorithm) return;
  }
  std::string msg = "algorithm '" + algorithm + "' does not apply to kind '" + kind +
                    "'; valid pairs:";
  for (const auto& [k, as] : valid)
    for (const std::string& a : as) msg += " " + k + "/" + a;
  throw ValidationError(msg);
}

int cmd_solve(const std::string& path, std::string algorithm, const CommonOpts& opts) {
  InstanceFile f = load(path, opts);
  if (algorithm.empty() || algorithm == "auto") algorithm = default_algorithm(f);
  check_pairing(f.kind, algorithm);
  auto t0 = std::chrono::steady_clock::now();
  if (algorithm == "bsp") {
    BilevelSolution sol = solve_bsp(f.instance, *f.certain);
    Json solution = Json::object();
    solution["leader_set"] = set_json(sol.leader_set);
    solution["follower_set"] = set_json(sol.follower_set);
    emit(opts, algorithm, sol.value, solution, Json(), ms_since(t0));
    return 0;
  }
  if (algorithm == "continuous") {
    FractionalLeaderSolution sol = rcbsp_leader(f.instance, *f.uncertainty);
    Json solution = Json::object();
    solution["x"] = vec_json(sol.x);
    solution["leader_mass"] = rat_frac_str(sol.leader_mass);
    emit(opts, algorithm, sol.value, solution, Json(), ms_since(t0));
    return 0;
  }
  if (algorithm == "rbckp-leader") {
    KnapsackLeaderSolution sol = rbckp_leader_du(*f.knapsack);
    Json solution = Json::object();
    solution["capacity"] = rat_frac_str(sol.capacity);
    emit(opts, algorithm, sol.value, solution, Json(), ms_since(t0));
    return 0;
  }
  RobustSolution sol;
  if (algorithm == "disjoint")
    sol = solve_disjoint(f.instance, *f.uncertainty);
  else if (algorithm == "approx2")
    sol = approx2(f.instance, *f.uncertainty);
  else if (algorithm == "enum")
    sol = exact_enumerate(f.instance, *f.uncertainty);
  else
    sol = exact_prefix_xp(f.instance, *f.uncertainty);
  Json solution = Json::object();
  solution["leader_set"] = set_json(sol.leader_set);
  Json witness = Json::object();
  witness["scenario"] = scenario_json(sol.worst_scenario);
  witness["follower_set"] = set_json(sol.worst_follower_set);
  emit(opts, algorithm, sol.worst_value, solution, witness, ms_since(t0));
  return 0;
}

int cmd_adversary(const std::string& path, const std::string& leader_set,
                  const std::string& bl, const std::string& capacity,
                  const CommonOpts& opts) {
  InstanceFile f = load(path, opts);
  auto t0 = std::chrono::steady_clock::now();
  if (f.kind == "rbckp") {
    if (capacity.empty())
      throw ValidationError("kind rbckp needs --capacity for the adversary");
    KnapsackAdversaryOutcome out = rbckp_adversary_du(*f.knapsack, rat_parse(capacity));
    Json witness = Json::object();
    witness["scenario"] = scenario_json(out.scenario);
    witness["follower_vector"] = vec_json(out.follower_vector);
    emit(opts, "rbckp-adversary", out.value, Json(), witness, ms_since(t0));
    return 0;
  }
  if (!f.uncertainty)
    throw ValidationError("kind bsp has no adversary; use a robust kind");
  if (f.kind == "rcbsp" || !bl.empty()) {
    Rational mass = bl.empty() ? Rational(0) : rat_parse(bl);
    auto x = solve_continuous_selection(f.instance.leader_items, mass,
                                        f.instance.leader_cost);
    AdversaryOutcome out = rcbsp_adversary(f.instance, *f.uncertainty, x);
    Json solution = Json::object();
    solution["x"] = vec_json(x);
    Json witness = Json::object();
    witness["scenario"] = scenario_json(out.scenario);
    witness["follower_vector"] = vec_json(out.follower_vector);
    emit(opts, "continuous-adversary", out.value, solution, witness, ms_since(t0));
    return 0;
  }
  ItemSet X;
  if (!leader_set.empty()) {
    std::stringstream ss(leader_set);
    std::string tok;
    while (std::getline(ss, tok, ',')) X.push_back(std::stoi(tok));
    std::sort(X.begin(), X.end());
  }
  AdversaryOutcome out = adversary(f.instance, *f.uncertainty, X);
  Json solution = Json::object();
  solution["leader_set"] = set_json(X);
  Json witness = Json::object();
  witness["scenario"] = scenario_json(out.scenario);
  witness["follower_set"] = set_json(out.follower_set);
  emit(opts, "adversary", out.value, solution, witness, ms_since(t0));
  return 0;
}

int cmd_generate(const GenerateParams& params, unsigned long seed,
                 const std::string& graph, const std::string& out_path) {
  InstanceFile f;
  if (!graph.empty())
    f = vertex_cover_file(parse_graph(graph));
  else
    f = generate_random(seed, params);
  std::string text = serialize_instance(f);
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out.good()) throw ValidationError("cannot write '" + out_path + "'");
    out << text;
  }
  return 0;
}

int cmd_plf_dump(const std::string& path, const CommonOpts& opts) {
  InstanceFile f = load(path, opts);
  PiecewiseLinearFunction g;
  if (f.kind == "rbckp")
    g = rbckp_leader_du(*f.knapsack).objective;
  else if (f.uncertainty)
    g = rcbsp_objective(f.instance, *f.uncertainty);
  else
    throw ValidationError("plf-dump needs a robust instance");
  std::cout << plf_dump(g);
  return 0;
}

int cmd_oracle_check(const std::string& algorithm, unsigned long seed, int trials,
                     const CommonOpts& opts) {
  OracleBudget budget = make_budget(opts);
  Rational max_ratio = 0;
  for (unsigned long s = seed; s < seed + static_cast<unsigned long>(trials); ++s) {
    GenerateParams p;
    p.n_l = 3;
    p.n_f = 4;
    InstanceFile f;
    Rational fast, slow;
    if (algorithm == "approx2") {
      p.kind = "rbsp";
      p.overlap = static_cast<int>(s % 4);
      p.cost_lo = 0;
      f = generate_random(s, p);
      fast = approx2(f.instance, *f.uncertainty).worst_value;
      slow = oracle_rbsp(f.instance, *f.uncertainty, budget).worst_value;
      if (slow > 0) max_ratio = std::max(Rational(max_ratio), Rational(fast / slow));
      if (fast > 2 * slow) {
        std::cerr << "approximation ratio above 2 at seed " << s << "\n"
                  << serialize_instance(f);
        return 5;
      }
      continue;
    }
    if (algorithm == "disjoint") {
      p.kind = "rbsp";
      p.uncertainty = s % 2 ? "interval" : "discrete";
      f = generate_random(s, p);
      fast = solve_disjoint(f.instance, *f.uncertainty).worst_value;
      slow = oracle_rbsp(f.instance, *f.uncertainty, budget).worst_value;
    } else if (algorithm == "enum" || algorithm == "prefix-xp") {
      p.kind = "rbsp";
      p.overlap = static_cast<int>(s % 4);
      f = generate_random(s, p);
      RobustSolution r = algorithm == "enum"
                             ? exact_enumerate(f.instance, *f.uncertainty)
                             : exact_prefix_xp(f.instance, *f.uncertainty);
      fast = r.worst_value;
      slow = oracle_rbsp(f.instance, *f.uncertainty, budget).worst_value;
    } else if (algorithm == "continuous") {
      p.kind = "rcbsp";
      p.uncertainty = s % 2 ? "interval" : "discrete_uncorrelated";
      f = generate_random(s, p);
      FractionalLeaderSolution r = rcbsp_leader(f.instance, *f.uncertainty);
      fast = r.value;
      slow = oracle_adversary_continuous(f.instance, *f.uncertainty, r.x, budget).value;
    } else if (algorithm == "rbckp-adversary") {
      p.kind = "rbckp";
      p.n_f = 4;
      f = generate_random(s, p);
      Rational b = (f.knapsack->capacity_lo + f.knapsack->capacity_hi) / 2;
      fast = rbckp_adversary_du(*f.knapsack, b).value;
      slow = oracle_knapsack_adversary(*f.knapsack, b, budget).value;
    } else {
      throw ValidationError("unknown oracle-check algorithm '" + algorithm + "'");
    }
    if (fast != slow) {
      std::cerr << "mismatch at seed " << s << ": " << rat_frac_str(fast) << " vs "
                << rat_frac_str(slow) << "\n"
                << serialize_instance(f);
      return 5;
    }
  }
  if (algorithm == "approx2")
    std::cout << "max observed ratio " << rat_frac_str(max_ratio) << "\n";
  std::cout << "checked " << trials << " instances\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bilevel selection solvers"};
  app.require_subcommand(1);
  CommonOpts opts;
  app.add_option("--format", opts.format, "json or text")
      ->check(CLI::IsMember({"json", "text"}));
  app.add_option("--policy", opts.policy, "override the instance policy (opt|pess)");
  app.add_option("--budget", opts.budget, "oracle enumeration budget");

  std::string path, algorithm, leader_set, bl, capacity, graph, out_path;
  unsigned long seed = 1;
  int trials = 50;
  GenerateParams params;

  CLI::App* solve = app.add_subcommand("solve", "solve an instance file");
  solve->add_option("file", path)->required();
  solve->add_option("--algorithm", algorithm,
                    "bsp | disjoint | approx2 | enum | prefix-xp | continuous | "
                    "rbckp-leader");

  CLI::App* adv = app.add_subcommand("adversary", "worst scenario for a leader choice");
  adv->add_option("file", path)->required();
  adv->add_option("--leader-set", leader_set, "comma-separated item ids");
  adv->add_option("--bl", bl, "fractional leader mass (continuous variants)");
  adv->add_option("--capacity", capacity, "capacity b (rbckp)");

  CLI::App* approx = app.add_subcommand("approx", "factor-2 approximation");
  approx->add_option("file", path)->required();

  CLI::App* exact = app.add_subcommand("exact", "exact leader enumeration");
  exact->add_option("file", path)->required();
  exact->add_option("--algorithm", algorithm, "enum | prefix-xp");

  CLI::App* gen = app.add_subcommand("generate", "write a random instance");
  gen->add_option("--seed", seed);
  gen->add_option("--kind", params.kind, "bsp | rbsp | rcbsp | rbckp");
  gen->add_option("--uncertainty", params.uncertainty,
                  "discrete | interval | discrete_uncorrelated");
  gen->add_option("--n-l", params.n_l);
  gen->add_option("--n-f", params.n_f);
  gen->add_option("--overlap", params.overlap);
  gen->add_option("--scenarios", params.scenarios);
  gen->add_option("--max-values", params.max_values);
  gen->add_option("--capacity-int", params.capacity);
  gen->add_option("--max-size", params.max_size);
  gen->add_option("--graph", graph, "vertex-cover reduction: C4, K4 or n:a-b,...");
  gen->add_option("-o,--output", out_path);
  std::string gen_policy;
  gen->add_option("--gen-policy", gen_policy, "opt | pess");

  CLI::App* plf = app.add_subcommand("plf-dump", "print the leader objective curve");
  plf->add_option("file", path)->required();

  CLI::App* check = app.add_subcommand("oracle-check",
                                       "compare an algorithm against brute force");
  check->add_option("--algorithm", algorithm)->required();
  check->add_option("--seed", seed);
  check->add_option("--trials", trials);

  for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(path, algorithm, opts);
    if (adv->parsed()) return cmd_adversary(path, leader_set, bl, capacity, opts);
    if (approx->parsed()) return cmd_solve(path, "approx2", opts);
    if (exact->parsed())
      return cmd_solve(path, algorithm.empty() ? "enum" : algorithm, opts);
    if (gen->parsed()) {
      if (gen_policy == "opt") params.policy = Policy::Optimistic;
      else if (gen_policy == "pess" || gen_policy.empty()) params.policy = Policy::Pessimistic;
      else throw ValidationError("unknown policy '" + gen_policy + "'");
      return cmd_generate(params, seed, graph, out_path);
    }
    if (plf->parsed()) return cmd_plf_dump(path, opts);
    if (check->parsed()) return cmd_oracle_check(algorithm, seed, trials, opts);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
