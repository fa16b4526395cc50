#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "relaysel/alpha.hpp"
#include "relaysel/belief.hpp"

namespace rsel {

enum class Method { Exact, Cpbvi, Gcpbvi, Oracle };
// Reachable: keep pairs Pareto-optimal at some belief reachable from a one-hot
// start (exact there). Dominance: componentwise over states. Grid: optimal on a belief grid.
enum class PruneMode { Reachable, Dominance, Grid };

std::string method_name(Method m);
Method parse_method(const std::string& s);

struct SolveOptions {
  Method method = Method::Gcpbvi;
  double eps = 0.01;         // target belief-set density when belief_h == 0
  int belief_h = 0;          // explicit h-belief set
  std::size_t belief_cap = kBeliefSetCap;
  std::size_t frontier_cap = 4096;
  std::size_t frontier_work = 200000;  // exact knapsack merge budget per frontier
  std::size_t cross_sum_cap = 100000;
  std::size_t exact_pair_cap = 200000;
  PruneMode prune = PruneMode::Reachable;
  int grid_resolution = 21;
  bool greedy_inclusive = false;      // admission with <= instead of <
  bool singleton_augmented = false;   // compare the greedy result with the best single element
};

struct SolveStats {
  std::uint64_t backups = 0;
  std::uint64_t frontier_builds = 0;
  std::uint64_t item_evaluations = 0;
  std::uint64_t action_evaluations = 0;
  std::uint64_t approx_frontiers = 0;
  std::uint64_t fallbacks = 0;
  std::uint64_t pairs_generated = 0;
  double wall_seconds = 0.0;
  std::map<std::string, double> flat() const;
};

// Per-epoch pair sets (epochs[t] is decision epoch t = 0..T-1) whose pairs
// link to successors in epochs[t+1]. `root` is the pair played at b0.
struct PolicySolution {
  Method method = Method::Gcpbvi;
  std::vector<ValueFunctionSet> epochs;
  BeliefSet beliefs;
  std::string fingerprint;
  SolveStats stats;
  int root = 0;
  double value_r = 0.0;
  std::vector<double> value_c;
  int horizon() const { return static_cast<int>(epochs.size()); }
};

// Algorithm-level backups. `next` is the following epoch's set (nullptr at the last epoch).
ValueFunctionSet exact_backup(const ValueFunctionSet* next, const Instance& inst, int epoch,
                              const SolveOptions& opt, SolveStats& stats);
ValueFunctionSet cpbvi_backup(const ValueFunctionSet* next, const BeliefSet& set, const Instance& inst, int epoch,
                              const SolveOptions& opt, SolveStats& stats);
ValueFunctionSet gcpbvi_backup(const ValueFunctionSet* next, const BeliefSet& set, const Instance& inst, int epoch,
                               const SolveOptions& opt, SolveStats& stats);

// Literal greedy over per-relay candidate pairs: ratio selection, budget
// admission v_sum + c < c_th (<= when inclusive), additive accumulation.
struct GreedyResult {
  AlphaPair pair;
  std::vector<int> selected;  // indices into per_relay
  double value_r = 0.0;
  double value_c = 0.0;
};
GreedyResult greedy_constrained_argmax(const std::vector<std::vector<AlphaPair>>& per_relay, const FactoredBelief& b,
                                       const Instance& inst, double c_th, bool inclusive = false);

PolicySolution solve(const Instance& inst, const SolveOptions& opt);
PolicySolution brute_force_oracle(const Instance& inst, const SolveOptions& opt = {});
// value at b0 of the best budget-feasible pair of epochs[0]
void select_root(PolicySolution& sol, const Instance& inst, const FactoredBelief& b0);

// Oracle paths: every deterministic policy tree at fixed beliefs, optimum under the root budget.
struct OracleValue {
  double r = 0.0;
  std::vector<double> c;
  bool feasible = false;
};
OracleValue oracle_value(const Instance& inst, const FactoredBelief& b0);

struct ErrorBound {
  double eta_r = 0.0;
  double eta_c = 0.0;
};
ErrorBound pbvi_error_bound(double eps_b, double gamma, int h, double r_range, double c_range);

// Continuation policy for Q evaluation: action at (epoch, belief).
using BeliefPolicy = std::function<ActionMask(int, const FactoredBelief&)>;
BeliefPolicy open_loop_policy(std::vector<ActionMask> actions);
BeliefPolicy reselect_policy(const PolicySolution& sol, const Instance& inst);

struct QEvaluation {
  FactoredBelief belief;
  ActionMask action = 0;
  int epoch = 0;
  double q_r = 0.0;
  std::vector<double> q_c;
};
QEvaluation evaluate_q(const Instance& inst, const BeliefPolicy& pi, const FactoredBelief& b, int epoch,
                       ActionMask a);

struct Derivative {
  double d_r = 0.0;
  std::vector<double> d_c;
};
Derivative discrete_derivative(const Instance& inst, const BeliefPolicy& pi, const FactoredBelief& b, int epoch,
                               int e, ActionMask m);

std::string policy_to_json(const PolicySolution& sol, const Instance& inst);
PolicySolution policy_from_json(const std::string& text, const Instance& inst);
void save_policy(const PolicySolution& sol, const Instance& inst, const std::string& path);
PolicySolution load_policy(const std::string& path, const Instance& inst);

}  // namespace rsel
