#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "relaysel/solvers.hpp"

namespace rsel {

// Follow: play the root pair chosen at b0 and walk its successor links.
// Reselect: constrained argmax over the epoch's pairs at the current belief.
enum class ExecMode { Follow, Reselect };

class Controller {
 public:
  virtual ~Controller() = default;
  virtual void reset() {}
  virtual ActionMask act(int t, const FactoredBelief& b) = 0;
  // observation index (Instance::obs_index) of the relays selected by the last action
  virtual void observe(int, std::size_t) {}
};

std::unique_ptr<Controller> make_controller(const PolicySolution& sol, const Instance& inst,
                                            ExecMode mode = ExecMode::Follow);
std::unique_ptr<Controller> fixed_controller(ActionMask a);

struct EpochRecord {
  int epoch = 0;
  ActionMask action = 0;
  std::vector<int> state;  // true region per local relay
  Observation obs;
  double reward = 0.0;
  std::vector<double> cost;
};

struct EpisodeTrace {
  std::vector<EpochRecord> records;  // single-agent runs only
  double cum_reward = 0.0;           // discounted, summed over UEs
  std::vector<double> cum_cost;      // discounted, per UE
  double ee = 0.0;
};

struct EpochMetrics {
  int epoch = 0;  // 1-based: cumulative up to and including epoch
  double avg_cum_reward = 0.0;
  double avg_cum_cost = 0.0;
  double avg_cum_ee = 0.0;
  double stderr_reward = 0.0;
  double stderr_cost = 0.0;
};

struct SimulationMetrics {
  int runs = 0;
  double avg_reward = 0.0;
  double avg_cost = 0.0;  // summed over UEs
  double avg_ee = 0.0;
  double stderr_reward = 0.0;
  double stderr_cost = 0.0;
  std::vector<double> ue_reward, ue_cost, ue_cost_stderr, ue_ee;
  std::vector<EpochMetrics> epochs;
};

// One planner acting on part of the world. relay_map[k-1] is the world index of
// local relay k; ue_map[n] the world UE of local UE n.
struct Agent {
  const Instance* inst = nullptr;
  Controller* controller = nullptr;
  std::vector<int> relay_map;
  std::vector<int> ue_map;
};

struct World {
  std::vector<MarkovChain> chains;
  std::vector<int> s0;
  int horizon = 1;
  double gamma = 1.0;
  int ues = 1;
};

World world_of(const Instance& inst);
World world_of(const ScenarioConfig& cfg);

EpisodeTrace simulate_episode(const World& w, const std::vector<Agent>& agents, std::uint64_t seed,
                              bool record = false);
SimulationMetrics simulate(const World& w, const std::vector<Agent>& agents, int runs, std::uint64_t seed);

EpisodeTrace run_episode(const PolicySolution& sol, const Instance& inst, std::uint64_t seed,
                         ExecMode mode = ExecMode::Follow);
SimulationMetrics monte_carlo(const PolicySolution& sol, const Instance& inst, int runs, std::uint64_t seed,
                              ExecMode mode = ExecMode::Follow);
// always plays the direct link of every UE
SimulationMetrics baseline_cellular(const Instance& inst, int runs, std::uint64_t seed);

enum class MultiMode { Centralized, Distributed };
struct MultiUserResult {
  SimulationMetrics metrics;
  double planned_reward = 0.0;  // sum of root values
  std::vector<SolveStats> stats;
};
MultiUserResult run_multiuser(const ScenarioConfig& cfg, MultiMode mode, const SolveOptions& opt, int runs,
                              std::uint64_t seed);

// expected discounted reward and per-UE cost of following the controller from
// b0, by enumerating (state, pair) paths
struct Expectation {
  double reward = 0.0;
  std::vector<double> cost;
};
Expectation exact_expectation(const PolicySolution& sol, const Instance& inst);

struct ComplexityEstimate {
  double log10_ops = 0.0;
  double ops() const;
};
struct ComplexitySizes {
  int states = 16;   // regions per relay
  int beliefs = 16;  // belief points
  int ues = 1;
};
// methods: exact, cpbvi, gcpbvi, centralized, distributed
ComplexityEstimate complexity_model(const std::string& method, int k, const ComplexitySizes& sizes);
double cpbvi_gcpbvi_ratio(int k);
double centralized_distributed_ratio(int k, int n);

constexpr std::uint64_t kDefaultSeed = 20240531;

std::string metrics_csv_header();
std::string metrics_csv_rows(const SimulationMetrics& m, const std::string& scenario_id, const std::string& method);

}  // namespace rsel
