#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relaysel/sim.hpp"

namespace rsel {

// JSON report of a solve: belief set, predicted point-based error, work counters.
std::string solve_report(const PolicySolution& sol, const Instance& inst, const SolveOptions& opt);

// modes: d2d (per-UE planners), cellular (direct link only), centralized, distributed
struct CompareOptions {
  std::vector<std::string> modes{"d2d", "cellular"};
  std::vector<int> speeds;  // empty: the scenario's own speeds
  int runs = 100;
  std::uint64_t seed = kDefaultSeed;
  SolveOptions solve;
};

struct CompareRow {
  int speed = 0;  // 0: scenario speeds
  std::string mode;
  SimulationMetrics metrics;
  double planned_reward = 0.0;
  double relative_gain = 0.0;  // reward over the reference mode, minus 1
};

// the reference mode is cellular when requested, otherwise the first mode
std::vector<CompareRow> compare(const ScenarioConfig& cfg, const CompareOptions& opt);
std::string compare_csv(const std::string& scenario_id, const std::vector<CompareRow>& rows);

// complexity-model table for K = 1..k_max
std::string bench_csv(int k_max, int n_ues, const ComplexitySizes& sizes);

}  // namespace rsel
