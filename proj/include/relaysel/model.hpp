#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relaysel/error.hpp"

namespace rsel {

struct Coord {
  int x = 1;
  int y = 1;
  bool operator==(const Coord&) const = default;
};

struct RelaySpec {
  double eps_fix = 0.7;
  int speed = 1;
  Coord initial_state;
  // optional per-region overrides of the geometric link reward and power cost
  std::vector<double> reward_table;
  std::vector<double> cost_table;
};

// relays lists the 1-based candidate relays of this UE; empty means all.
struct UeSpec {
  Coord position;
  std::vector<int> relays;
};

struct DirectLink {
  bool enabled = true;
  std::optional<double> reward;  // unset: full-rate UE->BS link metric
  double cost = 0.0;
};

struct ScenarioConfig {
  std::string id = "scenario";
  int grid_x = 4;
  int grid_y = 4;
  std::vector<RelaySpec> relays;
  std::vector<UeSpec> ues;
  std::optional<Coord> bs_position;  // unset: (grid_x, grid_y)
  double r_max = 500.0;
  double c_max = 250.0;
  double c_th = 1000.0;
  int horizon = 5;
  double gamma = 1.0;
  DirectLink direct_link;
};

// Table-I defaults: 4x4 grid, eps_fix 0.7, R_max 500, C_max 250, C_th 1000, T 5, gamma 1.
ScenarioConfig table1_scenario(int n_relays = 3, int n_ues = 1);

void validate(const ScenarioConfig& cfg);

ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::string& path);
std::string scenario_to_json(const ScenarioConfig& cfg);
void save_scenario(const ScenarioConfig& cfg, const std::string& path);
std::string fingerprint(const ScenarioConfig& cfg);

int region_count(const ScenarioConfig& cfg);
int region_index(const ScenarioConfig& cfg, Coord c);  // (x-1) + grid_x*(y-1)
Coord region_coord(const ScenarioConfig& cfg, int region);
Coord bs_position(const ScenarioConfig& cfg);

double link_metric(Coord src, Coord dst, const ScenarioConfig& cfg);
double direct_reward(const ScenarioConfig& cfg, int ue = 0);

// relay_index 0 is the direct link; states are region indices.
double relay_reward(int relay_state, int relay_index, const ScenarioConfig& cfg, int ue = 0);
double relay_cost(int relay_state, int relay_index, const ScenarioConfig& cfg);

using JointState = std::vector<int>;

// action lists indices from {0..K}; state[i-1] is relay i's region.
double total_reward(const JointState& state, const std::vector<int>& action,
                    const ScenarioConfig& cfg, int ue = 0);
double total_cost(const JointState& state, const std::vector<int>& action,
                  const ScenarioConfig& cfg);

}  // namespace rsel
