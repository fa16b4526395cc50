#include "relaysel/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

namespace rsel {

ScenarioConfig table1_scenario(int n_relays, int n_ues) {
  ScenarioConfig cfg;
  cfg.id = "table1";
  for (int n = 0; n < n_ues; ++n) {
    UeSpec u;
    u.position = Coord{1 + (n % cfg.grid_x), 1 + (n / cfg.grid_x) % cfg.grid_y};
    cfg.ues.push_back(u);
  }
  // relays are discovered where they currently serve UE 0 best: the
  // highest-reward regions, ties to the lower region index, cycling when K > |S|
  const int regions = cfg.grid_x * cfg.grid_y;
  std::vector<std::pair<double, int>> rank;
  for (int s = 0; s < regions; ++s) {
    Coord pos{1 + s % cfg.grid_x, 1 + s / cfg.grid_x};
    double up = link_metric(cfg.ues[0].position, pos, cfg);
    double down = link_metric(pos, bs_position(cfg), cfg);
    rank.emplace_back(-std::min(up, down), s);
  }
  std::sort(rank.begin(), rank.end());
  for (int i = 0; i < n_relays; ++i) {
    RelaySpec r;
    r.eps_fix = 0.7;
    r.speed = 1;
    int s = rank[i % regions].second;
    r.initial_state = Coord{1 + s % cfg.grid_x, 1 + s / cfg.grid_x};
    cfg.relays.push_back(r);
  }
  return cfg;
}

namespace {

void check_coord(const ScenarioConfig& cfg, Coord c, const std::string& field) {
  if (c.x < 1 || c.x > cfg.grid_x || c.y < 1 || c.y > cfg.grid_y)
    throw ValidationError(field + ": position (" + std::to_string(c.x) + "," +
                          std::to_string(c.y) + ") outside grid " +
                          std::to_string(cfg.grid_x) + "x" + std::to_string(cfg.grid_y));
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

void validate(const ScenarioConfig& cfg) {
  if (cfg.grid_x < 1) throw ValidationError("grid_x: must be >= 1");
  if (cfg.grid_y < 1) throw ValidationError("grid_y: must be >= 1");
  if (!finite(cfg.gamma) || cfg.gamma < 0.0 || cfg.gamma > 1.0)
    throw ValidationError("gamma: must lie in [0,1]");
  if (cfg.horizon < 1) throw ValidationError("horizon: must be >= 1");
  if (!finite(cfg.c_th) || cfg.c_th < 0.0) throw ValidationError("c_th: must be >= 0");
  if (!finite(cfg.r_max) || cfg.r_max <= 0.0) throw ValidationError("r_max: must be > 0");
  if (!finite(cfg.c_max) || cfg.c_max <= 0.0) throw ValidationError("c_max: must be > 0");
  if (cfg.relays.empty()) throw ValidationError("relays: at least one relay is required");
  if (cfg.ues.empty()) throw ValidationError("ues: at least one UE is required");
  for (size_t i = 0; i < cfg.relays.size(); ++i) {
    const auto& r = cfg.relays[i];
    std::string p = "relays[" + std::to_string(i) + "]";
    if (!finite(r.eps_fix) || r.eps_fix < 0.0 || r.eps_fix > 1.0)
      throw ValidationError(p + ".eps_fix: must lie in [0,1]");
    if (r.speed < 1) throw ValidationError(p + ".speed: must be >= 1");
    check_coord(cfg, r.initial_state, p + ".initial_state");
    for (const auto* tab : {&r.reward_table, &r.cost_table}) {
      const char* name = tab == &r.reward_table ? ".reward_table" : ".cost_table";
      if (tab->empty()) continue;
      if (static_cast<int>(tab->size()) != region_count(cfg))
        throw ValidationError(p + name + ": needs one entry per region");
      for (double v : *tab)
        if (!finite(v) || v < 0.0) throw ValidationError(p + name + ": entries must be finite and >= 0");
    }
  }
  const int k = static_cast<int>(cfg.relays.size());
  for (size_t n = 0; n < cfg.ues.size(); ++n) {
    const auto& u = cfg.ues[n];
    std::string p = "ues[" + std::to_string(n) + "]";
    check_coord(cfg, u.position, p + ".position");
    std::set<int> seen;
    for (size_t j = 0; j < u.relays.size(); ++j) {
      int id = u.relays[j];
      if (id < 1 || id > k)
        throw ValidationError(p + ".relays[" + std::to_string(j) + "]: relay index " +
                              std::to_string(id) + " not in 1.." + std::to_string(k));
      if (!seen.insert(id).second)
        throw ValidationError(p + ".relays[" + std::to_string(j) + "]: duplicate relay index");
    }
  }
  if (cfg.bs_position) check_coord(cfg, *cfg.bs_position, "bs_position");
  if (cfg.direct_link.reward && (!finite(*cfg.direct_link.reward) || *cfg.direct_link.reward < 0))
    throw ValidationError("direct_link.reward: must be >= 0");
  if (!finite(cfg.direct_link.cost) || cfg.direct_link.cost < 0)
    throw ValidationError("direct_link.cost: must be >= 0");
}

int region_count(const ScenarioConfig& cfg) { return cfg.grid_x * cfg.grid_y; }

int region_index(const ScenarioConfig& cfg, Coord c) { return (c.x - 1) + cfg.grid_x * (c.y - 1); }

Coord region_coord(const ScenarioConfig& cfg, int region) {
  return Coord{region % cfg.grid_x + 1, region / cfg.grid_x + 1};
}

Coord bs_position(const ScenarioConfig& cfg) {
  return cfg.bs_position ? *cfg.bs_position : Coord{cfg.grid_x, cfg.grid_y};
}

double link_metric(Coord src, Coord dst, const ScenarioConfig& cfg) {
  int dx = std::abs(src.x - dst.x) + 1;
  int dy = std::abs(src.y - dst.y) + 1;
  return cfg.r_max / (static_cast<double>(dx) * dy);
}

double direct_reward(const ScenarioConfig& cfg, int ue) {
  if (cfg.direct_link.reward) return *cfg.direct_link.reward;
  return link_metric(cfg.ues.at(ue).position, bs_position(cfg), cfg);
}

double relay_reward(int relay_state, int relay_index, const ScenarioConfig& cfg, int ue) {
  if (relay_index == 0) return direct_reward(cfg, ue);
  if (relay_index < 0 || relay_index > static_cast<int>(cfg.relays.size()))
    throw ValidationError("relay index " + std::to_string(relay_index) + " out of range");
  if (relay_state < 0 || relay_state >= region_count(cfg))
    throw ValidationError("relay state " + std::to_string(relay_state) + " out of range");
  const auto& tab = cfg.relays[relay_index - 1].reward_table;
  if (!tab.empty()) return tab[relay_state];
  Coord pos = region_coord(cfg, relay_state);
  double up = link_metric(cfg.ues.at(ue).position, pos, cfg);
  double down = link_metric(pos, bs_position(cfg), cfg);
  return 0.5 * std::min(up, down);
}

double relay_cost(int relay_state, int relay_index, const ScenarioConfig& cfg) {
  if (relay_index == 0) return cfg.direct_link.cost;
  if (relay_index < 0 || relay_index > static_cast<int>(cfg.relays.size()))
    throw ValidationError("relay index " + std::to_string(relay_index) + " out of range");
  if (relay_state < 0 || relay_state >= region_count(cfg))
    throw ValidationError("relay state " + std::to_string(relay_state) + " out of range");
  const auto& tab = cfg.relays[relay_index - 1].cost_table;
  if (!tab.empty()) return tab[relay_state];
  Coord pos = region_coord(cfg, relay_state);
  return cfg.c_max / static_cast<double>((cfg.grid_x - pos.x + 1) + (cfg.grid_y - pos.y + 1));
}

double total_reward(const JointState& state, const std::vector<int>& action,
                    const ScenarioConfig& cfg, int ue) {
  double v = 0.0;
  for (int i : action) v += relay_reward(i == 0 ? 0 : state.at(i - 1), i, cfg, ue);
  return v;
}

double total_cost(const JointState& state, const std::vector<int>& action,
                  const ScenarioConfig& cfg) {
  double v = 0.0;
  for (int i : action) v += relay_cost(i == 0 ? 0 : state.at(i - 1), i, cfg);
  return v;
}

}  // namespace rsel
