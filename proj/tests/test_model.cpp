#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "relaysel/instance.hpp"
#include "relaysel/model.hpp"

using namespace rsel;
using doctest::Approx;

namespace {

ScenarioConfig simple() {
  ScenarioConfig cfg = table1_scenario(2, 1);
  cfg.ues[0].position = {1, 1};
  cfg.relays[0].initial_state = {2, 3};
  cfg.relays[1].initial_state = {4, 4};
  return cfg;
}

std::string tmp_path(const char* name) { return std::string("/tmp/relaysel_test_") + name; }

}  // namespace

TEST_CASE("table1 defaults") {
  ScenarioConfig cfg = table1_scenario();
  CHECK(cfg.grid_x == 4);
  CHECK(cfg.grid_y == 4);
  CHECK(cfg.relays.size() == 3);
  CHECK(cfg.relays[0].eps_fix == 0.7);
  CHECK(cfg.r_max == 500.0);
  CHECK(cfg.c_max == 250.0);
  CHECK(cfg.c_th == 1000.0);
  CHECK(cfg.horizon == 5);
  CHECK(cfg.gamma == 1.0);
  CHECK(bs_position(cfg) == Coord{4, 4});
}

TEST_CASE("scenario round trip and validation") {
  ScenarioConfig cfg = table1_scenario();
  ScenarioConfig back = parse_scenario(scenario_to_json(cfg));
  CHECK(fingerprint(back) == fingerprint(cfg));
  CHECK(back.relays[1].initial_state == cfg.relays[1].initial_state);

  auto j = scenario_to_json(cfg);
  auto bad_gamma = j;
  bad_gamma.replace(bad_gamma.find("\"gamma\": 1.0"), 12, "\"gamma\": 1.5");
  CHECK_THROWS_AS(parse_scenario(bad_gamma), ValidationError);

  ScenarioConfig off = cfg;
  off.relays[0].initial_state = {5, 1};
  CHECK_THROWS_AS(validate(off), ValidationError);

  auto unknown = j;
  unknown.insert(1, "\"colour\": 3,");
  CHECK_THROWS_AS(parse_scenario(unknown), ValidationError);

  CHECK_THROWS_AS(load_scenario("/nonexistent/dir/scenario.json"), IoError);
  std::string p = tmp_path("scenario.json");
  save_scenario(cfg, p);
  CHECK(fingerprint(load_scenario(p)) == fingerprint(cfg));
  std::remove(p.c_str());
}

TEST_CASE("reward and cost tables override the geometry") {
  ScenarioConfig cfg = table1_scenario(1, 1);
  cfg.grid_x = cfg.grid_y = 1;
  cfg.relays[0].initial_state = {1, 1};
  cfg.ues[0].position = {1, 1};
  cfg.relays[0].reward_table = {10.0};
  cfg.relays[0].cost_table = {5.0};
  validate(cfg);
  CHECK(relay_reward(0, 1, cfg) == 10.0);
  CHECK(relay_cost(0, 1, cfg) == 5.0);
  cfg.relays[0].cost_table = {5.0, 1.0};
  CHECK_THROWS_AS(validate(cfg), ValidationError);
}

TEST_CASE("link metric") {
  ScenarioConfig cfg = simple();
  CHECK(link_metric({1, 1}, {1, 1}, cfg) == Approx(500.0));
  CHECK(link_metric({1, 1}, {2, 3}, cfg) == Approx(500.0 / 6.0));
  CHECK(link_metric({1, 1}, {4, 4}, cfg) == Approx(31.25));
}

TEST_CASE("relay reward and cost") {
  ScenarioConfig cfg = simple();
  int r23 = region_index(cfg, {2, 3});
  int r11 = region_index(cfg, {1, 1});
  int r44 = region_index(cfg, {4, 4});
  CHECK(relay_reward(r23, 1, cfg) == Approx(41.6667).epsilon(1e-4));
  CHECK(relay_reward(r11, 1, cfg) == Approx(15.625));
  CHECK(relay_cost(r23, 1, cfg) == Approx(50.0));
  CHECK(relay_cost(r44, 1, cfg) == Approx(125.0));
  CHECK(relay_cost(r23, 0, cfg) == 0.0);
  ScenarioConfig d = cfg;
  d.direct_link.reward = 31.25;
  CHECK(relay_reward(0, 0, d) == 31.25);
  CHECK(relay_reward(0, 0, cfg) == Approx(31.25));  // full-rate UE->BS link
  CHECK_THROWS_AS(relay_reward(0, 3, cfg), ValidationError);
  CHECK_THROWS_AS(relay_cost(16, 1, cfg), ValidationError);
}

TEST_CASE("total reward and cost") {
  ScenarioConfig cfg = simple();
  JointState s{region_index(cfg, {2, 3}), region_index(cfg, {4, 4})};
  CHECK(total_reward(s, {}, cfg) == 0.0);
  CHECK(total_cost(s, {}, cfg) == 0.0);
  CHECK(total_reward(s, {1}, cfg) == Approx(relay_reward(s[0], 1, cfg)));
  CHECK(total_cost(s, {2}, cfg) == Approx(relay_cost(s[1], 2, cfg)));
  // 41.667 + 15.625 with the second relay at (4,4)
  CHECK(total_reward(s, {1, 2}, cfg) == Approx(41.6667 + relay_reward(s[1], 2, cfg)).epsilon(1e-4));
  CHECK(total_cost(s, {1, 2}, cfg) == Approx(175.0));
  JointState s2{region_index(cfg, {2, 3}), region_index(cfg, {1, 1})};
  CHECK(total_reward(s2, {1, 2}, cfg) == Approx(41.6667 + 15.625).epsilon(1e-4));
}

TEST_CASE("model properties over the grid") {
  ScenarioConfig cfg = table1_scenario(3, 1);
  const int S = region_count(cfg);
  for (int a = 0; a < S; ++a)
    for (int b = 0; b < S; ++b) {
      JointState s{a, b, (a + b) % S};
      // modularity over disjoint sets
      CHECK(total_reward(s, {0, 1, 3}, cfg) ==
            Approx(total_reward(s, {0, 3}, cfg) + total_reward(s, {1}, cfg)));
      CHECK(total_cost(s, {1, 2}, cfg) == Approx(total_cost(s, {1}, cfg) + total_cost(s, {2}, cfg)));
    }
  for (int s = 0; s < S; ++s) {
    double r = relay_reward(s, 1, cfg), c = relay_cost(s, 1, cfg);
    CHECK(r >= 0.0);
    CHECK(r <= cfg.r_max);
    CHECK(c > 0.0);
    CHECK(c <= cfg.c_max);
  }
  // reward non-increasing as a hop grows with the other hop fixed
  for (int x = 1; x <= 4; ++x)
    for (int y = 1; y <= 3; ++y) {
      Coord near{x, y}, far{x, y + 1};
      CHECK(link_metric(Coord{x, 1}, far, cfg) <= link_metric(Coord{x, 1}, near, cfg));
    }
}

TEST_CASE("relays start at the best regions for the first UE") {
  ScenarioConfig cfg = table1_scenario(3, 1);
  std::vector<double> r;
  for (int s = 0; s < region_count(cfg); ++s) r.push_back(relay_reward(s, 1, cfg));
  std::vector<double> sorted = r;
  std::sort(sorted.rbegin(), sorted.rend());
  for (int k = 0; k < 3; ++k)
    CHECK(r[region_index(cfg, cfg.relays[k].initial_state)] == Approx(sorted[k]));
}

TEST_CASE("instances") {
  ScenarioConfig cfg = table1_scenario(3, 2);
  cfg.ues[1].relays = {3, 1};
  Instance a = Instance::single_ue(cfg, 1);
  CHECK(a.K() == 2);
  CHECK(a.global_relay(1) == 1);
  CHECK(a.global_relay(2) == 3);
  CHECK(a.joint_size() == 256);
  Instance c = Instance::centralized(cfg);
  CHECK(c.K() == 3);
  CHECK(c.N() == 2);
  // UE 1 may not use relay 2
  CHECK(((c.available() >> c.element_id(2, 1)) & 1) == 0);
  CHECK(((c.available() >> c.element_id(3, 1)) & 1) == 1);
  std::vector<int> regs{3, 7, 11};
  std::size_t j = c.joint_index(regs);
  CHECK(c.decode(j) == regs);
  CHECK(c.relay_state(j, 1) == 3);
  CHECK(c.relay_state(j, 3) == 11);
  CHECK(c.obs_decode(c.obs_index(j, 0b101), 0b101) == std::vector<int>{3, -1, 11});
  CHECK(c.obs_count(0b101) == 256);
  ActionMask act = (ActionMask{1} << c.element_id(1, 0)) | (ActionMask{1} << c.element_id(3, 1));
  CHECK(c.relay_mask(act) == 0b101);
  CHECK(c.cost(j, act, 0) == Approx(relay_cost(3, 1, cfg)));
  CHECK(c.cost(j, act, 1) == Approx(relay_cost(11, 3, cfg)));
  CHECK(c.reward(j, act) == Approx(relay_reward(3, 1, cfg, 0) + relay_reward(11, 3, cfg, 1)));
  CHECK(a.fingerprint() != c.fingerprint());
}
