#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "relaysel/model.hpp"
#include "relaysel/rng.hpp"
#include "relaysel/sim.hpp"

using namespace rsel;
using doctest::Approx;

namespace {

SolveOptions with(Method m, int h = 0) {
  SolveOptions o;
  o.method = m;
  o.belief_h = h;
  return o;
}

ScenarioConfig disjoint_pair(int horizon) {
  ScenarioConfig c;
  c.id = "disjoint";
  c.grid_x = 2;
  c.grid_y = 2;
  c.horizon = horizon;
  c.c_th = 300.0;
  RelaySpec a, b;
  a.initial_state = {1, 1};
  b.initial_state = {2, 2};
  c.relays = {a, b};
  UeSpec u1, u2;
  u1.position = {1, 1};
  u1.relays = {1};
  u2.position = {2, 1};
  u2.relays = {2};
  c.ues = {u1, u2};
  return c;
}

}  // namespace

TEST_CASE("episodes are deterministic per seed") {
  ScenarioConfig cfg = table1_scenario(2, 1);
  Instance inst = Instance::single_ue(cfg);
  PolicySolution sol = solve(inst, with(Method::Gcpbvi, 1));
  EpisodeTrace a = run_episode(sol, inst, 99);
  EpisodeTrace b = run_episode(sol, inst, 99);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t t = 0; t < a.records.size(); ++t) {
    CHECK(a.records[t].state == b.records[t].state);
    CHECK(a.records[t].action == b.records[t].action);
  }
  CHECK(a.cum_reward == b.cum_reward);
  SimulationMetrics m1 = monte_carlo(sol, inst, 20, 5), m2 = monte_carlo(sol, inst, 20, 5);
  CHECK(m1.avg_reward == m2.avg_reward);
  CHECK(metrics_csv_rows(m1, "x", "gcpbvi") == metrics_csv_rows(m2, "x", "gcpbvi"));
}

TEST_CASE("frozen relays give a constant stream") {
  ScenarioConfig cfg = table1_scenario(2, 1);
  for (auto& r : cfg.relays) r.eps_fix = 1.0;
  Instance inst = Instance::single_ue(cfg);
  World w = world_of(inst);
  auto ctl = fixed_controller(inst.available());
  Agent ag{&inst, ctl.get(), {0, 1}, {0}};
  EpisodeTrace tr = simulate_episode(w, {ag}, 3, true);
  REQUIRE(tr.records.size() == 5);
  for (const auto& r : tr.records) {
    CHECK(r.reward == Approx(tr.records[0].reward));
    CHECK(r.state == tr.records[0].state);
  }
}

TEST_CASE("energy efficiency of a single epoch") {
  MarkovChain one(Eigen::MatrixXd::Identity(1, 1));
  Instance inst = Instance::custom({one}, {{10}}, {{5}}, std::nullopt, 100, 1, 1.0, {0});
  auto ctl = fixed_controller(0b10);
  Agent ag{&inst, ctl.get(), {0}, {0}};
  SimulationMetrics m = simulate(world_of(inst), {ag}, 1, 1);
  CHECK(m.avg_reward == Approx(10));
  CHECK(m.avg_cost == Approx(5));
  CHECK(m.avg_ee == Approx(2.0));
  // zero-cost epochs add nothing to EE
  auto direct = fixed_controller(0);
  Agent idle{&inst, direct.get(), {0}, {0}};
  CHECK(simulate(world_of(inst), {idle}, 1, 1).avg_ee == 0.0);
}

TEST_CASE("cellular baseline") {
  ScenarioConfig cfg = table1_scenario(3, 1);
  SimulationMetrics m = baseline_cellular(Instance::single_ue(cfg), 10, 1);
  CHECK(m.avg_reward == Approx(156.25));
  CHECK(m.avg_cost == 0.0);
  CHECK(m.runs == 10);
  CHECK(m.epochs.size() == 5);
  CHECK(m.epochs.back().avg_cum_reward == Approx(156.25));
}

TEST_CASE("single run metrics equal that episode") {
  ScenarioConfig cfg = table1_scenario(2, 1);
  Instance inst = Instance::single_ue(cfg);
  PolicySolution sol = solve(inst, with(Method::Gcpbvi, 1));
  SimulationMetrics m = monte_carlo(sol, inst, 1, 42);
  EpisodeTrace tr = run_episode(sol, inst, derive_seed(42, 0));
  CHECK(m.avg_reward == Approx(tr.cum_reward));
  CHECK(m.avg_cost == Approx(tr.cum_cost[0]));
}

TEST_CASE("Monte-Carlo mean matches the exact expectation") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 4; ++trial) {
    oracle::RandomSpec sp;
    sp.k = 1 + trial % 2;
    sp.states = 2 + trial % 2;
    sp.horizon = 3;
    Instance inst = oracle::random_instance(rng, sp);
    PolicySolution sol = solve(inst, with(trial % 2 ? Method::Gcpbvi : Method::Exact, 2));
    Expectation ex = exact_expectation(sol, inst);
    CHECK(ex.reward == Approx(sol.value_r).epsilon(1e-9));
    CHECK(ex.cost[0] == Approx(sol.value_c[0]).epsilon(1e-9));
    SimulationMetrics m = monte_carlo(sol, inst, 20000, 1000 + trial);
    CHECK(std::abs(m.avg_reward - ex.reward) <= 3 * m.stderr_reward + 1e-9);
    CHECK(std::abs(m.avg_cost - ex.cost[0]) <= 3 * m.stderr_cost + 1e-9);
  }
}

TEST_CASE("budget holds in simulation") {
  ScenarioConfig cfg = table1_scenario(2, 1);
  Instance inst = Instance::single_ue(cfg);
  PolicySolution sol = solve(inst, with(Method::Gcpbvi, 2));
  SimulationMetrics m = monte_carlo(sol, inst, 100, kDefaultSeed);
  CHECK(m.avg_cost <= cfg.c_th + 3 * m.stderr_cost);
  SimulationMetrics base = baseline_cellular(inst, 100, kDefaultSeed);
  CHECK(m.avg_reward >= base.avg_reward);
}

TEST_CASE("multi-user modes") {
  ScenarioConfig one = table1_scenario(2, 1);
  SolveOptions o = with(Method::Gcpbvi, 1);
  MultiUserResult c = run_multiuser(one, MultiMode::Centralized, o, 30, 7);
  MultiUserResult d = run_multiuser(one, MultiMode::Distributed, o, 30, 7);
  CHECK(c.metrics.avg_reward == Approx(d.metrics.avg_reward));
  CHECK(c.planned_reward == Approx(d.planned_reward));

  // disjoint relay sets: nothing can be shared within one epoch
  SolveOptions ex = with(Method::Exact);
  ScenarioConfig t1 = disjoint_pair(1);
  CHECK(run_multiuser(t1, MultiMode::Centralized, ex, 10, 1).planned_reward ==
        Approx(run_multiuser(t1, MultiMode::Distributed, ex, 10, 1).planned_reward));
  // over longer horizons the joint planner may trade budget between UEs' futures only through observation
  ScenarioConfig t2 = disjoint_pair(2);
  SolveOptions cp = with(Method::Cpbvi, 2);
  CHECK(run_multiuser(t2, MultiMode::Centralized, cp, 10, 1).planned_reward >=
        run_multiuser(t2, MultiMode::Distributed, cp, 10, 1).planned_reward - 1e-9);
}

TEST_CASE("complexity model") {
  CHECK(cpbvi_gcpbvi_ratio(10) == Approx(10.24));
  ComplexitySizes s;
  CHECK(complexity_model("gcpbvi", 1, s).log10_ops <= complexity_model("cpbvi", 1, s).log10_ops);
  for (int k = 5; k < 15; ++k) CHECK(cpbvi_gcpbvi_ratio(k + 1) > cpbvi_gcpbvi_ratio(k));
  CHECK(centralized_distributed_ratio(10, 10) > 1.0);
  CHECK(complexity_model("exact", 2, s).log10_ops > complexity_model("cpbvi", 2, s).log10_ops);
  CHECK_THROWS_AS(complexity_model("lp", 2, s), ValidationError);
}

TEST_CASE("metrics csv") {
  ScenarioConfig cfg = table1_scenario(1, 1);
  SimulationMetrics m = baseline_cellular(Instance::single_ue(cfg), 3, 1);
  CHECK(metrics_csv_header() == "scenario_id,method,epoch,avg_cum_reward,avg_cum_cost,avg_cum_ee,stderr_reward,runs\n");
  std::istringstream in(metrics_csv_rows(m, "t1", "cellular"));
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.rfind("t1,cellular," + std::to_string(rows) + ",", 0) == 0);
    CHECK(std::count(line.begin(), line.end(), ',') == 7);
  }
  CHECK(rows == 5);
}
