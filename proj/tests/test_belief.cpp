#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "relaysel/belief.hpp"
#include "relaysel/rng.hpp"

using namespace rsel;
using doctest::Approx;

namespace {

Eigen::MatrixXd two() {
  Eigen::MatrixXd p(2, 2);
  p << 0.9, 0.1, 0.2, 0.8;
  return p;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(v.size());
  int i = 0;
  for (double d : v) x(i++) = d;
  return x;
}

// one relay on the two-state chain with rewards {10, 20} and costs {3, 1}
Instance tiny(int horizon = 2, double c_th = 5.0) {
  return Instance::custom({MarkovChain(two())}, {{10, 20}}, {{3, 1}}, 4.0, c_th, horizon, 0.9, {0});
}

}  // namespace

TEST_CASE("relay belief update") {
  MarkovChain c(two());
  Eigen::VectorXd b = update_relay_belief(vec({0.5, 0.5}), c, false, std::nullopt);
  CHECK(b(0) == Approx(0.55));
  CHECK(b(1) == Approx(0.45));
  MarkovChain id(Eigen::MatrixXd::Identity(3, 3));
  Eigen::VectorXd o = update_relay_belief(vec({0.2, 0.3, 0.5}), id, true, 2);
  CHECK(o.isApprox(vec({0, 0, 1})));
  Eigen::VectorXd u = update_relay_belief(vec({0.2, 0.3, 0.5}), id, false, std::nullopt);
  CHECK(u.isApprox(vec({0.2, 0.3, 0.5})));
  // selected relay observed in its current region: next belief is that row
  CHECK(update_relay_belief(vec({0.5, 0.5}), c, true, 1).isApprox(vec({0.2, 0.8})));
  CHECK_THROWS_AS(update_relay_belief(vec({0.5, 0.5}), c, true, std::nullopt), ValidationError);
  CHECK_THROWS_AS(update_relay_belief(vec({0.5, 0.5}), c, false, 0), ValidationError);
}

TEST_CASE("joint belief") {
  FactoredBelief one{{vec({0.25, 0.75})}};
  CHECK(joint_belief(one).isApprox(vec({0.25, 0.75})));
  FactoredBelief det{{vec({1, 0}), vec({0, 1})}};
  CHECK(joint_belief(det).isApprox(vec({0, 1, 0, 0})));
  FactoredBelief mix{{vec({0.5, 0.5}), vec({0.3, 0.7})}};
  CHECK(joint_belief(mix).isApprox(vec({0.15, 0.35, 0.15, 0.35})));
  CHECK(joint_value(mix, {1, 0}) == Approx(0.15));
  FactoredBelief big{std::vector<Eigen::VectorXd>(5, Eigen::VectorXd::Constant(16, 1.0 / 16))};
  CHECK_THROWS_AS(joint_belief(big), CapError);
}

TEST_CASE("belief reward and cost") {
  Instance inst = tiny();
  FactoredBelief half{{vec({0.5, 0.5})}};
  CHECK(belief_reward(half, 0, inst) == 0.0);
  CHECK(belief_reward(half, 0b10, inst) == Approx(15.0));
  CHECK(belief_cost(half, 0b10, inst) == Approx(2.0));
  FactoredBelief at1{{vec({0, 1})}};
  CHECK(belief_reward(at1, 0b11, inst) == Approx(24.0));
}

TEST_CASE("factored reward matches the joint expectation") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    oracle::RandomSpec sp;
    sp.k = 1 + trial % 3;
    sp.states = 2 + trial % 4;
    Instance inst = oracle::random_instance(rng, sp);
    FactoredBelief b;
    std::gamma_distribution<double> g(1.0, 1.0);
    for (int k = 0; k < inst.K(); ++k) {
      Eigen::VectorXd v(inst.S());
      for (int s = 0; s < inst.S(); ++s) v(s) = g(rng);
      b.per_relay.push_back(v / v.sum());
    }
    Eigen::VectorXd jb = joint_belief(b);
    for (ActionMask a : oracle::actions(inst)) {
      double r = 0.0, c = 0.0;
      for (int s = 0; s < jb.size(); ++s) {
        r += jb(s) * oracle::reward(inst, s, a);
        c += jb(s) * oracle::cost(inst, s, a, 0);
      }
      CHECK(belief_reward(b, a, inst) == Approx(r).epsilon(1e-9));
      CHECK(belief_cost(b, a, inst) == Approx(c).epsilon(1e-9));
      double total = 0.0;
      for (const auto& z : enumerate_observations(a, inst)) total += observation_prob(z, a, b, inst);
      CHECK(total == Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("observation probability") {
  Instance inst = tiny();
  FactoredBelief b{{vec({1, 0})}};
  CHECK(observation_prob(Observation{{-1}}, 0, b, inst) == 1.0);
  // z is the selected relay's current region
  CHECK(observation_prob(Observation{{0}}, 0b10, b, inst) == Approx(1.0));
  CHECK(observation_prob(Observation{{1}}, 0b10, b, inst) == Approx(0.0));
  FactoredBelief pred{{vec({0.9, 0.1})}};
  CHECK(observation_prob(Observation{{0}}, 0b10, pred, inst) == Approx(0.9));
  CHECK(observation_prob(Observation{{1}}, 0b10, pred, inst) == Approx(0.1));
  CHECK_THROWS_AS(observation_prob(Observation{{-1}}, 0b10, b, inst), ValidationError);

  Instance two_relays = Instance::custom({MarkovChain(two()), MarkovChain(two())}, {{1, 2}, {3, 4}},
                                         {{1, 1}, {1, 1}}, std::nullopt, 5, 1, 1.0, {0, 1});
  FactoredBelief bb{{vec({0.3, 0.7}), vec({0.6, 0.4})}};
  auto zs = enumerate_observations(0b110, two_relays);
  CHECK(zs.size() == 4);
  double total = 0.0;
  for (const auto& z : zs) total += observation_prob(z, 0b110, bb, two_relays);
  CHECK(total == Approx(1.0));
  CHECK(observation_prob(Observation{{1, 0}}, 0b110, bb, two_relays) == Approx(0.7 * 0.6));
}

TEST_CASE("factored filter equals the joint Bayes filter") {
  std::mt19937_64 rng(5);
  oracle::RandomSpec sp;
  sp.k = 3;
  sp.states = 3;
  Instance inst = oracle::random_instance(rng, sp);
  Eigen::MatrixXd T = oracle::joint_matrix(inst);
  FactoredBelief b = inst.initial_belief();
  Eigen::VectorXd d = joint_belief(b);
  std::vector<int> state = inst.s0();
  Rng r(17);
  std::vector<ActionMask> acts = oracle::actions(inst);
  double worst = 0.0;
  for (int t = 0; t < 300; ++t) {
    ActionMask a = acts[r.below(acts.size())];
    Observation z{std::vector<int>(inst.K(), -1)};
    for (int k : oracle::observed(inst, a)) z.per_relay[k - 1] = state[k - 1];
    b = update_belief(b, inst, a, z);
    d = oracle::joint_filter_step(inst, T, d, a, state);
    worst = std::max(worst, (joint_belief(b) - d).cwiseAbs().maxCoeff());
    for (int k = 0; k < inst.K(); ++k) {
      std::vector<double> row(inst.S());
      for (int s = 0; s < inst.S(); ++s) row[s] = inst.chains()[k](state[k], s);
      state[k] = static_cast<int>(r.categorical(row));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("h-belief set") {
  MarkovChain c(two());
  BeliefSet h1 = build_h_belief_set({0}, 1, {c});
  REQUIRE(h1.points.size() == 1);
  CHECK(h1.points[0].per_relay[0].isApprox(vec({1, 0})));

  // h=2 adds the chain row of every state reachable in one step
  BeliefSet h2 = build_h_belief_set({0}, 2, {c});
  CHECK(h2.points.size() == 3);
  auto has = [&](const BeliefSet& s, const Eigen::VectorXd& v) {
    for (const auto& p : s.points)
      if ((p.per_relay[0] - v).lpNorm<1>() < 1e-9) return true;
    return false;
  };
  CHECK(has(h2, vec({1, 0})));
  CHECK(has(h2, vec({0.9, 0.1})));
  CHECK(has(h2, vec({0.2, 0.8})));
  CHECK(h2.points[0].per_relay[0].isApprox(vec({1, 0})));

  MarkovChain id(Eigen::MatrixXd::Identity(3, 3));
  BeliefSet frozen = build_h_belief_set({1}, 6, {id});
  CHECK(frozen.points.size() == 1);

  // joint product, initial belief first, capped
  BeliefSet j = build_h_belief_set({0, 1}, 3, {c, c});
  CHECK(j.points[0].per_relay[0].isApprox(vec({1, 0})));
  CHECK(j.points[0].per_relay[1].isApprox(vec({0, 1})));
  CHECK(j.points.size() == 25);
  BeliefSet cap = build_h_belief_set({0, 1}, 3, {c, c}, 6);
  CHECK(cap.points.size() == 6);
  CHECK(cap.truncated);
  CHECK_THROWS_AS(build_h_belief_set({0}, 4, {build_grid_chain(4, 4, 0.7)}, 3), CapError);
}

TEST_CASE("density bound and epsilon schedule") {
  MarkovChain c(two());
  CHECK(density_bound({c}, 5) == Approx(2.0 * 0.16807 * 3.0).epsilon(1e-9));
  CHECK(density_bound({c, c}, 5) == Approx(2.0 * density_bound({c}, 5)));
  CHECK(density_bound({c}, 200) < 1e-20);

  // gamma = 1, K = 1, T = 5, reward range 1, pi_min = 1/3, slem 0.7, eps 0.1 -> h = 16
  Instance inst = Instance::custom({c}, {{0.0, 1.0}}, {{0.0, 0.0}}, std::nullopt, 1.0, 5, 1.0, {0});
  CHECK(inst.reward_range() == Approx(1.0));
  CHECK(epsilon_h(0.1, inst) == 16);
  int prev = epsilon_h(1e-4, inst);
  for (double e : {1e-3, 1e-2, 0.1, 1.0}) {
    int h = epsilon_h(e, inst);
    CHECK(h <= prev);
    prev = h;
  }
  CHECK(epsilon_h(1e6, inst) == 1);
  Eigen::MatrixXd half = Eigen::MatrixXd::Constant(2, 2, 0.5);
  Instance mixing = Instance::custom({MarkovChain(half)}, {{0.0, 1.0}}, {{0.0, 0.0}}, std::nullopt, 1, 5, 1.0, {0});
  CHECK(epsilon_h(0.01, mixing) == 1);
  BeliefSet es = epsilon_belief_set(0.1, inst);
  CHECK(es.h == 16);
  CHECK(es.points[0].per_relay[0].isApprox(vec({1, 0})));
}

TEST_CASE("empirical density") {
  MarkovChain c(two());
  BeliefSet h1 = build_h_belief_set({0}, 1, {c});
  // the far vertex e_2 sits at L1 distance 2 from {e_1}
  CHECK(empirical_density(h1, 2000, 1) == Approx(2.0));
  BeliefSet h4 = build_h_belief_set({0}, 4, {c});
  double d4 = empirical_density(h4, 2000, 1);
  CHECK(d4 < 2.0);
  CHECK(d4 > 0.0);
}

TEST_CASE("monotone propagation diagnostic runs") {
  auto notes = belief_monotonicity_diagnostic(20, 3, 6, 9);
  for (const auto& n : notes) CHECK(!n.empty());
}
