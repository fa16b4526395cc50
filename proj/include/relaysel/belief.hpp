#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "relaysel/instance.hpp"

namespace rsel {

// region per local relay, -1 where the relay was not selected
struct Observation {
  std::vector<int> per_relay;
};

// The decision maker learns the selected relays' regions during the epoch
// they are used, so a selected relay's next belief is the chain row of the
// observed region and an unselected relay is only predicted forward.
Eigen::VectorXd update_relay_belief(const Eigen::VectorXd& b, const MarkovChain& chain, bool selected,
                                    std::optional<int> obs);
FactoredBelief update_belief(const FactoredBelief& b, const Instance& inst, ActionMask a,
                             const Observation& z);

Eigen::VectorXd joint_belief(const FactoredBelief& fb, std::size_t cap = kJointCap);
// factored joint index matching Instance::joint_index (relay 1 most significant)
double joint_value(const FactoredBelief& fb, const std::vector<int>& regions);

double belief_reward(const FactoredBelief& fb, ActionMask a, const Instance& inst);
double belief_cost(const FactoredBelief& fb, ActionMask a, const Instance& inst, int ue = 0);

// probability of seeing z after playing a at belief fb
double observation_prob(const Observation& z, ActionMask a, const FactoredBelief& fb, const Instance& inst);
std::vector<Observation> enumerate_observations(ActionMask a, const Instance& inst);

struct BeliefSet {
  std::vector<FactoredBelief> points;
  std::vector<int> epoch;  // earliest epoch at which each point is reachable
  int h = 1;
  std::vector<int> s0;
  double target_eps = 0.0;
  std::size_t family_size = 0;  // largest per-relay family before productization
  bool truncated = false;
};

constexpr std::size_t kBeliefSetCap = 5000;

// Per-relay reachable rows {P^n(S_j,:) : S_j reachable from s0 in t steps,
// 0 <= t < h, 1 <= n <= h-max(t,1)} plus the one-hot at s0, combined as a Cartesian
// product ordered by reachable epoch. Throws CapError when the per-relay
// families alone exceed the cap.
BeliefSet build_h_belief_set(const std::vector<int>& s0, int h, const std::vector<MarkovChain>& chains,
                             std::size_t cap = kBeliefSetCap);

double density_bound(const std::vector<MarkovChain>& chains, int h);

// max over sampled joint beliefs of the L1 distance to the nearest set point;
// the joint one-hot vertices are always included in the sample
double empirical_density(const BeliefSet& set, int samples, std::uint64_t seed);

int epsilon_h(double target_eps, const Instance& inst);
BeliefSet epsilon_belief_set(double target_eps, const Instance& inst, std::size_t cap = kBeliefSetCap);

// samples the monotone-propagation claim (P b)(s) >= b(s) => (P^n b)(s) >= (P^{n-1} b)(s);
// returns human-readable counterexamples
std::vector<std::string> belief_monotonicity_diagnostic(int n_chains, int states, int max_n,
                                                        std::uint64_t seed);

}  // namespace rsel
