#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relaysel/mobility.hpp"
#include "relaysel/model.hpp"
#include "relaysel/types.hpp"

namespace rsel {

// relay 0 is the direct link of that UE
struct Element {
  int relay = 0;
  int ue = 0;
};

// A compiled planning problem: K local relays over S regions each, N UEs,
// elements (relay, UE) with element id ue*(K+1)+relay. Joint states are
// mixed-radix with local relay 1 as the most significant digit.
class Instance {
 public:
  static Instance single_ue(const ScenarioConfig& cfg, int ue = 0);
  static Instance centralized(const ScenarioConfig& cfg);
  // reward/cost are indexed [relay-1][region]; direct_reward unset disables index 0.
  static Instance custom(std::vector<MarkovChain> chains, std::vector<std::vector<double>> reward,
                         std::vector<std::vector<double>> cost, std::optional<double> direct_reward,
                         double c_th, int horizon, double gamma, std::vector<int> s0);

  int K() const { return k_; }
  int S() const { return s_; }
  int N() const { return n_; }
  std::size_t joint_size() const { return joint_size_; }
  int horizon() const { return horizon_; }
  double gamma() const { return gamma_; }
  double c_th() const { return c_th_; }
  const std::vector<MarkovChain>& chains() const { return chains_; }
  const std::vector<int>& s0() const { return s0_; }
  const std::string& fingerprint() const { return fingerprint_; }

  int element_count() const { return n_ * (k_ + 1); }
  int element_id(int relay, int ue) const { return ue * (k_ + 1) + relay; }
  Element element(int id) const { return Element{id % (k_ + 1), id / (k_ + 1)}; }
  ActionMask available() const { return available_; }
  const std::vector<double>& reward_table(int e) const { return reward_[e]; }
  const std::vector<double>& cost_table(int e) const { return cost_[e]; }

  // scenario relay id (1-based) of local relay k, and scenario UE index of local UE n
  int global_relay(int k) const { return global_relay_[k - 1]; }
  int global_ue(int n) const { return global_ue_[n]; }

  RelayMask relay_mask(ActionMask a) const;
  std::size_t stride(int k) const { return strides_[k - 1]; }
  int relay_state(std::size_t joint, int k) const {
    return static_cast<int>((joint / strides_[k - 1]) % static_cast<std::size_t>(s_));
  }
  std::size_t joint_index(const std::vector<int>& regions) const;
  std::vector<int> decode(std::size_t joint) const;

  // observation of relay set u at joint state: mixed radix over selected relays, ascending k
  std::size_t obs_count(RelayMask u) const;
  std::size_t obs_index(std::size_t joint, RelayMask u) const;
  std::vector<int> obs_decode(std::size_t z, RelayMask u) const;  // region per relay, -1 unobserved

  double reward(std::size_t joint, ActionMask a) const;
  double cost(std::size_t joint, ActionMask a, int ue) const;
  double reward_range() const;  // R_max - R_min over states and actions
  double cost_range() const;    // per-UE C_max - C_min

  FactoredBelief initial_belief() const;
  std::string action_string(ActionMask a) const;
  std::vector<int> action_indices(ActionMask a) const;  // single-UE view: relay indices

 private:
  void finish();

  int k_ = 0;
  int s_ = 0;
  int n_ = 1;
  std::size_t joint_size_ = 0;
  int horizon_ = 1;
  double gamma_ = 1.0;
  double c_th_ = 0.0;
  std::vector<MarkovChain> chains_;
  std::vector<int> s0_;
  std::vector<std::size_t> strides_;
  std::vector<std::vector<double>> reward_;
  std::vector<std::vector<double>> cost_;
  ActionMask available_ = 0;
  std::vector<int> global_relay_;
  std::vector<int> global_ue_;
  std::string fingerprint_;
};

// per-relay chains of a scenario with speed applied
std::vector<MarkovChain> scenario_chains(const ScenarioConfig& cfg);

constexpr std::size_t kJointCap = 1000000;

}  // namespace rsel
