#include "relaysel/instance.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <numeric>

namespace rsel {

std::vector<MarkovChain> scenario_chains(const ScenarioConfig& cfg) {
  std::vector<MarkovChain> out;
  for (const auto& r : cfg.relays)
    out.push_back(apply_speed(build_grid_chain(cfg.grid_x, cfg.grid_y, r.eps_fix), r.speed));
  return out;
}

namespace {

std::vector<int> candidate_relays(const ScenarioConfig& cfg, int ue) {
  const auto& lst = cfg.ues.at(ue).relays;
  if (!lst.empty()) {
    std::vector<int> v = lst;
    std::sort(v.begin(), v.end());
    return v;
  }
  std::vector<int> all(cfg.relays.size());
  std::iota(all.begin(), all.end(), 1);
  return all;
}

}  // namespace

void Instance::finish() {
  if (k_ < 1) throw ValidationError("instance: at least one relay is required");
  if (static_cast<int>(chains_.size()) != k_) throw ValidationError("instance: one chain per relay required");
  s_ = chains_[0].size();
  for (const auto& c : chains_)
    if (c.size() != s_) throw ValidationError("instance: all relays must share the region count");
  if (element_count() > 64) throw CapError("instance: more than 64 (relay, UE) elements");
  strides_.assign(k_, 1);
  std::size_t size = 1;
  for (int k = k_; k >= 1; --k) {
    strides_[k - 1] = size;
    if (size > kJointCap / static_cast<std::size_t>(s_))
      throw CapError("instance: joint state space exceeds " + std::to_string(kJointCap));
    size *= static_cast<std::size_t>(s_);
  }
  joint_size_ = size;
  if (static_cast<int>(s0_.size()) != k_) throw ValidationError("instance: one initial region per relay required");
  for (int v : s0_)
    if (v < 0 || v >= s_) throw ValidationError("instance: initial region out of range");
}

Instance Instance::single_ue(const ScenarioConfig& cfg, int ue) {
  validate(cfg);
  if (ue < 0 || ue >= static_cast<int>(cfg.ues.size())) throw ValidationError("ue index out of range");
  Instance inst;
  std::vector<int> relays = candidate_relays(cfg, ue);
  auto all = scenario_chains(cfg);
  inst.k_ = static_cast<int>(relays.size());
  inst.n_ = 1;
  inst.horizon_ = cfg.horizon;
  inst.gamma_ = cfg.gamma;
  inst.c_th_ = cfg.c_th;
  inst.global_ue_ = {ue};
  for (int g : relays) {
    inst.global_relay_.push_back(g);
    inst.chains_.push_back(all[g - 1]);
    inst.s0_.push_back(region_index(cfg, cfg.relays[g - 1].initial_state));
  }
  inst.finish();
  const int s = inst.s_;
  inst.reward_.assign(inst.element_count(), std::vector<double>(s, 0.0));
  inst.cost_.assign(inst.element_count(), std::vector<double>(s, 0.0));
  for (int k = 0; k <= inst.k_; ++k) {
    int g = k == 0 ? 0 : relays[k - 1];
    for (int r = 0; r < s; ++r) {
      inst.reward_[k][r] = relay_reward(r, g, cfg, ue);
      inst.cost_[k][r] = relay_cost(r, g, cfg);
    }
    if (k > 0 || cfg.direct_link.enabled) inst.available_ |= ActionMask{1} << k;
  }
  inst.fingerprint_ = rsel::fingerprint(cfg) + "/ue" + std::to_string(ue);
  return inst;
}

Instance Instance::centralized(const ScenarioConfig& cfg) {
  validate(cfg);
  Instance inst;
  auto all = scenario_chains(cfg);
  inst.k_ = static_cast<int>(cfg.relays.size());
  inst.n_ = static_cast<int>(cfg.ues.size());
  inst.horizon_ = cfg.horizon;
  inst.gamma_ = cfg.gamma;
  inst.c_th_ = cfg.c_th;
  for (int k = 1; k <= inst.k_; ++k) {
    inst.global_relay_.push_back(k);
    inst.chains_.push_back(all[k - 1]);
    inst.s0_.push_back(region_index(cfg, cfg.relays[k - 1].initial_state));
  }
  for (int n = 0; n < inst.n_; ++n) inst.global_ue_.push_back(n);
  inst.finish();
  const int s = inst.s_;
  inst.reward_.assign(inst.element_count(), std::vector<double>(s, 0.0));
  inst.cost_.assign(inst.element_count(), std::vector<double>(s, 0.0));
  for (int n = 0; n < inst.n_; ++n) {
    std::vector<int> cand = candidate_relays(cfg, n);
    for (int k = 0; k <= inst.k_; ++k) {
      int e = inst.element_id(k, n);
      for (int r = 0; r < s; ++r) {
        inst.reward_[e][r] = relay_reward(r, k, cfg, n);
        inst.cost_[e][r] = relay_cost(r, k, cfg);
      }
      bool ok = k == 0 ? cfg.direct_link.enabled
                       : std::find(cand.begin(), cand.end(), k) != cand.end();
      if (ok) inst.available_ |= ActionMask{1} << e;
    }
  }
  inst.fingerprint_ = rsel::fingerprint(cfg) + "/central";
  return inst;
}

Instance Instance::custom(std::vector<MarkovChain> chains, std::vector<std::vector<double>> reward,
                          std::vector<std::vector<double>> cost, std::optional<double> direct,
                          double c_th, int horizon, double gamma, std::vector<int> s0) {
  Instance inst;
  inst.k_ = static_cast<int>(chains.size());
  inst.n_ = 1;
  inst.chains_ = std::move(chains);
  inst.s0_ = std::move(s0);
  inst.horizon_ = horizon;
  inst.gamma_ = gamma;
  inst.c_th_ = c_th;
  inst.global_ue_ = {0};
  for (int k = 1; k <= inst.k_; ++k) inst.global_relay_.push_back(k);
  if (horizon < 1) throw ValidationError("horizon: must be >= 1");
  if (gamma < 0 || gamma > 1) throw ValidationError("gamma: must lie in [0,1]");
  if (c_th < 0) throw ValidationError("c_th: must be >= 0");
  inst.finish();
  if (static_cast<int>(reward.size()) != inst.k_ || static_cast<int>(cost.size()) != inst.k_)
    throw ValidationError("instance: reward/cost tables must have one row per relay");
  const int s = inst.s_;
  inst.reward_.assign(inst.element_count(), std::vector<double>(s, 0.0));
  inst.cost_.assign(inst.element_count(), std::vector<double>(s, 0.0));
  if (direct) {
    inst.reward_[0].assign(s, *direct);
    inst.available_ |= 1;
  }
  for (int k = 1; k <= inst.k_; ++k) {
    if (static_cast<int>(reward[k - 1].size()) != s || static_cast<int>(cost[k - 1].size()) != s)
      throw ValidationError("instance: reward/cost rows must have one entry per region");
    for (int r = 0; r < s; ++r) {
      if (cost[k - 1][r] < 0) throw ValidationError("instance: costs must be >= 0");
      inst.reward_[k][r] = reward[k - 1][r];
      inst.cost_[k][r] = cost[k - 1][r];
    }
    inst.available_ |= ActionMask{1} << k;
  }
  // FNV-1a over the defining numbers
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](double x) {
    unsigned char b[sizeof x];
    std::memcpy(b, &x, sizeof x);
    for (unsigned char c : b) h = (h ^ c) * 1099511628211ULL;
  };
  for (const auto& c : inst.chains_)
    for (Eigen::Index i = 0; i < c.matrix().size(); ++i) mix(c.matrix().data()[i]);
  for (const auto& t : inst.reward_)
    for (double x : t) mix(x);
  for (const auto& t : inst.cost_)
    for (double x : t) mix(x);
  for (int v : inst.s0_) mix(v);
  mix(c_th);
  mix(horizon);
  mix(gamma);
  char buf[24];
  std::snprintf(buf, sizeof buf, "custom-%016llx", static_cast<unsigned long long>(h));
  inst.fingerprint_ = buf;
  return inst;
}

RelayMask Instance::relay_mask(ActionMask a) const {
  RelayMask u = 0;
  for (int e = 0; e < element_count(); ++e)
    if ((a >> e) & 1) {
      int k = e % (k_ + 1);
      if (k > 0) u |= RelayMask{1} << (k - 1);
    }
  return u;
}

std::size_t Instance::joint_index(const std::vector<int>& regions) const {
  std::size_t j = 0;
  for (int k = 1; k <= k_; ++k) j += strides_[k - 1] * static_cast<std::size_t>(regions.at(k - 1));
  return j;
}

std::vector<int> Instance::decode(std::size_t joint) const {
  std::vector<int> out(k_);
  for (int k = 1; k <= k_; ++k) out[k - 1] = relay_state(joint, k);
  return out;
}

std::size_t Instance::obs_count(RelayMask u) const {
  std::size_t c = 1;
  for (int k = 1; k <= k_; ++k)
    if ((u >> (k - 1)) & 1) c *= static_cast<std::size_t>(s_);
  return c;
}

std::size_t Instance::obs_index(std::size_t joint, RelayMask u) const {
  std::size_t z = 0;
  for (int k = 1; k <= k_; ++k)
    if ((u >> (k - 1)) & 1) z = z * s_ + relay_state(joint, k);
  return z;
}

std::vector<int> Instance::obs_decode(std::size_t z, RelayMask u) const {
  std::vector<int> out(k_, -1);
  for (int k = k_; k >= 1; --k)
    if ((u >> (k - 1)) & 1) {
      out[k - 1] = static_cast<int>(z % s_);
      z /= s_;
    }
  return out;
}

double Instance::reward(std::size_t joint, ActionMask a) const {
  double v = 0.0;
  for (int e = 0; e < element_count(); ++e)
    if ((a >> e) & 1) {
      int k = e % (k_ + 1);
      v += reward_[e][k == 0 ? 0 : relay_state(joint, k)];
    }
  return v;
}

double Instance::cost(std::size_t joint, ActionMask a, int ue) const {
  double v = 0.0;
  for (int e = ue * (k_ + 1); e < (ue + 1) * (k_ + 1); ++e)
    if ((a >> e) & 1) {
      int k = e % (k_ + 1);
      v += cost_[e][k == 0 ? 0 : relay_state(joint, k)];
    }
  return v;
}

double Instance::reward_range() const {
  // rewards are non-negative and separable, so R_min = 0 (empty action) and
  // R_max adds the per-element maxima
  double hi = 0.0;
  for (int e = 0; e < element_count(); ++e)
    if ((available_ >> e) & 1) hi += *std::max_element(reward_[e].begin(), reward_[e].end());
  return hi;
}

double Instance::cost_range() const {
  double best = 0.0;
  for (int n = 0; n < n_; ++n) {
    double hi = 0.0;
    for (int k = 0; k <= k_; ++k) {
      int e = element_id(k, n);
      if ((available_ >> e) & 1) hi += *std::max_element(cost_[e].begin(), cost_[e].end());
    }
    best = std::max(best, hi);
  }
  return best;
}

FactoredBelief Instance::initial_belief() const {
  FactoredBelief b;
  for (int k = 0; k < k_; ++k) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(s_);
    v(s0_[k]) = 1.0;
    b.per_relay.push_back(v);
  }
  return b;
}

std::vector<int> Instance::action_indices(ActionMask a) const {
  std::vector<int> out;
  for (int e = 0; e < element_count(); ++e)
    if ((a >> e) & 1) out.push_back(e % (k_ + 1));
  return out;
}

std::string Instance::action_string(ActionMask a) const {
  std::string s = "{";
  bool first = true;
  for (int e = 0; e < element_count(); ++e) {
    if (!((a >> e) & 1)) continue;
    if (!first) s += ",";
    first = false;
    Element el = element(e);
    s += std::to_string(el.relay);
    if (n_ > 1) s += "@" + std::to_string(el.ue);
  }
  return s + "}";
}

}  // namespace rsel
