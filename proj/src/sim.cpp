#include "relaysel/sim.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include "relaysel/rng.hpp"

namespace rsel {

namespace {

class FollowController : public Controller {
 public:
  FollowController(const PolicySolution& sol) : sol_(sol) {}
  void reset() override { cur_ = -1; }
  ActionMask act(int t, const FactoredBelief&) override {
    if (t == 0) cur_ = sol_.root;
    return sol_.epochs.at(t).pairs.at(cur_).action;
  }
  void observe(int t, std::size_t z) override {
    if (t + 1 < sol_.horizon()) cur_ = sol_.epochs[t].pairs[cur_].next.at(z);
  }

 private:
  const PolicySolution& sol_;
  int cur_ = -1;
};

class ReselectController : public Controller {
 public:
  ReselectController(const PolicySolution& sol, const Instance& inst) : sol_(sol), inst_(inst) {}
  ActionMask act(int t, const FactoredBelief& b) override {
    const auto& pairs = sol_.epochs.at(t).pairs;
    return pairs[constrained_argmax(pairs, b, inst_, inst_.c_th())].action;
  }

 private:
  const PolicySolution& sol_;
  const Instance& inst_;
};

class FixedController : public Controller {
 public:
  explicit FixedController(ActionMask a) : a_(a) {}
  ActionMask act(int, const FactoredBelief&) override { return a_; }

 private:
  ActionMask a_;
};

ActionMask ue_elements(const Instance& inst, int n) {
  ActionMask all = (inst.K() + 1 >= 64) ? ~ActionMask{0} : ((ActionMask{1} << (inst.K() + 1)) - 1);
  return all << (n * (inst.K() + 1));
}

struct Welford {
  double n = 0, mean = 0, m2 = 0;
  void add(double x) {
    n += 1;
    double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  double stderr_() const { return n > 1 ? std::sqrt(m2 / (n - 1) / n) : 0.0; }
};

}  // namespace

std::unique_ptr<Controller> make_controller(const PolicySolution& sol, const Instance& inst, ExecMode mode) {
  if (sol.horizon() != inst.horizon()) throw ValidationError("policy horizon does not match scenario horizon");
  if (mode == ExecMode::Follow) return std::make_unique<FollowController>(sol);
  return std::make_unique<ReselectController>(sol, inst);
}

std::unique_ptr<Controller> fixed_controller(ActionMask a) { return std::make_unique<FixedController>(a); }

World world_of(const Instance& inst) {
  return World{inst.chains(), inst.s0(), inst.horizon(), inst.gamma(), inst.N()};
}

World world_of(const ScenarioConfig& cfg) {
  World w;
  w.chains = scenario_chains(cfg);
  for (const auto& r : cfg.relays) w.s0.push_back(region_index(cfg, r.initial_state));
  w.horizon = cfg.horizon;
  w.gamma = cfg.gamma;
  w.ues = static_cast<int>(cfg.ues.size());
  return w;
}

namespace {

// per-epoch, per-UE raw streams of one episode
struct Streams {
  std::vector<std::vector<double>> r, c;  // [t][world ue]
  std::vector<EpochRecord> records;
};

Streams play(const World& w, const std::vector<Agent>& agents, std::uint64_t seed, bool record) {
  Rng rng(seed);
  std::vector<int> regions = w.s0;
  std::vector<FactoredBelief> beliefs;
  for (const auto& ag : agents) {
    if (ag.inst->horizon() != w.horizon) throw ValidationError("agent horizon does not match the world");
    beliefs.push_back(ag.inst->initial_belief());
    ag.controller->reset();
  }
  Streams out;
  out.r.assign(w.horizon, std::vector<double>(w.ues, 0.0));
  out.c = out.r;
  for (int t = 0; t < w.horizon; ++t) {
    for (std::size_t i = 0; i < agents.size(); ++i) {
      const Agent& ag = agents[i];
      const Instance& inst = *ag.inst;
      std::vector<int> loc(inst.K());
      for (int k = 0; k < inst.K(); ++k) loc[k] = regions[ag.relay_map[k]];
      const std::size_t joint = inst.joint_index(loc);
      ActionMask a = ag.controller->act(t, beliefs[i]);
      if (a & ~inst.available()) throw ValidationError("controller chose an unavailable element");
      EpochRecord rec;
      rec.epoch = t;
      rec.action = a;
      rec.state = loc;
      for (int n = 0; n < inst.N(); ++n) {
        double rn = inst.reward(joint, a & ue_elements(inst, n));
        double cn = inst.cost(joint, a, n);
        out.r[t][ag.ue_map[n]] += rn;
        out.c[t][ag.ue_map[n]] += cn;
        rec.reward += rn;
        rec.cost.push_back(cn);
      }
      const RelayMask u = inst.relay_mask(a);
      ag.controller->observe(t, inst.obs_index(joint, u));
      Observation z{std::vector<int>(inst.K(), -1)};
      for (int k = 1; k <= inst.K(); ++k)
        if ((u >> (k - 1)) & 1) z.per_relay[k - 1] = loc[k - 1];
      beliefs[i] = update_belief(beliefs[i], inst, a, z);
      rec.obs = z;
      if (record && agents.size() == 1) out.records.push_back(std::move(rec));
    }
    for (std::size_t k = 0; k < regions.size(); ++k) regions[k] = rng.categorical(w.chains[k].matrix().row(regions[k]));
  }
  return out;
}

}  // namespace

EpisodeTrace simulate_episode(const World& w, const std::vector<Agent>& agents, std::uint64_t seed, bool record) {
  Streams s = play(w, agents, seed, record);
  EpisodeTrace tr;
  tr.records = std::move(s.records);
  tr.cum_cost.assign(w.ues, 0.0);
  double disc = 1.0;
  for (int t = 0; t < w.horizon; ++t, disc *= w.gamma)
    for (int n = 0; n < w.ues; ++n) {
      tr.cum_reward += disc * s.r[t][n];
      tr.cum_cost[n] += disc * s.c[t][n];
      if (s.c[t][n] > 0.0) tr.ee += std::pow(w.gamma, w.horizon - 1 - t) * s.r[t][n] / s.c[t][n];
    }
  return tr;
}

SimulationMetrics simulate(const World& w, const std::vector<Agent>& agents, int runs, std::uint64_t seed) {
  if (runs < 1) throw ValidationError("runs: must be >= 1");
  const int T = w.horizon;
  std::vector<Welford> er(T), ec(T), ee(T);
  std::vector<Welford> ur(w.ues), uc(w.ues), ue(w.ues);
  for (int run = 0; run < runs; ++run) {
    Streams s = play(w, agents, derive_seed(seed, run), false);
    double cr = 0, cc = 0, ce = 0, disc = 1.0;
    std::vector<double> pr(w.ues, 0.0), pc(w.ues, 0.0), pe(w.ues, 0.0);
    for (int t = 0; t < T; ++t, disc *= w.gamma) {
      for (int n = 0; n < w.ues; ++n) {
        cr += disc * s.r[t][n];
        cc += disc * s.c[t][n];
        pr[n] += disc * s.r[t][n];
        pc[n] += disc * s.c[t][n];
        if (s.c[t][n] > 0.0) {
          double x = std::pow(w.gamma, T - 1 - t) * s.r[t][n] / s.c[t][n];
          ce += x;
          pe[n] += x;
        }
      }
      er[t].add(cr);
      ec[t].add(cc);
      ee[t].add(ce);
    }
    for (int n = 0; n < w.ues; ++n) {
      ur[n].add(pr[n]);
      uc[n].add(pc[n]);
      ue[n].add(pe[n]);
    }
  }
  SimulationMetrics m;
  m.runs = runs;
  for (int t = 0; t < T; ++t)
    m.epochs.push_back(EpochMetrics{t + 1, er[t].mean, ec[t].mean, ee[t].mean, er[t].stderr_(), ec[t].stderr_()});
  m.avg_reward = er[T - 1].mean;
  m.avg_cost = ec[T - 1].mean;
  m.avg_ee = ee[T - 1].mean;
  m.stderr_reward = er[T - 1].stderr_();
  m.stderr_cost = ec[T - 1].stderr_();
  for (int n = 0; n < w.ues; ++n) {
    m.ue_reward.push_back(ur[n].mean);
    m.ue_cost.push_back(uc[n].mean);
    m.ue_cost_stderr.push_back(uc[n].stderr_());
    m.ue_ee.push_back(ue[n].mean);
  }
  return m;
}

namespace {

Agent identity_agent(const Instance& inst, Controller* c) {
  Agent ag;
  ag.inst = &inst;
  ag.controller = c;
  ag.relay_map.resize(inst.K());
  std::iota(ag.relay_map.begin(), ag.relay_map.end(), 0);
  ag.ue_map.resize(inst.N());
  std::iota(ag.ue_map.begin(), ag.ue_map.end(), 0);
  return ag;
}

}  // namespace

EpisodeTrace run_episode(const PolicySolution& sol, const Instance& inst, std::uint64_t seed, ExecMode mode) {
  auto ctl = make_controller(sol, inst, mode);
  return simulate_episode(world_of(inst), {identity_agent(inst, ctl.get())}, seed, true);
}

SimulationMetrics monte_carlo(const PolicySolution& sol, const Instance& inst, int runs, std::uint64_t seed,
                              ExecMode mode) {
  auto ctl = make_controller(sol, inst, mode);
  return simulate(world_of(inst), {identity_agent(inst, ctl.get())}, runs, seed);
}

SimulationMetrics baseline_cellular(const Instance& inst, int runs, std::uint64_t seed) {
  ActionMask a = 0;
  for (int n = 0; n < inst.N(); ++n) a |= ActionMask{1} << inst.element_id(0, n);
  if ((a & inst.available()) != a) throw ValidationError("baseline: the direct link is disabled");
  auto ctl = fixed_controller(a);
  return simulate(world_of(inst), {identity_agent(inst, ctl.get())}, runs, seed);
}

MultiUserResult run_multiuser(const ScenarioConfig& cfg, MultiMode mode, const SolveOptions& opt, int runs,
                              std::uint64_t seed) {
  MultiUserResult res;
  World w = world_of(cfg);
  std::vector<Instance> insts;
  if (mode == MultiMode::Centralized) {
    insts.push_back(Instance::centralized(cfg));
  } else {
    for (int n = 0; n < static_cast<int>(cfg.ues.size()); ++n) insts.push_back(Instance::single_ue(cfg, n));
  }
  std::vector<PolicySolution> sols;
  for (const auto& inst : insts) {
    sols.push_back(solve(inst, opt));
    res.stats.push_back(sols.back().stats);
    res.planned_reward += sols.back().value_r;
  }
  std::vector<std::unique_ptr<Controller>> ctls;
  std::vector<Agent> agents;
  for (std::size_t i = 0; i < insts.size(); ++i) {
    ctls.push_back(make_controller(sols[i], insts[i]));
    Agent ag;
    ag.inst = &insts[i];
    ag.controller = ctls.back().get();
    for (int k = 1; k <= insts[i].K(); ++k) ag.relay_map.push_back(insts[i].global_relay(k) - 1);
    for (int n = 0; n < insts[i].N(); ++n) ag.ue_map.push_back(insts[i].global_ue(n));
    agents.push_back(std::move(ag));
  }
  res.metrics = simulate(w, agents, runs, seed);
  return res;
}

namespace {

// d -> d T (mass moved forward one step)
Eigen::VectorXd forward(const Eigen::VectorXd& d, const Instance& inst) {
  const int n = inst.S();
  const std::size_t j = inst.joint_size();
  Eigen::VectorXd cur = d, out(j), x(n);
  for (int k = 1; k <= inst.K(); ++k) {
    const Eigen::MatrixXd& p = inst.chains()[k - 1].matrix();
    const std::size_t st = inst.stride(k);
    for (std::size_t o = 0; o < j; o += st * n)
      for (std::size_t i = 0; i < st; ++i) {
        for (int a = 0; a < n; ++a) x(a) = cur(o + a * st + i);
        for (int a = 0; a < n; ++a) out(o + a * st + i) = p.col(a).dot(x);
      }
    cur.swap(out);
  }
  return cur;
}

}  // namespace

Expectation exact_expectation(const PolicySolution& sol, const Instance& inst) {
  const int T = inst.horizon();
  Expectation ex;
  ex.cost.assign(inst.N(), 0.0);
  std::map<int, Eigen::VectorXd> mass;
  Eigen::VectorXd d0 = Eigen::VectorXd::Zero(inst.joint_size());
  d0(inst.joint_index(inst.s0())) = 1.0;
  mass[sol.root] = d0;
  double disc = 1.0;
  for (int t = 0; t < T; ++t, disc *= inst.gamma()) {
    std::map<int, Eigen::VectorXd> nxt;
    for (const auto& [pi, d] : mass) {
      const AlphaPair& p = sol.epochs[t].pairs[pi];
      const RelayMask u = inst.relay_mask(p.action);
      std::map<int, Eigen::VectorXd> split;
      for (std::size_t s = 0; s < inst.joint_size(); ++s) {
        if (d(s) == 0.0) continue;
        ex.reward += disc * d(s) * inst.reward(s, p.action);
        for (int n = 0; n < inst.N(); ++n) ex.cost[n] += disc * d(s) * inst.cost(s, p.action, n);
        if (t + 1 == T) continue;
        int q = p.next[inst.obs_index(s, u)];
        auto it = split.find(q);
        if (it == split.end()) it = split.emplace(q, Eigen::VectorXd::Zero(inst.joint_size())).first;
        it->second(s) += d(s);
      }
      for (auto& [q, dq] : split) {
        Eigen::VectorXd moved = forward(dq, inst);
        auto it = nxt.find(q);
        if (it == nxt.end()) nxt.emplace(q, std::move(moved));
        else it->second += moved;
      }
    }
    mass.swap(nxt);
  }
  return ex;
}

std::string metrics_csv_header() {
  return "scenario_id,method,epoch,avg_cum_reward,avg_cum_cost,avg_cum_ee,stderr_reward,runs\n";
}

std::string metrics_csv_rows(const SimulationMetrics& m, const std::string& scenario_id, const std::string& method) {
  std::ostringstream os;
  char buf[256];
  for (const auto& e : m.epochs) {
    std::snprintf(buf, sizeof buf, "%s,%s,%d,%.10g,%.10g,%.10g,%.10g,%d\n", scenario_id.c_str(), method.c_str(),
                  e.epoch, e.avg_cum_reward, e.avg_cum_cost, e.avg_cum_ee, e.stderr_reward, m.runs);
    os << buf;
  }
  return os.str();
}

}  // namespace rsel
