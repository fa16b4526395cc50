#include <algorithm>
#include <map>
#include <numeric>

#include "relaysel/knapsack.hpp"
#include "relaysel/solvers.hpp"

namespace rsel {

namespace {

constexpr std::size_t kOracleFrontierCap = 1000000;

struct Branch {
  std::size_t z;
  int child;
  int point;
};

struct OPoint {
  double r;
  std::vector<double> c;
  ActionMask a;
  std::vector<Branch> branches;
};

struct ONode {
  int t;
  FactoredBelief b;
  std::vector<OPoint> front;
};

// Forward recursion over reachable beliefs. Each node keeps the exact Pareto
// set of (reward, per-UE cost) over all deterministic policy trees rooted at
// it; the budget is only applied at the root, so nothing feasible is lost.
class Oracle {
 public:
  explicit Oracle(const Instance& inst) : inst_(inst) {
    ActionMask av = inst.available();
    if (popcount(av) > 10) throw CapError("oracle: more than 2^10 actions");
    for (ActionMask s = av;; s = (s - 1) & av) {
      actions_.push_back(s);
      if (s == 0) break;
    }
    std::reverse(actions_.begin(), actions_.end());
  }

  int solve(int t, const FactoredBelief& b) {
    std::vector<double> key;
    key.push_back(t);
    for (const auto& v : b.per_relay) key.insert(key.end(), v.data(), v.data() + v.size());
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::vector<OPoint> cand;
    const double g = inst_.gamma();
    for (ActionMask a : actions_) {
      double rr = belief_reward(b, a, inst_);
      std::vector<double> rc;
      for (int n = 0; n < inst_.N(); ++n) rc.push_back(belief_cost(b, a, inst_, n));
      if (t == inst_.horizon() - 1) {
        cand.push_back(OPoint{rr, rc, a, {}});
        continue;
      }
      const RelayMask u = inst_.relay_mask(a);
      std::vector<ItemSet> branches;
      std::vector<std::pair<std::size_t, int>> kids;
      for (std::size_t z = 0; z < inst_.obs_count(u); ++z) {
        Observation obs{inst_.obs_decode(z, u)};
        double p = observation_prob(obs, a, b, inst_);
        if (p <= 0.0) continue;
        int child = solve(t + 1, update_belief(b, inst_, a, obs));
        ItemSet items(inst_.N());
        const auto& cf = nodes_[child].front;
        std::vector<double> c(inst_.N());
        for (int i = 0; i < static_cast<int>(cf.size()); ++i) {
          for (int n = 0; n < inst_.N(); ++n) c[n] = g * p * cf[i].c[n];
          items.add(g * p * cf[i].r, c.data(), i);
        }
        branches.push_back(std::move(items));
        kids.emplace_back(z, child);
      }
      std::vector<double> inf(inst_.N(), std::numeric_limits<double>::infinity());
      Frontier f(branches, inf, kOracleFrontierCap);
      if (!f.exact()) throw CapError("oracle: Pareto frontier exceeds cap");
      for (int i = 0; i < static_cast<int>(f.size()); ++i) {
        const int h = f.point(i);
        OPoint op{rr + f.r(h), rc, a, {}};
        for (int n = 0; n < inst_.N(); ++n) op.c[n] += f.c(h, n);
        const auto& ch = f.choice(h);
        for (std::size_t j = 0; j < kids.size(); ++j) op.branches.push_back(Branch{kids[j].first, kids[j].second, ch[j]});
        cand.push_back(std::move(op));
      }
    }
    // Pareto filter across actions, keeping the earlier (lexicographically smaller) action on ties
    ItemSet all(inst_.N());
    for (int i = 0; i < static_cast<int>(cand.size()); ++i) all.add(cand[i].r, cand[i].c.data(), i);
    std::vector<double> inf(inst_.N(), std::numeric_limits<double>::infinity());
    Frontier f({all}, inf, kOracleFrontierCap);
    if (!f.exact()) throw CapError("oracle: Pareto frontier exceeds cap");
    ONode node{t, b, {}};
    for (int i = 0; i < static_cast<int>(f.size()); ++i) node.front.push_back(cand[f.choice(f.point(i))[0]]);
    nodes_.push_back(std::move(node));
    int id = static_cast<int>(nodes_.size()) - 1;
    memo_.emplace(std::move(key), id);
    return id;
  }

  // best root point under the budget: max reward, then min total cost, then smaller action
  int root_point(int node) const {
    const auto& fr = nodes_[node].front;
    int best = -1;
    PairValue bv;
    for (int i = 0; i < static_cast<int>(fr.size()); ++i) {
      PairValue v{fr[i].r, fr[i].c};
      if (!feasible(v.c, inst_.c_th())) continue;
      if (best < 0 || better(v, fr[i].a, bv, fr[best].a, inst_)) {
        best = i;
        bv = v;
      }
    }
    return best;
  }

  const ONode& node(int i) const { return nodes_[i]; }

 private:
  const Instance& inst_;
  std::vector<ActionMask> actions_;
  std::vector<ONode> nodes_;
  std::map<std::vector<double>, int> memo_;
};

void check_caps(const Instance& inst) {
  if (inst.joint_size() > 64 || inst.horizon() > 3 || inst.K() > 2)
    throw CapError("oracle: instance exceeds caps (joint states <= 64, horizon <= 3, K <= 2)");
}

// Turns the chosen policy tree into linked pairs. Index 0 of every epoch
// after the first is the idle pair (empty action forever, zero vectors),
// used for observations the tree never reaches.
class TreeBuilder {
 public:
  TreeBuilder(const Oracle& o, const Instance& inst, PolicySolution& sol) : o_(o), inst_(inst), sol_(sol) {
    const int T = inst.horizon();
    sol.epochs.assign(T, ValueFunctionSet{});
    moved_.assign(T, {});
    for (int t = 0; t < T; ++t) {
      sol.epochs[t].epoch = t;
      if (t == 0) continue;
      AlphaPair idle = zero_pair(inst);
      idle.epoch = t;
      if (t + 1 < T) idle.next.assign(1, 0);
      sol.epochs[t].pairs.push_back(idle);
      moved_[t].push_back(idle);
    }
  }

  int build(int node, int point) {
    auto key = std::make_pair(node, point);
    auto it = done_.find(key);
    if (it != done_.end()) return it->second;
    const ONode& nd = o_.node(node);
    const OPoint& op = nd.front[point];
    const int t = nd.t;
    std::vector<int> next;
    if (t + 1 < inst_.horizon()) {
      next.assign(inst_.obs_count(inst_.relay_mask(op.a)), 0);
      for (const auto& br : op.branches) next[br.z] = build(br.child, br.point);
    }
    static const std::vector<AlphaPair> none;
    AlphaPair p = materialize(op.a, next, next.empty() ? none : moved_[t + 1], inst_, t);
    sol_.epochs[t].pairs.push_back(p);
    AlphaPair m;
    m.action = p.action;
    m.r = apply_transition(p.r, inst_);
    for (const auto& c : p.c) m.c.push_back(apply_transition(c, inst_));
    moved_[t].push_back(std::move(m));
    int id = static_cast<int>(sol_.epochs[t].pairs.size()) - 1;
    done_.emplace(key, id);
    return id;
  }

 private:
  const Oracle& o_;
  const Instance& inst_;
  PolicySolution& sol_;
  std::vector<std::vector<AlphaPair>> moved_;
  std::map<std::pair<int, int>, int> done_;
};

}  // namespace

OracleValue oracle_value(const Instance& inst, const FactoredBelief& b0) {
  check_caps(inst);
  Oracle o(inst);
  int root = o.solve(0, b0);
  int pt = o.root_point(root);
  OracleValue v;
  if (pt < 0) return v;
  v.r = o.node(root).front[pt].r;
  v.c = o.node(root).front[pt].c;
  v.feasible = true;
  return v;
}

PolicySolution brute_force_oracle(const Instance& inst, const SolveOptions&) {
  check_caps(inst);
  PolicySolution sol;
  sol.method = Method::Oracle;
  sol.fingerprint = inst.fingerprint();
  Oracle o(inst);
  FactoredBelief b0 = inst.initial_belief();
  int root = o.solve(0, b0);
  int pt = o.root_point(root);
  if (pt < 0) {
    // no tree meets the budget: the cheapest one
    const auto& fr = o.node(root).front;
    pt = 0;
    for (int i = 1; i < static_cast<int>(fr.size()); ++i)
      if (std::accumulate(fr[i].c.begin(), fr[i].c.end(), 0.0) <
          std::accumulate(fr[pt].c.begin(), fr[pt].c.end(), 0.0))
        pt = i;
    ++sol.stats.fallbacks;
  }
  TreeBuilder tb(o, inst, sol);
  sol.root = tb.build(root, pt);
  sol.value_r = o.node(root).front[pt].r;
  sol.value_c = o.node(root).front[pt].c;
  sol.stats.backups = inst.horizon();
  return sol;
}

}  // namespace rsel
