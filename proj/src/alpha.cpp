#include "relaysel/alpha.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rsel {

AlphaPair zero_pair(const Instance& inst) {
  AlphaPair p;
  p.r = Eigen::VectorXd::Zero(inst.joint_size());
  p.c.assign(inst.N(), Eigen::VectorXd::Zero(inst.joint_size()));
  return p;
}

AlphaPair immediate_pair(ActionMask a, const Instance& inst) {
  if (a & ~inst.available()) throw ValidationError("action selects an unavailable element");
  AlphaPair p = zero_pair(inst);
  p.action = a;
  const std::size_t j = inst.joint_size();
  for (int e = 0; e < inst.element_count(); ++e) {
    if (!((a >> e) & 1)) continue;
    Element el = inst.element(e);
    const auto& rt = inst.reward_table(e);
    const auto& ct = inst.cost_table(e);
    if (el.relay == 0) {
      p.r.array() += rt[0];
      p.c[el.ue].array() += ct[0];
      continue;
    }
    for (std::size_t s = 0; s < j; ++s) {
      int reg = inst.relay_state(s, el.relay);
      p.r(s) += rt[reg];
      p.c[el.ue](s) += ct[reg];
    }
  }
  return p;
}

Eigen::VectorXd apply_transition(const Eigen::VectorXd& v, const Instance& inst) {
  const int n = inst.S();
  const std::size_t j = inst.joint_size();
  Eigen::VectorXd cur = v, out(j);
  Eigen::VectorXd x(n);
  for (int k = 1; k <= inst.K(); ++k) {
    const Eigen::MatrixXd& p = inst.chains()[k - 1].matrix();
    const std::size_t st = inst.stride(k);
    const std::size_t block = st * n;
    for (std::size_t o = 0; o < j; o += block)
      for (std::size_t i = 0; i < st; ++i) {
        for (int a = 0; a < n; ++a) x(a) = cur(o + a * st + i);
        for (int a = 0; a < n; ++a) out(o + a * st + i) = p.row(a).dot(x);
      }
    cur.swap(out);
  }
  return cur;
}

AlphaPair backproject(const AlphaPair& pair, ActionMask a, const Observation& z, const Instance& inst) {
  RelayMask u = inst.relay_mask(a);
  if (static_cast<int>(z.per_relay.size()) != inst.K()) throw ValidationError("observation length must equal K");
  for (int k = 1; k <= inst.K(); ++k) {
    bool sel = (u >> (k - 1)) & 1;
    if (sel != (z.per_relay[k - 1] >= 0)) throw ValidationError("observation inconsistent with action");
  }
  const double g = inst.gamma();
  AlphaPair out;
  out.action = a;
  out.epoch = pair.epoch - 1;
  auto mask = [&](Eigen::VectorXd v) {
    v *= g;
    for (std::size_t s = 0; s < inst.joint_size(); ++s)
      for (int k = 1; k <= inst.K(); ++k)
        if (((u >> (k - 1)) & 1) && inst.relay_state(s, k) != z.per_relay[k - 1]) {
          v(s) = 0.0;
          break;
        }
    return v;
  };
  out.r = mask(apply_transition(pair.r, inst));
  for (const auto& c : pair.c) out.c.push_back(mask(apply_transition(c, inst)));
  return out;
}

std::vector<AlphaPair> cross_sum(const std::vector<std::vector<AlphaPair>>& gamma_sets, const AlphaPair& immediate,
                                 std::size_t cap) {
  std::size_t total = 1;
  for (const auto& g : gamma_sets) {
    if (g.empty()) throw ValidationError("cross_sum: every observation branch needs at least one pair");
    if (total > cap / g.size()) throw CapError("cross_sum: output exceeds cap " + std::to_string(cap));
    total *= g.size();
  }
  std::vector<AlphaPair> out;
  out.reserve(total);
  std::vector<int> idx(gamma_sets.size(), 0);
  while (true) {
    AlphaPair p = immediate;
    p.next = idx;
    for (std::size_t z = 0; z < gamma_sets.size(); ++z) {
      const AlphaPair& q = gamma_sets[z][idx[z]];
      p.r += q.r;
      for (std::size_t n = 0; n < p.c.size(); ++n) p.c[n] += q.c[n];
    }
    out.push_back(std::move(p));
    int d = static_cast<int>(idx.size()) - 1;
    while (d >= 0 && ++idx[d] == static_cast<int>(gamma_sets[d].size())) idx[d--] = 0;
    if (d < 0) break;
  }
  return out;
}

double expect(const Eigen::VectorXd& alpha, const FactoredBelief& b, const Instance& inst) {
  // contract relays from the least significant digit upward
  const int n = inst.S();
  Eigen::VectorXd cur = alpha;
  for (int k = inst.K(); k >= 1; --k) {
    const Eigen::VectorXd& w = b.per_relay[k - 1];
    Eigen::VectorXd next(cur.size() / n);
    for (Eigen::Index o = 0; o < next.size(); ++o) next(o) = cur.segment(o * n, n).dot(w);
    cur.swap(next);
  }
  return cur(0);
}

PairValue evaluate(const AlphaPair& p, const FactoredBelief& b, const Instance& inst) {
  PairValue v;
  v.r = expect(p.r, b, inst);
  for (const auto& c : p.c) v.c.push_back(expect(c, b, inst));
  return v;
}

bool feasible(const std::vector<double>& c, double c_th) {
  const double tol = 1e-9 * std::max(1.0, std::abs(c_th));
  for (double x : c)
    if (x > c_th + tol) return false;
  return true;
}

namespace {

bool lex_less(ActionMask a, ActionMask b) {
  // compare ascending element lists
  while (a && b) {
    int ea = __builtin_ctzll(a), eb = __builtin_ctzll(b);
    if (ea != eb) return ea < eb;
    a &= a - 1;
    b &= b - 1;
  }
  return !a && b;
}

}  // namespace

bool better(const PairValue& a, ActionMask aa, const PairValue& b, ActionMask ab, const Instance&) {
  const double tol = 1e-9 * std::max({1.0, std::abs(a.r), std::abs(b.r)});
  if (a.r > b.r + tol) return true;
  if (b.r > a.r + tol) return false;
  double ca = std::accumulate(a.c.begin(), a.c.end(), 0.0);
  double cb = std::accumulate(b.c.begin(), b.c.end(), 0.0);
  const double ctol = 1e-9 * std::max({1.0, std::abs(ca), std::abs(cb)});
  if (ca < cb - ctol) return true;
  if (cb < ca - ctol) return false;
  return lex_less(aa, ab);
}

int constrained_argmax(const std::vector<AlphaPair>& pairs, const FactoredBelief& b, const Instance& inst,
                       double c_th) {
  int best = -1, cheapest = -1;
  PairValue bv, cv;
  double cheap_sum = 0.0;
  for (int i = 0; i < static_cast<int>(pairs.size()); ++i) {
    PairValue v = evaluate(pairs[i], b, inst);
    double sum = std::accumulate(v.c.begin(), v.c.end(), 0.0);
    if (cheapest < 0 || sum < cheap_sum) {
      cheapest = i;
      cheap_sum = sum;
    }
    if (!feasible(v.c, c_th)) continue;
    if (best < 0 || better(v, pairs[i].action, bv, pairs[best].action, inst)) {
      best = i;
      bv = std::move(v);
    }
  }
  return best >= 0 ? best : cheapest;
}

Support support(const FactoredBelief& b, const Instance& inst) {
  Support out;
  out.states.push_back(0);
  out.prob.push_back(1.0);
  for (int k = 1; k <= inst.K(); ++k) {
    Support nx;
    const auto& w = b.per_relay[k - 1];
    for (std::size_t i = 0; i < out.states.size(); ++i)
      for (int s = 0; s < inst.S(); ++s)
        if (w(s) > 0.0) {
          nx.states.push_back(out.states[i] + inst.stride(k) * s);
          nx.prob.push_back(out.prob[i] * w(s));
        }
    out = std::move(nx);
  }
  return out;
}

AlphaPair materialize(ActionMask a, const std::vector<int>& next, const std::vector<AlphaPair>& moved,
                      const Instance& inst, int epoch) {
  AlphaPair p = immediate_pair(a, inst);
  p.epoch = epoch;
  p.next = next;
  if (moved.empty()) {
    p.next.clear();
    return p;
  }
  const RelayMask u = inst.relay_mask(a);
  const double g = inst.gamma();
  for (std::size_t s = 0; s < inst.joint_size(); ++s) {
    const AlphaPair& q = moved[next[inst.obs_index(s, u)]];
    p.r(s) += g * q.r(s);
    for (std::size_t n = 0; n < p.c.size(); ++n) p.c[n](s) += g * q.c[n](s);
  }
  return p;
}

std::vector<AlphaPair> transition_all(const std::vector<AlphaPair>& pairs, const Instance& inst) {
  std::vector<AlphaPair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    AlphaPair q;
    q.action = p.action;
    q.epoch = p.epoch;
    q.r = apply_transition(p.r, inst);
    for (const auto& c : p.c) q.c.push_back(apply_transition(c, inst));
    out.push_back(std::move(q));
  }
  return out;
}

}  // namespace rsel
