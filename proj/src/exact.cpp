#include <algorithm>
#include <cmath>
#include <numeric>

#include <limits>
#include <map>

#include "relaysel/knapsack.hpp"
#include "relaysel/solvers.hpp"

namespace rsel {

namespace {

std::vector<ActionMask> actions_of(const Instance& inst) {
  ActionMask av = inst.available();
  if (popcount(av) > 16) throw CapError("exact: too many actions for exact backup");
  std::vector<ActionMask> out;
  for (ActionMask s = av;; s = (s - 1) & av) {
    out.push_back(s);
    if (s == 0) break;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

// q dominates p on the listed states (every state when `states` is null)
bool dominates(const AlphaPair& q, const AlphaPair& p, const std::vector<std::size_t>* states, double tol) {
  auto check = [&](std::size_t s) {
    if (q.r(s) < p.r(s) - tol) return false;
    for (std::size_t n = 0; n < q.c.size(); ++n)
      if (q.c[n](s) > p.c[n](s) + tol) return false;
    return true;
  };
  if (states) {
    for (std::size_t s : *states)
      if (!check(s)) return false;
    return true;
  }
  for (Eigen::Index s = 0; s < q.r.size(); ++s)
    if (!check(static_cast<std::size_t>(s))) return false;
  return true;
}

double scale_of(const std::vector<AlphaPair>& pairs) {
  double m = 1.0;
  for (const auto& p : pairs) {
    m = std::max(m, p.r.cwiseAbs().maxCoeff());
    for (const auto& c : p.c) m = std::max(m, c.cwiseAbs().maxCoeff());
  }
  return m;
}

// keeps pairs not dominated by another kept pair (earlier ones win ties)
std::vector<AlphaPair> prune_dominated(std::vector<AlphaPair> pairs) {
  const double tol = 1e-12 * scale_of(pairs);
  std::vector<double> key(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) key[i] = pairs[i].r.sum();
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });
  std::vector<bool> gone(pairs.size(), false);
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    std::size_t i = order[oi];
    if (gone[i]) continue;
    for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
      std::size_t j = order[oj];
      if (!gone[j] && dominates(pairs[i], pairs[j], nullptr, tol)) gone[j] = true;
    }
  }
  std::vector<AlphaPair> out;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (!gone[i]) out.push_back(std::move(pairs[i]));
  return out;
}

// all compositions of `steps` units over `parts` bins, as probability vectors
std::vector<Eigen::VectorXd> simplex_grid(int parts, int steps) {
  std::vector<Eigen::VectorXd> out;
  std::vector<int> cur(parts, 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == parts - 1) {
      cur[i] = left;
      Eigen::VectorXd v(parts);
      for (int k = 0; k < parts; ++k) v(k) = static_cast<double>(cur[k]) / steps;
      out.push_back(v);
      return;
    }
    for (int x = 0; x <= left; ++x) {
      cur[i] = x;
      rec(i + 1, left - x);
    }
  };
  rec(0, steps);
  return out;
}

std::vector<AlphaPair> prune_grid(std::vector<AlphaPair> pairs, const Instance& inst, int resolution) {
  auto axis = simplex_grid(inst.S(), std::max(1, resolution - 1));
  double count = std::pow(static_cast<double>(axis.size()), inst.K());
  if (count > 1e5) throw CapError("exact: belief grid too large for grid pruning");
  std::vector<bool> keep(pairs.size(), false);
  std::vector<std::size_t> idx(inst.K(), 0);
  while (true) {
    FactoredBelief b;
    for (int k = 0; k < inst.K(); ++k) b.per_relay.push_back(axis[idx[k]]);
    int best = -1;
    PairValue bv;
    for (int i = 0; i < static_cast<int>(pairs.size()); ++i) {
      PairValue v = evaluate(pairs[i], b, inst);
      if (!feasible(v.c, inst.c_th())) continue;
      if (best < 0 || better(v, pairs[i].action, bv, pairs[best].action, inst)) {
        best = i;
        bv = std::move(v);
      }
    }
    if (best >= 0) keep[best] = true;
    int d = inst.K() - 1;
    while (d >= 0 && ++idx[d] == axis.size()) idx[d--] = 0;
    if (d < 0) break;
  }
  std::vector<AlphaPair> out;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (keep[i]) out.push_back(std::move(pairs[i]));
  if (out.empty()) out.push_back(std::move(pairs.front()));
  return out;
}

// Beliefs the policy can hold at `epoch` from any one-hot start: the one-hot
// vectors at epoch 0, afterwards the rows P^n(s,:) with 1 <= n <= epoch.
std::vector<Eigen::VectorXd> joint_reachable(const Instance& inst, int epoch, std::size_t cap) {
  std::vector<std::vector<Eigen::VectorXd>> fams;
  std::size_t total = 1;
  for (const auto& c : inst.chains()) {
    std::vector<Eigen::VectorXd> fam;
    auto add = [&](Eigen::VectorXd v) {
      for (const auto& w : fam)
        if ((w - v).lpNorm<1>() <= 1e-12) return;
      fam.push_back(std::move(v));
    };
    if (epoch == 0) {
      for (int s = 0; s < c.size(); ++s) add(Eigen::VectorXd::Unit(c.size(), s));
    } else {
      Eigen::MatrixXd pn = c.matrix();
      for (int n = 1; n <= epoch; ++n, pn = pn * c.matrix())
        for (int s = 0; s < c.size(); ++s) add(pn.row(s).transpose());
    }
    if (total > cap / fam.size()) throw CapError("exact: reachable belief set exceeds cap " + std::to_string(cap));
    total *= fam.size();
    fams.push_back(std::move(fam));
  }
  std::vector<Eigen::VectorXd> out;
  std::vector<std::size_t> idx(fams.size(), 0);
  while (true) {
    FactoredBelief b;
    for (std::size_t k = 0; k < fams.size(); ++k) b.per_relay.push_back(fams[k][idx[k]]);
    out.push_back(joint_belief(b));
    int d = static_cast<int>(fams.size()) - 1;
    while (d >= 0 && ++idx[d] == fams[d].size()) idx[d--] = 0;
    if (d < 0) break;
  }
  return out;
}

// keeps every pair that is Pareto-optimal in (reward, per-UE costs) at some reachable belief
// At the first epoch the reachable beliefs are the start beliefs, where only
// budget-feasible pairs (or the cheapest one) can be selected.
std::vector<AlphaPair> prune_pareto(std::vector<AlphaPair> pairs, const std::vector<Eigen::VectorXd>& beliefs,
                                    int dims, double c_th = std::numeric_limits<double>::infinity()) {
  std::vector<bool> keep(pairs.size(), false);
  const double lim = c_th + 1e-9 * std::max(1.0, std::abs(c_th));
  for (const auto& jb : beliefs) {
    ItemSet items(dims);
    std::vector<double> c(dims);
    int cheapest = -1;
    double cheap_cost = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      double tot = 0.0;
      bool ok = true;
      for (int n = 0; n < dims; ++n) {
        c[n] = pairs[i].c[n].dot(jb);
        tot += c[n];
        ok = ok && c[n] <= lim;
      }
      if (tot < cheap_cost) cheap_cost = tot, cheapest = static_cast<int>(i);
      if (ok) items.add(pairs[i].r.dot(jb), c.data(), static_cast<int>(i));
    }
    if (items.size() == 0 && cheapest >= 0) keep[cheapest] = true;
    for (int id : prune_items(items).id) keep[id] = true;
  }
  std::vector<AlphaPair> out;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (keep[i]) out.push_back(std::move(pairs[i]));
  return out;
}

// Pairs of epoch `epoch` that are Pareto-optimal at some reachable belief. At
// each belief and action the candidates are the Pareto points of the
// multiple-choice merge over observation branches, so the cross-sum is never
// enumerated.
std::vector<AlphaPair> reachable_backup(const std::vector<AlphaPair>& moved, const std::vector<ActionMask>& actions,
                                        const Instance& inst, int epoch, const SolveOptions& opt, SolveStats& stats) {
  const int dims = inst.N();
  const auto beliefs = joint_reachable(inst, epoch, opt.belief_cap);
  const std::vector<double> open(dims, std::numeric_limits<double>::infinity());
  std::map<std::pair<ActionMask, std::vector<int>>, bool> seen;
  std::vector<AlphaPair> pool;
  const double g = inst.gamma();
  for (ActionMask a : actions) {
    const RelayMask u = inst.relay_mask(a);
    const std::size_t nz = inst.obs_count(u);
    std::vector<std::vector<std::size_t>> states(nz);
    for (std::size_t s = 0; s < inst.joint_size(); ++s) states[inst.obs_index(s, u)].push_back(s);
    for (const auto& jb : beliefs) {
      std::vector<ItemSet> branches(nz, ItemSet(dims));
      std::vector<double> c(dims);
      for (std::size_t z = 0; z < nz; ++z)
        for (std::size_t i = 0; i < moved.size(); ++i) {
          double r = 0.0;
          std::fill(c.begin(), c.end(), 0.0);
          for (std::size_t s : states[z]) {
            r += jb(s) * moved[i].r(s);
            for (int n = 0; n < dims; ++n) c[n] += jb(s) * moved[i].c[n](s);
          }
          for (double& x : c) x *= g;
          branches[z].add(g * r, c.data(), static_cast<int>(i));
        }
      stats.item_evaluations += nz * moved.size();
      ++stats.frontier_builds;
      // start beliefs are evaluated unweighted, so the budget applies there directly
      std::vector<double> budget = open;
      if (epoch == 0) {
        AlphaPair imm = immediate_pair(a, inst);
        for (int n = 0; n < dims; ++n) budget[n] = std::max(0.0, inst.c_th() - imm.c[n].dot(jb));
      }
      Frontier f(branches, budget, opt.exact_pair_cap);
      if (!f.exact()) throw CapError("exact: Pareto frontier exceeds cap " + std::to_string(opt.exact_pair_cap));
      auto take = [&](int h) {
        const std::vector<int>& ch = f.choice(h);
        if (!seen.emplace(std::make_pair(a, ch), true).second) return;
        pool.push_back(materialize(a, ch, moved, inst, epoch));
        if (pool.size() > opt.exact_pair_cap)
          throw CapError("exact: pair set exceeds cap " + std::to_string(opt.exact_pair_cap));
      };
      if (epoch == 0) {
        // only the constrained optimum at each start belief is ever selected
        std::vector<double> off(dims);
        AlphaPair imm = immediate_pair(a, inst);
        for (int n = 0; n < dims; ++n) off[n] = imm.c[n].dot(jb);
        int h = f.best(off, inst.c_th());
        if (h >= 0) take(h);
      } else {
        for (std::size_t i = 0; i < f.size(); ++i) take(f.point(static_cast<int>(i)));
      }
      if (epoch == 0 && f.size() == 0) {
        // nothing fits: keep the cheapest continuation as the fallback
        Frontier any(branches, open, opt.exact_pair_cap);
        if (!any.exact()) throw CapError("exact: Pareto frontier exceeds cap " + std::to_string(opt.exact_pair_cap));
        int h = any.cheapest();
        const std::vector<int>& ch = any.choice(h);
        if (seen.emplace(std::make_pair(a, ch), true).second) pool.push_back(materialize(a, ch, moved, inst, epoch));
      }
    }
  }
  stats.pairs_generated += pool.size();
  return prune_pareto(std::move(pool), beliefs, dims,
                      epoch == 0 ? inst.c_th() : std::numeric_limits<double>::infinity());
}

}  // namespace

ValueFunctionSet exact_backup(const ValueFunctionSet* next, const Instance& inst, int epoch, const SolveOptions& opt,
                              SolveStats& stats) {
  ++stats.backups;
  ValueFunctionSet out;
  out.epoch = epoch;
  std::vector<AlphaPair> all;
  const auto actions = actions_of(inst);
  std::vector<AlphaPair> moved;
  if (next) moved = transition_all(next->pairs, inst);
  if (opt.prune == PruneMode::Reachable) {
    if (!next) {
      for (ActionMask a : actions) {
        AlphaPair p = immediate_pair(a, inst);
        p.epoch = epoch;
        all.push_back(std::move(p));
      }
      stats.pairs_generated += all.size();
      out.pairs = prune_pareto(std::move(all), joint_reachable(inst, epoch, opt.belief_cap), inst.N(),
                               epoch == 0 ? inst.c_th() : std::numeric_limits<double>::infinity());
    } else {
      out.pairs = reachable_backup(moved, actions, inst, epoch, opt, stats);
    }
    return out;
  }
  for (ActionMask a : actions) {
    if (!next) {
      AlphaPair p = immediate_pair(a, inst);
      p.epoch = epoch;
      all.push_back(std::move(p));
      continue;
    }
    const RelayMask u = inst.relay_mask(a);
    const std::size_t nz = inst.obs_count(u);
    std::vector<std::vector<std::size_t>> states(nz);
    for (std::size_t s = 0; s < inst.joint_size(); ++s) states[inst.obs_index(s, u)].push_back(s);
    // backprojections of different observations live on disjoint states, so
    // pruning each branch on its own states loses nothing
    const double tol = 1e-12 * scale_of(moved);
    std::vector<std::vector<int>> lists(nz);
    std::size_t combos = 1;
    for (std::size_t z = 0; z < nz; ++z) {
      for (int i = 0; i < static_cast<int>(moved.size()); ++i) {
        bool dom = false;
        for (int j = 0; j < static_cast<int>(moved.size()) && !dom; ++j) {
          if (j == i || !dominates(moved[j], moved[i], &states[z], tol)) continue;
          // mutual dominance means equal on these states: keep the lower index
          dom = !(dominates(moved[i], moved[j], &states[z], tol) && i < j);
        }
        if (!dom) lists[z].push_back(i);
      }
      if (combos > opt.cross_sum_cap / lists[z].size())
        throw CapError("exact: cross-sum exceeds cap " + std::to_string(opt.cross_sum_cap) +
                       "; reduce horizon, relays or regions");
      combos *= lists[z].size();
    }
    if (all.size() + combos > opt.exact_pair_cap)
      throw CapError("exact: pair set exceeds cap " + std::to_string(opt.exact_pair_cap));
    std::vector<std::size_t> idx(nz, 0);
    std::vector<int> nxt(nz);
    while (true) {
      for (std::size_t z = 0; z < nz; ++z) nxt[z] = lists[z][idx[z]];
      all.push_back(materialize(a, nxt, moved, inst, epoch));
      int d = static_cast<int>(nz) - 1;
      while (d >= 0 && ++idx[d] == lists[d].size()) idx[d--] = 0;
      if (d < 0) break;
    }
  }
  stats.pairs_generated += all.size();
  out.pairs = opt.prune == PruneMode::Grid ? prune_grid(std::move(all), inst, opt.grid_resolution)
                                           : prune_dominated(std::move(all));
  return out;
}

}  // namespace rsel
