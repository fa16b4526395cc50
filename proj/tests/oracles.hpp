#pragma once
// Independent reference computations for the tests. Everything here works on
// dense joint-state vectors built from scratch (Kronecker products of the
// relay chains, explicit observation partitions) and shares no code with the
// solvers beyond Instance's reward and cost tables.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "relaysel/instance.hpp"

namespace oracle {

using rsel::ActionMask;
using rsel::Instance;

// joint chain with relay 1 as the most significant digit
inline Eigen::MatrixXd joint_matrix(const Instance& inst) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Ones(1, 1);
  for (int k = 1; k <= inst.K(); ++k) {
    const Eigen::MatrixXd& p = inst.chains()[k - 1].matrix();
    Eigen::MatrixXd n(t.rows() * p.rows(), t.cols() * p.cols());
    for (int i = 0; i < t.rows(); ++i)
      for (int j = 0; j < t.cols(); ++j) n.block(i * p.rows(), j * p.cols(), p.rows(), p.cols()) = t(i, j) * p;
    t = n;
  }
  return t;
}

inline std::vector<int> digits(std::size_t s, int k, int base) {
  std::vector<int> d(k);
  for (int i = k - 1; i >= 0; --i) {
    d[i] = static_cast<int>(s % base);
    s /= base;
  }
  return d;
}

inline double reward(const Instance& inst, std::size_t s, ActionMask a) {
  std::vector<int> d = digits(s, inst.K(), inst.S());
  double v = 0.0;
  for (int e = 0; e < inst.element_count(); ++e) {
    if (!((a >> e) & 1)) continue;
    auto el = inst.element(e);
    v += inst.reward_table(e)[el.relay == 0 ? 0 : d[el.relay - 1]];
  }
  return v;
}

inline double cost(const Instance& inst, std::size_t s, ActionMask a, int ue) {
  std::vector<int> d = digits(s, inst.K(), inst.S());
  double v = 0.0;
  for (int e = 0; e < inst.element_count(); ++e) {
    if (!((a >> e) & 1)) continue;
    auto el = inst.element(e);
    if (el.ue != ue) continue;
    v += inst.cost_table(e)[el.relay == 0 ? 0 : d[el.relay - 1]];
  }
  return v;
}

// relays observed by an action
inline std::vector<int> observed(const Instance& inst, ActionMask a) {
  std::vector<bool> on(inst.K() + 1, false);
  for (int e = 0; e < inst.element_count(); ++e)
    if ((a >> e) & 1) on[inst.element(e).relay] = true;
  std::vector<int> out;
  for (int k = 1; k <= inst.K(); ++k)
    if (on[k]) out.push_back(k);
  return out;
}

inline std::vector<ActionMask> actions(const Instance& inst) {
  std::vector<ActionMask> out;
  const ActionMask av = inst.available();
  for (ActionMask a = 0; a < (ActionMask{1} << inst.element_count()); ++a)
    if ((a & ~av) == 0) out.push_back(a);
  return out;
}

struct Point {
  double r;
  std::vector<double> c;
};

inline bool dominated(const Point& p, const Point& q) {
  // q at least as good everywhere
  if (q.r < p.r) return false;
  for (std::size_t n = 0; n < p.c.size(); ++n)
    if (q.c[n] > p.c[n]) return false;
  return true;
}

inline std::vector<Point> pareto(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.r > b.r; });
  std::vector<Point> out;
  for (const auto& p : pts) {
    bool dom = false;
    for (const auto& q : out)
      if (dominated(p, q)) {
        dom = true;
        break;
      }
    if (!dom) out.push_back(p);
  }
  return out;
}

// Every deterministic observation-contingent policy tree from the
// (unnormalised) joint distribution d at epoch t, reduced to its Pareto set
// of (expected discounted reward, per-UE cost).
inline std::vector<Point> tree_values(const Instance& inst, const Eigen::MatrixXd& T, const Eigen::VectorXd& d,
                                      int t) {
  const int nue = inst.N();
  const double g = inst.gamma();
  std::vector<Point> all;
  for (ActionMask a : actions(inst)) {
    Point base{0.0, std::vector<double>(nue, 0.0)};
    for (int s = 0; s < d.size(); ++s) {
      if (d(s) == 0.0) continue;
      base.r += d(s) * reward(inst, s, a);
      for (int n = 0; n < nue; ++n) base.c[n] += d(s) * cost(inst, s, a, n);
    }
    std::vector<Point> acc{base};
    if (t + 1 < inst.horizon()) {
      std::vector<int> obs = observed(inst, a);
      // partition states by the observed relays' current regions
      std::vector<std::vector<int>> parts;
      std::vector<std::vector<int>> keys;
      for (int s = 0; s < d.size(); ++s) {
        if (d(s) <= 0.0) continue;
        std::vector<int> dg = digits(s, inst.K(), inst.S()), key;
        for (int k : obs) key.push_back(dg[k - 1]);
        auto it = std::find(keys.begin(), keys.end(), key);
        if (it == keys.end()) {
          keys.push_back(key);
          parts.push_back({s});
        } else {
          parts[it - keys.begin()].push_back(s);
        }
      }
      for (const auto& part : parts) {
        Eigen::VectorXd dz = Eigen::VectorXd::Zero(d.size());
        for (int s : part) dz(s) = d(s);
        Eigen::VectorXd next = T.transpose() * dz;
        std::vector<Point> sub = tree_values(inst, T, next, t + 1);
        std::vector<Point> merged;
        for (const auto& p : acc)
          for (const auto& q : sub) {
            Point m{p.r + g * q.r, p.c};
            for (int n = 0; n < nue; ++n) m.c[n] += g * q.c[n];
            merged.push_back(std::move(m));
          }
        acc = pareto(std::move(merged));
      }
    }
    all.insert(all.end(), acc.begin(), acc.end());
  }
  return pareto(std::move(all));
}

struct Optimum {
  double r = 0.0;
  bool feasible = false;
};

// best reward among trees whose every UE cost is within the budget
inline Optimum constrained_optimum(const Instance& inst, const Eigen::VectorXd& d0) {
  Eigen::MatrixXd T = joint_matrix(inst);
  Optimum o;
  const double tol = 1e-9 * std::max(1.0, inst.c_th());
  for (const auto& p : tree_values(inst, T, d0, 0)) {
    bool ok = true;
    for (double c : p.c) ok = ok && c <= inst.c_th() + tol;
    if (ok && (!o.feasible || p.r > o.r)) {
      o.r = p.r;
      o.feasible = true;
    }
  }
  return o;
}

// Bayes filter on the joint state: condition on the observed current regions,
// then predict one step.
inline Eigen::VectorXd joint_filter_step(const Instance& inst, const Eigen::MatrixXd& T, const Eigen::VectorXd& d,
                                         ActionMask a, const std::vector<int>& regions) {
  std::vector<int> obs = observed(inst, a);
  Eigen::VectorXd c = d;
  for (int s = 0; s < d.size(); ++s) {
    std::vector<int> dg = digits(s, inst.K(), inst.S());
    for (int k : obs)
      if (dg[k - 1] != regions[k - 1]) c(s) = 0.0;
  }
  c /= c.sum();
  return T.transpose() * c;
}

// random row-stochastic matrix with strictly positive entries
inline Eigen::MatrixXd random_chain(std::mt19937_64& rng, int n) {
  std::gamma_distribution<double> g(1.0, 1.0);
  Eigen::MatrixXd p(n, n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += p(i, j) = g(rng) + 1e-3;
    p.row(i) /= s;
  }
  return p;
}

struct RandomSpec {
  int k = 1;
  int states = 2;
  int horizon = 2;
  double gamma = 1.0;
  bool direct = true;
  double budget_scale = 0.6;  // c_th as a fraction of the all-relay cost over the horizon
};

inline Instance random_instance(std::mt19937_64& rng, const RandomSpec& sp) {
  std::uniform_real_distribution<double> ur(0.0, 10.0), uc(0.5, 5.0), ud(0.0, 4.0);
  std::vector<rsel::MarkovChain> chains;
  std::vector<std::vector<double>> rew(sp.k), cst(sp.k);
  double cmax = 0.0;
  std::vector<int> s0;
  std::uniform_int_distribution<int> us(0, sp.states - 1);
  for (int k = 0; k < sp.k; ++k) {
    chains.emplace_back(random_chain(rng, sp.states));
    double m = 0.0;
    for (int s = 0; s < sp.states; ++s) {
      rew[k].push_back(ur(rng));
      cst[k].push_back(uc(rng));
      m = std::max(m, cst[k].back());
    }
    cmax += m;
    s0.push_back(us(rng));
  }
  std::optional<double> direct;
  if (sp.direct) direct = ud(rng);
  double g_sum = 0.0, w = 1.0;
  for (int t = 0; t < sp.horizon; ++t, w *= sp.gamma) g_sum += w;
  return Instance::custom(chains, rew, cst, direct, sp.budget_scale * cmax * g_sum, sp.horizon, sp.gamma, s0);
}

}  // namespace oracle
