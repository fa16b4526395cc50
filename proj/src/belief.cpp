#include "relaysel/belief.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "relaysel/rng.hpp"

namespace rsel {

Eigen::VectorXd update_relay_belief(const Eigen::VectorXd& b, const MarkovChain& chain, bool selected,
                                    std::optional<int> obs) {
  if (selected != obs.has_value()) throw ValidationError("observation must be present iff the relay is selected");
  if (b.size() != chain.size()) throw ValidationError("belief size does not match chain size");
  if (!selected) return chain.matrix().transpose() * b;
  if (*obs < 0 || *obs >= chain.size()) throw ValidationError("observed region out of range");
  return chain.matrix().row(*obs).transpose();
}

FactoredBelief update_belief(const FactoredBelief& b, const Instance& inst, ActionMask a, const Observation& z) {
  RelayMask u = inst.relay_mask(a);
  if (static_cast<int>(z.per_relay.size()) != inst.K()) throw ValidationError("observation length must equal K");
  FactoredBelief out;
  out.per_relay.reserve(inst.K());
  for (int k = 1; k <= inst.K(); ++k) {
    bool sel = (u >> (k - 1)) & 1;
    int zk = z.per_relay[k - 1];
    if (sel != (zk >= 0)) throw ValidationError("observation inconsistent with action");
    out.per_relay.push_back(update_relay_belief(b.per_relay[k - 1], inst.chains()[k - 1], sel,
                                                sel ? std::optional<int>(zk) : std::nullopt));
  }
  return out;
}

Eigen::VectorXd joint_belief(const FactoredBelief& fb, std::size_t cap) {
  if (fb.per_relay.empty()) throw ValidationError("joint_belief: at least one relay required");
  std::size_t n = 1;
  for (const auto& v : fb.per_relay) {
    if (n > cap / std::max<std::size_t>(1, v.size())) throw CapError("joint_belief: joint size exceeds cap");
    n *= v.size();
  }
  Eigen::VectorXd out = fb.per_relay[0];
  for (std::size_t k = 1; k < fb.per_relay.size(); ++k) {
    const auto& v = fb.per_relay[k];
    Eigen::VectorXd next(out.size() * v.size());
    for (Eigen::Index i = 0; i < out.size(); ++i) next.segment(i * v.size(), v.size()) = out(i) * v;
    out.swap(next);
  }
  return out;
}

double joint_value(const FactoredBelief& fb, const std::vector<int>& regions) {
  double p = 1.0;
  for (std::size_t k = 0; k < fb.per_relay.size(); ++k) p *= fb.per_relay[k](regions[k]);
  return p;
}

double belief_reward(const FactoredBelief& fb, ActionMask a, const Instance& inst) {
  double v = 0.0;
  for (int e = 0; e < inst.element_count(); ++e) {
    if (!((a >> e) & 1)) continue;
    Element el = inst.element(e);
    const auto& r = inst.reward_table(e);
    if (el.relay == 0) {
      v += r[0];
      continue;
    }
    const auto& b = fb.per_relay[el.relay - 1];
    for (int s = 0; s < inst.S(); ++s) v += b(s) * r[s];
  }
  return v;
}

double belief_cost(const FactoredBelief& fb, ActionMask a, const Instance& inst, int ue) {
  double v = 0.0;
  for (int k = 0; k <= inst.K(); ++k) {
    int e = inst.element_id(k, ue);
    if (!((a >> e) & 1)) continue;
    const auto& c = inst.cost_table(e);
    if (k == 0) {
      v += c[0];
      continue;
    }
    const auto& b = fb.per_relay[k - 1];
    for (int s = 0; s < inst.S(); ++s) v += b(s) * c[s];
  }
  return v;
}

double observation_prob(const Observation& z, ActionMask a, const FactoredBelief& fb, const Instance& inst) {
  RelayMask u = inst.relay_mask(a);
  if (static_cast<int>(z.per_relay.size()) != inst.K()) throw ValidationError("observation length must equal K");
  double p = 1.0;
  for (int k = 1; k <= inst.K(); ++k) {
    bool sel = (u >> (k - 1)) & 1;
    int zk = z.per_relay[k - 1];
    if (sel != (zk >= 0)) throw ValidationError("observation inconsistent with action");
    if (sel) p *= fb.per_relay[k - 1](zk);
  }
  return p;
}

std::vector<Observation> enumerate_observations(ActionMask a, const Instance& inst) {
  RelayMask u = inst.relay_mask(a);
  std::vector<Observation> out;
  std::size_t n = inst.obs_count(u);
  out.reserve(n);
  for (std::size_t z = 0; z < n; ++z) out.push_back(Observation{inst.obs_decode(z, u)});
  return out;
}

namespace {

struct Row {
  Eigen::VectorXd v;
  int epoch;
};

void add_unique(std::vector<Row>& fam, const Eigen::VectorXd& v, int epoch) {
  for (auto& r : fam)
    if ((r.v - v).lpNorm<1>() <= 1e-9) {
      r.epoch = std::min(r.epoch, epoch);
      return;
    }
  fam.push_back(Row{v, epoch});
}

std::vector<Row> relay_family(int s0, int h, const MarkovChain& chain, std::size_t cap) {
  const int n = chain.size();
  const Eigen::MatrixXd& p = chain.matrix();
  std::vector<Row> fam;
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  e(s0) = 1.0;
  fam.push_back(Row{e, 0});
  // reach[t] = regions with positive t-step probability from s0
  std::vector<Eigen::MatrixXd> powers(h + 1);
  powers[0] = Eigen::MatrixXd::Identity(n, n);
  for (int i = 1; i <= h; ++i) powers[i] = powers[i - 1] * p;
  for (int t = 0; t < h; ++t) {
    for (int j = 0; j < n; ++j) {
      if (powers[t](s0, j) <= 0.0) continue;
      for (int m = 1; m <= h - std::max(t, 1); ++m) {
        add_unique(fam, powers[m].row(j).transpose(), t + m);
        if (fam.size() > cap) return fam;
      }
    }
  }
  std::stable_sort(fam.begin(), fam.end(), [](const Row& a, const Row& b) { return a.epoch < b.epoch; });
  return fam;
}

}  // namespace

BeliefSet build_h_belief_set(const std::vector<int>& s0, int h, const std::vector<MarkovChain>& chains,
                             std::size_t cap) {
  if (h < 1) throw ValidationError("h: must be >= 1");
  if (s0.size() != chains.size() || chains.empty()) throw ValidationError("s0: one region per relay required");
  BeliefSet out;
  out.h = h;
  out.s0 = s0;
  std::vector<std::vector<Row>> fams;
  for (std::size_t k = 0; k < chains.size(); ++k) {
    fams.push_back(relay_family(s0[k], h, chains[k], cap));
    out.family_size = std::max(out.family_size, fams.back().size());
    if (fams.back().size() > cap)
      throw CapError("belief set: per-relay family for h=" + std::to_string(h) + " exceeds cap " +
                     std::to_string(cap) + "; use a smaller h");
  }
  const int k = static_cast<int>(chains.size());
  int max_epoch = 0;
  for (const auto& f : fams) max_epoch = std::max(max_epoch, f.back().epoch);
  // level L: tuples whose largest epoch tag is exactly L
  for (int level = 0; level <= max_epoch && out.points.size() < cap; ++level) {
    std::vector<std::size_t> lim(k);
    for (int i = 0; i < k; ++i) {
      lim[i] = 0;
      while (lim[i] < fams[i].size() && fams[i][lim[i]].epoch <= level) ++lim[i];
      if (lim[i] == 0) goto next_level;
    }
    {
      std::vector<std::size_t> idx(k, 0);
      while (true) {
        int top = 0;
        for (int i = 0; i < k; ++i) top = std::max(top, fams[i][idx[i]].epoch);
        if (top == level) {
          if (out.points.size() >= cap) {
            out.truncated = true;
            break;
          }
          FactoredBelief fb;
          for (int i = 0; i < k; ++i) fb.per_relay.push_back(fams[i][idx[i]].v);
          out.points.push_back(std::move(fb));
          out.epoch.push_back(level);
        }
        int d = k - 1;
        while (d >= 0 && ++idx[d] == lim[d]) idx[d--] = 0;
        if (d < 0) break;
      }
    }
  next_level:;
  }
  return out;
}

double density_bound(const std::vector<MarkovChain>& chains, int h) {
  double s = 0.0;
  for (const auto& c : chains) s += std::pow(c.slem(), h) / c.pi_min();
  return 2.0 * s;
}

double empirical_density(const BeliefSet& set, int samples, std::uint64_t seed) {
  std::vector<Eigen::VectorXd> pts;
  pts.reserve(set.points.size());
  for (const auto& p : set.points) pts.push_back(joint_belief(p));
  const Eigen::Index n = pts.at(0).size();
  auto nearest = [&](const Eigen::VectorXd& b) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : pts) best = std::min(best, (p - b).lpNorm<1>());
    return best;
  };
  double worst = 0.0;
  for (Eigen::Index v = 0; v < n; ++v) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e(v) = 1.0;
    worst = std::max(worst, nearest(e));
  }
  Rng rng(seed);
  Eigen::VectorXd b(n);
  for (int i = 0; i < samples; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) b(j) = rng.exponential();
    b /= b.sum();
    worst = std::max(worst, nearest(b));
  }
  return worst;
}

int epsilon_h(double target_eps, const Instance& inst) {
  if (!(target_eps > 0)) throw ValidationError("eps: must be > 0");
  double lam = 0.0, pmin = 1.0;
  for (const auto& c : inst.chains()) {
    if (!c.primitive()) throw ValidationError("eps: chain has no unique stationary distribution (lambda* undefined)");
    lam = std::max(lam, c.slem());
    pmin = std::min(pmin, c.pi_min());
  }
  if (lam <= 0.0) return 1;
  const double g = inst.gamma();
  const double k = inst.K();
  auto f = [&](double range) {
    if (range <= 0.0) return 0.0;
    double denom = g < 1.0 ? 2.0 * k * range / ((1.0 - g) * (1.0 - g)) : 2.0 * k * inst.horizon() * range;
    return std::log(target_eps * pmin / denom);
  };
  double fm = std::min(f(inst.reward_range()), f(inst.cost_range()));
  double h = std::ceil(fm / std::log(lam) - 1e-12);
  if (!(h >= 1.0)) return 1;
  if (h > 1e6) throw CapError("eps: required h is unbounded");
  return static_cast<int>(h);
}

BeliefSet epsilon_belief_set(double target_eps, const Instance& inst, std::size_t cap) {
  BeliefSet out = build_h_belief_set(inst.s0(), epsilon_h(target_eps, inst), inst.chains(), cap);
  out.target_eps = target_eps;
  return out;
}

std::vector<std::string> belief_monotonicity_diagnostic(int n_chains, int states, int max_n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::string> out;
  for (int c = 0; c < n_chains; ++c) {
    Eigen::MatrixXd p(states, states);
    for (int i = 0; i < states; ++i) {
      for (int j = 0; j < states; ++j) p(i, j) = rng.exponential();
      p.row(i) /= p.row(i).sum();
    }
    Eigen::VectorXd b(states);
    for (int j = 0; j < states; ++j) b(j) = rng.exponential();
    b /= b.sum();
    Eigen::MatrixXd pt = p.transpose();
    Eigen::VectorXd b1 = pt * b;
    for (int s = 0; s < states; ++s) {
      const bool up = b1(s) >= b(s);
      Eigen::VectorXd prev = b1, cur;
      for (int n = 2; n <= max_n; ++n) {
        cur = pt * prev;
        bool ok = up ? cur(s) >= prev(s) - 1e-15 : cur(s) <= prev(s) + 1e-15;
        if (!ok) {
          std::ostringstream os;
          os.precision(17);
          os << "chain " << c << " state " << s << " n " << n << ": (P b)(s)" << (up ? ">=" : "<=")
             << "b(s) but P^n " << cur(s) << " vs P^(n-1) " << prev(s) << "; P=[" << p.format(Eigen::IOFormat(Eigen::FullPrecision, Eigen::DontAlignCols, ",", ";")) << "]";
          out.push_back(os.str());
          break;
        }
        prev = cur;
      }
    }
  }
  return out;
}

}  // namespace rsel
