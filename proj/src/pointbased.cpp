#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <numeric>

#include "relaysel/knapsack.hpp"
#include "relaysel/solvers.hpp"

namespace rsel {

namespace {

double total(const std::vector<double>& c) { return std::accumulate(c.begin(), c.end(), 0.0); }

struct Choice {
  ActionMask action = 0;
  PairValue value;
  std::vector<int> next;
};

// State shared by all belief points of one backup.
struct Backup {
  const Instance& inst;
  const SolveOptions& opt;
  SolveStats& stats;
  int epoch;
  std::vector<AlphaPair> moved;  // T applied to the next epoch's pairs
  int default_next = 0;          // successor for observations outside the belief's support

  Backup(const ValueFunctionSet* next, const Instance& i, int e, const SolveOptions& o, SolveStats& s)
      : inst(i), opt(o), stats(s), epoch(e) {
    if (!next) return;
    moved = transition_all(next->pairs, inst);
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < static_cast<int>(next->pairs.size()); ++k) {
      double c = 0.0;
      for (const auto& v : next->pairs[k].c) c += v.sum();
      if (c < best) {
        best = c;
        default_next = k;
      }
    }
  }
};

// Knapsack frontiers per observed relay set at one belief point.
class PointSolver {
 public:
  PointSolver(Backup& bk, const FactoredBelief& b) : bk_(bk), b_(b), sup_(support(b, bk.inst)) {}

  // constrained-best continuation for action a; nullopt when nothing fits the budget
  std::optional<Choice> best(ActionMask a) {
    const Instance& inst = bk_.inst;
    ++bk_.stats.action_evaluations;
    RelayMask u = inst.relay_mask(a);
    Entry& e = entry(u);
    Choice ch;
    ch.action = a;
    ch.value.r = belief_reward(b_, a, inst);
    for (int n = 0; n < inst.N(); ++n) ch.value.c.push_back(belief_cost(b_, a, inst, n));
    int i = e.frontier->best(ch.value.c, inst.c_th());
    if (i < 0) return std::nullopt;
    ch.value.r += e.frontier->r(i);
    for (int n = 0; n < inst.N(); ++n) ch.value.c[n] += e.frontier->c(i, n);
    fill_next(ch, e, e.frontier->choice(i), u);
    return ch;
  }

  // zero-cost fallback: empty action with the cheapest continuation
  Choice fallback() {
    const Instance& inst = bk_.inst;
    ++bk_.stats.fallbacks;
    Choice ch;
    ch.value.c.assign(inst.N(), 0.0);
    Entry& e = entry(0);
    std::vector<int> pick;
    const int d = inst.N();
    for (const auto& items : e.branches) {
      int bi = 0;
      double bc = 0.0;
      for (int j = 0; j < static_cast<int>(items.size()); ++j) {
        double c = std::accumulate(items.c.begin() + j * d, items.c.begin() + (j + 1) * d, 0.0);
        if (j == 0 || c < bc) {
          bi = j;
          bc = c;
        }
      }
      pick.push_back(items.id[bi]);
      ch.value.r += items.r[bi];
      for (int n = 0; n < d; ++n) ch.value.c[n] += items.c[bi * d + n];
    }
    fill_next(ch, e, pick, 0);
    return ch;
  }

 private:
  struct Entry {
    std::vector<std::size_t> obs;
    std::vector<ItemSet> branches;
    std::unique_ptr<Frontier> frontier;
  };

  void fill_next(Choice& ch, const Entry& e, const std::vector<int>& pick, RelayMask u) {
    if (bk_.moved.empty()) return;
    ch.next.assign(bk_.inst.obs_count(u), bk_.default_next);
    for (std::size_t j = 0; j < e.obs.size(); ++j) ch.next[e.obs[j]] = pick[j];
  }

  Entry& entry(RelayMask u) {
    auto it = cache_.find(u);
    if (it != cache_.end()) return it->second;
    const Instance& inst = bk_.inst;
    const int nue = inst.N();
    Entry e;
    if (!bk_.moved.empty()) {
      std::map<std::size_t, std::vector<int>> groups;
      for (int i = 0; i < static_cast<int>(sup_.states.size()); ++i)
        groups[inst.obs_index(sup_.states[i], u)].push_back(i);
      const double g = inst.gamma();
      for (const auto& [z, members] : groups) {
        e.obs.push_back(z);
        ItemSet items(nue);
        std::vector<double> c(nue);
        for (int k = 0; k < static_cast<int>(bk_.moved.size()); ++k) {
          const AlphaPair& q = bk_.moved[k];
          double r = 0.0;
          std::fill(c.begin(), c.end(), 0.0);
          for (int m : members) {
            const double p = g * sup_.prob[m];
            const std::size_t s = sup_.states[m];
            r += p * q.r(s);
            for (int n = 0; n < nue; ++n) c[n] += p * q.c[n](s);
          }
          items.add(r, c.data(), k);
        }
        bk_.stats.item_evaluations += bk_.moved.size() * members.size();
        e.branches.push_back(std::move(items));
      }
    }
    // any action observing u pays at least the single-UE relay costs
    std::vector<double> budget(nue, inst.c_th());
    if (nue == 1)
      for (int k = 1; k <= inst.K(); ++k)
        if ((u >> (k - 1)) & 1) budget[0] -= belief_cost(b_, ActionMask{1} << inst.element_id(k, 0), inst, 0);
    e.frontier = std::make_unique<Frontier>(e.branches, budget, bk_.opt.frontier_cap, bk_.opt.frontier_work);
    ++bk_.stats.frontier_builds;
    if (!e.frontier->exact()) ++bk_.stats.approx_frontiers;
    return cache_.emplace(u, std::move(e)).first->second;
  }

  Backup& bk_;
  const FactoredBelief& b_;
  Support sup_;
  std::map<RelayMask, Entry> cache_;
};

// adds the chosen pair unless an identical (action, successors) pair exists
int intern(ValueFunctionSet& out, std::map<std::pair<ActionMask, std::vector<int>>, int>& index, const Choice& ch,
           const Backup& bk) {
  auto key = std::make_pair(ch.action, ch.next);
  auto it = index.find(key);
  if (it != index.end()) return it->second;
  out.pairs.push_back(materialize(ch.action, ch.next, bk.moved, bk.inst, bk.epoch));
  ++bk.stats.pairs_generated;
  int id = static_cast<int>(out.pairs.size()) - 1;
  index.emplace(std::move(key), id);
  return id;
}

std::vector<ActionMask> all_actions(const Instance& inst) {
  ActionMask av = inst.available();
  if (popcount(av) > 20) throw CapError("cpbvi: more than 2^20 actions; use gcpbvi");
  std::vector<ActionMask> out;
  for (ActionMask s = av;; s = (s - 1) & av) {
    out.push_back(s);
    if (s == 0) break;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace

ValueFunctionSet cpbvi_backup(const ValueFunctionSet* next, const BeliefSet& set, const Instance& inst, int epoch,
                              const SolveOptions& opt, SolveStats& stats) {
  if (set.points.empty()) throw ValidationError("belief set is empty");
  Backup bk(next, inst, epoch, opt, stats);
  ++stats.backups;
  ValueFunctionSet out;
  out.epoch = epoch;
  std::map<std::pair<ActionMask, std::vector<int>>, int> index;
  const auto actions = all_actions(inst);
  for (const auto& b : set.points) {
    PointSolver ps(bk, b);
    std::optional<Choice> best;
    for (ActionMask a : actions) {
      auto ch = ps.best(a);
      if (ch && (!best || better(ch->value, a, best->value, best->action, inst))) best = std::move(ch);
    }
    out.anchor_pair.push_back(intern(out, index, best ? *best : ps.fallback(), bk));
  }
  return out;
}

ValueFunctionSet gcpbvi_backup(const ValueFunctionSet* next, const BeliefSet& set, const Instance& inst, int epoch,
                               const SolveOptions& opt, SolveStats& stats) {
  if (set.points.empty()) throw ValidationError("belief set is empty");
  Backup bk(next, inst, epoch, opt, stats);
  ++stats.backups;
  ValueFunctionSet out;
  out.epoch = epoch;
  std::map<std::pair<ActionMask, std::vector<int>>, int> index;
  const double c_th = inst.c_th();
  const double tol = 1e-9 * std::max(1.0, c_th);
  for (const auto& b : set.points) {
    PointSolver ps(bk, b);
    auto start = ps.best(0);
    if (!start) {
      out.anchor_pair.push_back(intern(out, index, ps.fallback(), bk));
      continue;
    }
    Choice cur = *start;
    ActionMask pool = inst.available();
    while (pool) {
      int pick = -1;
      bool pick_inf = false;
      double pick_score = 0.0;
      std::optional<Choice> pick_choice;
      for (ActionMask rest = pool; rest; rest &= rest - 1) {
        int k = __builtin_ctzll(rest);
        auto cand = ps.best(cur.action | (ActionMask{1} << k));
        double dr = cand ? cand->value.r - cur.value.r : 0.0;
        if (!cand || dr <= 1e-12 * std::max(1.0, std::abs(cur.value.r))) {
          pool &= ~(ActionMask{1} << k);
          continue;
        }
        double dc = total(cand->value.c) - total(cur.value.c);
        bool inf = dc <= 0.0;
        double score = inf ? dr : dr / dc;
        if (pick < 0 || (inf && !pick_inf) || (inf == pick_inf && score > pick_score)) {
          pick = k;
          pick_inf = inf;
          pick_score = score;
          pick_choice = std::move(cand);
        }
      }
      if (pick < 0) break;
      pool &= ~(ActionMask{1} << pick);
      bool admit = true;
      for (int n = 0; n < inst.N(); ++n) {
        double cn = pick_choice->value.c[n];
        bool neutral = cn <= cur.value.c[n];
        bool fits = opt.greedy_inclusive ? cn <= c_th + tol : cn < c_th;
        if (!neutral && !fits) admit = false;
      }
      if (admit) cur = std::move(*pick_choice);
    }
    if (opt.singleton_augmented)
      for (ActionMask rest = inst.available(); rest; rest &= rest - 1) {
        auto cand = ps.best(ActionMask{1} << __builtin_ctzll(rest));
        if (cand && better(cand->value, cand->action, cur.value, cur.action, inst)) cur = std::move(*cand);
      }
    out.anchor_pair.push_back(intern(out, index, cur, bk));
  }
  return out;
}

GreedyResult greedy_constrained_argmax(const std::vector<std::vector<AlphaPair>>& per_relay, const FactoredBelief& b,
                                       const Instance& inst, double c_th, bool inclusive) {
  for (const auto& g : per_relay)
    if (g.empty()) throw ValidationError("greedy: every relay needs at least one candidate pair");
  GreedyResult res;
  res.pair = zero_pair(inst);
  std::vector<std::vector<PairValue>> vals(per_relay.size());
  for (std::size_t k = 0; k < per_relay.size(); ++k)
    for (const auto& p : per_relay[k]) vals[k].push_back(evaluate(p, b, inst));
  std::vector<bool> left(per_relay.size(), true);
  while (true) {
    int bk = -1, bi = -1;
    bool binf = false;
    double bscore = 0.0, br = 0.0;
    for (std::size_t k = 0; k < per_relay.size(); ++k) {
      if (!left[k]) continue;
      for (std::size_t i = 0; i < vals[k].size(); ++i) {
        double r = vals[k][i].r, c = total(vals[k][i].c);
        if (r <= 0.0) continue;
        bool inf = c <= 0.0;
        double score = inf ? r : r / c;
        bool take = bk < 0 || (inf && !binf) ||
                    (inf == binf && (score > bscore || (score == bscore && r > br)));
        if (take) {
          bk = static_cast<int>(k);
          bi = static_cast<int>(i);
          binf = inf;
          bscore = score;
          br = r;
        }
      }
    }
    if (bk < 0) break;
    left[bk] = false;
    double c = total(vals[bk][bi].c);
    bool fits = inclusive ? res.value_c + c <= c_th : res.value_c + c < c_th;
    if (!fits) continue;
    const AlphaPair& p = per_relay[bk][bi];
    res.pair.r += p.r;
    for (std::size_t n = 0; n < res.pair.c.size(); ++n) res.pair.c[n] += p.c[n];
    res.pair.action |= p.action;
    res.value_r += vals[bk][bi].r;
    res.value_c += c;
    res.selected.push_back(bk);
  }
  std::sort(res.selected.begin(), res.selected.end());
  return res;
}

}  // namespace rsel
