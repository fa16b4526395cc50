#include "relaysel/knapsack.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rsel {

namespace {

// indices of the Pareto-optimal entries among (r[i], c[i*dims..]) in a stable order;
// for one dimension the result is sorted by increasing cost and reward
std::vector<int> pareto_index(const std::vector<double>& r, const std::vector<double>& c, int dims) {
  const int n = static_cast<int>(r.size());
  std::vector<int> ord(n);
  std::iota(ord.begin(), ord.end(), 0);
  std::vector<int> out;
  if (dims == 1) {
    std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) {
      if (c[a] != c[b]) return c[a] < c[b];
      return r[a] > r[b];
    });
    for (int i : ord)
      if (out.empty() || r[i] > r[out.back()] + 1e-12 * std::max(1.0, std::abs(r[i]))) out.push_back(i);
    return out;
  }
  std::vector<double> tot(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int d = 0; d < dims; ++d) tot[i] += c[i * dims + d];
  std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) {
    if (r[a] != r[b]) return r[a] > r[b];
    return tot[a] < tot[b];
  });
  for (int i : ord) {
    bool dom = false;
    for (int q : out) {
      bool all = true;
      for (int d = 0; d < dims && all; ++d) all = c[q * dims + d] <= c[i * dims + d];
      if (all) {
        dom = true;
        break;
      }
    }
    if (!dom) out.push_back(i);
  }
  return out;
}

double total(const double* c, int dims) {
  double t = 0.0;
  for (int d = 0; d < dims; ++d) t += c[d];
  return t;
}

}  // namespace

ItemSet prune_items(const ItemSet& items) {
  ItemSet out(items.dims);
  for (int i : pareto_index(items.r, items.c, items.dims)) out.add(items.r[i], &items.c[i * items.dims], items.id[i]);
  return out;
}

Frontier::Frontier(const std::vector<ItemSet>& branches, const std::vector<double>& budget, std::size_t cap,
                   std::size_t work_limit)
    : dims_(static_cast<int>(budget.size())) {
  if (!merge(branches, budget, cap, work_limit)) {
    exact_ = false;
    stages_.clear();
    ids_.clear();
    build_hull(branches);
  }
}

bool Frontier::merge(const std::vector<ItemSet>& branches, const std::vector<double>& budget, std::size_t cap,
                     std::size_t work_limit) {
  Stage cur;
  cur.r.push_back(0.0);
  cur.c.assign(dims_, 0.0);
  cur.parent.push_back(-1);
  cur.item.push_back(-1);
  stages_.push_back(cur);
  ids_.push_back({});
  std::vector<double> lim(dims_);
  for (int d = 0; d < dims_; ++d) lim[d] = budget[d] + 1e-9 * std::max(1.0, std::abs(budget[d]));
  std::size_t work = 0;
  bool dead = false;
  std::vector<double> tmp(dims_);
  for (const auto& raw : branches) {
    ItemSet items = prune_items(raw);
    const int m = static_cast<int>(items.size());
    const int f = static_cast<int>(cur.r.size());
    work += static_cast<std::size_t>(f) * m;
    if (work > work_limit) return false;
    Stage cand;
    cand.r.reserve(static_cast<std::size_t>(f) * m);
    cand.c.reserve(static_cast<std::size_t>(f) * m * dims_);
    for (int i = 0; i < f; ++i)
      for (int j = 0; j < m; ++j) {
        bool ok = true;
        for (int d = 0; d < dims_; ++d) {
          tmp[d] = cur.c[i * dims_ + d] + items.c[j * dims_ + d];
          if (tmp[d] > lim[d]) ok = false;
        }
        if (!ok) continue;
        cand.r.push_back(cur.r[i] + items.r[j]);
        cand.c.insert(cand.c.end(), tmp.begin(), tmp.end());
        cand.parent.push_back(i);
        cand.item.push_back(j);
      }
    std::vector<int> keep;
    if (m == 1) {
      // a shifted frontier stays Pareto
      keep.resize(cand.r.size());
      std::iota(keep.begin(), keep.end(), 0);
    } else {
      keep = pareto_index(cand.r, cand.c, dims_);
    }
    if (keep.size() > cap) return false;
    Stage next;
    next.r.reserve(keep.size());
    next.c.reserve(keep.size() * dims_);
    for (int i : keep) {
      next.r.push_back(cand.r[i]);
      next.c.insert(next.c.end(), cand.c.begin() + static_cast<std::ptrdiff_t>(i) * dims_,
                    cand.c.begin() + static_cast<std::ptrdiff_t>(i + 1) * dims_);
      next.parent.push_back(cand.parent[i]);
      next.item.push_back(cand.item[i]);
    }
    cur = next;
    stages_.push_back(std::move(next));
    ids_.push_back(items.id);
    if (cur.r.empty()) {
      dead = true;
      break;
    }
  }
  if (dead) {
    // a branch without feasible continuation leaves no solution
    Stage& last = stages_.back();
    last = Stage{};
  }
  point_handle_.assign(stages_.back().r.size(), -1);
  return true;
}

int Frontier::point(int i) {
  if (point_handle_[i] >= 0) return point_handle_[i];
  Sol s;
  const Stage& st = stages_.back();
  s.r = st.r[i];
  s.c.assign(st.c.begin() + static_cast<std::ptrdiff_t>(i) * dims_,
             st.c.begin() + static_cast<std::ptrdiff_t>(i + 1) * dims_);
  s.choice.assign(stages_.size() - 1, 0);
  int k = i;
  for (int g = static_cast<int>(stages_.size()) - 1; g >= 1; --g) {
    s.choice[g - 1] = ids_[g][stages_[g].item[k]];
    k = stages_[g].parent[k];
  }
  sols_.push_back(std::move(s));
  point_handle_[i] = static_cast<int>(sols_.size()) - 1;
  return point_handle_[i];
}

int Frontier::best(const std::vector<double>& offset_c, double c_th) {
  const double tol = 1e-9 * std::max(1.0, std::abs(c_th));
  if (!exact_) {
    std::vector<double> limit(dims_);
    for (int d = 0; d < dims_; ++d) limit[d] = c_th - offset_c[d] + tol;
    return greedy(limit);
  }
  const Stage& st = stages_.back();
  int best = -1;
  double br = 0.0, bc = 0.0;
  for (int i = 0; i < static_cast<int>(st.r.size()); ++i) {
    bool ok = true;
    for (int d = 0; d < dims_; ++d)
      if (st.c[i * dims_ + d] + offset_c[d] > c_th + tol) ok = false;
    if (!ok) continue;
    double c = total(&st.c[i * dims_], dims_);
    const double rt = 1e-12 * std::max(1.0, std::abs(br));
    if (best < 0 || st.r[i] > br + rt || (st.r[i] >= br - rt && c < bc)) {
      best = i;
      br = st.r[i];
      bc = c;
    }
  }
  return best < 0 ? -1 : point(best);
}

int Frontier::cheapest() {
  if (!exact_) return greedy(std::vector<double>(dims_, -1.0));
  const Stage& st = stages_.back();
  int best = -1;
  double bc = 0.0;
  for (int i = 0; i < static_cast<int>(st.r.size()); ++i) {
    double c = total(&st.c[i * dims_], dims_);
    if (best < 0 || c < bc) {
      best = i;
      bc = c;
    }
  }
  return best < 0 ? -1 : point(best);
}

void Frontier::build_hull(const std::vector<ItemSet>& branches) {
  for (int b = 0; b < static_cast<int>(branches.size()); ++b) {
    // Pareto on (reward, total cost), then the upper concave hull in the (cost, reward) plane
    const ItemSet& raw = branches[b];
    ItemSet tot(1);
    for (std::size_t i = 0; i < raw.size(); ++i) {
      double t = total(&raw.c[i * dims_], dims_);
      tot.add(raw.r[i], &t, static_cast<int>(i));
    }
    std::vector<int> ord = pareto_index(tot.r, tot.c, 1);
    std::vector<int> h;
    for (int i : ord) {
      while (h.size() >= 2) {
        int a = h[h.size() - 2], m = h.back();
        double cross = (tot.c[m] - tot.c[a]) * (tot.r[i] - tot.r[a]) - (tot.r[m] - tot.r[a]) * (tot.c[i] - tot.c[a]);
        if (cross >= 0) h.pop_back();
        else break;
      }
      h.push_back(i);
    }
    ItemSet hb(dims_);
    for (int i : h) hb.add(raw.r[i], &raw.c[i * dims_], raw.id[i]);
    for (int k = 0; k + 1 < static_cast<int>(h.size()); ++k) {
      double dc = tot.c[h[k + 1]] - tot.c[h[k]];
      double dr = tot.r[h[k + 1]] - tot.r[h[k]];
      incs_.push_back(Inc{dc > 0 ? dr / dc : 1e300, dr, b, k, k + 1});
    }
    hull_.push_back(std::move(hb));
  }
  std::stable_sort(incs_.begin(), incs_.end(), [](const Inc& a, const Inc& b) { return a.eff > b.eff; });
}

int Frontier::greedy(const std::vector<double>& limit) {
  // limit < 0 everywhere: cheapest solution, no upgrades
  const bool upgrade = limit.empty() || limit[0] >= 0.0;
  const int nb = static_cast<int>(hull_.size());
  std::vector<int> at(nb, 0);
  std::vector<char> blocked(nb, 0);
  Sol s;
  s.c.assign(dims_, 0.0);
  for (int b = 0; b < nb; ++b) {
    s.r += hull_[b].r[0];
    for (int d = 0; d < dims_; ++d) s.c[d] += hull_[b].c[d];
  }
  if (upgrade) {
    for (int d = 0; d < dims_; ++d)
      if (s.c[d] > limit[d]) return -1;
    for (const Inc& inc : incs_) {
      if (blocked[inc.branch] || at[inc.branch] != inc.from) continue;
      const ItemSet& hb = hull_[inc.branch];
      bool ok = true;
      for (int d = 0; d < dims_ && ok; ++d)
        ok = s.c[d] - hb.c[inc.from * dims_ + d] + hb.c[inc.to * dims_ + d] <= limit[d];
      if (!ok) {
        blocked[inc.branch] = 1;
        continue;
      }
      s.r += inc.dr;
      for (int d = 0; d < dims_; ++d) s.c[d] += hb.c[inc.to * dims_ + d] - hb.c[inc.from * dims_ + d];
      at[inc.branch] = inc.to;
    }
  }
  for (int b = 0; b < nb; ++b) s.choice.push_back(hull_[b].id[at[b]]);
  sols_.push_back(std::move(s));
  return static_cast<int>(sols_.size()) - 1;
}

}  // namespace rsel
