#pragma once

#include <cstddef>
#include <vector>

namespace rsel {

// Options of one branch, stored flat: reward r[i], costs c[i*dims + n], caller id.
struct ItemSet {
  int dims = 1;
  std::vector<double> r;
  std::vector<double> c;
  std::vector<int> id;

  explicit ItemSet(int d = 1) : dims(d) {}
  std::size_t size() const { return r.size(); }
  void add(double rv, const double* cv, int ident) {
    r.push_back(rv);
    c.insert(c.end(), cv, cv + dims);
    id.push_back(ident);
  }
};

// Pareto-minimal items (max reward, min every cost); ties keep the earlier item
ItemSet prune_items(const ItemSet& items);

// Multiple-choice knapsack over branches: one item per branch, reward
// maximized, every cost dimension bounded. Solved exactly by merging Pareto
// frontiers (partial sums over budget are dropped; costs are non-negative).
// When the merge would exceed `work_limit` candidate points, or a frontier
// grows past `cap`, the solver switches to the LP greedy on each branch's
// upper convex hull (incremental efficiencies, integral rounding), which is
// feasible but approximate; `exact()` reports which path was taken.
class Frontier {
 public:
  Frontier(const std::vector<ItemSet>& branches, const std::vector<double>& budget, std::size_t cap,
           std::size_t work_limit = static_cast<std::size_t>(-1));

  bool exact() const { return exact_; }
  // solution maximizing reward under c + offset_c <= c_th, ties to lower total cost; -1 if none
  int best(const std::vector<double>& offset_c, double c_th);
  // solution of least total cost, ignoring the budget
  int cheapest();

  double r(int h) const { return sols_[h].r; }
  double c(int h, int n) const { return sols_[h].c[n]; }
  const std::vector<int>& choice(int h) const { return sols_[h].choice; }

  // exact path only: every Pareto point of the final stage
  std::size_t size() const { return exact_ ? stages_.back().r.size() : 0; }
  int point(int i);  // handle for Pareto point i

 private:
  struct Stage {
    std::vector<double> r, c;
    std::vector<int> parent, item;
  };
  struct Sol {
    double r = 0.0;
    std::vector<double> c;
    std::vector<int> choice;
  };
  bool merge(const std::vector<ItemSet>& branches, const std::vector<double>& budget, std::size_t cap,
             std::size_t work_limit);
  void build_hull(const std::vector<ItemSet>& branches);
  int greedy(const std::vector<double>& limit);

  int dims_;
  bool exact_ = true;
  std::vector<Stage> stages_;
  std::vector<std::vector<int>> ids_;
  std::vector<Sol> sols_;
  std::vector<int> point_handle_;

  // hull path
  struct Inc {
    double eff, dr;
    int branch, from, to;
  };
  std::vector<ItemSet> hull_;
  std::vector<Inc> incs_;
};

}  // namespace rsel
