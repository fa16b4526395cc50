#pragma once

#include <Eigen/Dense>

#include "relaysel/error.hpp"

namespace rsel {

// Row-stochastic location chain. Stationary distribution and SLEM are computed
// at construction when the chain is primitive (irreducible and aperiodic).
class MarkovChain {
 public:
  MarkovChain() = default;
  explicit MarkovChain(Eigen::MatrixXd p);

  int size() const { return static_cast<int>(p_.rows()); }
  const Eigen::MatrixXd& matrix() const { return p_; }
  double operator()(int from, int to) const { return p_(from, to); }

  bool primitive() const { return primitive_; }
  const Eigen::VectorXd& stationary() const;
  double slem() const;
  double pi_min() const;

 private:
  Eigen::MatrixXd p_;
  bool primitive_ = false;
  Eigen::VectorXd pi_;
  double slem_ = 0.0;
};

MarkovChain build_axis_chain(int n_states, double eps_fix);
// state index (x-1) + sx*(y-1)
MarkovChain build_grid_chain(int sx, int sy, double eps_fix);
MarkovChain apply_speed(const MarkovChain& chain, int v);

Eigen::VectorXd stationary_distribution(const MarkovChain& chain);
double slem(const MarkovChain& chain);
double distance_function(const MarkovChain& chain, int t);

// true when some power of the chain is entrywise positive
bool is_primitive(const Eigen::MatrixXd& p);

}  // namespace rsel
