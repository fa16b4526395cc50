#include "relaysel/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

namespace rsel {

namespace {

constexpr double kRowTol = 1e-9;

Eigen::VectorXd solve_stationary(const Eigen::MatrixXd& p) {
  const int n = static_cast<int>(p.rows());
  Eigen::MatrixXd a = p.transpose() - Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;
  Eigen::VectorXd pi = a.fullPivLu().solve(rhs);
  for (int i = 0; i < n; ++i) pi(i) = std::max(pi(i), 0.0);
  pi /= pi.sum();
  // power iteration polishes the direct solve down to the residual target
  for (int it = 0; it < 1000000; ++it) {
    Eigen::VectorXd next = p.transpose() * pi;
    double res = (next - pi).lpNorm<1>();
    pi = next / next.sum();
    if (res < 1e-12) break;
  }
  return pi;
}

}  // namespace

bool is_primitive(const Eigen::MatrixXd& p) {
  const int n = static_cast<int>(p.rows());
  if (n == 1) return true;
  Eigen::MatrixXd a = (p.array() > 0.0).cast<double>().matrix();
  const long target = static_cast<long>(n - 1) * (n - 1) + 1;
  long power = 1;
  while (power < target) {
    a = ((a * a).array() > 0.0).cast<double>().matrix();
    power *= 2;
  }
  return (a.array() > 0.0).all();
}

MarkovChain::MarkovChain(Eigen::MatrixXd p) : p_(std::move(p)) {
  if (p_.rows() < 1 || p_.rows() != p_.cols())
    throw ValidationError("chain: transition matrix must be square and non-empty");
  for (int i = 0; i < p_.rows(); ++i) {
    for (int j = 0; j < p_.cols(); ++j) {
      double v = p_(i, j);
      if (!std::isfinite(v) || v < -kRowTol || v > 1.0 + kRowTol)
        throw ValidationError("chain: entry (" + std::to_string(i) + "," + std::to_string(j) +
                              ") outside [0,1]");
    }
    if (std::abs(p_.row(i).sum() - 1.0) > kRowTol)
      throw ValidationError("chain: row " + std::to_string(i) + " does not sum to 1");
  }
  primitive_ = is_primitive(p_);
  if (!primitive_) return;
  pi_ = solve_stationary(p_);
  const int n = size();
  if (n == 1) {
    slem_ = 0.0;
    return;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(p_, false);
  std::vector<double> mods;
  for (int i = 0; i < n; ++i) mods.push_back(std::abs(es.eigenvalues()(i)));
  std::sort(mods.begin(), mods.end(), std::greater<double>());
  slem_ = mods[1] < 1e-12 ? 0.0 : std::min(mods[1], 1.0);
}

const Eigen::VectorXd& MarkovChain::stationary() const {
  if (!primitive_) throw ValidationError("chain is reducible or periodic: no unique stationary distribution");
  return pi_;
}

double MarkovChain::slem() const {
  if (!primitive_) throw ValidationError("chain is reducible or periodic: SLEM undefined");
  return slem_;
}

double MarkovChain::pi_min() const { return stationary().minCoeff(); }

MarkovChain build_axis_chain(int n_states, double eps_fix) {
  if (n_states < 1) throw ValidationError("axis chain: n_states must be >= 1");
  if (eps_fix < 0.0 || eps_fix > 1.0) throw ValidationError("axis chain: eps_fix must lie in [0,1]");
  const double stay = std::sqrt(eps_fix);
  const double move = 0.5 * (1.0 - stay);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n_states, n_states);
  for (int i = 0; i < n_states; ++i) {
    p(i, i) += stay;
    if (i > 0) p(i, i - 1) += move; else p(i, i) += move;
    if (i + 1 < n_states) p(i, i + 1) += move; else p(i, i) += move;
  }
  return MarkovChain(p);
}

MarkovChain build_grid_chain(int sx, int sy, double eps_fix) {
  if (sx < 1 || sy < 1) throw ValidationError("grid chain: dimensions must be >= 1");
  const Eigen::MatrixXd px = build_axis_chain(sx, eps_fix).matrix();
  const Eigen::MatrixXd py = build_axis_chain(sy, eps_fix).matrix();
  const int n = sx * sy;
  Eigen::MatrixXd p(n, n);
  for (int y = 0; y < sy; ++y)
    for (int x = 0; x < sx; ++x)
      for (int y2 = 0; y2 < sy; ++y2)
        for (int x2 = 0; x2 < sx; ++x2) p(x + sx * y, x2 + sx * y2) = px(x, x2) * py(y, y2);
  return MarkovChain(p);
}

MarkovChain apply_speed(const MarkovChain& chain, int v) {
  if (v < 1) throw ValidationError("speed: must be >= 1");
  Eigen::MatrixXd p = chain.matrix();
  Eigen::MatrixXd acc = p;
  for (int i = 1; i < v; ++i) acc = acc * p;
  // renormalise rows against drift from repeated products
  for (int i = 0; i < acc.rows(); ++i) acc.row(i) /= acc.row(i).sum();
  return MarkovChain(acc);
}

Eigen::VectorXd stationary_distribution(const MarkovChain& chain) { return chain.stationary(); }

double slem(const MarkovChain& chain) { return chain.slem(); }

double distance_function(const MarkovChain& chain, int t) {
  if (t < 0) throw ValidationError("distance function: t must be >= 0");
  const Eigen::VectorXd& pi = chain.stationary();
  const int n = chain.size();
  Eigen::MatrixXd pt = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < t; ++i) pt = pt * chain.matrix();
  double d = 0.0;
  for (int s = 0; s < n; ++s) d = std::max(d, (pt.row(s).transpose() - pi).lpNorm<1>());
  return d;
}

}  // namespace rsel
