#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "relaysel/mobility.hpp"

using namespace rsel;
using doctest::Approx;

namespace {
Eigen::MatrixXd two() {
  Eigen::MatrixXd p(2, 2);
  p << 0.9, 0.1, 0.2, 0.8;
  return p;
}
}  // namespace

TEST_CASE("axis chain") {
  MarkovChain c = build_axis_chain(3, 0.7);
  const double st = std::sqrt(0.7), mv = 0.5 * (1 - std::sqrt(0.7));
  CHECK(c(1, 0) == Approx(mv));
  CHECK(c(1, 1) == Approx(st));
  CHECK(c(1, 2) == Approx(mv));
  CHECK(c(1, 1) == Approx(0.836660).epsilon(1e-6));
  CHECK(c(0, 0) == Approx(0.918330).epsilon(1e-6));
  CHECK(c(0, 1) == Approx(0.081670).epsilon(1e-5));
  CHECK(c(0, 2) == 0.0);
  MarkovChain id = build_axis_chain(4, 1.0);
  CHECK(id.matrix().isApprox(Eigen::MatrixXd::Identity(4, 4)));
  MarkovChain one = build_axis_chain(1, 0.7);
  CHECK(one.size() == 1);
  CHECK(one(0, 0) == 1.0);
}

TEST_CASE("grid chain") {
  MarkovChain g = build_grid_chain(3, 3, 0.7);
  CHECK(g(4, 4) == Approx(0.7).epsilon(1e-12));
  MarkovChain g2 = build_grid_chain(2, 2, 0.7);
  for (int s = 0; s < 4; ++s) CHECK(g2(s, s) == Approx(0.843330).epsilon(1e-5));
  MarkovChain id = build_grid_chain(3, 2, 1.0);
  CHECK(id.matrix().isApprox(Eigen::MatrixXd::Identity(6, 6)));
  // interior stay-put equals eps_fix exactly on the Table-I grid
  MarkovChain g4 = build_grid_chain(4, 4, 0.7);
  for (int x = 2; x <= 3; ++x)
    for (int y = 2; y <= 3; ++y) {
      int s = (x - 1) + 4 * (y - 1);
      CHECK(g4(s, s) == Approx(0.7).epsilon(1e-12));
    }
  // product structure
  MarkovChain ax = build_axis_chain(4, 0.7);
  CHECK(g4(0, 5) == Approx(ax(0, 1) * ax(0, 1)));
}

TEST_CASE("speed") {
  MarkovChain c(two());
  CHECK(apply_speed(c, 1).matrix().isApprox(c.matrix()));
  Eigen::MatrixXd want(2, 2);
  want << 0.83, 0.17, 0.34, 0.66;
  CHECK(apply_speed(c, 2).matrix().isApprox(want, 1e-12));
  MarkovChain id(Eigen::MatrixXd::Identity(3, 3));
  CHECK(apply_speed(id, 2).matrix().isApprox(Eigen::MatrixXd::Identity(3, 3)));
  CHECK_THROWS_AS(apply_speed(c, 0), ValidationError);
  MarkovChain g = build_grid_chain(4, 4, 0.7);
  for (int v = 1; v <= 6; ++v) {
    Eigen::VectorXd rs = apply_speed(g, v).matrix().rowwise().sum();
    CHECK((rs.array() - 1.0).abs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("stationary distribution and slem") {
  MarkovChain c(two());
  Eigen::VectorXd pi = stationary_distribution(c);
  CHECK(pi(0) == Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(pi(1) == Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(slem(c) == Approx(0.7).epsilon(1e-9));
  Eigen::MatrixXd half = Eigen::MatrixXd::Constant(2, 2, 0.5);
  CHECK(slem(MarkovChain(half)) == Approx(0.0));
  Eigen::MatrixXd sym(3, 3);
  sym << 0.5, 0.25, 0.25, 0.25, 0.5, 0.25, 0.25, 0.25, 0.5;
  Eigen::VectorXd u = stationary_distribution(MarkovChain(sym));
  for (int i = 0; i < 3; ++i) CHECK(u(i) == Approx(1.0 / 3.0));
  MarkovChain id(Eigen::MatrixXd::Identity(2, 2));
  CHECK_THROWS(stationary_distribution(id));
  CHECK_THROWS(slem(id));
}

TEST_CASE("distance function") {
  MarkovChain c(two());
  CHECK(distance_function(c, 0) == Approx(4.0 / 3.0));
  CHECK(distance_function(c, 1) == Approx(0.9333333).epsilon(1e-6));
  CHECK(distance_function(c, 1) <= 0.7 / (1.0 / 3.0));
  CHECK(distance_function(c, 60) < 1e-8);
}

TEST_CASE("sampled chains: stationarity and monotone distance") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    int n = 2 + trial % 5;
    MarkovChain c(oracle::random_chain(rng, n));
    Eigen::VectorXd pi = c.stationary();
    CHECK(std::abs(pi.sum() - 1.0) < 1e-9);
    CHECK((pi.transpose() * c.matrix() - pi.transpose()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(c.slem() >= 0.0);
    CHECK(c.slem() < 1.0);
    double prev = distance_function(c, 0);
    for (int t = 1; t <= 20; ++t) {
      double d = distance_function(c, t);
      CHECK(d <= prev + 1e-12);
      prev = d;
    }
  }
}

TEST_CASE("distance bound on reversible chains") {
  std::mt19937_64 rng(12);
  std::gamma_distribution<double> g(1.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    int n = 2 + trial % 5;
    Eigen::MatrixXd w(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) w(i, j) = w(j, i) = g(rng) + 1e-3;
    for (int i = 0; i < n; ++i) w.row(i) /= w.row(i).sum();
    MarkovChain c(w);
    for (int t = 1; t <= 20; ++t) CHECK(distance_function(c, t) <= std::pow(c.slem(), t) / c.pi_min() + 1e-12);
  }
}

// The bound is not implied by the spectral gap for non-reversible chains;
// violations are reported, not asserted.
TEST_CASE("distance bound on general chains (report only)") {
  std::mt19937_64 rng(11);
  int violations = 0, cases = 0;
  for (int trial = 0; trial < 40; ++trial) {
    MarkovChain c(oracle::random_chain(rng, 2 + trial % 5));
    for (int t = 1; t <= 20; ++t, ++cases)
      if (distance_function(c, t) > std::pow(c.slem(), t) / c.pi_min() + 1e-12) ++violations;
  }
  MESSAGE("distance bound violated in " << violations << " of " << cases << " (chain, t) cases");
  CHECK(cases == 800);
}
