#pragma once

#include <cstdint>
#include <vector>

#include "relaysel/belief.hpp"
#include "relaysel/instance.hpp"

namespace rsel {

// Reward and per-UE cost hyperplanes over joint states. `next` holds the
// successor pair (index into the following epoch) for every observation of
// the action, which makes a pair a finite-state controller whose expected
// return from belief b is r.b.
struct AlphaPair {
  Eigen::VectorXd r;
  std::vector<Eigen::VectorXd> c;
  ActionMask action = 0;
  int epoch = 0;
  std::vector<int> next;
};

struct ValueFunctionSet {
  int epoch = 0;
  std::vector<AlphaPair> pairs;
  std::vector<int> anchor_pair;  // point-based only: pair chosen at each belief point
};

AlphaPair zero_pair(const Instance& inst);
AlphaPair immediate_pair(ActionMask a, const Instance& inst);

// (T v)(s) = sum_{s'} T(s,s') v(s') with T the product of the relays' chains
Eigen::VectorXd apply_transition(const Eigen::VectorXd& v, const Instance& inst);

// gamma * 1[s_sel = z] * (T alpha)(s) for reward and cost vectors
AlphaPair backproject(const AlphaPair& pair, ActionMask a, const Observation& z, const Instance& inst);

// every combination of one pair per branch added to the immediate pair;
// the result's `next` lists the chosen index per branch
std::vector<AlphaPair> cross_sum(const std::vector<std::vector<AlphaPair>>& gamma_sets, const AlphaPair& immediate,
                                 std::size_t cap = 100000);

// alpha . b without forming the joint belief
double expect(const Eigen::VectorXd& alpha, const FactoredBelief& b, const Instance& inst);

struct PairValue {
  double r = 0.0;
  std::vector<double> c;
};
PairValue evaluate(const AlphaPair& p, const FactoredBelief& b, const Instance& inst);

bool feasible(const std::vector<double>& c, double c_th);

// higher reward, then lower total cost, then lexicographically smaller action
bool better(const PairValue& a, ActionMask aa, const PairValue& b, ActionMask ab, const Instance& inst);

// best pair at b subject to the per-UE budget; -1 only for an empty set.
// Without a feasible pair, the cheapest pair is returned.
int constrained_argmax(const std::vector<AlphaPair>& pairs, const FactoredBelief& b, const Instance& inst,
                       double c_th);

// joint states with positive probability under b and their probabilities
struct Support {
  std::vector<std::size_t> states;
  std::vector<double> prob;
};
Support support(const FactoredBelief& b, const Instance& inst);

// pair induced by playing a now and continuing with next_pairs[next[z]] after observation z;
// `moved` holds T applied to those pairs
AlphaPair materialize(ActionMask a, const std::vector<int>& next, const std::vector<AlphaPair>& moved,
                      const Instance& inst, int epoch);

// T applied to each pair's vectors
std::vector<AlphaPair> transition_all(const std::vector<AlphaPair>& pairs, const Instance& inst);

}  // namespace rsel
