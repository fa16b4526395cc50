#include <cmath>

#include "relaysel/solvers.hpp"

namespace rsel {

ErrorBound pbvi_error_bound(double eps_b, double gamma, int h, double r_range, double c_range) {
  if (eps_b < 0) throw ValidationError("eps_B: must be >= 0");
  ErrorBound e;
  if (gamma < 1.0) {
    double d = (1.0 - gamma) * (1.0 - gamma);
    e.eta_r = r_range * eps_b / d;
    e.eta_c = c_range * eps_b / d;
  } else {
    double f = 0.5 * h * (h + 1.0);
    e.eta_r = f * r_range * eps_b;
    e.eta_c = f * c_range * eps_b;
  }
  return e;
}

BeliefPolicy open_loop_policy(std::vector<ActionMask> actions) {
  return [actions = std::move(actions)](int t, const FactoredBelief&) {
    return t < static_cast<int>(actions.size()) ? actions[t] : ActionMask{0};
  };
}

BeliefPolicy reselect_policy(const PolicySolution& sol, const Instance& inst) {
  return [&sol, &inst](int t, const FactoredBelief& b) {
    const auto& pairs = sol.epochs.at(t).pairs;
    int i = constrained_argmax(pairs, b, inst, inst.c_th());
    return pairs[i].action;
  };
}

namespace {

void accumulate_q(const Instance& inst, const BeliefPolicy& pi, const FactoredBelief& b, int t, ActionMask a,
                  double w, double& r, std::vector<double>& c) {
  r += w * belief_reward(b, a, inst);
  for (int n = 0; n < inst.N(); ++n) c[n] += w * belief_cost(b, a, inst, n);
  if (t + 1 >= inst.horizon()) return;
  const RelayMask u = inst.relay_mask(a);
  for (std::size_t z = 0; z < inst.obs_count(u); ++z) {
    Observation obs{inst.obs_decode(z, u)};
    double p = observation_prob(obs, a, b, inst);
    if (p <= 0.0) continue;
    FactoredBelief nb = update_belief(b, inst, a, obs);
    accumulate_q(inst, pi, nb, t + 1, pi(t + 1, nb), w * inst.gamma() * p, r, c);
  }
}

}  // namespace

QEvaluation evaluate_q(const Instance& inst, const BeliefPolicy& pi, const FactoredBelief& b, int epoch,
                       ActionMask a) {
  if (epoch < 0 || epoch >= inst.horizon()) throw ValidationError("epoch out of range");
  QEvaluation q;
  q.belief = b;
  q.action = a;
  q.epoch = epoch;
  q.q_c.assign(inst.N(), 0.0);
  accumulate_q(inst, pi, b, epoch, a, 1.0, q.q_r, q.q_c);
  return q;
}

Derivative discrete_derivative(const Instance& inst, const BeliefPolicy& pi, const FactoredBelief& b, int epoch,
                               int e, ActionMask m) {
  ActionMask bit = ActionMask{1} << e;
  if (m & bit) throw ValidationError("discrete_derivative: e must not belong to M");
  if (!(inst.available() & bit)) throw ValidationError("discrete_derivative: e is not an available element");
  QEvaluation with = evaluate_q(inst, pi, b, epoch, m | bit);
  QEvaluation without = evaluate_q(inst, pi, b, epoch, m);
  Derivative d;
  d.d_r = with.q_r - without.q_r;
  for (int n = 0; n < inst.N(); ++n) d.d_c.push_back(with.q_c[n] - without.q_c[n]);
  return d;
}

}  // namespace rsel
