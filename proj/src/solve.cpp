#include <chrono>
#include <stdexcept>

#include "relaysel/solvers.hpp"

namespace rsel {

std::string method_name(Method m) {
  switch (m) {
    case Method::Exact: return "exact";
    case Method::Cpbvi: return "cpbvi";
    case Method::Gcpbvi: return "gcpbvi";
    case Method::Oracle: return "oracle";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  if (s == "exact") return Method::Exact;
  if (s == "cpbvi") return Method::Cpbvi;
  if (s == "gcpbvi") return Method::Gcpbvi;
  if (s == "oracle") return Method::Oracle;
  throw ValidationError("method: expected exact|cpbvi|gcpbvi|oracle, got '" + s + "'");
}

std::map<std::string, double> SolveStats::flat() const {
  return {{"backups", static_cast<double>(backups)},
          {"frontier_builds", static_cast<double>(frontier_builds)},
          {"item_evaluations", static_cast<double>(item_evaluations)},
          {"action_evaluations", static_cast<double>(action_evaluations)},
          {"approx_frontiers", static_cast<double>(approx_frontiers)},
          {"fallbacks", static_cast<double>(fallbacks)},
          {"pairs_generated", static_cast<double>(pairs_generated)},
          {"wall_seconds", wall_seconds}};
}

void select_root(PolicySolution& sol, const Instance& inst, const FactoredBelief& b0) {
  const auto& pairs = sol.epochs.at(0).pairs;
  sol.root = constrained_argmax(pairs, b0, inst, inst.c_th());
  PairValue v = evaluate(pairs[sol.root], b0, inst);
  sol.value_r = v.r;
  sol.value_c = v.c;
}

PolicySolution solve(const Instance& inst, const SolveOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  PolicySolution sol;
  if (opt.method == Method::Oracle) {
    sol = brute_force_oracle(inst, opt);
  } else {
    sol.method = opt.method;
    sol.fingerprint = inst.fingerprint();
    const int T = inst.horizon();
    sol.epochs.resize(T);
    if (opt.method != Method::Exact) {
      sol.beliefs = opt.belief_h > 0 ? build_h_belief_set(inst.s0(), opt.belief_h, inst.chains(), opt.belief_cap)
                                     : epsilon_belief_set(opt.eps, inst, opt.belief_cap);
      if (opt.belief_h == 0) sol.beliefs.target_eps = opt.eps;
    }
    for (int t = T - 1; t >= 0; --t) {
      const ValueFunctionSet* next = t + 1 < T ? &sol.epochs[t + 1] : nullptr;
      switch (opt.method) {
        case Method::Exact: sol.epochs[t] = exact_backup(next, inst, t, opt, sol.stats); break;
        case Method::Cpbvi: sol.epochs[t] = cpbvi_backup(next, sol.beliefs, inst, t, opt, sol.stats); break;
        default: sol.epochs[t] = gcpbvi_backup(next, sol.beliefs, inst, t, opt, sol.stats); break;
      }
    }
    select_root(sol, inst, inst.initial_belief());
  }
  sol.stats.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sol;
}

}  // namespace rsel
