#include <cmath>

#include "relaysel/sim.hpp"

namespace rsel {

double ComplexityEstimate::ops() const { return std::pow(10.0, log10_ops); }

// Per-iteration operation counts:
//   exact        |A| |V|^|Z|        with |A| = 2^K, |Z| = |S|^K, |V| = |B|
//   cpbvi        2^K  |S| |B|^|S|   (every action, per-relay branching)
//   gcpbvi       K^2  |S| |B|^|S|   (greedy: at most K rounds over K elements)
//   centralized  greedy over N(K+1) (relay, UE) elements, each evaluation
//                carrying one reward and N cost dimensions
//   distributed  N single-UE greedy runs over K+1 elements, two dimensions each
ComplexityEstimate complexity_model(const std::string& method, int k, const ComplexitySizes& sz) {
  if (k < 1 || sz.states < 1 || sz.beliefs < 1 || sz.ues < 1) throw ValidationError("complexity: sizes must be positive");
  const double lb = std::log10(static_cast<double>(sz.beliefs));
  const double ls = std::log10(static_cast<double>(sz.states));
  const double n = sz.ues;
  ComplexityEstimate e;
  if (method == "exact") {
    e.log10_ops = k * std::log10(2.0) + std::pow(static_cast<double>(sz.states), k) * lb;
  } else if (method == "cpbvi") {
    e.log10_ops = k * std::log10(2.0) + ls + sz.states * lb;
  } else if (method == "gcpbvi") {
    e.log10_ops = 2.0 * std::log10(static_cast<double>(k)) + ls + sz.states * lb;
  } else if (method == "centralized") {
    double m = n * (k + 1);
    e.log10_ops = std::log10(m * (m + 1) / 2.0 * (n + 1)) + ls + sz.states * lb;
  } else if (method == "distributed") {
    double m = k + 1;
    e.log10_ops = std::log10(n * m * (m + 1) / 2.0 * 2.0) + ls + sz.states * lb;
  } else {
    throw ValidationError("complexity: unknown method '" + method + "'");
  }
  return e;
}

double cpbvi_gcpbvi_ratio(int k) {
  ComplexitySizes s;
  return std::pow(10.0, complexity_model("cpbvi", k, s).log10_ops - complexity_model("gcpbvi", k, s).log10_ops);
}

double centralized_distributed_ratio(int k, int n) {
  ComplexitySizes s;
  s.ues = n;
  return std::pow(10.0,
                  complexity_model("centralized", k, s).log10_ops - complexity_model("distributed", k, s).log10_ops);
}

}  // namespace rsel
