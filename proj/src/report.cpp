#include "relaysel/report.hpp"

#include <cmath>
#include <cstdio>

#include "json.hpp"

namespace rsel {

using nlohmann::json;

std::string solve_report(const PolicySolution& sol, const Instance& inst, const SolveOptions& opt) {
  json j;
  j["method"] = method_name(sol.method);
  j["fingerprint"] = sol.fingerprint;
  j["relays"] = inst.K();
  j["regions"] = inst.S();
  j["ues"] = inst.N();
  j["horizon"] = inst.horizon();
  j["gamma"] = inst.gamma();
  j["c_th"] = inst.c_th();
  j["value_r"] = sol.value_r;
  j["value_c"] = sol.value_c;
  j["root_action"] = sol.epochs.empty() ? std::string("{}")
                                        : inst.action_string(sol.epochs[0].pairs[sol.root].action);
  json pairs = json::array();
  for (const auto& e : sol.epochs) pairs.push_back(e.pairs.size());
  j["pairs_per_epoch"] = pairs;
  const bool point_based = sol.method == Method::Cpbvi || sol.method == Method::Gcpbvi;
  if (point_based) {
    const BeliefSet& bs = sol.beliefs;
    // density used for the prediction: the requested target, else the mixing bound of h
    double eps = bs.target_eps > 0.0 ? bs.target_eps : std::min(2.0, density_bound(inst.chains(), bs.h));
    if (bs.truncated) eps = std::min(2.0, density_bound(inst.chains(), bs.h));
    ErrorBound eb = pbvi_error_bound(eps, inst.gamma(), inst.horizon(), inst.reward_range(), inst.cost_range());
    j["belief_set"] = {{"h", bs.h},
                       {"size", bs.points.size()},
                       {"family_size", bs.family_size},
                       {"target_eps", bs.target_eps},
                       {"truncated", bs.truncated},
                       {"density_bound", density_bound(inst.chains(), bs.h)}};
    j["predicted"] = {{"eps_used", eps}, {"eta_r", eb.eta_r}, {"eta_c", eb.eta_c}};
  } else {
    j["predicted"] = {{"eps_used", 0.0}, {"eta_r", 0.0}, {"eta_c", 0.0}};
  }
  j["options"] = {{"eps", opt.eps},
                  {"belief_h", opt.belief_h},
                  {"belief_cap", opt.belief_cap},
                  {"frontier_cap", opt.frontier_cap},
                  {"frontier_work", opt.frontier_work},
                  {"prune", opt.prune == PruneMode::Grid ? "grid" : opt.prune == PruneMode::Dominance ? "dominance" : "reachable"},
                  {"greedy_inclusive", opt.greedy_inclusive},
                  {"singleton_augmented", opt.singleton_augmented}};
  json st;
  for (const auto& [k, v] : sol.stats.flat()) st[k] = v;
  j["stats"] = st;
  return j.dump(2) + "\n";
}

std::vector<CompareRow> compare(const ScenarioConfig& base, const CompareOptions& opt) {
  if (opt.modes.empty()) throw ValidationError("compare: no modes requested");
  for (const auto& m : opt.modes)
    if (m != "d2d" && m != "cellular" && m != "centralized" && m != "distributed")
      throw ValidationError("compare: unknown mode '" + m + "'");
  std::vector<int> speeds = opt.speeds.empty() ? std::vector<int>{0} : opt.speeds;
  std::string ref = opt.modes.front();
  for (const auto& m : opt.modes)
    if (m == "cellular") ref = m;
  std::vector<CompareRow> rows;
  for (int v : speeds) {
    ScenarioConfig cfg = base;
    if (v > 0)
      for (auto& r : cfg.relays) r.speed = v;
    validate(cfg);
    std::vector<CompareRow> block;
    for (const auto& m : opt.modes) {
      CompareRow row;
      row.speed = v;
      row.mode = m;
      if (m == "cellular") {
        // every UE on its direct link, whatever the scenario says about its availability
        ScenarioConfig c2 = cfg;
        c2.direct_link.enabled = true;
        row.metrics = baseline_cellular(Instance::centralized(c2), opt.runs, opt.seed);
        row.planned_reward = row.metrics.avg_reward;
      } else {
        MultiMode mm = m == "centralized" ? MultiMode::Centralized : MultiMode::Distributed;
        MultiUserResult res = run_multiuser(cfg, mm, opt.solve, opt.runs, opt.seed);
        row.metrics = res.metrics;
        row.planned_reward = res.planned_reward;
      }
      block.push_back(std::move(row));
    }
    double ref_r = 0.0;
    for (const auto& r : block)
      if (r.mode == ref) ref_r = r.metrics.avg_reward;
    for (auto& r : block) {
      r.relative_gain = ref_r != 0.0 ? r.metrics.avg_reward / ref_r - 1.0 : 0.0;
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

std::string compare_csv(const std::string& scenario_id, const std::vector<CompareRow>& rows) {
  std::string out =
      "scenario_id,speed,mode,avg_cum_reward,avg_cum_cost,avg_cum_ee,stderr_reward,stderr_cost,planned_reward,"
      "relative_gain,runs\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%d,%s,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%d\n", scenario_id.c_str(),
                  r.speed, r.mode.c_str(), r.metrics.avg_reward, r.metrics.avg_cost, r.metrics.avg_ee,
                  r.metrics.stderr_reward, r.metrics.stderr_cost, r.planned_reward, r.relative_gain, r.metrics.runs);
    out += buf;
  }
  return out;
}

std::string bench_csv(int k_max, int n_ues, const ComplexitySizes& sizes) {
  if (k_max < 1) throw ValidationError("bench: relays must be >= 1");
  if (n_ues < 1) throw ValidationError("bench: ues must be >= 1");
  std::string out =
      "relays,ues,log10_exact,log10_cpbvi,log10_gcpbvi,cpbvi_over_gcpbvi,log10_centralized,log10_distributed,"
      "centralized_over_distributed\n";
  char buf[512];
  for (int k = 1; k <= k_max; ++k) {
    ComplexitySizes s = sizes;
    s.ues = n_ues;
    std::snprintf(buf, sizeof buf, "%d,%d,%.6f,%.6f,%.6f,%.6g,%.6f,%.6f,%.6g\n", k, n_ues,
                  complexity_model("exact", k, s).log10_ops, complexity_model("cpbvi", k, s).log10_ops,
                  complexity_model("gcpbvi", k, s).log10_ops, cpbvi_gcpbvi_ratio(k),
                  complexity_model("centralized", k, s).log10_ops, complexity_model("distributed", k, s).log10_ops,
                  centralized_distributed_ratio(k, n_ues));
    out += buf;
  }
  return out;
}

}  // namespace rsel
