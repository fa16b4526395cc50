#include <fstream>
#include <sstream>

#include "json.hpp"
#include "relaysel/solvers.hpp"

namespace rsel {

using nlohmann::json;

namespace {

json vec(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Eigen::VectorXd unvec(const json& j, std::size_t n, const std::string& where) {
  auto v = j.get<std::vector<double>>();
  if (v.size() != n) throw ValidationError(where + ": expected " + std::to_string(n) + " entries");
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::string policy_to_json(const PolicySolution& sol, const Instance& inst) {
  json j;
  j["method"] = method_name(sol.method);
  j["fingerprint"] = sol.fingerprint;
  j["relays"] = inst.K();
  j["regions"] = inst.S();
  j["ues"] = inst.N();
  j["root"] = sol.root;
  j["value_r"] = sol.value_r;
  j["value_c"] = sol.value_c;
  j["belief_set"] = {{"h", sol.beliefs.h}, {"size", sol.beliefs.points.size()},
                     {"target_eps", sol.beliefs.target_eps}, {"truncated", sol.beliefs.truncated}};
  // wall time stays out so equal solves give byte-identical files
  auto stats = sol.stats.flat();
  stats.erase("wall_seconds");
  j["stats"] = stats;
  json eps = json::array();
  for (const auto& vs : sol.epochs) {
    json e;
    e["epoch"] = vs.epoch;
    e["anchor_pair"] = vs.anchor_pair;
    json ps = json::array();
    for (const auto& p : vs.pairs) {
      json jp;
      std::vector<int> act;
      for (int k = 0; k < inst.element_count(); ++k)
        if ((p.action >> k) & 1) act.push_back(k);
      jp["action"] = act;
      jp["next"] = p.next;
      jp["r"] = vec(p.r);
      json cs = json::array();
      for (const auto& c : p.c) cs.push_back(vec(c));
      jp["c"] = cs;
      ps.push_back(std::move(jp));
    }
    e["pairs"] = std::move(ps);
    eps.push_back(std::move(e));
  }
  j["epochs"] = std::move(eps);
  return j.dump();
}

PolicySolution policy_from_json(const std::string& text, const Instance& inst) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("policy: parse error: ") + e.what());
  }
  try {
    PolicySolution sol;
    sol.method = parse_method(j.at("method").get<std::string>());
    sol.fingerprint = j.at("fingerprint").get<std::string>();
    if (sol.fingerprint != inst.fingerprint())
      throw ValidationError("policy: fingerprint " + sol.fingerprint + " does not match scenario " +
                            inst.fingerprint());
    if (j.at("relays").get<int>() != inst.K() || j.at("regions").get<int>() != inst.S() ||
        j.at("ues").get<int>() != inst.N())
      throw ValidationError("policy: dimensions do not match scenario");
    sol.root = j.at("root").get<int>();
    sol.value_r = j.at("value_r").get<double>();
    sol.value_c = j.at("value_c").get<std::vector<double>>();
    const auto& bs = j.at("belief_set");
    sol.beliefs.h = bs.at("h").get<int>();
    sol.beliefs.target_eps = bs.at("target_eps").get<double>();
    sol.beliefs.truncated = bs.at("truncated").get<bool>();
    const std::size_t n = inst.joint_size();
    for (const auto& e : j.at("epochs")) {
      ValueFunctionSet vs;
      vs.epoch = e.at("epoch").get<int>();
      vs.anchor_pair = e.at("anchor_pair").get<std::vector<int>>();
      for (const auto& jp : e.at("pairs")) {
        AlphaPair p;
        for (int k : jp.at("action").get<std::vector<int>>()) {
          if (k < 0 || k >= inst.element_count()) throw ValidationError("policy: action element out of range");
          p.action |= ActionMask{1} << k;
        }
        p.epoch = vs.epoch;
        p.next = jp.at("next").get<std::vector<int>>();
        p.r = unvec(jp.at("r"), n, "policy: r");
        for (const auto& c : jp.at("c")) p.c.push_back(unvec(c, n, "policy: c"));
        if (static_cast<int>(p.c.size()) != inst.N()) throw ValidationError("policy: one cost vector per UE required");
        vs.pairs.push_back(std::move(p));
      }
      sol.epochs.push_back(std::move(vs));
    }
    if (sol.horizon() != inst.horizon()) throw ValidationError("policy: horizon does not match scenario");
    for (int t = 0; t < sol.horizon(); ++t)
      for (const auto& p : sol.epochs[t].pairs) {
        if (t + 1 == sol.horizon()) continue;
        if (p.next.size() != inst.obs_count(inst.relay_mask(p.action)))
          throw ValidationError("policy: successor list has the wrong length");
        for (int x : p.next)
          if (x < 0 || x >= static_cast<int>(sol.epochs[t + 1].pairs.size()))
            throw ValidationError("policy: successor index out of range");
      }
    if (sol.root < 0 || sol.root >= static_cast<int>(sol.epochs.at(0).pairs.size()))
      throw ValidationError("policy: root out of range");
    return sol;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("policy: ") + e.what());
  }
}

void save_policy(const PolicySolution& sol, const Instance& inst, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path);
  f << policy_to_json(sol, inst);
  if (!f) throw IoError("write failed: " + path);
}

PolicySolution load_policy(const std::string& path, const Instance& inst) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return policy_from_json(ss.str(), inst);
}

}  // namespace rsel
