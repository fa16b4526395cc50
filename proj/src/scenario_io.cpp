#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "relaysel/model.hpp"

namespace rsel {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ValidationError(path + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ValidationError((path.empty() ? "" : path + ".") + it.key() + ": unknown key");
}

const json& need(const json& j, const std::string& key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError((path.empty() ? "" : path + ".") + key + ": missing");
  return *it;
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

double get_num(const json& v, const std::string& path) {
  if (!v.is_number()) throw ValidationError(path + ": expected a number");
  return v.get<double>();
}

int get_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ValidationError(path + ": expected an integer");
  return v.get<int>();
}

Coord get_coord(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) throw ValidationError(path + ": expected [x, y]");
  return Coord{get_int(v[0], path + "[0]"), get_int(v[1], path + "[1]")};
}

json coord_json(Coord c) { return json::array({c.x, c.y}); }

}  // namespace

ScenarioConfig parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("scenario: parse error: ") + e.what());
  }
  reject_unknown(j, "", {"id", "grid_x", "grid_y", "relays", "ues", "bs_position", "r_max",
                         "c_max", "c_th", "horizon", "gamma", "direct_link"});
  ScenarioConfig cfg;
  if (j.contains("id")) {
    if (!j["id"].is_string()) throw ValidationError("id: expected a string");
    cfg.id = j["id"].get<std::string>();
  }
  cfg.grid_x = get_int(need(j, "grid_x", ""), "grid_x");
  cfg.grid_y = get_int(need(j, "grid_y", ""), "grid_y");
  cfg.r_max = get_num(need(j, "r_max", ""), "r_max");
  cfg.c_max = get_num(need(j, "c_max", ""), "c_max");
  cfg.c_th = get_num(need(j, "c_th", ""), "c_th");
  cfg.horizon = get_int(need(j, "horizon", ""), "horizon");
  cfg.gamma = get_num(need(j, "gamma", ""), "gamma");

  const json& relays = need(j, "relays", "");
  if (!relays.is_array()) throw ValidationError("relays: expected a list");
  for (size_t i = 0; i < relays.size(); ++i) {
    std::string p = "relays[" + std::to_string(i) + "]";
    const json& r = relays[i];
    reject_unknown(r, p, {"eps_fix", "speed", "initial_state", "reward_table", "cost_table"});
    RelaySpec spec;
    spec.eps_fix = get_num(need(r, "eps_fix", p), join(p, "eps_fix"));
    if (r.contains("speed")) spec.speed = get_int(r["speed"], join(p, "speed"));
    spec.initial_state = get_coord(need(r, "initial_state", p), join(p, "initial_state"));
    for (auto [key, dst] : {std::pair{"reward_table", &spec.reward_table}, std::pair{"cost_table", &spec.cost_table}}) {
      if (!r.contains(key)) continue;
      const json& lst = r[key];
      if (!lst.is_array()) throw ValidationError(join(p, key) + ": expected a list");
      for (size_t s = 0; s < lst.size(); ++s) dst->push_back(get_num(lst[s], join(p, key) + "[" + std::to_string(s) + "]"));
    }
    cfg.relays.push_back(spec);
  }

  const json& ues = need(j, "ues", "");
  if (!ues.is_array()) throw ValidationError("ues: expected a list");
  for (size_t n = 0; n < ues.size(); ++n) {
    std::string p = "ues[" + std::to_string(n) + "]";
    const json& u = ues[n];
    reject_unknown(u, p, {"position", "relays"});
    UeSpec spec;
    spec.position = get_coord(need(u, "position", p), join(p, "position"));
    if (u.contains("relays")) {
      const json& lst = u["relays"];
      if (!lst.is_array()) throw ValidationError(join(p, "relays") + ": expected a list");
      for (size_t k = 0; k < lst.size(); ++k)
        spec.relays.push_back(get_int(lst[k], join(p, "relays") + "[" + std::to_string(k) + "]"));
    }
    cfg.ues.push_back(spec);
  }

  if (j.contains("bs_position")) cfg.bs_position = get_coord(j["bs_position"], "bs_position");
  if (j.contains("direct_link")) {
    const json& d = j["direct_link"];
    reject_unknown(d, "direct_link", {"enabled", "reward", "cost"});
    if (d.contains("enabled")) {
      if (!d["enabled"].is_boolean()) throw ValidationError("direct_link.enabled: expected a boolean");
      cfg.direct_link.enabled = d["enabled"].get<bool>();
    }
    if (d.contains("reward") && !d["reward"].is_null())
      cfg.direct_link.reward = get_num(d["reward"], "direct_link.reward");
    if (d.contains("cost")) cfg.direct_link.cost = get_num(d["cost"], "direct_link.cost");
  }
  validate(cfg);
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read scenario file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string scenario_to_json(const ScenarioConfig& cfg) {
  json j;
  j["id"] = cfg.id;
  j["grid_x"] = cfg.grid_x;
  j["grid_y"] = cfg.grid_y;
  j["relays"] = json::array();
  for (const auto& r : cfg.relays) {
    json e = {{"eps_fix", r.eps_fix}, {"speed", r.speed}, {"initial_state", coord_json(r.initial_state)}};
    if (!r.reward_table.empty()) e["reward_table"] = r.reward_table;
    if (!r.cost_table.empty()) e["cost_table"] = r.cost_table;
    j["relays"].push_back(e);
  }
  j["ues"] = json::array();
  for (const auto& u : cfg.ues) {
    json e = {{"position", coord_json(u.position)}};
    if (!u.relays.empty()) e["relays"] = u.relays;
    j["ues"].push_back(e);
  }
  if (cfg.bs_position) j["bs_position"] = coord_json(*cfg.bs_position);
  j["r_max"] = cfg.r_max;
  j["c_max"] = cfg.c_max;
  j["c_th"] = cfg.c_th;
  j["horizon"] = cfg.horizon;
  j["gamma"] = cfg.gamma;
  json d = {{"enabled", cfg.direct_link.enabled}, {"cost", cfg.direct_link.cost}};
  if (cfg.direct_link.reward) d["reward"] = *cfg.direct_link.reward;
  j["direct_link"] = d;
  return j.dump(2) + "\n";
}

void save_scenario(const ScenarioConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write scenario file: " + path);
  out << scenario_to_json(cfg);
  if (!out) throw IoError("write failed: " + path);
}

std::string fingerprint(const ScenarioConfig& cfg) {
  std::string s = json::parse(scenario_to_json(cfg)).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rsel
