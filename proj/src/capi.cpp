#include "relaysel/relaysel.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "relaysel/report.hpp"

struct rs_scenario {
  rsel::ScenarioConfig cfg;
};

struct rs_problem {
  std::shared_ptr<const rsel::Instance> inst;
};

struct rs_policy {
  std::shared_ptr<const rsel::Instance> inst;
  rsel::PolicySolution sol;
  rsel::SolveOptions opt;
};

struct rs_metrics {
  rsel::SimulationMetrics m;
};

namespace {

thread_local std::string g_error;

rs_status fail(rs_status s, const std::string& msg) {
  g_error = msg;
  return s;
}

template <class F>
rs_status guard(F&& f) {
  try {
    f();
    g_error.clear();
    return RS_OK;
  } catch (const rsel::Error& e) {
    return fail(static_cast<rs_status>(e.status()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(RS_ERR_CAP, "out of memory");
  } catch (const std::exception& e) {
    return fail(RS_ERR_INTERNAL, e.what());
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void need(const void* p, const char* what) {
  if (!p) throw rsel::ValidationError(std::string(what) + ": null argument");
}

rsel::SolveOptions to_options(const rs_solve_options* o) {
  rsel::SolveOptions opt;
  if (!o) return opt;
  if (o->method < RS_EXACT || o->method > RS_ORACLE) throw rsel::ValidationError("unknown method");
  opt.method = static_cast<rsel::Method>(o->method);
  if (!(o->eps > 0.0)) throw rsel::ValidationError("eps: must be > 0");
  if (o->belief_h < 0) throw rsel::ValidationError("belief_h: must be >= 0");
  opt.eps = o->eps;
  opt.belief_h = o->belief_h;
  if (o->belief_cap) opt.belief_cap = o->belief_cap;
  if (o->frontier_cap) opt.frontier_cap = o->frontier_cap;
  if (o->frontier_work) opt.frontier_work = o->frontier_work;
  if (o->prune < 0 || o->prune > 2) throw rsel::ValidationError("prune: 0, 1 or 2");
  opt.prune = static_cast<rsel::PruneMode>(o->prune);
  if (o->grid_resolution > 0) opt.grid_resolution = o->grid_resolution;
  opt.greedy_inclusive = o->greedy_inclusive != 0;
  opt.singleton_augmented = o->singleton_augmented != 0;
  return opt;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

extern "C" {

const char* rs_version(void) { return "1.0.0"; }
const char* rs_last_error(void) { return g_error.c_str(); }
void rs_string_free(char* s) { std::free(s); }
uint64_t rs_default_seed(void) { return rsel::kDefaultSeed; }

void rs_solve_options_default(rs_solve_options* o) {
  if (!o) return;
  rsel::SolveOptions d;
  o->method = static_cast<int>(d.method);
  o->eps = d.eps;
  o->belief_h = d.belief_h;
  o->belief_cap = d.belief_cap;
  o->frontier_cap = d.frontier_cap;
  o->frontier_work = d.frontier_work;
  o->prune = 0;
  o->grid_resolution = d.grid_resolution;
  o->greedy_inclusive = 0;
  o->singleton_augmented = 0;
}

rs_status rs_method_parse(const char* name, int* method) {
  return guard([&] {
    need(name, "method");
    need(method, "method");
    *method = static_cast<int>(rsel::parse_method(name));
  });
}

rs_status rs_scenario_table1(int grid_x, int grid_y, int relays, int ues, rs_scenario** out) {
  return guard([&] {
    need(out, "out");
    if (relays < 1) throw rsel::ValidationError("relays: must be >= 1");
    if (ues < 1) throw rsel::ValidationError("ues: must be >= 1");
    if (grid_x < 1 || grid_y < 1) throw rsel::ValidationError("grid: sizes must be >= 1");
    auto sc = std::make_unique<rs_scenario>();
    sc->cfg = rsel::table1_scenario(relays, ues);
    // rescale placements onto the requested grid
    const int gx0 = sc->cfg.grid_x, gy0 = sc->cfg.grid_y;
    auto fit = [&](rsel::Coord c) {
      return rsel::Coord{std::max(1, std::min(grid_x, (c.x - 1) * grid_x / gx0 + 1)),
                         std::max(1, std::min(grid_y, (c.y - 1) * grid_y / gy0 + 1))};
    };
    sc->cfg.grid_x = grid_x;
    sc->cfg.grid_y = grid_y;
    for (auto& r : sc->cfg.relays) r.initial_state = fit(r.initial_state);
    for (auto& u : sc->cfg.ues) u.position = fit(u.position);
    if (sc->cfg.bs_position) sc->cfg.bs_position = fit(*sc->cfg.bs_position);
    rsel::validate(sc->cfg);
    *out = sc.release();
  });
}

rs_status rs_scenario_load(const char* path, rs_scenario** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    auto sc = std::make_unique<rs_scenario>();
    sc->cfg = rsel::load_scenario(path);
    *out = sc.release();
  });
}

rs_status rs_scenario_parse(const char* json, rs_scenario** out) {
  return guard([&] {
    need(json, "json");
    need(out, "out");
    auto sc = std::make_unique<rs_scenario>();
    sc->cfg = rsel::parse_scenario(json);
    *out = sc.release();
  });
}

rs_status rs_scenario_save(const rs_scenario* sc, const char* path) {
  return guard([&] {
    need(sc, "scenario");
    need(path, "path");
    rsel::save_scenario(sc->cfg, path);
  });
}

rs_status rs_scenario_set(rs_scenario* sc, const char* key, double value) {
  return guard([&] {
    need(sc, "scenario");
    need(key, "key");
    rsel::ScenarioConfig cfg = sc->cfg;
    std::string k = key;
    auto as_int = [&](const char* what) {
      if (value != static_cast<double>(static_cast<int>(value)))
        throw rsel::ValidationError(std::string(what) + ": expected an integer");
      return static_cast<int>(value);
    };
    if (k == "eps_fix") {
      for (auto& r : cfg.relays) r.eps_fix = value;
    } else if (k == "speed") {
      int v = as_int("speed");
      for (auto& r : cfg.relays) r.speed = v;
    } else if (k == "horizon") {
      cfg.horizon = as_int("horizon");
    } else if (k == "gamma") {
      cfg.gamma = value;
    } else if (k == "c_th") {
      cfg.c_th = value;
    } else if (k == "r_max") {
      cfg.r_max = value;
    } else if (k == "c_max") {
      cfg.c_max = value;
    } else {
      throw rsel::ValidationError("unknown scenario key: " + k);
    }
    rsel::validate(cfg);
    sc->cfg = std::move(cfg);
  });
}

rs_status rs_scenario_set_id(rs_scenario* sc, const char* id) {
  return guard([&] {
    need(sc, "scenario");
    need(id, "id");
    sc->cfg.id = id;
  });
}

rs_status rs_scenario_json(const rs_scenario* sc, char** out) {
  return guard([&] {
    need(sc, "scenario");
    need(out, "out");
    *out = dup(rsel::scenario_to_json(sc->cfg));
  });
}

rs_status rs_scenario_fingerprint(const rs_scenario* sc, char** out) {
  return guard([&] {
    need(sc, "scenario");
    need(out, "out");
    *out = dup(rsel::fingerprint(sc->cfg));
  });
}

rs_status rs_scenario_id(const rs_scenario* sc, char** out) {
  return guard([&] {
    need(sc, "scenario");
    need(out, "out");
    *out = dup(sc->cfg.id);
  });
}

rs_status rs_scenario_info(const rs_scenario* sc, int* relays, int* ues, int* regions) {
  return guard([&] {
    need(sc, "scenario");
    if (relays) *relays = static_cast<int>(sc->cfg.relays.size());
    if (ues) *ues = static_cast<int>(sc->cfg.ues.size());
    if (regions) *regions = rsel::region_count(sc->cfg);
  });
}

void rs_scenario_free(rs_scenario* sc) { delete sc; }

rs_status rs_problem_create(const rs_scenario* sc, int ue, rs_problem** out) {
  return guard([&] {
    need(sc, "scenario");
    need(out, "out");
    if (ue >= static_cast<int>(sc->cfg.ues.size())) throw rsel::ValidationError("ue index out of range");
    auto pb = std::make_unique<rs_problem>();
    pb->inst = std::make_shared<const rsel::Instance>(ue < 0 ? rsel::Instance::centralized(sc->cfg)
                                                             : rsel::Instance::single_ue(sc->cfg, ue));
    *out = pb.release();
  });
}

rs_status rs_problem_fingerprint(const rs_problem* pb, char** out) {
  return guard([&] {
    need(pb, "problem");
    need(out, "out");
    *out = dup(pb->inst->fingerprint());
  });
}

void rs_problem_free(rs_problem* pb) { delete pb; }

rs_status rs_solve(const rs_problem* pb, const rs_solve_options* o, rs_policy** out) {
  return guard([&] {
    need(pb, "problem");
    need(out, "out");
    auto pol = std::make_unique<rs_policy>();
    pol->inst = pb->inst;
    pol->opt = to_options(o);
    pol->sol = rsel::solve(*pb->inst, pol->opt);
    *out = pol.release();
  });
}

rs_status rs_policy_save(const rs_policy* pol, const char* path) {
  return guard([&] {
    need(pol, "policy");
    need(path, "path");
    rsel::save_policy(pol->sol, *pol->inst, path);
  });
}

rs_status rs_policy_load(const rs_problem* pb, const char* path, rs_policy** out) {
  return guard([&] {
    need(pb, "problem");
    need(path, "path");
    need(out, "out");
    auto pol = std::make_unique<rs_policy>();
    pol->inst = pb->inst;
    pol->sol = rsel::load_policy(path, *pb->inst);
    pol->opt.method = pol->sol.method;
    *out = pol.release();
  });
}

rs_status rs_policy_report(const rs_policy* pol, char** json) {
  return guard([&] {
    need(pol, "policy");
    need(json, "out");
    *json = dup(rsel::solve_report(pol->sol, *pol->inst, pol->opt));
  });
}

rs_status rs_policy_value(const rs_policy* pol, double* reward, double* cost) {
  return guard([&] {
    need(pol, "policy");
    if (reward) *reward = pol->sol.value_r;
    if (cost) {
      double c = 0.0;
      for (double v : pol->sol.value_c) c += v;
      *cost = c;
    }
  });
}

rs_status rs_policy_method(const rs_policy* pol, int* method) {
  return guard([&] {
    need(pol, "policy");
    need(method, "method");
    *method = static_cast<int>(pol->sol.method);
  });
}

void rs_policy_free(rs_policy* pol) { delete pol; }

rs_status rs_simulate(const rs_policy* pol, int runs, uint64_t seed, int reselect, rs_metrics** out) {
  return guard([&] {
    need(pol, "policy");
    need(out, "out");
    if (runs < 1) throw rsel::ValidationError("runs: must be >= 1");
    auto m = std::make_unique<rs_metrics>();
    m->m = rsel::monte_carlo(pol->sol, *pol->inst, runs, seed,
                             reselect ? rsel::ExecMode::Reselect : rsel::ExecMode::Follow);
    *out = m.release();
  });
}

rs_status rs_simulate_cellular(const rs_problem* pb, int runs, uint64_t seed, rs_metrics** out) {
  return guard([&] {
    need(pb, "problem");
    need(out, "out");
    if (runs < 1) throw rsel::ValidationError("runs: must be >= 1");
    auto m = std::make_unique<rs_metrics>();
    m->m = rsel::baseline_cellular(*pb->inst, runs, seed);
    *out = m.release();
  });
}

rs_status rs_metrics_summary(const rs_metrics* m, double* avg_reward, double* avg_cost, double* stderr_reward,
                             double* stderr_cost, double* avg_ee) {
  return guard([&] {
    need(m, "metrics");
    if (avg_reward) *avg_reward = m->m.avg_reward;
    if (avg_cost) *avg_cost = m->m.avg_cost;
    if (stderr_reward) *stderr_reward = m->m.stderr_reward;
    if (stderr_cost) *stderr_cost = m->m.stderr_cost;
    if (avg_ee) *avg_ee = m->m.avg_ee;
  });
}

rs_status rs_metrics_csv(const rs_metrics* m, const char* scenario_id, const char* method, int header, char** out) {
  return guard([&] {
    need(m, "metrics");
    need(out, "out");
    std::string s = header ? rsel::metrics_csv_header() : std::string();
    s += rsel::metrics_csv_rows(m->m, scenario_id ? scenario_id : "", method ? method : "");
    *out = dup(s);
  });
}

void rs_metrics_free(rs_metrics* m) { delete m; }

rs_status rs_compare(const rs_scenario* sc, const char* modes, const int* speeds, int n_speeds, int runs,
                     uint64_t seed, const rs_solve_options* opt, char** csv) {
  return guard([&] {
    need(sc, "scenario");
    need(csv, "out");
    if (runs < 1) throw rsel::ValidationError("runs: must be >= 1");
    rsel::CompareOptions co;
    if (modes) co.modes = split(modes);
    for (int i = 0; i < n_speeds; ++i) {
      if (speeds[i] < 1) throw rsel::ValidationError("speeds: must be >= 1");
      co.speeds.push_back(speeds[i]);
    }
    co.runs = runs;
    co.seed = seed;
    co.solve = to_options(opt);
    *csv = dup(rsel::compare_csv(sc->cfg.id, rsel::compare(sc->cfg, co)));
  });
}

rs_status rs_bench(int k_max, int ues, int states, int beliefs, char** csv) {
  return guard([&] {
    need(csv, "out");
    if (states < 1 || beliefs < 1) throw rsel::ValidationError("bench: sizes must be >= 1");
    rsel::ComplexitySizes s;
    s.states = states;
    s.beliefs = beliefs;
    *csv = dup(rsel::bench_csv(k_max, ues, s));
  });
}

}  // extern "C"
