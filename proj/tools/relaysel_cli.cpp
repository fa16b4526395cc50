// relaysel: batch front-end over the C API.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "relaysel/relaysel.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Failure {
  int code;
  std::string msg;
};

void check(rs_status s, const std::string& what) {
  if (s != RS_OK) throw Failure{static_cast<int>(s), what + ": " + rs_last_error()};
}

// owns a C string from the library
std::string take(char* p) {
  std::string s = p ? p : "";
  rs_string_free(p);
  return s;
}

struct Scenario {
  rs_scenario* h = nullptr;
  ~Scenario() { rs_scenario_free(h); }
};
struct Problem {
  rs_problem* h = nullptr;
  ~Problem() { rs_problem_free(h); }
};
struct Policy {
  rs_policy* h = nullptr;
  ~Policy() { rs_policy_free(h); }
};
struct Metrics {
  rs_metrics* h = nullptr;
  ~Metrics() { rs_metrics_free(h); }
};

fs::path out_dir(const std::string& out) {
  fs::path p(out);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) throw Failure{RS_ERR_IO, "cannot create output directory: " + out};
  return p;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  if (!f) throw Failure{RS_ERR_IO, "cannot write " + p.string()};
  f << text;
  if (!f) throw Failure{RS_ERR_IO, "write failed: " + p.string()};
}

void write_manifest(const fs::path& dir, json m) {
  m["version"] = rs_version();
  write_file(dir / "manifest.json", m.dump(2) + "\n");
}

std::vector<int> parse_list(const std::string& s) {
  // "1..5" or "1,2,4"
  std::vector<int> out;
  auto dots = s.find("..");
  try {
    if (dots != std::string::npos) {
      int a = std::stoi(s.substr(0, dots)), b = std::stoi(s.substr(dots + 2));
      if (b < a) throw Failure{RS_ERR_VALIDATION, "empty range: " + s};
      for (int v = a; v <= b; ++v) out.push_back(v);
    } else {
      std::stringstream ss(s);
      std::string item;
      while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stoi(item));
    }
  } catch (const std::logic_error&) {
    throw Failure{RS_ERR_VALIDATION, "cannot parse integer list: " + s};
  }
  return out;
}

struct SolveFlags {
  std::string method = "gcpbvi";
  double eps = 0.01;
  int belief_h = 0;
  std::size_t belief_cap = 0;
  std::size_t frontier_cap = 0;
  std::string prune = "reachable";
  bool inclusive = false;
  bool singleton = false;

  void add(CLI::App* c) {
    c->add_option("--method", method, "exact | cpbvi | gcpbvi | oracle")->capture_default_str();
    c->add_option("--eps", eps, "target belief-set density")->capture_default_str();
    c->add_option("--belief-h", belief_h, "explicit belief-set horizon h (overrides --eps)");
    c->add_option("--belief-cap", belief_cap, "maximum number of belief points");
    c->add_option("--frontier-cap", frontier_cap, "maximum Pareto frontier size per knapsack");
    c->add_option("--prune", prune, "exact solver pruning: reachable | dominance | grid")->capture_default_str();
    c->add_flag("--greedy-inclusive", inclusive, "greedy admission with <= instead of <");
    c->add_flag("--singleton", singleton, "compare the greedy result with the best single relay");
  }
  rs_solve_options options() const {
    rs_solve_options o;
    rs_solve_options_default(&o);
    check(rs_method_parse(method.c_str(), &o.method), "--method");
    if (prune == "reachable") o.prune = 0;
    else if (prune == "dominance") o.prune = 1;
    else if (prune == "grid") o.prune = 2;
    else throw Failure{RS_ERR_VALIDATION, "--prune: reachable, dominance or grid"};
    o.eps = eps;
    o.belief_h = belief_h;
    if (belief_cap) o.belief_cap = belief_cap;
    if (frontier_cap) o.frontier_cap = frontier_cap;
    o.greedy_inclusive = inclusive;
    o.singleton_augmented = singleton;
    return o;
  }
  json to_json() const {
    return {{"method", method}, {"eps", eps},         {"belief_h", belief_h}, {"belief_cap", belief_cap},
            {"prune", prune},   {"inclusive", inclusive}, {"singleton", singleton}};
  }
};

void load(Scenario& sc, const std::string& path) {
  if (path.empty()) throw Failure{RS_ERR_VALIDATION, "--scenario is required"};
  check(rs_scenario_load(path.c_str(), &sc.h), "scenario");
}

void make_problem(Problem& pb, const Scenario& sc, int ue, bool centralized) {
  check(rs_problem_create(sc.h, centralized ? -1 : ue, &pb.h), "problem");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relay selection planning: scenario generation, solving, simulation, comparison"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string scenario_path, out = ".";
  std::uint64_t seed = rs_default_seed();
  int threads = 1;
  app.add_option("--scenario", scenario_path, "scenario JSON file");
  app.add_option("--out", out, "output directory")->capture_default_str();
  app.add_option("--seed", seed, "master random seed")->capture_default_str();
  app.add_option("--threads", threads, "worker threads (computation runs on one thread)")->capture_default_str();

  // generate
  auto* gen = app.add_subcommand("generate", "write a Table-I scenario file");
  std::string grid = "4x4", id;
  int relays = 3, ues = 1, speed = 0, horizon = 0;
  double eps_fix = 0.7, c_th = 1000.0, gamma = 1.0;
  gen->add_option("--grid", grid, "grid size WxH")->capture_default_str();
  gen->add_option("--relays", relays, "number of relays")->capture_default_str();
  gen->add_option("--ues", ues, "number of UEs")->capture_default_str();
  gen->add_option("--eps-fix", eps_fix, "relay probability of staying put");
  gen->add_option("--speed", speed, "relay speed (grid steps per epoch)");
  gen->add_option("--horizon", horizon, "decision epochs T");
  gen->add_option("--c-th", c_th, "cumulative power budget");
  gen->add_option("--gamma", gamma, "discount factor");
  gen->add_option("--id", id, "scenario id");

  // solve
  auto* sol = app.add_subcommand("solve", "plan a policy for one UE or the centralized problem");
  SolveFlags sf;
  int ue = 0;
  bool centralized = false;
  sf.add(sol);
  sol->add_option("--ue", ue, "UE index")->capture_default_str();
  sol->add_flag("--centralized", centralized, "plan all UEs jointly");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte-Carlo evaluation of a saved policy");
  std::string policy_path;
  int runs = 100;
  bool reselect = false;
  sim->add_option("--policy", policy_path, "policy JSON file (default: <out>/policy.json)");
  sim->add_option("--runs", runs, "number of realizations")->capture_default_str();
  sim->add_option("--ue", ue, "UE index")->capture_default_str();
  sim->add_flag("--centralized", centralized, "the policy plans all UEs jointly");
  sim->add_flag("--reselect", reselect, "re-run the constrained argmax at every belief");

  // compare
  auto* cmp = app.add_subcommand("compare", "compare D2D, cellular, centralized and distributed modes");
  std::string modes = "d2d,cellular", speeds;
  SolveFlags cf;
  cf.belief_h = 1;
  cf.add(cmp);
  cmp->add_option("--modes", modes, "comma separated modes")->capture_default_str();
  cmp->add_option("--speeds", speeds, "relay speeds, e.g. 1..5 or 1,3");
  cmp->add_option("--runs", runs, "number of realizations")->capture_default_str();

  // bench
  auto* bench = app.add_subcommand("bench", "operation-count model of the solvers");
  int k_max = 10, b_ues = 10, states = 16, beliefs = 16;
  bench->add_option("--relays", k_max, "largest relay count")->capture_default_str();
  bench->add_option("--ues", b_ues, "UE count of the multi-user rows")->capture_default_str();
  bench->add_option("--states", states, "regions per relay")->capture_default_str();
  bench->add_option("--beliefs", beliefs, "belief points")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (threads < 1) throw Failure{RS_ERR_VALIDATION, "--threads: must be >= 1"};
    json man = {{"command", app.get_subcommands().front()->get_name()},
                {"scenario", scenario_path},
                {"seed", seed},
                {"threads", threads}};

    if (*gen) {
      int gx = 0, gy = 0;
      char sep = 0;
      std::stringstream gs(grid);
      if (!(gs >> gx >> sep >> gy) || (sep != 'x' && sep != 'X') || !gs.eof())
        throw Failure{RS_ERR_VALIDATION, "--grid: expected WxH"};
      Scenario sc;
      check(rs_scenario_table1(gx, gy, relays, ues, &sc.h), "generate");
      if (gen->count("--eps-fix")) check(rs_scenario_set(sc.h, "eps_fix", eps_fix), "--eps-fix");
      if (gen->count("--speed")) check(rs_scenario_set(sc.h, "speed", speed), "--speed");
      if (gen->count("--horizon")) check(rs_scenario_set(sc.h, "horizon", horizon), "--horizon");
      if (gen->count("--c-th")) check(rs_scenario_set(sc.h, "c_th", c_th), "--c-th");
      if (gen->count("--gamma")) check(rs_scenario_set(sc.h, "gamma", gamma), "--gamma");
      if (id.empty()) id = "table1-" + grid + "-k" + std::to_string(relays) + "-n" + std::to_string(ues);
      check(rs_scenario_set_id(sc.h, id.c_str()), "--id");
      fs::path dir = out_dir(out);
      fs::path file = dir / "scenario.json";
      check(rs_scenario_save(sc.h, file.c_str()), "generate");
      char* fp = nullptr;
      check(rs_scenario_fingerprint(sc.h, &fp), "fingerprint");
      man["fingerprint"] = take(fp);
      man["outputs"] = {file.string()};
      write_manifest(dir, man);
      std::cout << file.string() << "\n";
      return 0;
    }

    if (*sol) {
      Scenario sc;
      load(sc, scenario_path);
      Problem pb;
      make_problem(pb, sc, ue, centralized);
      rs_solve_options o = sf.options();
      Policy pol;
      rs_status st = rs_solve(pb.h, &o, &pol.h);
      if (st == RS_ERR_CAP)
        throw Failure{3, std::string("solve: ") + rs_last_error() +
                             " (hint: pass an explicit --belief-h such as 2, a larger --eps, or fewer relays)"};
      check(st, "solve");
      fs::path dir = out_dir(out);
      check(rs_policy_save(pol.h, (dir / "policy.json").c_str()), "save");
      char* rep = nullptr;
      check(rs_policy_report(pol.h, &rep), "report");
      std::string report = take(rep);
      write_file(dir / "report.json", report);
      char* fp = nullptr;
      check(rs_problem_fingerprint(pb.h, &fp), "fingerprint");
      man["fingerprint"] = take(fp);
      man["method"] = sf.method;
      man["solve"] = sf.to_json();
      man["ue"] = centralized ? json("centralized") : json(ue);
      man["outputs"] = {(dir / "policy.json").string(), (dir / "report.json").string()};
      write_manifest(dir, man);
      std::cout << report;
      return 0;
    }

    if (*sim) {
      Scenario sc;
      load(sc, scenario_path);
      Problem pb;
      make_problem(pb, sc, ue, centralized);
      fs::path dir = out_dir(out);
      if (policy_path.empty()) policy_path = (dir / "policy.json").string();
      Policy pol;
      check(rs_policy_load(pb.h, policy_path.c_str(), &pol.h), "policy");
      Metrics m;
      check(rs_simulate(pol.h, runs, seed, reselect, &m.h), "simulate");
      int method = 0;
      check(rs_policy_method(pol.h, &method), "policy");
      static const char* names[] = {"exact", "cpbvi", "gcpbvi", "oracle"};
      char* sid = nullptr;
      check(rs_scenario_id(sc.h, &sid), "scenario");
      char* csv = nullptr;
      check(rs_metrics_csv(m.h, take(sid).c_str(), names[method], 1, &csv), "metrics");
      std::string table = take(csv);
      write_file(dir / "metrics.csv", table);
      char* fp = nullptr;
      check(rs_problem_fingerprint(pb.h, &fp), "fingerprint");
      man["fingerprint"] = take(fp);
      man["method"] = names[method];
      man["policy"] = policy_path;
      man["runs"] = runs;
      man["reselect"] = reselect;
      man["outputs"] = {(dir / "metrics.csv").string()};
      write_manifest(dir, man);
      std::cout << table;
      return 0;
    }

    if (*cmp) {
      Scenario sc;
      load(sc, scenario_path);
      std::vector<int> sp = speeds.empty() ? std::vector<int>{} : parse_list(speeds);
      rs_solve_options o = cf.options();
      char* csv = nullptr;
      check(rs_compare(sc.h, modes.c_str(), sp.data(), static_cast<int>(sp.size()), runs, seed, &o, &csv),
            "compare");
      std::string table = take(csv);
      fs::path dir = out_dir(out);
      write_file(dir / "compare.csv", table);
      char* fp = nullptr;
      check(rs_scenario_fingerprint(sc.h, &fp), "fingerprint");
      man["fingerprint"] = take(fp);
      man["method"] = cf.method;
      man["solve"] = cf.to_json();
      man["modes"] = modes;
      man["speeds"] = sp;
      man["runs"] = runs;
      man["outputs"] = {(dir / "compare.csv").string()};
      write_manifest(dir, man);
      std::cout << table;
      return 0;
    }

    if (*bench) {
      char* csv = nullptr;
      check(rs_bench(k_max, b_ues, states, beliefs, &csv), "bench");
      std::string table = take(csv);
      fs::path dir = out_dir(out);
      write_file(dir / "bench.csv", table);
      man["outputs"] = {(dir / "bench.csv").string()};
      write_manifest(dir, man);
      std::cout << table;
      return 0;
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.msg << "\n";
    return f.code;
  }
  return 0;
}
