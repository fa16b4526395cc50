#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <string>

#include "doctest.h"
#include "relaysel/relaysel.h"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  rs_string_free(s);
  return out;
}

const char* kTwoRelay = R"({"id":"two-relay","grid_x":1,"grid_y":1,"r_max":500,"c_max":250,"c_th":6,"horizon":1,
  "gamma":1,"relays":[{"eps_fix":1,"initial_state":[1,1],"reward_table":[10],"cost_table":[5]},
  {"eps_fix":1,"initial_state":[1,1],"reward_table":[6],"cost_table":[2]}],
  "ues":[{"position":[1,1]}],"direct_link":{"enabled":false}})";

}  // namespace

TEST_CASE("version and defaults") {
  CHECK(std::strlen(rs_version()) > 0);
  CHECK(rs_default_seed() == 20240531u);
  rs_solve_options o;
  rs_solve_options_default(&o);
  CHECK(o.method == RS_GCPBVI);
  int m = -1;
  CHECK(rs_method_parse("cpbvi", &m) == RS_OK);
  CHECK(m == RS_CPBVI);
  CHECK(rs_method_parse("milp", &m) == RS_ERR_VALIDATION);
  CHECK(std::strlen(rs_last_error()) > 0);
}

TEST_CASE("scenario handles") {
  rs_scenario* sc = nullptr;
  REQUIRE(rs_scenario_table1(4, 4, 3, 1, &sc) == RS_OK);
  int k = 0, n = 0, s = 0;
  CHECK(rs_scenario_info(sc, &k, &n, &s) == RS_OK);
  CHECK(k == 3);
  CHECK(n == 1);
  CHECK(s == 16);
  CHECK(rs_scenario_set(sc, "eps_fix", 1.2) == RS_ERR_VALIDATION);
  CHECK(rs_scenario_set(sc, "mystery", 1.0) == RS_ERR_VALIDATION);
  CHECK(rs_scenario_set(sc, "horizon", 3) == RS_OK);
  char* json = nullptr;
  REQUIRE(rs_scenario_json(sc, &json) == RS_OK);
  std::string text = take(json);
  rs_scenario* back = nullptr;
  REQUIRE(rs_scenario_parse(text.c_str(), &back) == RS_OK);
  char *f1 = nullptr, *f2 = nullptr;
  rs_scenario_fingerprint(sc, &f1);
  rs_scenario_fingerprint(back, &f2);
  CHECK(take(f1) == take(f2));
  rs_scenario* bad = nullptr;
  CHECK(rs_scenario_parse("{not json", &bad) == RS_ERR_VALIDATION);
  CHECK(bad == nullptr);
  CHECK(rs_scenario_load("/nonexistent/x.json", &bad) == RS_ERR_IO);
  CHECK(rs_scenario_table1(4, 4, 0, 1, &bad) == RS_ERR_VALIDATION);
  rs_scenario_free(sc);
  rs_scenario_free(back);
  rs_scenario_free(nullptr);
}

TEST_CASE("solve and simulate through the C API") {
  rs_scenario* sc = nullptr;
  REQUIRE(rs_scenario_parse(kTwoRelay, &sc) == RS_OK);
  rs_problem* pb = nullptr;
  REQUIRE(rs_problem_create(sc, 0, &pb) == RS_OK);
  rs_solve_options o;
  rs_solve_options_default(&o);
  o.belief_h = 1;
  rs_policy* g = nullptr;
  REQUIRE(rs_solve(pb, &o, &g) == RS_OK);
  double r = 0, c = 0;
  rs_policy_value(g, &r, &c);
  CHECK(r == doctest::Approx(6.0));
  o.method = RS_CPBVI;
  rs_policy* p = nullptr;
  REQUIRE(rs_solve(pb, &o, &p) == RS_OK);
  rs_policy_value(p, &r, &c);
  CHECK(r == doctest::Approx(10.0));
  char* rep = nullptr;
  REQUIRE(rs_policy_report(p, &rep) == RS_OK);
  CHECK(take(rep).find("\"method\"") != std::string::npos);

  rs_metrics *m1 = nullptr, *m2 = nullptr;
  REQUIRE(rs_simulate(p, 20, 5, 0, &m1) == RS_OK);
  REQUIRE(rs_simulate(p, 20, 5, 0, &m2) == RS_OK);
  char *c1 = nullptr, *c2 = nullptr;
  rs_metrics_csv(m1, "two-relay", "cpbvi", 1, &c1);
  rs_metrics_csv(m2, "two-relay", "cpbvi", 1, &c2);
  std::string s1 = take(c1);
  CHECK(s1 == take(c2));
  CHECK(s1.rfind("scenario_id,method,epoch", 0) == 0);
  double ar, ac, sr, scost, ee;
  rs_metrics_summary(m1, &ar, &ac, &sr, &scost, &ee);
  CHECK(ar == doctest::Approx(10.0));
  CHECK(ac == doctest::Approx(5.0));
  CHECK(ee == doctest::Approx(2.0));

  CHECK(rs_policy_save(p, "/nonexistent/dir/policy.json") == RS_ERR_IO);
  CHECK(rs_solve(nullptr, &o, &p) == RS_ERR_VALIDATION);
  rs_metrics_free(m1);
  rs_metrics_free(m2);
  rs_policy_free(g);
  rs_policy_free(p);
  rs_problem_free(pb);
  rs_scenario_free(sc);
}

TEST_CASE("oracle over its caps reports a cap error") {
  rs_scenario* sc = nullptr;
  REQUIRE(rs_scenario_table1(4, 4, 3, 1, &sc) == RS_OK);
  rs_problem* pb = nullptr;
  REQUIRE(rs_problem_create(sc, 0, &pb) == RS_OK);
  rs_solve_options o;
  rs_solve_options_default(&o);
  o.method = RS_ORACLE;
  rs_policy* p = nullptr;
  CHECK(rs_solve(pb, &o, &p) == RS_ERR_CAP);
  CHECK(p == nullptr);
  rs_problem_free(pb);
  rs_scenario_free(sc);
}

TEST_CASE("compare and bench tables") {
  rs_scenario* sc = nullptr;
  REQUIRE(rs_scenario_table1(4, 4, 2, 1, &sc) == RS_OK);
  rs_solve_options o;
  rs_solve_options_default(&o);
  o.belief_h = 1;
  int speeds[] = {1};
  char* csv = nullptr;
  REQUIRE(rs_compare(sc, "centralized,distributed", speeds, 1, 10, 3, &o, &csv) == RS_OK);
  std::string t = take(csv);
  auto first = t.find('\n');
  std::string a = t.substr(first + 1, t.find('\n', first + 1) - first - 1);
  std::string b = t.substr(t.find('\n', first + 1) + 1);
  // N=1: both modes are the single-UE pipeline
  auto field = [](const std::string& row, int i) {
    std::size_t p = 0;
    for (int k = 0; k < i; ++k) p = row.find(',', p) + 1;
    return row.substr(p, row.find(',', p) - p);
  };
  CHECK(field(a, 2) == "centralized");
  CHECK(field(b, 2) == "distributed");
  CHECK(field(a, 3) == field(b, 3));
  REQUIRE(rs_bench(4, 2, 16, 16, &csv) == RS_OK);
  std::string bench = take(csv);
  CHECK(bench.rfind("relays,ues,", 0) == 0);
  CHECK(std::count(bench.begin(), bench.end(), '\n') == 5);
  rs_scenario_free(sc);
}
