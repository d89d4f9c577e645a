#include "doctest.h"
#include "wkbnls/cases.hpp"
#include "wkbnls/config.hpp"
#include "wkbnls/criteria.hpp"
#include "wkbnls/sweep.hpp"

#include <json.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

using namespace wkbnls;
using nlohmann::json;

namespace {

std::string message_of(const std::string& text) {
  std::istringstream in(text);
  try {
    sweep_config_from(parse_key_values(in, {"case", "m", "s", "eps_list", "t_end", "cascade_dt", "cfl_factor", "K",
                                            "audit", "threads"}));
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return "";
}

SweepConfig constant_config() {
  SweepConfig c;
  c.case_name = "constant";
  c.m = 1;
  c.t_end = 0.2;
  c.eps_list = {0.2, 0.1, 0.05};
  return c;
}

}  // namespace

TEST_CASE("config parsing") {
  std::istringstream in(
      "# sweep\n"
      "case = quintic-vacuum\n"
      "m = 1   # order\n"
      "eps_list = 0.2, 0.1, 0.05\n"
      "\n"
      "audit = true\n"
      "threads = 3\n");
  SweepConfig c = sweep_config_from(parse_key_values(in, {"case", "m", "eps_list", "audit", "threads"}));
  CHECK(c.case_name == "quintic-vacuum");
  CHECK(c.m == 1);
  CHECK(c.eps_list == std::vector<double>{0.2, 0.1, 0.05});
  CHECK(c.audit);
  CHECK(c.threads == 3);
  CHECK(c.s == 1);
}

TEST_CASE("config errors name the offending line") {
  CHECK(message_of("m = 1\nbogus = 2\n").find("line 2") != std::string::npos);
  CHECK(message_of("m = 1\nbogus = 2\n").find("bogus") != std::string::npos);
  CHECK(message_of("m = 1\nm = 2\n").find("repeated") != std::string::npos);
  CHECK(message_of("case cubic-bump\n").find("line 1") != std::string::npos);
  CHECK(message_of("m = one\n").find("'m'") != std::string::npos);
  CHECK(message_of("m = 1.5\n").find("integer") != std::string::npos);
  CHECK(message_of("audit = maybe\n").find("true or false") != std::string::npos);
  CHECK_THROWS_AS(parse_double_list("0.1, x"), std::invalid_argument);
  CHECK_THROWS_AS(load_sweep_config("/nonexistent/sweep.cfg"), std::runtime_error);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 2.5e-17, -123456.789, 0.0}) CHECK(std::stod(format_number(v)) == v);
  CHECK(format_number(0.1) == "0.10000000000000001");
}

TEST_CASE("empty sweep writes only the header") {
  SweepResult r;
  std::ostringstream os;
  write_csv(os, r);
  CHECK(os.str() == "epsilon,m,s,err_hs,err_w1inf,res_a,res_phi,res_nls,n_s_eps_max\n");
}

TEST_CASE("shipped cases") {
  for (const auto& name : case_names()) {
    CaseSpec c = make_case(name);
    CHECK(c.name == name);
    auto data = c.initial(2);
    REQUIRE(data.size() == 2);
    CHECK(data[0].a.allFinite());
    CHECK(data[0].phi.allFinite());
    // the compact bump is smooth but not analytic, so its tail sits near 5e-10
    CHECK(spectral_tail_ratio(c.grid(), data[0].a, Parity::Even) <= 1e-8);
  }
  CaseSpec wall = make_case("gp-wall");
  CHECK(wall.domain == Domain::HalfLine);
  CHECK_FALSE(wall.tails);
  CHECK(wall.expansion_data(2).size() == 3);
  CHECK(make_case("cubic-bump").expansion_data(2).size() == 4);

  RealField x = RealField::LinSpaced(5, -1.0, 1.0);
  RealField b = compact_bump(x);
  CHECK(b[0] == 0.0);
  CHECK(b[2] == doctest::Approx(1.0));
  CHECK(b[4] == 0.0);
}

TEST_CASE("time horizons of the shipped cases") {
  for (const auto& name : case_names()) {
    HorizonCheck h = check_horizon(make_case(name));
    INFO(name << ": " << h.message);
    CHECK(h.ok);
  }
}

TEST_CASE("constant case sweep is degenerate") {
  SweepResult r = run_sweep(make_case("constant"), constant_config());
  CHECK(r.degenerate);
  REQUIRE(r.rows.size() == 3);
  for (const auto& row : r.rows) {
    CHECK(row.ok);
    CHECK(row.err_hs <= kNoiseFloor);
    CHECK(row.mass_drift <= 1e-13);
  }
  CHECK(r.rows.front().epsilon > r.rows.back().epsilon);
}

TEST_CASE("sweep input validation") {
  SweepConfig c = constant_config();
  c.eps_list = {0.1, 0.2, 0.05};
  CHECK_THROWS_AS(run_sweep(make_case("constant"), c), std::invalid_argument);
  c.eps_list = {0.2, 0.1};
  CHECK_THROWS_AS(run_sweep(make_case("constant"), c), std::invalid_argument);
  CHECK_THROWS_AS(run_sweep(make_case("gp-wall"), constant_config()), std::invalid_argument);
}

TEST_CASE("sweep output is reproducible and parses back") {
  SweepConfig c;
  c.case_name = "cubic-bump";
  c.t_end = 0.2;
  c.eps_list = {0.2, 0.1, 0.05};
  c.threads = 3;
  SweepResult a = run_sweep(make_case("cubic-bump"), c);
  c.threads = 1;
  SweepResult b = run_sweep(make_case("cubic-bump"), c);
  std::ostringstream ca, cb;
  write_csv(ca, a);
  write_csv(cb, b);
  CHECK(ca.str() == cb.str());
  CHECK(to_json(a) == to_json(b));
  CHECK(check_determinism(a, b).pass);

  json j = json::parse(to_json(a));
  CHECK(j.dump() == json::parse(j.dump()).dump());
  REQUIRE(j["rows"].size() == 3);
  CHECK(j["rows"][0]["epsilon"].get<double>() == 0.2);
  CHECK(j["rows"][1]["err_hs"].get<double>() == a.rows[1].err_hs);

  std::istringstream lines(ca.str());
  std::string header, first;
  std::getline(lines, header);
  std::getline(lines, first);
  CHECK(header == "epsilon,m,s,err_hs,err_w1inf,res_a,res_phi,res_nls,n_s_eps_max");
  CHECK(first.rfind("0.20000000000000001,0,1,", 0) == 0);
}

TEST_CASE("criterion report line") {
  CriterionReport r{4, "plane-wave-oracle"};
  r.pass = true;
  r.add("max_error", 5e-14);
  r.note = "dt = 0.05 eps";
  std::string line = r.line();
  CHECK(line.rfind("PASS [4] plane-wave-oracle:", 0) == 0);
  CHECK(line.find("max_error=5e-14") != std::string::npos);
  r.pass = false;
  CHECK(r.line().rfind("FAIL [4]", 0) == 0);
}
