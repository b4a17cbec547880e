#include <doctest.h>

#include "bohm/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace bohm;

namespace {

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& content) {
    path = std::string(std::tmpnam(nullptr)) + ".json";
    std::ofstream(path) << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("presets resolve to the documented states") {
  const Scenario fig1 = scenario_preset("fig1");
  CHECK(fig1.spec.modes.size() == 3);
  CHECK(fig1.spec.params.omega1 == 1.0);
  CHECK(fig1.spec.params.omega2 == 1.0);
  CHECK(fig1.ics.size() == 4);

  const Scenario typ = scenario_preset("typical");
  REQUIRE(typ.spec.modes.size() == 3);
  CHECK(typ.spec.modes[2].m == 4);
  CHECK(typ.spec.modes[2].n == 5);
  CHECK(typ.spec.params.omega2 == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-15));
  CHECK(typ.t0 == 0.1);
  CHECK(typ.t1 == 2.5);

  const Scenario f13 = scenario_preset("fig13");
  REQUIRE(f13.ics.size() == 1);
  CHECK(f13.ics[0].x == doctest::Approx(1.0707));

  CHECK_THROWS_AS(scenario_preset("nope"), ArgumentError);
}

TEST_CASE("scenario JSON round-trips byte-identically") {
  const Scenario s = scenario_preset("typical");
  const std::string j1 = scenario_to_json(s);
  TempFile f(j1);
  const Scenario back = load_scenario(f.path);
  const std::string j2 = scenario_to_json(back);
  CHECK(j1 == j2);
}

TEST_CASE("overrides apply on top of a preset") {
  TempFile f(R"({"preset": "typical", "t1": 1.0, "seed": 42,
                 "ics": [[0.5, 0.5]]})");
  const Scenario s = load_scenario(f.path);
  CHECK(s.name == "typical");
  CHECK(s.t1 == 1.0);
  CHECK(s.seed == 42);
  REQUIRE(s.ics.size() == 1);
  CHECK(s.ics[0].x == 0.5);
  // Unchanged fields keep the preset values.
  CHECK(s.spec.modes.size() == 3);
  CHECK(s.t0 == 0.1);
}

TEST_CASE("malformed scenarios are rejected as configuration errors") {
  CHECK_THROWS_AS(load_scenario("/does/not/exist.json"), ArgumentError);
  TempFile bad_json("{not json");
  CHECK_THROWS_AS(load_scenario(bad_json.path), ArgumentError);
  TempFile bad_range(R"({"preset": "typical", "t1": 0.0})");
  CHECK_THROWS_AS(load_scenario(bad_range.path), ArgumentError);
  TempFile bad_modes(R"({"preset": "typical", "modes": [[1, 0]],
                         "coefficients": [1.0, 2.0]})");
  CHECK_THROWS_AS(load_scenario(bad_modes.path), ArgumentError);
}

TEST_CASE("CSV writers emit the fixed headers") {
  const Scenario s = scenario_preset("typical");
  {
    std::ostringstream os;
    write_field_csv(os, s.spec, 0.1, {-1, 1, -1, 1}, 3);
    CHECK(first_line(os.str()) == "x,y,re_psi,im_psi,vx,vy,Q,Vtot");
    // 3x3 grid plus header.
    int lines = 0;
    for (char c : os.str()) lines += (c == '\n');
    CHECK(lines == 10);
  }
  {
    std::ostringstream os;
    write_nodes_csv(os, {});
    CHECK(first_line(os.str()) == "track_id,kind,t,x,y,status");
  }
  {
    std::ostringstream os;
    write_events_csv(os, {});
    CHECK(first_line(os.str()) == "track_id,t,event_kind,partner_fixed_id");
  }
  {
    std::ostringstream os;
    write_xpoints_csv(os, {});
    CHECK(first_line(os.str()) == "node_id,t,x,y,eig1,eig2");
  }
  {
    std::ostringstream os;
    write_asymptotic_csv(os, {});
    CHECK(first_line(os.str()) == "branch,s,u,v");
  }
  {
    std::ostringstream os;
    write_traj_csv(os, {});
    CHECK(first_line(os.str()) == "traj_id,t,x,y");
  }
  {
    std::ostringstream os;
    write_loops_csv(os, {});
    CHECK(first_line(os.str()) == "traj_id,node_id,t_start,t_end,winding");
  }
  {
    std::ostringstream os;
    write_chaos_csv(os, {});
    CHECK(first_line(os.str()) ==
          "ic_x,ic_y,t0,horizon,stretching_number,classification");
  }
}

TEST_CASE("field CSV marks nodal grid points with nan") {
  const Scenario s = scenario_preset("typical");
  std::ostringstream os;
  // 3x3 grid over [-1,1]^2 includes the fixed node at the origin.
  write_field_csv(os, s.spec, 0.1, {-1, 1, -1, 1}, 3);
  CHECK(os.str().find("nan,nan,nan,nan") != std::string::npos);
}
