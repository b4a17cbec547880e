#include "bohm/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace bohm {

namespace {

using nlohmann::json;

Scenario defaults() {
  Scenario s;
  s.spec = single_node_state();
  s.name = "custom";
  return s;
}

void apply_overrides(Scenario& s, const json& j) {
  if (j.contains("name")) s.name = j.at("name").get<std::string>();
  if (j.contains("modes")) {
    s.spec.modes.clear();
    for (const auto& m : j.at("modes"))
      s.spec.modes.push_back({m.at(0).get<int>(), m.at(1).get<int>()});
  }
  if (j.contains("coefficients")) {
    s.spec.coefficients.clear();
    for (const auto& c : j.at("coefficients")) {
      if (c.is_array())
        s.spec.coefficients.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
      else
        s.spec.coefficients.emplace_back(c.get<double>(), 0.0);
    }
  }
  if (j.contains("omega1")) s.spec.params.omega1 = j.at("omega1").get<double>();
  if (j.contains("omega2")) s.spec.params.omega2 = j.at("omega2").get<double>();
  if (j.contains("t0")) s.t0 = j.at("t0").get<double>();
  if (j.contains("t1")) s.t1 = j.at("t1").get<double>();
  if (j.contains("dt")) s.dt = j.at("dt").get<double>();
  if (j.contains("region")) {
    const auto& r = j.at("region");
    s.region = {r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>(),
                r.at(3).get<double>()};
  }
  if (j.contains("grid_resolution")) s.grid_resolution = j.at("grid_resolution").get<int>();
  if (j.contains("rel_tol")) s.rel_tol = j.at("rel_tol").get<double>();
  if (j.contains("abs_tol")) s.abs_tol = j.at("abs_tol").get<double>();
  if (j.contains("loop_radius")) s.loop_radius = j.at("loop_radius").get<double>();
  if (j.contains("search_radius")) s.search_radius = j.at("search_radius").get<double>();
  if (j.contains("chaos_horizon")) s.chaos_horizon = j.at("chaos_horizon").get<double>();
  if (j.contains("chaos_threshold"))
    s.chaos_threshold = j.at("chaos_threshold").get<double>();
  if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("ics")) {
    s.ics.clear();
    for (const auto& ic : j.at("ics"))
      s.ics.push_back({ic.at(0).get<double>(), ic.at(1).get<double>()});
  }
}

}  // namespace

Scenario scenario_preset(const std::string& name) {
  Scenario s = defaults();
  s.name = name;
  if (name == "fig1") {
    s.spec = single_node_state();
    s.t0 = 0.01;
    s.t1 = 1.5;
    s.ics = {{-1.7252, -0.6045}, {-1.6504, -0.6166}, {-1.6225, -0.8510},
             {-1.6026, -1.2004}};
  } else if (name == "typical") {
    s.spec.modes = {{3, 3}, {3, 4}, {4, 5}};
    s.spec.coefficients = {1.0, 1.0, std::numbers::sqrt2 / 2.0};
    s.spec.params = {1.0, std::numbers::sqrt2 / 2.0};
    s.t0 = 0.1;
    s.t1 = 2.5;
    s.ics = {{1.409, 0.253}, {1.45, 0.01}, {1.45, 0.1},
             {1.3, 0.01},    {1.45, -0.05}, {1.25, -1.1195}};
  } else if (name == "fig13") {
    s.spec = single_node_state();
    s.t0 = 0.0;
    s.t1 = 2.0 * std::numbers::pi;
    s.ics = {{1.0707, 1.8137}};
  } else {
    throw ArgumentError("unknown preset: " + name);
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open scenario file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("scenario parse error: ") + e.what());
  }
  Scenario s = defaults();
  try {
    if (j.contains("preset")) s = scenario_preset(j.at("preset").get<std::string>());
    apply_overrides(s, j);
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("scenario field error: ") + e.what());
  }
  s.spec.validate();
  if (!(s.t1 > s.t0)) throw ArgumentError("scenario: need t1 > t0");
  if (!(s.dt > 0)) throw ArgumentError("scenario: need dt > 0");
  return s;
}

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["modes"] = json::array();
  for (const auto& m : s.spec.modes) j["modes"].push_back({m.m, m.n});
  j["coefficients"] = json::array();
  for (const auto& c : s.spec.coefficients)
    j["coefficients"].push_back({c.real(), c.imag()});
  j["omega1"] = s.spec.params.omega1;
  j["omega2"] = s.spec.params.omega2;
  j["t0"] = s.t0;
  j["t1"] = s.t1;
  j["dt"] = s.dt;
  j["region"] = {s.region.xmin, s.region.xmax, s.region.ymin, s.region.ymax};
  j["grid_resolution"] = s.grid_resolution;
  j["rel_tol"] = s.rel_tol;
  j["abs_tol"] = s.abs_tol;
  j["loop_radius"] = s.loop_radius;
  j["search_radius"] = s.search_radius;
  j["chaos_horizon"] = s.chaos_horizon;
  j["chaos_threshold"] = s.chaos_threshold;
  j["seed"] = s.seed;
  j["ics"] = json::array();
  for (const auto& ic : s.ics) j["ics"].push_back({ic.x, ic.y});
  return j.dump(2) + "\n";
}

namespace {

void print_num(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  os << buf;
}

}  // namespace

void write_field_csv(std::ostream& os, const SuperpositionSpec& spec, double t,
                     const Rect& region, int resolution) {
  os << "x,y,re_psi,im_psi,vx,vy,Q,Vtot\n";
  const int n = resolution;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double x = region.xmin + (region.xmax - region.xmin) * i / (n - 1);
      const double y = region.ymin + (region.ymax - region.ymin) * j / (n - 1);
      const FieldJet jet = eval_jet(spec, x, y, t);
      double vx = 0, vy = 0, q = 0, vtot = 0;
      bool ok = true;
      try {
        const Vec2 v = velocity(spec, x, y, t);
        const PotentialSample ps = potentials(spec, x, y, t);
        vx = v.x;
        vy = v.y;
        q = ps.Q;
        vtot = ps.Vtot;
      } catch (const NodeSingularity&) {
        ok = false;  // grid point on a node: velocity/Q undefined
      }
      print_num(os, x);
      os << ',';
      print_num(os, y);
      os << ',';
      print_num(os, jet.psi.real());
      os << ',';
      print_num(os, jet.psi.imag());
      os << ',';
      if (ok) {
        print_num(os, vx);
        os << ',';
        print_num(os, vy);
        os << ',';
        print_num(os, q);
        os << ',';
        print_num(os, vtot);
      } else {
        os << "nan,nan,nan,nan";
      }
      os << '\n';
    }
}

void write_nodes_csv(std::ostream& os, const std::vector<NodeTrack>& tracks) {
  os << "track_id,kind,t,x,y,status\n";
  for (const auto& tr : tracks)
    for (const auto& s : tr.samples) {
      os << tr.id << ',' << to_string(tr.kind) << ',';
      print_num(os, s.t);
      os << ',';
      print_num(os, s.x);
      os << ',';
      print_num(os, s.y);
      os << ',' << to_string(s.status) << '\n';
    }
}

void write_events_csv(std::ostream& os, const std::vector<NodeTrack>& tracks) {
  os << "track_id,t,event_kind,partner_fixed_id\n";
  for (const auto& tr : tracks)
    for (const auto& ev : tr.events) {
      os << tr.id << ',';
      print_num(os, ev.t);
      os << ',' << to_string(ev.kind) << ',' << ev.partner_fixed_id << '\n';
    }
}

void write_xpoints_csv(std::ostream& os, const std::vector<XPointRecord>& xps) {
  os << "node_id,t,x,y,eig1,eig2\n";
  for (const auto& xp : xps) {
    os << xp.frame_node_id << ',';
    print_num(os, xp.t);
    os << ',';
    print_num(os, xp.position.x);
    os << ',';
    print_num(os, xp.position.y);
    os << ',';
    print_num(os, xp.eigen.lambda1);
    os << ',';
    print_num(os, xp.eigen.lambda2);
    os << '\n';
  }
}

void write_asymptotic_csv(std::ostream& os, const std::vector<AsymptoticCurve>& curves) {
  os << "branch,s,u,v\n";
  for (const auto& c : curves)
    for (const auto& s : c.samples) {
      os << to_string(c.branch) << ',';
      print_num(os, s.s);
      os << ',';
      print_num(os, s.u);
      os << ',';
      print_num(os, s.v);
      os << '\n';
    }
}

void write_traj_csv(std::ostream& os, const std::vector<Trajectory>& trajs) {
  os << "traj_id,t,x,y\n";
  for (size_t i = 0; i < trajs.size(); ++i)
    for (const auto& s : trajs[i].samples) {
      os << i << ',';
      print_num(os, s.t);
      os << ',';
      print_num(os, s.x);
      os << ',';
      print_num(os, s.y);
      os << '\n';
    }
}

void write_loops_csv(std::ostream& os, const std::vector<Trajectory>& trajs) {
  os << "traj_id,node_id,t_start,t_end,winding\n";
  for (size_t i = 0; i < trajs.size(); ++i)
    for (const auto& l : trajs[i].loops) {
      os << i << ',' << l.node_id << ',';
      print_num(os, l.t_start);
      os << ',';
      print_num(os, l.t_end);
      os << ',';
      print_num(os, l.winding);
      os << '\n';
    }
}

void write_chaos_csv(std::ostream& os, const std::vector<ChaosReport>& reports) {
  os << "ic_x,ic_y,t0,horizon,stretching_number,classification\n";
  for (const auto& r : reports) {
    print_num(os, r.ic.x);
    os << ',';
    print_num(os, r.ic.y);
    os << ',';
    print_num(os, r.t0);
    os << ',';
    print_num(os, r.horizon);
    os << ',';
    print_num(os, r.stretching_number);
    os << ',' << to_string(r.classification) << '\n';
  }
}

}  // namespace bohm
