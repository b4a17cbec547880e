#pragma once

#include "bohm/diagnostics.hpp"
#include "bohm/dynamics.hpp"
#include "bohm/nodes.hpp"
#include "bohm/xpoints.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace bohm {

/// Fully resolved run configuration. Loading from JSON starts from a preset
/// (or built-in defaults) and applies overrides; the resolved form is echoed
/// to the output directory so no defaults stay implicit.
struct Scenario {
  std::string name = "custom";
  SuperpositionSpec spec;
  double t0 = 0.1, t1 = 2.5;
  double dt = 0.01;            // sampling step for tracks / trajectories
  Rect region{-5, 5, -5, 5};   // scan + field frame
  int grid_resolution = 201;   // field subcommand
  double rel_tol = 1e-10, abs_tol = 1e-12;
  double loop_radius = 0.6;
  double search_radius = 1.0;  // X-point search
  double chaos_horizon = 200.0;
  double chaos_threshold = 0.05;
  std::vector<Vec2> ics;
  std::uint64_t seed = 12345;
};

/// Built-in presets: "fig1" (single-node state, Fig.-1 initial conditions),
/// "typical" (the 3-mode incommensurable state), "fig13" (periodic orbit).
Scenario scenario_preset(const std::string& name);

/// Parse a scenario JSON file. A "preset" key selects the base; any other
/// key overrides it. Throws ArgumentError on malformed input.
Scenario load_scenario(const std::string& path);

/// Resolved-config echo, byte-stable for identical scenarios.
std::string scenario_to_json(const Scenario& s);

// CSV writers (fixed column orders).
void write_field_csv(std::ostream& os, const SuperpositionSpec& spec, double t,
                     const Rect& region, int resolution);
void write_nodes_csv(std::ostream& os, const std::vector<NodeTrack>& tracks);
void write_events_csv(std::ostream& os, const std::vector<NodeTrack>& tracks);
void write_xpoints_csv(std::ostream& os, const std::vector<XPointRecord>& xps);
void write_asymptotic_csv(std::ostream& os, const std::vector<AsymptoticCurve>& curves);
void write_traj_csv(std::ostream& os, const std::vector<Trajectory>& trajs);
void write_loops_csv(std::ostream& os, const std::vector<Trajectory>& trajs);
void write_chaos_csv(std::ostream& os, const std::vector<ChaosReport>& reports);

}  // namespace bohm
