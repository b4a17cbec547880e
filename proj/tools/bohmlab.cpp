// Batch front-end: scenario in, CSVs out. One subcommand per computation.

#include "bohm/scenario.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

namespace fs = std::filesystem;
using namespace bohm;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Cli {
  std::string scenario_file;
  std::string preset;
  std::string out_dir;
  int threads = 0;  // 0: hardware default
  std::uint64_t seed = 0;
  bool seed_set = false;
};

Scenario resolve_scenario(const Cli& cli) {
  Scenario s;
  if (!cli.scenario_file.empty())
    s = load_scenario(cli.scenario_file);
  else if (!cli.preset.empty())
    s = scenario_preset(cli.preset);
  else
    throw ArgumentError("either --scenario or --preset is required");
  if (cli.seed_set) s.seed = cli.seed;
  return s;
}

int thread_count(const Cli& cli) {
  if (cli.threads > 0) return cli.threads;
  if (const char* env = std::getenv("BOHMLAB_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  std::ofstream f(dir / name);
  if (!f) throw ArgumentError("cannot write " + (dir / name).string());
  return f;
}

void write_common(const fs::path& dir, const Scenario& s, const std::string& sub,
                  double wall_s, int threads) {
  open_out(dir, "resolved-config.json") << scenario_to_json(s);
  nlohmann::json m;
  m["subcommand"] = sub;
  m["scenario"] = s.name;
  m["version"] = kVersion;
  m["wall_time_s"] = wall_s;
  m["threads"] = threads;
  m["seed"] = s.seed;
  open_out(dir, "manifest.json") << m.dump(2) << "\n";
}

// Chunked parallel map with deterministic output order.
template <class Fn>
void parallel_for(int n, int threads, Fn fn) {
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

int run_nodes(const Scenario& s, const fs::path& dir) {
  TrackOptions topts;
  const auto tracks = track_nodes(s.spec, s.t0, s.t1, s.dt, topts);
  auto nodes = open_out(dir, "nodes.csv");
  write_nodes_csv(nodes, tracks);
  auto events = open_out(dir, "events.csv");
  write_events_csv(events, tracks);
  return 0;
}

int run_xpoints(const Scenario& s, const fs::path& dir) {
  TrackOptions topts;
  const auto tracks = track_nodes(s.spec, s.t0, std::min(s.t1, s.t0 + 2 * s.dt), s.dt, topts);
  XPointOptions xopts;
  xopts.search_radius = s.search_radius;
  std::vector<XPointRecord> all;
  for (const auto& tr : tracks) {
    const auto pos = tr.position_at(s.t0);
    if (!pos) continue;
    try {
      const auto xps = find_xpoints(s.spec, *pos, tr.kind, tr.id, s.t0, xopts);
      all.insert(all.end(), xps.begin(), xps.end());
    } catch (const NoXPointFound&) {
      // transient; this frame simply contributes nothing
    } catch (const NodeSingularity&) {
    }
  }
  auto xcsv = open_out(dir, "xpoints.csv");
  write_xpoints_csv(xcsv, all);
  if (!all.empty()) {
    const auto curves = asymptotic_curves(s.spec, all.front(), s.t0, 5.0, 1e-4, xopts);
    auto acsv = open_out(dir, "asymptotic.csv");
    write_asymptotic_csv(acsv, curves);
  }
  return 0;
}

int run_traj(const Scenario& s, const fs::path& dir, int threads) {
  std::vector<NodeTrack> tracks;
  try {
    tracks = track_nodes(s.spec, s.t0, s.t1, s.dt);
  } catch (const ArgumentError&) {
    // not an analytically trackable spec; loops are skipped
  } catch (const DegenerateTime&) {
    // nodal equations degenerate at t0 (e.g. t0 = 0); skip loop annotation
  }
  IntegrateOptions iopts;
  iopts.rel_tol = s.rel_tol;
  iopts.abs_tol = s.abs_tol;
  iopts.sample_dt = s.dt;
  if (!tracks.empty()) iopts.node_tracks = &tracks;
  std::vector<Trajectory> trajs(s.ics.size());
  parallel_for(int(s.ics.size()), threads, [&](int i) {
    trajs[i] = integrate(s.spec, s.ics[i], s.t0, s.t1, iopts);
    for (const auto& tr : tracks)
      for (auto& l : count_loops(trajs[i], tr, s.loop_radius)) trajs[i].loops.push_back(l);
  });
  auto tcsv = open_out(dir, "traj.csv");
  write_traj_csv(tcsv, trajs);
  auto lcsv = open_out(dir, "loops.csv");
  write_loops_csv(lcsv, trajs);
  return 0;
}

int run_field(const Scenario& s, const fs::path& dir) {
  auto f = open_out(dir, "field.csv");
  write_field_csv(f, s.spec, s.t0, s.region, s.grid_resolution);
  return 0;
}

int run_chaos(const Scenario& s, const fs::path& dir, int threads) {
  ChaosOptions copts;
  copts.chaos_threshold = s.chaos_threshold;
  copts.seed = s.seed;
  std::vector<ChaosReport> reports(s.ics.size());
  parallel_for(int(s.ics.size()), threads, [&](int i) {
    reports[i] = stretching_number(s.spec, s.ics[i], s.t0, s.chaos_horizon, copts);
  });
  auto ccsv = open_out(dir, "chaos.csv");
  write_chaos_csv(ccsv, reports);
  return 0;
}

int run_oracle(const Scenario& s, const fs::path& dir) {
  const auto scanned = grid_scan_nodes(s.spec, s.t0, s.region, 300);
  std::vector<Vec2> analytic;
  for (const auto& n : fixed_nodes(s.spec)) analytic.push_back(n.pos());
  for (const auto& n : solve_moving_nodes(s.spec, s.t0)) analytic.push_back(n.pos());
  std::erase_if(analytic, [&](Vec2 p) { return !s.region.contains(p); });
  auto csv = open_out(dir, "oracle.csv");
  csv << "method,x,y\n";
  for (const auto& p : scanned) csv << "scan," << p.x << ',' << p.y << '\n';
  for (const auto& p : analytic) csv << "analytic," << p.x << ',' << p.y << '\n';
  double hausdorff = 0;
  auto one_sided = [](const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    double worst = 0;
    for (const auto& p : a) {
      double best = 1e300;
      for (const auto& q : b) best = std::min(best, dist(p, q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  hausdorff = std::max(one_sided(scanned, analytic), one_sided(analytic, scanned));
  nlohmann::json j;
  j["hausdorff"] = hausdorff;
  j["scan_count"] = scanned.size();
  j["analytic_count"] = analytic.size();
  open_out(dir, "oracle-summary.json") << j.dump(2) << "\n";
  std::cout << "hausdorff=" << hausdorff << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bohmlab: nodal dynamics, X-points and Bohmian trajectories"};
  app.require_subcommand(1);
  Cli cli;
  app.add_option("--scenario", cli.scenario_file, "scenario JSON file");
  app.add_option("--preset", cli.preset, "built-in preset: fig1 | typical | fig13");
  app.add_option("--out", cli.out_dir, "output directory")->required();
  app.add_option("--threads", cli.threads, "worker threads (default: hardware)");
  app.add_option("--seed", cli.seed, "override scenario seed")
      ->each([&](const std::string&) { cli.seed_set = true; });
  const char* subs[] = {"nodes", "xpoints", "traj", "field", "chaos", "oracle"};
  // Global options may appear after the subcommand name too.
  for (const char* name : subs) app.add_subcommand(name)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  const std::string sub = app.get_subcommands().front()->get_name();

  Scenario scen;
  fs::path dir;
  try {
    scen = resolve_scenario(cli);
    dir = cli.out_dir;
    fs::create_directories(dir);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }

  const int threads = thread_count(cli);
  const auto start = std::chrono::steady_clock::now();
  int rc = 0;
  try {
    if (sub == "nodes") rc = run_nodes(scen, dir);
    else if (sub == "xpoints") rc = run_xpoints(scen, dir);
    else if (sub == "traj") rc = run_traj(scen, dir, threads);
    else if (sub == "field") rc = run_field(scen, dir);
    else if (sub == "chaos") rc = run_chaos(scen, dir, threads);
    else if (sub == "oracle") rc = run_oracle(scen, dir);
  } catch (const ArgumentError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    rc = 2;  // partial outputs stay in place
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  try {
    write_common(dir, scen, sub, wall, threads);
  } catch (const std::exception& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return rc == 0 ? 1 : rc;
  }
  return rc;
}
