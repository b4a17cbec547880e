#pragma once

#include "bohm/nodes.hpp"
#include "bohm/wavefield.hpp"

#include <vector>

namespace bohm {

struct TrajSample {
  double t = 0, x = 0, y = 0;
};

struct TrajStats {
  long steps = 0;
  long rejected_steps = 0;
  double min_node_distance = 1e300;
};

enum class TrajStatus { Completed, StoppedAtNode };

struct LoopAnnotation {
  int node_id = -1;
  double t_start = 0, t_end = 0;
  double winding = 0;  // signed revolutions (accumulated angle / 2 pi)
};

struct Trajectory {
  Vec2 ic;
  double t0 = 0;
  std::vector<TrajSample> samples;
  TrajStats stats;
  TrajStatus status = TrajStatus::Completed;
  std::vector<LoopAnnotation> loops;

  Vec2 endpoint() const { return {samples.back().x, samples.back().y}; }
};

struct IntegrateOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double sample_dt = 0.01;          // <= 0: record accepted steps only
  double node_cap_factor = 0.05;    // h <= factor * d_node / speed
  double psi_floor = kPsiFloor;
  const std::vector<NodeTrack>* node_tracks = nullptr;  // optional distance source
};

/// Adaptive Dormand-Prince 5(4) integration of the guidance law. When the
/// step controller underflows (trajectory ran into a node) the last good
/// state is kept and status is StoppedAtNode.
Trajectory integrate(const SuperpositionSpec& spec, Vec2 ic, double t0, double t_end,
                     const IntegrateOptions& opts = {});

/// Signed winding per maximal interval in which the particle stays within
/// loop_radius of the (possibly moving) node.
std::vector<LoopAnnotation> count_loops(const Trajectory& traj, const NodeTrack& track,
                                        double loop_radius = 0.6);

}  // namespace bohm
