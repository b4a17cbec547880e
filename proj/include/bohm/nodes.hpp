#pragma once

#include "bohm/geometry.hpp"
#include "bohm/wavefield.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bohm {

enum class NodeKind { Fixed, Moving };
enum class NodeStatus { Active, Escaped, Collided };

struct NodeRecord {
  int id = -1;
  NodeKind kind = NodeKind::Moving;
  double x = 0, y = 0;
  double t = 0;
  NodeStatus status = NodeStatus::Active;
  Vec2 pos() const { return {x, y}; }
};

enum class StructureTag {
  TwoEqualM,
  TwoEqualN,
  ThreeEqualM,
  ThreeEqualN,
  AllDistinctSmall,
  GeneralNumeric,
};

std::string to_string(StructureTag tag);

/// Result of the quantum-number census of a 3-mode superposition. For the
/// TwoEqualM family the fixed nodes are the grid
/// fixed_x_roots x fixed_y_roots (m1 * n3 points).
struct StructureClass {
  StructureTag tag = StructureTag::GeneralNumeric;
  std::vector<double> fixed_x_roots;
  std::vector<double> fixed_y_roots;
  // Mode indices after canonical reordering: shared-pair first, odd one last.
  std::array<int, 3> order{0, 1, 2};
};

StructureClass classify(const SuperpositionSpec& spec);

/// The fixed nodes of a TwoEqualM / TwoEqualN spec, labeled 0..k-1 in the
/// row-major order used by fixed_x_roots x fixed_y_roots (ids are reassigned
/// by track_nodes).
std::vector<NodeRecord> fixed_nodes(const SuperpositionSpec& spec);

struct SolveOptions {
  double scan_halfwidth = -1;   // default 12/sqrt(omega) per axis
  int scan_cells = 4000;
  double node_tol = 1e-8;
};

/// All real roots y of the reduced moving-node equation
///   |a| Psi_{n1}(y) sin(D1) + |b| Psi_{n2}(y) sin(D2) = 0
/// (TwoEqualM structure; D_i are phase differences against the odd mode,
/// with coefficient arguments absorbed). Roots far outside the scan window
/// are recovered from the polynomial part so escaping branches stay visible.
std::vector<double> moving_node_y_equation(const SuperpositionSpec& spec, double t,
                                           const SolveOptions& opts = {});

/// Moving nodes at time t for a TwoEqualM spec: for each y-root solve the
/// real part for x. Records carry no ids (track_nodes assigns those).
std::vector<NodeRecord> solve_moving_nodes(const SuperpositionSpec& spec, double t,
                                           const SolveOptions& opts = {});

/// Brute-force oracle: mark grid cells where Re(psi) and Im(psi) both change
/// sign, refine by 2-d Newton to |psi| < 1e-12, deduplicate within 1e-6.
std::vector<Vec2> grid_scan_nodes(const SuperpositionSpec& spec, double t,
                                  const Rect& region, int resolution);

enum class EventKind { EscapeToInfinity, CollisionWithFixed, Reappearance };

std::string to_string(EventKind kind);
std::string to_string(NodeKind kind);
std::string to_string(NodeStatus status);

struct NodeEvent {
  double t = 0;
  EventKind kind = EventKind::EscapeToInfinity;
  int partner_fixed_id = -1;  // only for collisions
};

struct TrackSample {
  double t = 0, x = 0, y = 0;
  NodeStatus status = NodeStatus::Active;
};

struct NodeTrack {
  int id = -1;
  NodeKind kind = NodeKind::Moving;
  std::vector<TrackSample> samples;
  std::vector<NodeEvent> events;

  /// Linear interpolation of the position at time t (clamped to the sampled
  /// range). Returns nullopt while the node is escaped.
  std::optional<Vec2> position_at(double t) const;
};

struct TrackOptions {
  double continuation_jump_max = 0.2;
  double escape_radius = 12.0;
  double collision_tol = 1e-3;
  double frame_half_width = 5.0;  // labeling frame (out-of-frame ids come last in a row)
  SolveOptions solve;
};

/// Continuation of every node (fixed and moving) over [t0, t1]. Ids are
/// assigned at t0 by rows of decreasing y, ascending x within a row,
/// out-of-frame nodes numbered after in-frame ones.
std::vector<NodeTrack> track_nodes(const SuperpositionSpec& spec, double t0, double t1,
                                   double dt_max, const TrackOptions& opts = {});

}  // namespace bohm
