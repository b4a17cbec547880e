#pragma once

#include "bohm/nodes.hpp"
#include "bohm/wavefield.hpp"

#include <vector>

namespace bohm {

/// Saddle of the frozen-time flow seen from a node's co-moving frame.
struct XPointRecord {
  int frame_node_id = -1;
  Vec2 node;       // node position at t (frame origin)
  Vec2 position;   // absolute (x, y)
  double t = 0;
  Mat2 jacobian;   // of the relative field (equals the velocity Jacobian)
  EigenPair eigen;
  Vec2 rel() const { return position - node; }  // (u, v)
};

struct XPointOptions {
  double search_radius = 1.0;
  int seeds_per_ring = 24;
  double newton_tol = 1e-11;
  double dedupe_tol = 1e-6;
};

/// Node velocity at time t: zero for fixed nodes, else centered differencing
/// of the node position re-localized (2-d Newton on psi = 0) at t -+ h.
Vec2 node_velocity(const SuperpositionSpec& spec, Vec2 node, NodeKind kind, double t,
                   double h = 1e-5);

/// Velocity relative to the node frame: v(x,y,t) - v_node.
Vec2 comoving_velocity(const SuperpositionSpec& spec, Vec2 p, double t, Vec2 v_node);

/// Newton search from seed rings around the node; keeps converged saddles
/// (det J < 0) within search_radius, deduplicated. Throws NoXPointFound when
/// nothing converges.
std::vector<XPointRecord> find_xpoints(const SuperpositionSpec& spec, Vec2 node,
                                       NodeKind kind, int frame_node_id, double t,
                                       const XPointOptions& opts = {});

enum class Branch { StablePlus, StableMinus, UnstablePlus, UnstableMinus };

std::string to_string(Branch b);

struct AsymptoticSample {
  double s = 0;   // fictitious arclength/time
  double u = 0, v = 0;  // relative to the node (frame coordinates)
};

struct AsymptoticCurve {
  Branch branch = Branch::UnstablePlus;
  bool truncated = false;  // stopped early (left 2*search_radius or hit a node)
  std::vector<AsymptoticSample> samples;
};

/// The four manifold branches of the frozen-time field at t_frozen: unstable
/// branches integrate forward in s from +-eps along the unstable eigenvector,
/// stable branches backward from +-eps along the stable one.
std::vector<AsymptoticCurve> asymptotic_curves(const SuperpositionSpec& spec,
                                               const XPointRecord& xp, double t_frozen,
                                               double s_span, double eps = 1e-4,
                                               const XPointOptions& opts = {});

struct PotentialCheck {
  double value_at_xp = 0;  // Q (or Vtot) at the X-point
  bool is_near_local_max = false;
  double offset = 0;  // distance to the nearest grid-local maximum
};

/// Scan Q (or Vtot) on a 41x41 grid of half-width 0.3 around the X-point,
/// excluding a 0.05 disc around the node; offset = distance to the nearest
/// interior local maximum, near = (offset < 0.15).
PotentialCheck xpoint_potential_check(const SuperpositionSpec& spec, const XPointRecord& xp,
                                      double t, bool use_vtot = false,
                                      QForm form = QForm::Amplitude);

}  // namespace bohm
