#include "bohm/dynamics.hpp"

#include "bohm/rk.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace bohm {

namespace {

// Distance to the nearest active node: tracked positions when available,
// otherwise the first-order estimate |psi| / |grad psi|.
double node_distance(const SuperpositionSpec& spec, Vec2 p, double t,
                     const std::vector<NodeTrack>* tracks) {
  if (tracks) {
    double best = 1e300;
    for (const auto& tr : *tracks)
      if (auto q = tr.position_at(t)) best = std::min(best, dist(p, *q));
    if (best < 1e300) return best;
  }
  const FieldJet jet = eval_jet(spec, p.x, p.y, t);
  const double g = std::hypot(std::abs(jet.gx), std::abs(jet.gy));
  return g > 0 ? std::abs(jet.psi) / g : 1e300;
}

}  // namespace

Trajectory integrate(const SuperpositionSpec& spec, Vec2 ic, double t0, double t_end,
                     const IntegrateOptions& opts) {
  if (!(t_end > t0)) throw ArgumentError("integrate: need t_end > t0");
  if (std::abs(eval_jet(spec, ic.x, ic.y, t0).psi) < opts.psi_floor)
    throw ArgumentError("integrate: initial condition on a node");

  using RK = Dp54<2, std::function<std::array<double, 2>(double, const std::array<double, 2>&)>>;
  std::function<std::array<double, 2>(double, const std::array<double, 2>&)> rhs =
      [&](double t, const std::array<double, 2>& s) -> std::array<double, 2> {
    const Vec2 v = velocity(spec, s[0], s[1], t, opts.psi_floor);
    return {v.x, v.y};
  };

  Trajectory traj;
  traj.ic = ic;
  traj.t0 = t0;
  traj.samples.push_back({t0, ic.x, ic.y});

  std::array<double, 2> y{ic.x, ic.y};
  double t = t0;
  double h = std::min(1e-3, t_end - t0);
  double next_sample = opts.sample_dt > 0 ? t0 + opts.sample_dt : t_end;

  while (t < t_end - 1e-14) {
    const double d = node_distance(spec, {y[0], y[1]}, t, opts.node_tracks);
    traj.stats.min_node_distance = std::min(traj.stats.min_node_distance, d);
    double h_cap = t_end - t;
    try {
      const Vec2 v = velocity(spec, y[0], y[1], t, opts.psi_floor);
      const double speed = std::max(v.norm(), 1e-12);
      h_cap = std::min(h_cap, opts.node_cap_factor * std::max(d, 1e-10) / speed);
    } catch (const NodeSingularity&) {
      traj.status = TrajStatus::StoppedAtNode;
      return traj;
    }
    h = std::min(h, std::max(h_cap, 1e-12));
    if (opts.sample_dt > 0) h = std::min(h, next_sample - t + 1e-15);

    RK::Result res;
    try {
      res = RK::step(rhs, t, y, h, opts.rel_tol, opts.abs_tol);
    } catch (const NodeSingularity&) {
      h *= 0.5;
      ++traj.stats.rejected_steps;
      if (h < 1e-12) {
        traj.status = TrajStatus::StoppedAtNode;
        return traj;
      }
      continue;
    }
    if (res.err > 1.0) {
      ++traj.stats.rejected_steps;
      h = RK::next_h(h, res.err);
      if (h < 1e-12) {
        traj.status = TrajStatus::StoppedAtNode;
        return traj;
      }
      continue;
    }
    t += h;
    y = res.y;
    ++traj.stats.steps;
    if (opts.sample_dt > 0) {
      if (t >= next_sample - 1e-12) {
        traj.samples.push_back({t, y[0], y[1]});
        while (next_sample <= t + 1e-12) next_sample += opts.sample_dt;
      }
    } else {
      traj.samples.push_back({t, y[0], y[1]});
    }
    h = std::min(RK::next_h(h, res.err), t_end - t + 1e-15);
    if (h <= 0) break;
  }
  if (traj.samples.back().t < t) traj.samples.push_back({t, y[0], y[1]});
  return traj;
}

std::vector<LoopAnnotation> count_loops(const Trajectory& traj, const NodeTrack& track,
                                        double loop_radius) {
  std::vector<LoopAnnotation> out;
  bool inside = false;
  LoopAnnotation cur;
  double angle = 0, prev_theta = 0;
  auto close = [&](double t_end) {
    cur.t_end = t_end;
    cur.winding = angle / (2.0 * std::numbers::pi);
    out.push_back(cur);
    inside = false;
  };
  for (const auto& s : traj.samples) {
    const auto node = track.position_at(s.t);
    if (!node) {
      if (inside) close(s.t);
      continue;
    }
    const Vec2 r = Vec2{s.x, s.y} - *node;
    if (r.norm() > loop_radius) {
      if (inside) close(s.t);
      continue;
    }
    const double theta = std::atan2(r.y, r.x);
    if (!inside) {
      inside = true;
      cur = LoopAnnotation{track.id, s.t, s.t, 0};
      angle = 0;
    } else {
      double d = theta - prev_theta;
      while (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
      while (d < -std::numbers::pi) d += 2.0 * std::numbers::pi;
      angle += d;
    }
    prev_theta = theta;
  }
  if (inside) close(traj.samples.back().t);
  return out;
}

}  // namespace bohm
