#include "bohm/xpoints.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bohm {

namespace {

// Re-localize a node near `guess` at time t by 2-d Newton on psi = 0.
Vec2 relocate_node(const SuperpositionSpec& spec, Vec2 guess, double t) {
  Vec2 p = guess;
  for (int it = 0; it < 60; ++it) {
    const FieldJet jet = eval_jet(spec, p.x, p.y, t);
    if (std::abs(jet.psi) < 1e-13) return p;
    const Mat2 jac{jet.gx.real(), jet.gy.real(), jet.gx.imag(), jet.gy.imag()};
    Vec2 step;
    if (!jac.solve({jet.psi.real(), jet.psi.imag()}, step))
      throw NodeSingularity("node re-localization: singular Jacobian");
    p = p - step;
  }
  return p;
}

}  // namespace

std::string to_string(Branch b) {
  switch (b) {
    case Branch::StablePlus: return "StablePlus";
    case Branch::StableMinus: return "StableMinus";
    case Branch::UnstablePlus: return "UnstablePlus";
    case Branch::UnstableMinus: return "UnstableMinus";
  }
  return "?";
}

Vec2 node_velocity(const SuperpositionSpec& spec, Vec2 node, NodeKind kind, double t,
                   double h) {
  if (kind == NodeKind::Fixed) return {0, 0};
  const Vec2 plus = relocate_node(spec, node, t + h);
  const Vec2 minus = relocate_node(spec, node, t - h);
  return (plus - minus) * (1.0 / (2.0 * h));
}

Vec2 comoving_velocity(const SuperpositionSpec& spec, Vec2 p, double t, Vec2 v_node) {
  return velocity(spec, p.x, p.y, t) - v_node;
}

std::vector<XPointRecord> find_xpoints(const SuperpositionSpec& spec, Vec2 node,
                                       NodeKind kind, int frame_node_id, double t,
                                       const XPointOptions& opts) {
  const Vec2 v_node = node_velocity(spec, node, kind, t);
  std::vector<XPointRecord> found;
  const double radii[] = {0.05, 0.1, 0.2, 0.4};
  for (double rf : radii) {
    const double r = rf * opts.search_radius;
    for (int k = 0; k < opts.seeds_per_ring; ++k) {
      const double a = 2.0 * std::numbers::pi * k / opts.seeds_per_ring;
      Vec2 p = node + Vec2{r * std::cos(a), r * std::sin(a)};
      bool converged = false;
      for (int it = 0; it < 80; ++it) {
        Vec2 w;
        Mat2 jac;
        try {
          w = comoving_velocity(spec, p, t, v_node);
          jac = velocity_jacobian(spec, p.x, p.y, t);
        } catch (const NodeSingularity&) {
          break;
        }
        if (w.norm() < opts.newton_tol) {
          converged = true;
          break;
        }
        Vec2 step;
        if (!jac.solve(w, step)) break;
        // Damp huge steps: the field blows up near nodes.
        const double sn = step.norm();
        if (sn > 0.5 * opts.search_radius) step = step * (0.5 * opts.search_radius / sn);
        p = p - step;
        if (dist(p, node) > 3.0 * opts.search_radius) break;
      }
      if (!converged || dist(p, node) > opts.search_radius) continue;
      const Mat2 jac = velocity_jacobian(spec, p.x, p.y, t);
      // Keep saddles only; the floor rejects degenerate (noise-level)
      // Jacobians of flat regions.
      if (!(jac.det() < -1e-12)) continue;
      bool dup = false;
      for (const auto& xp : found)
        if (dist(xp.position, p) < opts.dedupe_tol) dup = true;
      if (dup) continue;
      XPointRecord xp;
      xp.frame_node_id = frame_node_id;
      xp.node = node;
      xp.position = p;
      xp.t = t;
      xp.jacobian = jac;
      xp.eigen = eigen2(jac);
      found.push_back(xp);
    }
  }
  if (found.empty()) throw NoXPointFound("no seed converged to a saddle in this frame");
  std::sort(found.begin(), found.end(), [&](const XPointRecord& a, const XPointRecord& b) {
    return dist(a.position, node) < dist(b.position, node);
  });
  return found;
}

std::vector<AsymptoticCurve> asymptotic_curves(const SuperpositionSpec& spec,
                                               const XPointRecord& xp, double t_frozen,
                                               double s_span, double eps,
                                               const XPointOptions& opts) {
  // The X-point is stationary in the frame, so the frame velocity is just the
  // field value there; no need to know the node kind.
  const Vec2 v_node = velocity(spec, xp.position.x, xp.position.y, t_frozen);
  const EigenPair& e = xp.eigen;
  // Unstable direction = eigenvector of the positive eigenvalue.
  const Vec2 eu = e.lambda1 > 0 ? e.v1 : e.v2;
  const Vec2 es = e.lambda1 > 0 ? e.v2 : e.v1;

  struct Spec {
    Branch branch;
    Vec2 dir;
    double sgn;  // ds sign: forward on unstable, backward on stable
  };
  const Spec branches[] = {
      {Branch::UnstablePlus, eu, +1.0},
      {Branch::UnstableMinus, eu * -1.0, +1.0},
      {Branch::StablePlus, es, -1.0},
      {Branch::StableMinus, es * -1.0, -1.0},
  };
  std::vector<AsymptoticCurve> out;
  for (const auto& br : branches) {
    AsymptoticCurve curve;
    curve.branch = br.branch;
    Vec2 p = xp.position + br.dir * eps;
    double s = 0;
    auto field = [&](Vec2 q) { return comoving_velocity(spec, q, t_frozen, v_node); };
    auto push = [&]() {
      const Vec2 rel = p - xp.node;
      curve.samples.push_back({s, rel.x, rel.y});
    };
    push();
    double ds = 1e-3;
    while (std::abs(s) < s_span) {
      // RK4 in fictitious time; speed-limited steps keep arclength resolution.
      Vec2 k1, k2, k3, k4;
      try {
        k1 = field(p);
        const double sp = std::max(k1.norm(), 1e-12);
        ds = std::min(0.01 / sp, s_span / 50.0);
        const double h = br.sgn * ds;
        k2 = field(p + k1 * (h / 2));
        k3 = field(p + k2 * (h / 2));
        k4 = field(p + k3 * h);
        p = p + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (br.sgn * ds / 6.0);
      } catch (const NodeSingularity&) {
        curve.truncated = true;
        break;
      }
      s += br.sgn * ds;
      push();
      if (dist(p, xp.node) > 2.0 * opts.search_radius) {
        curve.truncated = true;
        break;
      }
    }
    out.push_back(std::move(curve));
  }
  return out;
}

PotentialCheck xpoint_potential_check(const SuperpositionSpec& spec, const XPointRecord& xp,
                                      double t, bool use_vtot, QForm form) {
  constexpr int kGrid = 41;
  constexpr double kHalf = 0.3;
  constexpr double kExclude = 0.05;
  auto sample = [&](double x, double y) -> double {
    const PotentialSample ps = potentials(spec, x, y, t, form);
    return use_vtot ? ps.Vtot : ps.Q;
  };
  PotentialCheck out;
  out.value_at_xp = sample(xp.position.x, xp.position.y);
  double grid[kGrid][kGrid];
  bool valid[kGrid][kGrid];
  const double step = 2.0 * kHalf / (kGrid - 1);
  for (int i = 0; i < kGrid; ++i)
    for (int j = 0; j < kGrid; ++j) {
      const Vec2 p{xp.position.x - kHalf + i * step, xp.position.y - kHalf + j * step};
      valid[i][j] = dist(p, xp.node) > kExclude;
      if (!valid[i][j]) {
        grid[i][j] = 0;
        continue;
      }
      try {
        grid[i][j] = sample(p.x, p.y);
      } catch (const NodeSingularity&) {
        valid[i][j] = false;
        grid[i][j] = 0;
      }
    }
  double best = 1e300;
  for (int i = 1; i + 1 < kGrid; ++i)
    for (int j = 1; j + 1 < kGrid; ++j) {
      if (!valid[i][j]) continue;
      bool is_max = true;
      for (int di = -1; di <= 1 && is_max; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          if (valid[i + di][j + dj] && grid[i + di][j + dj] > grid[i][j]) {
            is_max = false;
            break;
          }
        }
      if (!is_max) continue;
      const Vec2 p{xp.position.x - kHalf + i * step, xp.position.y - kHalf + j * step};
      best = std::min(best, dist(p, xp.position));
    }
  out.offset = best;
  out.is_near_local_max = best < 0.15;
  return out;
}

}  // namespace bohm
