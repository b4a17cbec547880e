#include "bohm/diagnostics.hpp"

#include "bohm/rk.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

namespace bohm {

std::string to_string(ChaosClass c) {
  switch (c) {
    case ChaosClass::Ordered: return "Ordered";
    case ChaosClass::Chaotic: return "Chaotic";
    case ChaosClass::Undetermined: return "Undetermined";
  }
  return "?";
}

ChaosReport stretching_number(const SuperpositionSpec& spec, Vec2 ic, double t0,
                              double horizon, const ChaosOptions& opts) {
  ChaosReport report;
  report.ic = ic;
  report.t0 = t0;
  report.horizon = horizon;
  if (!(horizon > 0)) throw ArgumentError("stretching_number: horizon must be positive");

  // State: (x, y, xi_x, xi_y) with dxi/dt = J(x, y, t) xi.
  using State = std::array<double, 4>;
  std::function<State(double, const State&)> rhs = [&](double t, const State& s) -> State {
    const Vec2 v = velocity(spec, s[0], s[1], t);
    const Mat2 j = velocity_jacobian(spec, s[0], s[1], t);
    const Vec2 dxi = j.apply({s[2], s[3]});
    return {v.x, v.y, dxi.x, dxi.y};
  };
  using RK = Dp54<4, decltype(rhs)>;

  State y{ic.x, ic.y, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
  double t = t0;
  double h = 1e-3;
  std::vector<double> increments;  // log growth per unit time
  double next_renorm = t0 + 1.0;
  const double t_end = t0 + horizon;
  try {
    while (t < t_end - 1e-12) {
      h = std::min(h, std::min(next_renorm, t_end) - t + 1e-15);
      const auto res = RK::step(rhs, t, y, h, opts.rel_tol, opts.abs_tol);
      if (res.err > 1.0) {
        h = RK::next_h(h, res.err);
        if (h < 1e-12) throw StepFailure("stretching_number: step underflow");
        continue;
      }
      t += h;
      y = res.y;
      h = RK::next_h(h, res.err);
      if (t >= next_renorm - 1e-12) {
        const double g = std::hypot(y[2], y[3]);
        if (!(g > 0) || !std::isfinite(g))
          throw StepFailure("stretching_number: tangent vector degenerate");
        increments.push_back(std::log(g));
        y[2] /= g;
        y[3] /= g;
        next_renorm += 1.0;
      }
    }
  } catch (const std::runtime_error&) {
    report.classification = ChaosClass::Undetermined;
    if (!increments.empty()) {
      double sum = 0;
      for (double a : increments) sum += a;
      report.stretching_number = sum / increments.size();
    }
    return report;
  }

  if (increments.empty()) {
    report.classification = ChaosClass::Undetermined;
    return report;
  }
  double sum = 0;
  for (double a : increments) sum += a;
  report.stretching_number = sum / increments.size();

  // Bootstrap over the per-unit increments: classify only when the resampled
  // means land on one side of the threshold with high confidence.
  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<size_t> pick(0, increments.size() - 1);
  int above = 0;
  for (int b = 0; b < opts.bootstrap_resamples; ++b) {
    double s = 0;
    for (size_t k = 0; k < increments.size(); ++k) s += increments[pick(rng)];
    if (s / increments.size() > opts.chaos_threshold) ++above;
  }
  const double frac = double(above) / opts.bootstrap_resamples;
  if (frac >= opts.bootstrap_confidence)
    report.classification = ChaosClass::Chaotic;
  else if (frac <= 1.0 - opts.bootstrap_confidence)
    report.classification = ChaosClass::Ordered;
  else
    report.classification = ChaosClass::Undetermined;
  return report;
}

PeriodicityResult periodicity_check(const SuperpositionSpec& spec, Vec2 ic, double t0,
                                    double T_expected, double tol) {
  IntegrateOptions opts;
  opts.sample_dt = 0;  // endpoint accuracy only
  const Trajectory traj = integrate(spec, ic, t0, t0 + T_expected, opts);
  PeriodicityResult r;
  r.return_error = dist(traj.endpoint(), ic);
  r.is_periodic = traj.status == TrajStatus::Completed && r.return_error < tol;
  return r;
}

SuperpositionSpec single_node_state() {
  SuperpositionSpec s;
  s.modes = {{0, 0}, {1, 0}, {1, 1}};
  s.coefficients = {1.0, 1.0, 1.0};
  s.params = {1.0, 1.0};
  return s;
}

double oracle_G(double x, double y, double t) {
  return 1.0 + 2.0 * x * x * (1.0 + 2.0 * y * y) +
         2.0 * std::numbers::sqrt2 * x * (1.0 + 2.0 * x * y) * std::cos(t) +
         4.0 * x * y * std::cos(2.0 * t);
}

Vec2 oracle_velocity(double x, double y, double t) {
  const double g = oracle_G(x, y, t);
  if (g == 0) throw DegenerateState("oracle_velocity: G = 0");
  const double xd = (std::numbers::sqrt2 * std::sin(t) + 2.0 * y * std::sin(2.0 * t)) / g;
  const double yd =
      2.0 * x * (std::numbers::sqrt2 * x * std::sin(t) + std::sin(2.0 * t)) / g;
  return {xd, yd};
}

Vec2 oracle_node(double t) {
  const double st = std::sin(t), s2t = std::sin(2.0 * t);
  if (std::abs(st) < 1e-12 || std::abs(s2t) < 1e-12)
    throw DegenerateTime("oracle_node: node undefined at sin t = 0 or cos t = 0");
  return {-s2t / (std::numbers::sqrt2 * st), -st / (std::numbers::sqrt2 * s2t)};
}

double measure_convention_constant(const SuperpositionSpec& spec) {
  const double x = 0.3, y = 0.4, t = 0.9;
  const Vec2 impl = velocity(spec, x, y, t);
  const Vec2 oracle = oracle_velocity(x, y, t);
  if (std::abs(oracle.x) < 1e-12)
    throw DegenerateState("measure_convention_constant: probe degenerate");
  return impl.x / oracle.x;
}

double integral_residual(double x, double y, double xdot, double ydot) {
  const double den_c = 2.0 * std::numbers::sqrt2 * (y * ydot - x * xdot);
  const double den_s = std::numbers::sqrt2 * (2.0 * x * x * y - x);
  if (std::abs(den_c) < 1e-10 || std::abs(den_s) < 1e-10)
    throw DegenerateState("integral_residual: reconstruction denominator vanishes");
  const double ct = (2.0 * x * x * xdot - ydot) / den_c;
  // G depends on t only through cos t and cos 2t = 2 cos^2 t - 1.
  const double c2t = 2.0 * ct * ct - 1.0;
  const double g = 1.0 + 2.0 * x * x * (1.0 + 2.0 * y * y) +
                   2.0 * std::numbers::sqrt2 * x * (1.0 + 2.0 * x * y) * ct +
                   4.0 * x * y * c2t;
  const double st = g * (y * ydot - x * xdot) / den_s;
  return st * st + ct * ct - 1.0;
}

Vec2 locate_single_node(const SuperpositionSpec& spec, double t) {
  if (std::abs(std::sin(t)) < 1e-6 || std::abs(std::cos(t)) < 1e-6)
    throw DegenerateTime("single node undefined near sin t = 0 or cos t = 0");
  const Vec2 guess = oracle_node(t);
  const Rect region{guess.x - 2.0, guess.x + 2.0, guess.y - 2.0, guess.y + 2.0};
  const auto nodes = grid_scan_nodes(spec, t, region, 120);
  if (nodes.empty()) throw DegenerateTime("single node not found in scan region");
  Vec2 best = nodes.front();
  for (const Vec2& p : nodes)
    if (dist(p, guess) < dist(best, guess)) best = p;
  return best;
}

double node_hyperbola_residual(const SuperpositionSpec& spec, double t) {
  const Vec2 n = locate_single_node(spec, t);
  return n.x * n.y - 0.5;
}

}  // namespace bohm
