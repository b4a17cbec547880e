#pragma once

#include "bohm/dynamics.hpp"
#include "bohm/wavefield.hpp"

#include <cstdint>

namespace bohm {

enum class ChaosClass { Ordered, Chaotic, Undetermined };

std::string to_string(ChaosClass c);

struct ChaosReport {
  Vec2 ic;
  double t0 = 0;
  double horizon = 0;
  double stretching_number = 0;  // mean log tangent growth per unit time
  ChaosClass classification = ChaosClass::Undetermined;
};

struct ChaosOptions {
  double chaos_threshold = 0.05;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  int bootstrap_resamples = 200;
  double bootstrap_confidence = 0.95;  // fraction that must agree on the side
  std::uint64_t seed = 12345;
};

/// Tangent-flow stretching number: integrate the linearized guidance flow
/// alongside the trajectory, renormalizing the tangent vector each unit time;
/// report the time-averaged log growth. Classification is Chaotic/Ordered by
/// chaos_threshold when the bootstrap over per-unit increments is stable,
/// Undetermined otherwise (or when integration fails).
ChaosReport stretching_number(const SuperpositionSpec& spec, Vec2 ic, double t0,
                              double horizon, const ChaosOptions& opts = {});

struct PeriodicityResult {
  bool is_periodic = false;
  double return_error = 0;
};

PeriodicityResult periodicity_check(const SuperpositionSpec& spec, Vec2 ic, double t0,
                                    double T_expected, double tol);

// ---------------------------------------------------------------------------
// Closed-form oracle for the single-node state
//   psi = psi_00 + psi_10 + psi_11, omega1 = omega2 = 1
// (unit coefficients in the normalized-eigenfunction convention).

/// The spec above, reused by tests and the CLI preset.
SuperpositionSpec single_node_state();

/// G(x, y, t) = 1 + 2x^2(1+2y^2) + 2 sqrt2 x (1+2xy) cos t + 4xy cos 2t.
double oracle_G(double x, double y, double t);

/// Display-form velocity (xdot, ydot) = (sqrt2 sin t + 2y sin 2t,
/// 2x(sqrt2 x sin t + sin 2t)) / G. Differs from the normalized-convention
/// guidance field by one global constant; see measure_convention_constant.
Vec2 oracle_velocity(double x, double y, double t);

/// Node path (x_N, y_N) = (-sin 2t / (sqrt2 sin t), -sin t / (sqrt2 sin 2t)),
/// which traces the hyperbola x_N y_N = 1/2.
Vec2 oracle_node(double t);

/// The constant kappa with velocity(spec) = kappa * oracle_velocity, measured
/// at one probe point.
double measure_convention_constant(const SuperpositionSpec& spec);

/// Integral-of-motion residual sin^2 t + cos^2 t - 1 with cos t, sin t
/// reconstructed from a state (x, y, xdot, ydot) of the single-node flow.
/// Throws DegenerateState when a reconstruction denominator vanishes.
double integral_residual(double x, double y, double xdot, double ydot);

/// |x_N y_N - 1/2| signed: locate the single node by grid scan + Newton near
/// the predicted position and return x_N * y_N - 1/2. Throws DegenerateTime
/// when sin t or cos t vanishes (node at infinity / undefined).
double node_hyperbola_residual(const SuperpositionSpec& spec, double t);

/// The node actually found by node_hyperbola_residual's procedure.
Vec2 locate_single_node(const SuperpositionSpec& spec, double t);

}  // namespace bohm
