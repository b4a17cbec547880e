#include "bohm/wavefield.hpp"

#include <cmath>

namespace bohm {

void SuperpositionSpec::validate() const {
  if (modes.empty()) throw ArgumentError("spec: at least one mode required");
  if (modes.size() != coefficients.size())
    throw ArgumentError("spec: modes and coefficients must have equal length");
  if (!(params.omega1 > 0) || !(params.omega2 > 0))
    throw ArgumentError("spec: frequencies must be positive");
  bool any_nonzero = false;
  for (const auto& c : coefficients)
    if (std::abs(c) > 0) any_nonzero = true;
  if (!any_nonzero) throw ArgumentError("spec: all coefficients are zero");
  for (size_t i = 0; i < modes.size(); ++i) {
    if (modes[i].m < 0 || modes[i].n < 0 || modes[i].m > kMaxQuantumNumber ||
        modes[i].n > kMaxQuantumNumber)
      throw ArgumentError("spec: quantum numbers out of range");
    for (size_t j = i + 1; j < modes.size(); ++j)
      if (modes[i] == modes[j]) throw ArgumentError("spec: duplicate modes");
  }
}

FieldJet eval_jet(const SuperpositionSpec& spec, double x, double y, double t) {
  FieldJet jet{};
  for (size_t i = 0; i < spec.modes.size(); ++i) {
    const Mode mode = spec.modes[i];
    const double phi = mode_phase(mode, spec.params, t);
    const Complex w = spec.coefficients[i] * std::polar(1.0, -phi);
    const Eigen1d fx = eigen1d(mode.m, spec.params.omega1, x);
    const Eigen1d fy = eigen1d(mode.n, spec.params.omega2, y);
    jet.psi += w * fx.value * fy.value;
    jet.gx += w * fx.d1 * fy.value;
    jet.gy += w * fx.value * fy.d1;
    jet.gxx += w * fx.d2 * fy.value;
    jet.gxy += w * fx.d1 * fy.d1;
    jet.gyy += w * fx.value * fy.d2;
  }
  return jet;
}

FieldSample eval_field(const SuperpositionSpec& spec, double x, double y, double t) {
  const FieldJet jet = eval_jet(spec, x, y, t);
  return {jet.psi, {jet.gx, jet.gy}, jet.gxx + jet.gyy};
}

Vec2 velocity(const SuperpositionSpec& spec, double x, double y, double t,
              double psi_floor) {
  const FieldJet jet = eval_jet(spec, x, y, t);
  if (std::abs(jet.psi) < psi_floor)
    throw NodeSingularity("velocity: |psi| below floor (point at/near a node)");
  return {std::imag(jet.gx / jet.psi), std::imag(jet.gy / jet.psi)};
}

Mat2 velocity_jacobian(const SuperpositionSpec& spec, double x, double y, double t,
                       double psi_floor) {
  const FieldJet jet = eval_jet(spec, x, y, t);
  if (std::abs(jet.psi) < psi_floor)
    throw NodeSingularity("velocity_jacobian: |psi| below floor");
  const Complex rx = jet.gx / jet.psi;
  const Complex ry = jet.gy / jet.psi;
  // d/dx Im(g_i/psi) = Im(h_ij/psi - (g_i/psi)(g_j/psi))
  return {std::imag(jet.gxx / jet.psi - rx * rx),
          std::imag(jet.gxy / jet.psi - rx * ry),
          std::imag(jet.gxy / jet.psi - ry * rx),
          std::imag(jet.gyy / jet.psi - ry * ry)};
}

PotentialSample potentials(const SuperpositionSpec& spec, double x, double y, double t,
                           QForm form, double psi_floor) {
  const FieldJet jet = eval_jet(spec, x, y, t);
  const double abs_psi = std::abs(jet.psi);
  if (abs_psi < psi_floor)
    throw NodeSingularity("potentials: |psi| below floor (Q diverges)");
  const double w1 = spec.params.omega1, w2 = spec.params.omega2;
  PotentialSample out;
  out.V = 0.5 * (w1 * w1 * x * x + w2 * w2 * y * y);
  const Complex lap = jet.gxx + jet.gyy;
  if (form == QForm::ComplexRatio) {
    out.Q = -0.5 * std::real(lap / jet.psi);
  } else {
    // rho = |psi|^2, R = sqrt(rho):
    //   lap R / R = lap rho / (2 rho) - |grad rho|^2 / (4 rho^2)
    const double rho = abs_psi * abs_psi;
    const double rho_x = 2.0 * std::real(std::conj(jet.psi) * jet.gx);
    const double rho_y = 2.0 * std::real(std::conj(jet.psi) * jet.gy);
    const double lap_rho = 2.0 * std::real(std::conj(jet.psi) * lap) +
                           2.0 * (std::norm(jet.gx) + std::norm(jet.gy));
    out.Q = -0.5 * (lap_rho / (2.0 * rho) -
                    (rho_x * rho_x + rho_y * rho_y) / (4.0 * rho * rho));
  }
  out.Vtot = out.V + out.Q;
  return out;
}

}  // namespace bohm
