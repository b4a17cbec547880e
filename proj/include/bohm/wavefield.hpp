#pragma once

#include "bohm/eigenbasis.hpp"
#include "bohm/errors.hpp"
#include "bohm/geometry.hpp"

#include <complex>
#include <vector>

namespace bohm {

using Complex = std::complex<double>;

/// Default |psi| floor below which the ratio grad(psi)/psi is unreliable in
/// double precision.
inline constexpr double kPsiFloor = 1e-13;

/// A superposition of oscillator eigenstates:
///   psi(x,y,t) = sum_i c_i e^{-i phi_i(t)} Psi_{m_i}(x) Psi_{n_i}(y)
struct SuperpositionSpec {
  std::vector<Mode> modes;
  std::vector<Complex> coefficients;
  OscillatorParams params;

  void validate() const;
};

struct FieldSample {
  Complex psi;
  std::array<Complex, 2> grad;  // (d/dx, d/dy)
  Complex lap;
};

/// Full second-order jet, needed for velocity Jacobians and X-point work.
struct FieldJet {
  Complex psi, gx, gy, gxx, gxy, gyy;
};

FieldSample eval_field(const SuperpositionSpec& spec, double x, double y, double t);
FieldJet eval_jet(const SuperpositionSpec& spec, double x, double y, double t);

/// Bohmian guidance velocity v = Im(grad psi / psi).
/// Throws NodeSingularity when |psi| < psi_floor.
Vec2 velocity(const SuperpositionSpec& spec, double x, double y, double t,
              double psi_floor = kPsiFloor);

/// Spatial Jacobian d(v_i)/d(x_j) of the velocity field at fixed t.
Mat2 velocity_jacobian(const SuperpositionSpec& spec, double x, double y, double t,
                       double psi_floor = kPsiFloor);

/// Which quantum-potential formula to evaluate. Amplitude is the real
/// surface -1/2 lap|psi|/|psi|; ComplexRatio is -1/2 Re(lap psi / psi).
enum class QForm { Amplitude, ComplexRatio };

struct PotentialSample {
  double V = 0;
  double Q = 0;
  double Vtot = 0;
};

PotentialSample potentials(const SuperpositionSpec& spec, double x, double y, double t,
                           QForm form = QForm::Amplitude, double psi_floor = kPsiFloor);

}  // namespace bohm
