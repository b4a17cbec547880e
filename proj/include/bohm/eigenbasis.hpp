#pragma once

#include "bohm/errors.hpp"

#include <vector>

namespace bohm {

/// Quantum numbers are capped so the factorial normalizers stay representable
/// in double precision.
inline constexpr int kMaxQuantumNumber = 30;

/// One 2-d oscillator mode: degree m in x, degree n in y.
struct Mode {
  int m = 0;
  int n = 0;
  bool operator==(const Mode&) const = default;
};

/// Trap frequencies in units hbar = mass = 1.
struct OscillatorParams {
  double omega1 = 1.0;
  double omega2 = 1.0;
};

struct HermiteEval {
  double value = 0;
  double derivative = 0;
};

/// Physicists' Hermite polynomial H_n(xi) and H'_n(xi) = 2 n H_{n-1}(xi),
/// via the three-term recurrence.
HermiteEval hermite(int n, double xi);

struct Eigen1d {
  double value = 0;
  double d1 = 0;
  double d2 = 0;
};

/// Normalized 1-d harmonic oscillator eigenfunction with first and second
/// spatial derivatives, all from the Hermite recurrences.
Eigen1d eigen1d(int l, double omega, double x);

/// Time-evolution angle phi_{m,n}(t) = [(1/2+m) w1 + (1/2+n) w2] t.
double mode_phase(Mode mode, const OscillatorParams& params, double t);

/// All real roots of H_n, Newton-polished to machine precision, ascending.
std::vector<double> hermite_roots(int n);

}  // namespace bohm
