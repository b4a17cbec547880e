#include "bohm/eigenbasis.hpp"

#include <cmath>
#include <numbers>

namespace bohm {

namespace {

void check_degree(int n) {
  if (n < 0) throw ArgumentError("quantum number must be >= 0");
  if (n > kMaxQuantumNumber) throw ArgumentError("quantum number exceeds 30");
}

}  // namespace

HermiteEval hermite(int n, double xi) {
  check_degree(n);
  if (!std::isfinite(xi)) throw ArgumentError("hermite: xi must be finite");
  double hm1 = 0.0;  // H_{k-1}
  double h = 1.0;    // H_k, starting at H_0 = 1
  for (int k = 0; k < n; ++k) {
    const double hp1 = 2.0 * xi * h - 2.0 * k * hm1;
    hm1 = h;
    h = hp1;
  }
  return {h, 2.0 * n * hm1};
}

Eigen1d eigen1d(int l, double omega, double x) {
  check_degree(l);
  if (!(omega > 0)) throw ArgumentError("eigen1d: omega must be positive");
  const double xi = std::sqrt(omega) * x;
  const auto [h, hp] = hermite(l, xi);
  // H''_l = 2l H'_{l-1} = 4 l (l-1) H_{l-2}
  const double hpp = (l >= 2) ? 4.0 * l * (l - 1) * hermite(l - 2, xi).value : 0.0;

  double norm = std::pow(omega / std::numbers::pi, 0.25);
  for (int k = 1; k <= l; ++k) norm /= std::sqrt(2.0 * k);

  const double g = std::exp(-xi * xi / 2.0);
  const double f = norm * g * h;
  // d/dxi [e^{-xi^2/2} H] = e^{-xi^2/2} (H' - xi H)
  const double f1 = norm * g * (hp - xi * h);
  const double f2 = norm * g * (hpp - 2.0 * xi * hp + (xi * xi - 1.0) * h);
  const double s = std::sqrt(omega);
  return {f, s * f1, omega * f2};
}

double mode_phase(Mode mode, const OscillatorParams& params, double t) {
  check_degree(mode.m);
  check_degree(mode.n);
  if (!std::isfinite(t)) throw ArgumentError("mode_phase: t must be finite");
  return ((0.5 + mode.m) * params.omega1 + (0.5 + mode.n) * params.omega2) * t;
}

std::vector<double> hermite_roots(int n) {
  check_degree(n);
  std::vector<double> roots;
  if (n == 0) return roots;
  // All roots lie inside [-sqrt(4n+2), sqrt(4n+2)].
  const double bound = std::sqrt(4.0 * n + 2.0);
  const int cells = 200 * n;
  double prev_x = -bound;
  double prev_f = hermite(n, prev_x).value;
  for (int i = 1; i <= cells; ++i) {
    const double x = -bound + 2.0 * bound * i / cells;
    const double f = hermite(n, x).value;
    if (prev_f == 0.0) roots.push_back(prev_x);
    else if (prev_f * f < 0.0) {
      double a = prev_x, b = x;
      for (int it = 0; it < 80; ++it) {
        const double m = 0.5 * (a + b);
        if (hermite(n, a).value * hermite(n, m).value <= 0) b = m;
        else a = m;
      }
      double r = 0.5 * (a + b);
      for (int it = 0; it < 4; ++it) {
        const auto [v, d] = hermite(n, r);
        if (d != 0.0) r -= v / d;
      }
      roots.push_back(r);
    }
    prev_x = x;
    prev_f = f;
  }
  // Clean up the symmetric root at zero for odd n.
  if (n % 2 == 1) {
    double best = roots[0];
    for (double r : roots)
      if (std::abs(r) < std::abs(best)) best = r;
    for (double& r : roots)
      if (r == best) r = 0.0;
  }
  return roots;
}

}  // namespace bohm
