#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace bohm {

/// One embedded Dormand-Prince 5(4) trial step. F: (t, state) -> derivative.
/// Returns the 5th-order result and a normalized error estimate (accept when
/// err <= 1).
template <std::size_t N, class F>
struct Dp54 {
  using State = std::array<double, N>;

  struct Result {
    State y;
    double err = 0;
  };

  static Result step(F& f, double t, const State& y, double h, double rel_tol,
                     double abs_tol) {
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                     b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695,
                     e4 = b4 - 393.0 / 640, e5 = b5 + 92097.0 / 339200,
                     e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

    auto axpy = [&](const State& base, std::initializer_list<std::pair<double, const State*>> terms) {
      State out = base;
      for (auto& [c, k] : terms)
        for (std::size_t i = 0; i < N; ++i) out[i] += h * c * (*k)[i];
      return out;
    };
    const State k1 = f(t, y);
    const State k2 = f(t + h / 5, axpy(y, {{a21, &k1}}));
    const State k3 = f(t + 3 * h / 10, axpy(y, {{a31, &k1}, {a32, &k2}}));
    const State k4 = f(t + 4 * h / 5, axpy(y, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State k5 =
        f(t + 8 * h / 9, axpy(y, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State k6 =
        f(t + h, axpy(y, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    Result r;
    r.y = axpy(y, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const State k7 = f(t + h, r.y);
    double err2 = 0;
    for (std::size_t i = 0; i < N; ++i) {
      const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                            e6 * k6[i] + e7 * k7[i]);
      const double scale = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(r.y[i]));
      err2 += (e / scale) * (e / scale);
    }
    r.err = std::sqrt(err2 / N);
    return r;
  }

  static double next_h(double h, double err) {
    const double fac = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
    return h * std::min(5.0, std::max(0.2, fac));
  }
};

}  // namespace bohm
