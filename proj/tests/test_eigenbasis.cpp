#include <doctest.h>

#include "bohm/eigenbasis.hpp"

#include <cmath>
#include <numbers>

using namespace bohm;

TEST_CASE("hermite values at xi = 1 match the coefficient sums") {
  // H_n(1) from the explicit coefficient expansion, exact in small integers.
  auto h_exact = [](int n) {
    // sum over k of (-1)^k n!/(k! (n-2k)!) 2^{n-2k}
    double acc = 0;
    for (int k = 0; 2 * k <= n; ++k) {
      double term = 1;
      for (int i = 0; i < n - 2 * k; ++i) term *= 2.0;
      for (int i = 2; i <= n; ++i) term *= i;
      for (int i = 2; i <= k; ++i) term /= i;
      for (int i = 2; i <= n - 2 * k; ++i) term /= i;
      acc += (k % 2 ? -term : term);
    }
    return acc;
  };
  for (int n = 0; n <= 20; ++n) {
    const double got = hermite(n, 1.0).value;
    const double want = h_exact(n);
    CHECK(std::abs(got - want) <= 1e-10 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("hermite derivative identity H'_n = 2 n H_{n-1}") {
  for (int n = 1; n <= 12; ++n)
    for (double xi : {-2.3, -0.7, 0.0, 0.4, 1.9, 3.5}) {
      const double d = hermite(n, xi).derivative;
      const double want = 2.0 * n * hermite(n - 1, xi).value;
      CHECK(d == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("eigen1d orthonormality by trapezoid quadrature") {
  const double omega = std::numbers::sqrt2 / 2.0;
  const int N = 4000;
  const double L = 14.0;
  for (int k = 0; k <= 6; ++k)
    for (int l = k; l <= 6; ++l) {
      double acc = 0;
      for (int i = 0; i <= N; ++i) {
        const double x = -L + 2 * L * i / N;
        const double w = (i == 0 || i == N) ? 0.5 : 1.0;
        acc += w * eigen1d(k, omega, x).value * eigen1d(l, omega, x).value;
      }
      acc *= 2 * L / N;
      CHECK(acc == doctest::Approx(k == l ? 1.0 : 0.0).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("eigen1d satisfies the oscillator ODE") {
  // -1/2 u'' + 1/2 w^2 x^2 u = (l + 1/2) w u
  for (int l : {0, 1, 3, 6})
    for (double omega : {1.0, std::numbers::sqrt2 / 2.0})
      for (double x : {-1.7, 0.2, 2.9}) {
        const Eigen1d e = eigen1d(l, omega, x);
        const double lhs = -0.5 * e.d2 + 0.5 * omega * omega * x * x * e.value;
        const double rhs = (l + 0.5) * omega * e.value;
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10).scale(1.0));
      }
}

TEST_CASE("eigen1d first derivative vs central differences") {
  const double h = 1e-6;
  for (int l : {0, 2, 5})
    for (double x : {-2.1, 0.3, 1.8}) {
      const double fd =
          (eigen1d(l, 1.0, x + h).value - eigen1d(l, 1.0, x - h).value) / (2 * h);
      CHECK(eigen1d(l, 1.0, x).d1 == doctest::Approx(fd).epsilon(1e-7).scale(1.0));
    }
}

TEST_CASE("mode phase is linear with the expected slope") {
  const OscillatorParams p{1.0, std::numbers::sqrt2 / 2.0};
  const Mode m{3, 4};
  const double want = (0.5 + 3) * p.omega1 + (0.5 + 4) * p.omega2;
  CHECK(mode_phase(m, p, 1.0) == doctest::Approx(want).epsilon(1e-14));
  CHECK(mode_phase(m, p, 2.5) == doctest::Approx(2.5 * want).epsilon(1e-14));
  CHECK(mode_phase(m, p, 0.0) == 0.0);
}

TEST_CASE("hermite roots match the closed forms for small n") {
  {
    const auto r = hermite_roots(1);
    REQUIRE(r.size() == 1);
    CHECK(std::abs(r[0]) < 1e-14);
  }
  {
    const auto r = hermite_roots(2);
    REQUIRE(r.size() == 2);
    CHECK(r[0] == doctest::Approx(-std::sqrt(0.5)).epsilon(1e-13));
    CHECK(r[1] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-13));
  }
  {
    const auto r = hermite_roots(3);
    REQUIRE(r.size() == 3);
    CHECK(r[0] == doctest::Approx(-std::sqrt(1.5)).epsilon(1e-13));
    CHECK(std::abs(r[1]) < 1e-14);
    CHECK(r[2] == doctest::Approx(std::sqrt(1.5)).epsilon(1e-13));
  }
  {
    // H_4 roots: xi^2 = (3 +- sqrt(6)) / 2
    const auto r = hermite_roots(4);
    REQUIRE(r.size() == 4);
    const double a = std::sqrt((3 - std::sqrt(6.0)) / 2);
    const double b = std::sqrt((3 + std::sqrt(6.0)) / 2);
    CHECK(r[0] == doctest::Approx(-b).epsilon(1e-13));
    CHECK(r[1] == doctest::Approx(-a).epsilon(1e-13));
    CHECK(r[2] == doctest::Approx(a).epsilon(1e-13));
    CHECK(r[3] == doctest::Approx(b).epsilon(1e-13));
  }
  // Every reported root really is a root, and they are ascending.
  for (int n : {5, 8, 13}) {
    const auto r = hermite_roots(n);
    REQUIRE(int(r.size()) == n);
    for (size_t i = 0; i + 1 < r.size(); ++i) CHECK(r[i] < r[i + 1]);
    for (double xi : r) CHECK(std::abs(hermite(n, xi).value) < 1e-7 * std::abs(hermite(n, xi).derivative));
  }
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(hermite(-1, 0.0), ArgumentError);
  CHECK_THROWS_AS(hermite(kMaxQuantumNumber + 1, 0.0), ArgumentError);
  CHECK_THROWS_AS(eigen1d(0, -1.0, 0.0), ArgumentError);
  CHECK_THROWS_AS(eigen1d(0, 0.0, 0.0), ArgumentError);
  CHECK_THROWS_AS(hermite_roots(-2), ArgumentError);
}
