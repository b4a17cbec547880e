#pragma once

#include <array>
#include <cmath>

namespace bohm {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double norm() const { return std::hypot(x, y); }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double dist(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Row-major 2x2 real matrix, just enough for Jacobian work.
struct Mat2 {
  double a = 0, b = 0, c = 0, d = 0;  // [[a b],[c d]]

  double det() const { return a * d - b * c; }
  double trace() const { return a + d; }

  Vec2 apply(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }

  /// Solve M u = rhs. Returns false when singular.
  bool solve(Vec2 rhs, Vec2& u) const {
    const double det_ = det();
    if (std::abs(det_) < 1e-300) return false;
    u = {(d * rhs.x - b * rhs.y) / det_, (-c * rhs.x + a * rhs.y) / det_};
    return true;
  }
};

struct EigenPair {
  double lambda1 = 0, lambda2 = 0;  // lambda1 >= lambda2 when real
  Vec2 v1, v2;                      // unit eigenvectors
  bool real = false;
};

/// Eigen decomposition of a 2x2 matrix; only the real case is filled with
/// vectors (all we need: saddles have real eigenvalues of opposite sign).
inline EigenPair eigen2(const Mat2& m) {
  EigenPair e;
  const double tr = m.trace(), det = m.det();
  const double disc = tr * tr / 4.0 - det;
  if (disc < 0) {
    e.real = false;
    e.lambda1 = e.lambda2 = tr / 2.0;
    return e;
  }
  e.real = true;
  const double s = std::sqrt(disc);
  e.lambda1 = tr / 2.0 + s;
  e.lambda2 = tr / 2.0 - s;
  auto evec = [&](double lam) -> Vec2 {
    // (M - lam I) v = 0; pick the better-conditioned row.
    Vec2 r1{m.a - lam, m.b}, r2{m.c, m.d - lam};
    Vec2 v = (r1.norm() > r2.norm()) ? Vec2{-r1.y, r1.x} : Vec2{-r2.y, r2.x};
    const double n = v.norm();
    return n > 0 ? v * (1.0 / n) : Vec2{1, 0};
  };
  e.v1 = evec(e.lambda1);
  e.v2 = evec(e.lambda2);
  return e;
}

struct Rect {
  double xmin = -5, xmax = 5, ymin = -5, ymax = 5;
  bool contains(Vec2 p) const {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
};

}  // namespace bohm
