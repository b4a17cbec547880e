#include "bohm/nodes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bohm {

namespace {

// ---------------------------------------------------------------------------
// Reduced TwoEqualM system. After canonical reordering the pair modes share
// m1 and the odd mode carries (m3, n3). Coefficient arguments are absorbed
// into the phase differences, so complex coefficients are supported.
struct ReducedSystem {
  SuperpositionSpec spec;  // possibly axis-swapped copy
  bool swapped = false;    // true when the original was TwoEqualN
  int m1 = 0, n1 = 0, n2 = 0, m3 = 0, n3 = 0;
  double amp1 = 0, amp2 = 0, amp3 = 0;
  double rate1 = 0, off1 = 0;  // D1(t) = rate1 t + off1
  double rate2 = 0, off2 = 0;

  double w1() const { return spec.params.omega1; }
  double w2() const { return spec.params.omega2; }
  double d1(double t) const { return rate1 * t + off1; }
  double d2(double t) const { return rate2 * t + off2; }
};

SuperpositionSpec swap_axes(const SuperpositionSpec& spec) {
  SuperpositionSpec s = spec;
  s.params = {spec.params.omega2, spec.params.omega1};
  for (auto& mode : s.modes) std::swap(mode.m, mode.n);
  return s;
}

double norm_const(int l, double omega) {
  double n = std::pow(omega / std::numbers::pi, 0.25);
  for (int k = 1; k <= l; ++k) n /= std::sqrt(2.0 * k);
  return n;
}

ReducedSystem reduce(const SuperpositionSpec& spec) {
  StructureClass cls = classify(spec);
  ReducedSystem rs;
  if (cls.tag == StructureTag::TwoEqualM) {
    rs.spec = spec;
  } else if (cls.tag == StructureTag::TwoEqualN) {
    rs.spec = swap_axes(spec);
    rs.swapped = true;
    cls = classify(rs.spec);
  } else {
    throw ArgumentError("analytic moving-node path requires a TwoEqualM/TwoEqualN spec");
  }
  const auto& s = rs.spec;
  int i = cls.order[0], j = cls.order[1], k = cls.order[2];
  // Pair ordered so n1 < n2 (the n2 term controls row escapes).
  if (s.modes[i].n > s.modes[j].n) std::swap(i, j);
  rs.m1 = s.modes[i].m;
  rs.n1 = s.modes[i].n;
  rs.n2 = s.modes[j].n;
  rs.m3 = s.modes[k].m;
  rs.n3 = s.modes[k].n;
  rs.amp1 = std::abs(s.coefficients[i]);
  rs.amp2 = std::abs(s.coefficients[j]);
  rs.amp3 = std::abs(s.coefficients[k]);
  auto energy = [&](Mode mode) {
    return (0.5 + mode.m) * s.params.omega1 + (0.5 + mode.n) * s.params.omega2;
  };
  rs.rate1 = energy(s.modes[i]) - energy(s.modes[k]);
  rs.rate2 = energy(s.modes[j]) - energy(s.modes[k]);
  rs.off1 = std::arg(s.coefficients[k]) - std::arg(s.coefficients[i]);
  rs.off2 = std::arg(s.coefficients[k]) - std::arg(s.coefficients[j]);
  return rs;
}

// Gaussian-free Hermite combo  sum_i c_i N_{l_i} H_{l_i}(sqrt(w) u)  and its
// u-derivative. Stable for scanning far outside the wavefunction support.
struct Combo {
  std::vector<int> degree;
  std::vector<double> weight;  // c_i * N_{l_i}
  double omega = 1.0;

  double value(double u) const {
    const double xi = std::sqrt(omega) * u;
    double s = 0;
    for (size_t i = 0; i < degree.size(); ++i) s += weight[i] * hermite(degree[i], xi).value;
    return s;
  }
  double deriv(double u) const {
    const double xi = std::sqrt(omega) * u;
    double s = 0;
    for (size_t i = 0; i < degree.size(); ++i)
      s += weight[i] * hermite(degree[i], xi).derivative;
    return s * std::sqrt(omega);
  }

  /// Crude outer bound on real roots (Cauchy-style): beyond it the
  /// leading-degree term dominates the rest. Degrees are assumed distinct.
  double root_bound(double window) const {
    int lead = -1, second = -1;
    double lead_w = 0;
    double rest = 0;
    for (size_t i = 0; i < degree.size(); ++i) {
      const double scale = std::abs(weight[i]) * std::pow(2.0, degree[i]);
      if (degree[i] > lead) {
        if (lead >= 0) {
          rest += lead_w;
          second = std::max(second, lead);
        }
        lead = degree[i];
        lead_w = scale;
      } else {
        rest += scale;
        second = std::max(second, degree[i]);
      }
    }
    if (lead_w == 0 || lead <= 0 || second < 0) return window;
    const int gap = lead - second;
    double b = 4.0 * (1.0 + std::pow(rest / lead_w, 1.0 / gap));
    const double cap = std::pow(1e250, 1.0 / lead);
    b = std::min(b, cap) / std::sqrt(omega);
    return std::max(b, window);
  }
};

void refine_root(const Combo& f, double a, double b, std::vector<double>& out) {
  double fa = f.value(a);
  for (int it = 0; it < 80 && b - a > 1e-16 * (1.0 + std::abs(a)); ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f.value(m);
    if (fa * fm <= 0) b = m;
    else {
      a = m;
      fa = fm;
    }
  }
  double r = 0.5 * (a + b);
  for (int it = 0; it < 6; ++it) {
    const double d = f.deriv(r);
    if (d == 0) break;
    const double step = f.value(r) / d;
    if (!std::isfinite(step)) break;
    r -= step;
  }
  out.push_back(r);
}

std::vector<double> combo_roots(const Combo& f, double window, int cells) {
  std::vector<double> roots;
  // Fine linear scan over the wavefunction support.
  double prev = -window, fprev = f.value(prev);
  for (int i = 1; i <= cells; ++i) {
    const double u = -window + 2.0 * window * i / cells;
    const double fu = f.value(u);
    if (fprev == 0.0) roots.push_back(prev);
    else if (fprev * fu < 0) refine_root(f, prev, u, roots);
    prev = u;
    fprev = fu;
  }
  // Logarithmic sweep beyond the window catches branches racing to infinity.
  const double bound = f.root_bound(window);
  if (bound > window * 1.0001) {
    const int far_cells = 1500;
    for (int sign : {+1, -1}) {
      double p = sign * window;
      double fp = f.value(p);
      for (int i = 1; i <= far_cells; ++i) {
        const double u = sign * window * std::pow(bound / window, double(i) / far_cells);
        const double fu = f.value(u);
        if (fp * fu < 0) refine_root(f, std::min(p, u), std::max(p, u), roots);
        p = u;
        fp = fu;
      }
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-9; }),
              roots.end());
  return roots;
}

Combo y_combo(const ReducedSystem& rs, double t) {
  const double s1 = std::sin(rs.d1(t)), s2 = std::sin(rs.d2(t));
  if (std::abs(s1) < 1e-12 && std::abs(s2) < 1e-12)
    throw DegenerateTime("moving-node equations degenerate at this instant");
  Combo f;
  f.omega = rs.w2();
  f.degree = {rs.n1, rs.n2};
  f.weight = {rs.amp1 * norm_const(rs.n1, rs.w2()) * s1,
              rs.amp2 * norm_const(rs.n2, rs.w2()) * s2};
  return f;
}

Combo x_combo(const ReducedSystem& rs, double y, double t) {
  const double eta = y;
  const double k_row = rs.amp1 * norm_const(rs.n1, rs.w2()) *
                           hermite(rs.n1, std::sqrt(rs.w2()) * eta).value * std::cos(rs.d1(t)) +
                       rs.amp2 * norm_const(rs.n2, rs.w2()) *
                           hermite(rs.n2, std::sqrt(rs.w2()) * eta).value * std::cos(rs.d2(t));
  const double y3 = norm_const(rs.n3, rs.w2()) * hermite(rs.n3, std::sqrt(rs.w2()) * eta).value;
  Combo g;
  g.omega = rs.w1();
  g.degree = {rs.m1, rs.m3};
  g.weight = {norm_const(rs.m1, rs.w1()) * k_row, rs.amp3 * norm_const(rs.m3, rs.w1()) * y3};
  return g;
}

double default_window(double omega, const SolveOptions& opts) {
  return opts.scan_halfwidth > 0 ? opts.scan_halfwidth : 12.0 / std::sqrt(omega);
}

std::vector<double> y_roots_at(const ReducedSystem& rs, double t, const SolveOptions& opts) {
  return combo_roots(y_combo(rs, t), default_window(rs.w2(), opts), opts.scan_cells);
}

std::vector<double> x_roots_at(const ReducedSystem& rs, double y, double t,
                               const SolveOptions& opts) {
  return combo_roots(x_combo(rs, y, t), default_window(rs.w1(), opts), opts.scan_cells);
}

}  // namespace

std::string to_string(StructureTag tag) {
  switch (tag) {
    case StructureTag::TwoEqualM: return "TwoEqualM";
    case StructureTag::TwoEqualN: return "TwoEqualN";
    case StructureTag::ThreeEqualM: return "ThreeEqualM";
    case StructureTag::ThreeEqualN: return "ThreeEqualN";
    case StructureTag::AllDistinctSmall: return "AllDistinctSmall";
    case StructureTag::GeneralNumeric: return "GeneralNumeric";
  }
  return "?";
}

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::EscapeToInfinity: return "EscapeToInfinity";
    case EventKind::CollisionWithFixed: return "CollisionWithFixed";
    case EventKind::Reappearance: return "Reappearance";
  }
  return "?";
}

std::string to_string(NodeKind kind) {
  return kind == NodeKind::Fixed ? "Fixed" : "Moving";
}

std::string to_string(NodeStatus status) {
  switch (status) {
    case NodeStatus::Active: return "Active";
    case NodeStatus::Escaped: return "Escaped";
    case NodeStatus::Collided: return "Collided";
  }
  return "?";
}

StructureClass classify(const SuperpositionSpec& spec) {
  spec.validate();
  if (spec.modes.size() != 3)
    throw ArgumentError("classify: exactly 3 modes are supported");
  const auto& md = spec.modes;
  StructureClass cls;
  const bool all_m = md[0].m == md[1].m && md[1].m == md[2].m;
  const bool all_n = md[0].n == md[1].n && md[1].n == md[2].n;
  auto find_pair = [&](auto key) -> std::optional<std::array<int, 3>> {
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        if (key(md[i]) == key(md[j])) return std::array<int, 3>{i, j, 3 - i - j};
    return std::nullopt;
  };
  const double w1 = spec.params.omega1, w2 = spec.params.omega2;
  auto scaled = [](std::vector<double> roots, double omega) {
    for (double& r : roots) r /= std::sqrt(omega);
    return roots;
  };
  if (all_m) {
    cls.tag = StructureTag::ThreeEqualM;
    cls.fixed_x_roots = scaled(hermite_roots(md[0].m), w1);
    return cls;
  }
  if (all_n) {
    cls.tag = StructureTag::ThreeEqualN;
    cls.fixed_y_roots = scaled(hermite_roots(md[0].n), w2);
    return cls;
  }
  if (auto p = find_pair([](Mode m) { return m.m; })) {
    cls.tag = StructureTag::TwoEqualM;
    cls.order = *p;
    cls.fixed_x_roots = scaled(hermite_roots(md[(*p)[0]].m), w1);
    cls.fixed_y_roots = scaled(hermite_roots(md[(*p)[2]].n), w2);
    return cls;
  }
  if (auto p = find_pair([](Mode m) { return m.n; })) {
    cls.tag = StructureTag::TwoEqualN;
    cls.order = *p;
    cls.fixed_y_roots = scaled(hermite_roots(md[(*p)[0]].n), w2);
    cls.fixed_x_roots = scaled(hermite_roots(md[(*p)[2]].m), w1);
    return cls;
  }
  const int max_q = std::max({md[0].m, md[1].m, md[2].m, md[0].n, md[1].n, md[2].n});
  cls.tag = max_q <= 4 ? StructureTag::AllDistinctSmall : StructureTag::GeneralNumeric;
  return cls;
}

std::vector<NodeRecord> fixed_nodes(const SuperpositionSpec& spec) {
  const StructureClass cls = classify(spec);
  std::vector<NodeRecord> out;
  if (cls.tag != StructureTag::TwoEqualM && cls.tag != StructureTag::TwoEqualN) return out;
  int id = 0;
  for (double y : cls.fixed_y_roots)
    for (double x : cls.fixed_x_roots)
      out.push_back({id++, NodeKind::Fixed, x, y, 0.0, NodeStatus::Active});
  return out;
}

std::vector<double> moving_node_y_equation(const SuperpositionSpec& spec, double t,
                                           const SolveOptions& opts) {
  const ReducedSystem rs = reduce(spec);
  auto roots = y_roots_at(rs, t, opts);
  if (rs.swapped) { /* roots are in the swapped axis; caller asked for it explicitly */
  }
  return roots;
}

std::vector<NodeRecord> solve_moving_nodes(const SuperpositionSpec& spec, double t,
                                           const SolveOptions& opts) {
  const ReducedSystem rs = reduce(spec);
  std::vector<NodeRecord> out;
  for (double y : y_roots_at(rs, t, opts)) {
    for (double x : x_roots_at(rs, y, t, opts)) {
      NodeRecord rec{-1, NodeKind::Moving, x, y, t, NodeStatus::Active};
      if (rs.swapped) std::swap(rec.x, rec.y);
      out.push_back(rec);
    }
  }
  return out;
}

std::vector<Vec2> grid_scan_nodes(const SuperpositionSpec& spec, double t,
                                  const Rect& region, int resolution) {
  if (resolution < 100) throw ArgumentError("grid_scan_nodes: resolution must be >= 100");
  const int nx = resolution, ny = resolution;
  std::vector<double> re((nx + 1) * (ny + 1)), im((nx + 1) * (ny + 1));
  auto at = [&](int i, int j) { return j * (nx + 1) + i; };
  const double dx = (region.xmax - region.xmin) / nx;
  const double dy = (region.ymax - region.ymin) / ny;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      const Complex p =
          eval_jet(spec, region.xmin + i * dx, region.ymin + j * dy, t).psi;
      re[at(i, j)] = p.real();
      im[at(i, j)] = p.imag();
    }
  auto straddles = [](double a, double b, double c, double d) {
    const double lo = std::min({a, b, c, d}), hi = std::max({a, b, c, d});
    return lo <= 0.0 && hi >= 0.0;
  };
  std::vector<Vec2> found;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (!straddles(re[at(i, j)], re[at(i + 1, j)], re[at(i, j + 1)], re[at(i + 1, j + 1)]) ||
          !straddles(im[at(i, j)], im[at(i + 1, j)], im[at(i, j + 1)], im[at(i + 1, j + 1)]))
        continue;
      Vec2 p{region.xmin + (i + 0.5) * dx, region.ymin + (j + 0.5) * dy};
      bool ok = false;
      for (int it = 0; it < 60; ++it) {
        const FieldJet jet = eval_jet(spec, p.x, p.y, t);
        if (std::abs(jet.psi) < 1e-12) {
          ok = true;
          break;
        }
        const Mat2 jac{jet.gx.real(), jet.gy.real(), jet.gx.imag(), jet.gy.imag()};
        Vec2 step;
        if (!jac.solve({jet.psi.real(), jet.psi.imag()}, step)) break;
        p = p - step;
        if (step.norm() > 2.0 * (dx + dy)) break;  // left the cell: spurious seed
      }
      if (!ok || !region.contains(p)) continue;
      bool dup = false;
      for (const Vec2& q : found)
        if (dist(p, q) < 1e-6) dup = true;
      if (!dup) found.push_back(p);
    }
  std::sort(found.begin(), found.end(), [](Vec2 a, Vec2 b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  });
  return found;
}

std::optional<Vec2> NodeTrack::position_at(double t) const {
  const TrackSample* prev = nullptr;
  for (const auto& s : samples) {
    if (s.t >= t) {
      if (s.status != NodeStatus::Active) return std::nullopt;
      if (!prev || s.t == t) return Vec2{s.x, s.y};
      // A non-active predecessor means the node was absent over (prev, s):
      // never interpolate across an escape gap.
      if (prev->status != NodeStatus::Active) return std::nullopt;
      const double a = (t - prev->t) / (s.t - prev->t);
      return Vec2{prev->x + a * (s.x - prev->x), prev->y + a * (s.y - prev->y)};
    }
    prev = &s;
  }
  if (prev && prev->status == NodeStatus::Active) return Vec2{prev->x, prev->y};
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Continuation tracker.

namespace {

struct Branch {
  int id = -1;
  double x = 0;
  bool active = true;
};

struct Row {
  double y = 0;
  std::vector<Branch> branches;
  bool active = true;
};

struct FixedPoint {
  int id;
  Vec2 p;
};

// Bisection for the time at which this row's y-branch crosses level y_star.
double bisect_row_crossing(const ReducedSystem& rs, const SolveOptions& opts, double ta,
                           double tb, double ya, double yb, double y_star) {
  auto row_y = [&](double t, double guess) {
    double best = guess;
    double best_d = 1e300;
    for (double r : y_roots_at(rs, t, opts)) {
      const double d = std::abs(r - guess);
      if (d < best_d) {
        best_d = d;
        best = r;
      }
    }
    return best;
  };
  double fa = ya - y_star;
  double guess_a = ya, guess_b = yb;
  for (int it = 0; it < 60; ++it) {
    const double tm = 0.5 * (ta + tb);
    const double ym = row_y(tm, 0.5 * (guess_a + guess_b));
    const double fm = ym - y_star;
    if (fa * fm <= 0) {
      tb = tm;
      guess_b = ym;
    } else {
      ta = tm;
      guess_a = ym;
      fa = fm;
    }
  }
  return 0.5 * (ta + tb);
}

// Next zero of the row-escape sine at or after t.
double next_sine_zero(const ReducedSystem& rs, double t) {
  if (std::abs(rs.rate2) < 1e-300) return t;
  const double phase = (rs.rate2 * t + rs.off2) / std::numbers::pi;
  // The zero times increase with k when rate2 > 0 and decrease otherwise.
  const double k = rs.rate2 > 0 ? std::ceil(phase - 1e-9) : std::floor(phase + 1e-9);
  return (k * std::numbers::pi - rs.off2) / rs.rate2;
}

}  // namespace

std::vector<NodeTrack> track_nodes(const SuperpositionSpec& spec, double t0, double t1,
                                   double dt_max, const TrackOptions& opts) {
  if (!(t0 < t1)) throw ArgumentError("track_nodes: need t0 < t1");
  const StructureClass cls = classify(spec);
  if (cls.tag != StructureTag::TwoEqualM && cls.tag != StructureTag::TwoEqualN)
    throw ArgumentError("track_nodes: analytic tracking needs a TwoEqualM/TwoEqualN spec");
  const ReducedSystem rs = reduce(spec);
  const bool sw = rs.swapped;
  auto unswap = [&](double x, double y) { return sw ? Vec2{y, x} : Vec2{x, y}; };

  // Fixed grid in reduced coordinates.
  const StructureClass rcls = classify(rs.spec);
  std::vector<double> fx = rcls.fixed_x_roots;
  std::vector<double> fy = rcls.fixed_y_roots;
  std::sort(fx.begin(), fx.end());
  std::sort(fy.begin(), fy.end());

  // Initial rows at t0.
  std::vector<Row> rows;
  for (double y : y_roots_at(rs, t0, opts.solve)) {
    Row row;
    row.y = y;
    for (double x : x_roots_at(rs, y, t0, opts.solve)) row.branches.push_back({-1, x, true});
    rows.push_back(row);
  }

  // Label everything: rows (fixed and moving) by descending y; within a row
  // in-frame nodes ascending x first, out-of-frame after.
  struct LabelRow {
    double y;
    bool moving;
    size_t index;  // into rows, or fy
  };
  std::vector<LabelRow> label_rows;
  for (size_t i = 0; i < fy.size(); ++i) label_rows.push_back({fy[i], false, i});
  for (size_t i = 0; i < rows.size(); ++i) label_rows.push_back({rows[i].y, true, i});
  std::sort(label_rows.begin(), label_rows.end(),
            [](const LabelRow& a, const LabelRow& b) { return a.y > b.y; });
  const double fw = opts.frame_half_width;

  std::vector<NodeTrack> tracks;
  std::vector<FixedPoint> fixed_pts;
  int next_id = 1;
  for (const LabelRow& lr : label_rows) {
    std::vector<std::pair<double, Branch*>> xs;  // (x, branch or null for fixed)
    if (lr.moving)
      for (auto& br : rows[lr.index].branches) xs.push_back({br.x, &br});
    else
      for (double x : fx) xs.push_back({x, nullptr});
    const bool row_in_frame = std::abs(lr.y) <= fw;
    std::stable_sort(xs.begin(), xs.end(), [&](const auto& a, const auto& b) {
      const bool ina = row_in_frame && std::abs(a.first) <= fw;
      const bool inb = row_in_frame && std::abs(b.first) <= fw;
      if (ina != inb) return ina;
      return a.first < b.first;
    });
    for (auto& [x, br] : xs) {
      NodeTrack tr;
      tr.id = next_id++;
      tr.kind = lr.moving ? NodeKind::Moving : NodeKind::Fixed;
      const Vec2 p = unswap(x, lr.y);
      tr.samples.push_back({t0, p.x, p.y, NodeStatus::Active});
      if (br) br->id = tr.id;
      else fixed_pts.push_back({tr.id, p});
      tracks.push_back(tr);
    }
  }
  auto track_by_id = [&](int id) -> NodeTrack& {
    for (auto& tr : tracks)
      if (tr.id == id) return tr;
    throw std::logic_error("track id lookup failed");
  };
  auto nearest_fixed = [&](Vec2 p) -> const FixedPoint* {
    const FixedPoint* best = nullptr;
    double bd = 1e300;
    for (const auto& f : fixed_pts) {
      const double d = dist(f.p, p);
      if (d < bd) {
        bd = d;
        best = &f;
      }
    }
    return best;
  };

  // March in time.
  double t = t0;
  double dt = dt_max;
  const double dt_min = std::max(1e-9, 1e-7 * (t1 - t0));
  while (t < t1 - 1e-12) {
    const double t_next = std::min(t + dt, t1);
    std::vector<double> yr;
    try {
      yr = y_roots_at(rs, t_next, opts.solve);
    } catch (const DegenerateTime&) {
      t = t_next;  // isolated instant; step over it
      continue;
    }

    // Match active rows to the new y-roots (greedy nearest).
    std::vector<int> claim(yr.size(), -1);
    std::vector<double> new_y(rows.size(), 0);
    std::vector<bool> row_ok(rows.size(), false);
    bool reject = false;
    for (size_t ri = 0; ri < rows.size(); ++ri) {
      if (!rows[ri].active) continue;
      int best = -1;
      double bd = 1e300;
      for (size_t k = 0; k < yr.size(); ++k) {
        if (claim[k] >= 0) continue;
        const double d = std::abs(yr[k] - rows[ri].y);
        if (d < bd) {
          bd = d;
          best = int(k);
        }
      }
      const bool far_row = std::abs(rows[ri].y) > opts.escape_radius;
      if (best < 0 || (!far_row && bd > opts.continuation_jump_max && dt > dt_min)) {
        if (best < 0 && std::abs(rows[ri].y) > 0.8 * opts.escape_radius) {
          // heading out and no counterpart: treat as escape below
          row_ok[ri] = false;
          continue;
        }
        reject = true;
        break;
      }
      if (best >= 0) {
        claim[best] = int(ri);
        new_y[ri] = yr[best];
        row_ok[ri] = true;
      }
    }
    if (reject) {
      dt = std::max(0.5 * dt, dt_min);
      continue;
    }

    // Pending row-level transitions (applied only when the step commits).
    std::vector<size_t> rows_escaping;
    for (size_t ri = 0; ri < rows.size(); ++ri) {
      const Row& row = rows[ri];
      if (!row.active) continue;
      const double y_new = row_ok[ri] ? new_y[ri] : row.y;
      const bool outward = std::abs(y_new) >= std::abs(row.y);
      if ((std::abs(y_new) > opts.escape_radius && outward) || !row_ok[ri])
        rows_escaping.push_back(ri);
    }
    auto escaping = [&](size_t ri) {
      return std::find(rows_escaping.begin(), rows_escaping.end(), ri) !=
             rows_escaping.end();
    };
    std::vector<std::pair<size_t, double>> rows_returning;  // (row index, new y)
    {
      std::vector<bool> taken(rows.size(), false);
      for (size_t k = 0; k < yr.size(); ++k) {
        if (claim[k] >= 0 || std::abs(yr[k]) > opts.escape_radius) continue;
        for (size_t ri = 0; ri < rows.size(); ++ri) {
          if (rows[ri].active || taken[ri]) continue;
          rows_returning.push_back({ri, yr[k]});
          taken[ri] = true;
          break;
        }
      }
    }

    // Advance surviving rows and their x-branches.
    bool jump_reject = false;
    struct Pending {
      Row* row;
      double y;
      double y_prev;
      std::vector<std::pair<Branch*, double>> moves;  // (branch, new x)
      std::vector<std::pair<Branch*, double>> escapes;
      std::vector<std::pair<Branch*, double>> returns;
    };
    std::vector<Pending> pendings;
    for (size_t ri = 0; ri < rows.size(); ++ri) {
      Row& row = rows[ri];
      if (!row.active || !row_ok[ri] || escaping(ri)) continue;
      Pending pend{&row, new_y[ri], row.y, {}, {}, {}};
      auto xs = x_roots_at(rs, new_y[ri], t_next, opts.solve);
      std::vector<bool> used(xs.size(), false);
      for (auto& br : row.branches) {
        if (!br.active) continue;
        int best = -1;
        double bd = 1e300;
        for (size_t k = 0; k < xs.size(); ++k) {
          if (used[k]) continue;
          const double d = std::abs(xs[k] - br.x);
          if (d < bd) {
            bd = d;
            best = int(k);
          }
        }
        const bool far_branch = std::abs(br.x) > opts.escape_radius;
        if (best < 0 || (!far_branch && bd > opts.continuation_jump_max && dt > dt_min)) {
          if (best < 0 && std::abs(br.x) > 0.8 * opts.escape_radius) {
            pend.escapes.push_back({&br, br.x});
            continue;
          }
          jump_reject = true;
          break;
        }
        used[best] = true;
        const double x_new = xs[best];
        if (std::abs(x_new) > opts.escape_radius && std::abs(x_new) > std::abs(br.x))
          pend.escapes.push_back({&br, x_new});
        else
          pend.moves.push_back({&br, x_new});
      }
      if (jump_reject) break;
      // Branch reappearance: unclaimed in-radius root + dormant branch.
      for (size_t k = 0; k < xs.size(); ++k) {
        if (used[k] || std::abs(xs[k]) > opts.escape_radius) continue;
        for (auto& br : row.branches) {
          if (br.active) continue;
          pend.returns.push_back({&br, xs[k]});
          used[k] = true;
          break;
        }
      }
      pendings.push_back(std::move(pend));
    }
    if (jump_reject) {
      dt = std::max(0.5 * dt, dt_min);
      continue;
    }

    // Fixed-row crossings -> collisions of the surviving x-branches with the
    // fixed grid (the companion branch escape is caught by the radius
    // monitor). Detected only for committed steps.
    struct Crossing {
      int branch_id;
      double t;
      int partner;
    };
    std::vector<Crossing> crossings;
    for (size_t ri = 0; ri < rows.size(); ++ri) {
      const Row& row = rows[ri];
      if (!row.active || !row_ok[ri] || escaping(ri)) continue;
      for (double y_star : fy) {
        if ((row.y - y_star) * (new_y[ri] - y_star) >= 0) continue;
        const double t_cross =
            bisect_row_crossing(rs, opts.solve, t, t_next, row.y, new_y[ri], y_star);
        for (const auto& br : row.branches) {
          if (!br.active) continue;
          // At the crossing the surviving x-branches sit on the fixed grid.
          double bd = 1e300;
          int partner = -1;
          for (const auto& f : fixed_pts) {
            const Vec2 q = sw ? Vec2{f.p.y, f.p.x} : f.p;
            if (std::abs(q.y - y_star) > 1e-9) continue;
            const double d = std::abs(q.x - br.x);
            if (d < bd) {
              bd = d;
              partner = f.id;
            }
          }
          if (partner >= 0 && bd < std::max(opts.collision_tol * 50, 0.2))
            crossings.push_back({br.id, t_cross, partner});
        }
      }
    }

    // `refined` marks bisection-accurate instants, which win over the sampled
    // times of the proximity monitor.
    auto add_collision = [&](NodeTrack& tr, double tc, int partner, bool refined) {
      for (auto& ev : tr.events)
        if (ev.kind == EventKind::CollisionWithFixed && ev.partner_fixed_id == partner &&
            std::abs(ev.t - tc) < 0.05) {
          if (refined) ev.t = tc;
          return;
        }
      tr.events.push_back({tc, EventKind::CollisionWithFixed, partner});
    };

    // Commit the step.
    for (const auto& c : crossings)
      add_collision(track_by_id(c.branch_id), c.t, c.partner, true);
    for (size_t ri : rows_escaping) {
      Row& row = rows[ri];
      const double t_esc = next_sine_zero(rs, t);
      for (auto& br : row.branches) {
        if (!br.active) continue;
        NodeTrack& tr = track_by_id(br.id);
        tr.events.push_back({t_esc, EventKind::EscapeToInfinity, -1});
        tr.samples.push_back(
            {t_next, tr.samples.back().x, tr.samples.back().y, NodeStatus::Escaped});
        br.active = false;
      }
      row.active = false;
    }
    for (const auto& [ri, y_new] : rows_returning) {
      Row& row = rows[ri];
      row.active = true;
      row.y = y_new;
      const auto xs = x_roots_at(rs, row.y, t_next, opts.solve);
      std::vector<int> ids;
      for (const auto& br : row.branches) ids.push_back(br.id);
      std::sort(ids.begin(), ids.end());
      row.branches.clear();
      for (size_t q = 0; q < xs.size() && q < ids.size(); ++q) {
        row.branches.push_back({ids[q], xs[q], true});
        NodeTrack& tr = track_by_id(ids[q]);
        tr.events.push_back({t_next, EventKind::Reappearance, -1});
        const Vec2 p = unswap(xs[q], row.y);
        tr.samples.push_back({t_next, p.x, p.y, NodeStatus::Active});
      }
    }
    for (auto& pend : pendings) {
      pend.row->y = pend.y;
      for (auto& [br, x_new] : pend.moves) {
        br->x = x_new;
        NodeTrack& tr = track_by_id(br->id);
        const Vec2 p = unswap(x_new, pend.y);
        tr.samples.push_back({t_next, p.x, p.y, NodeStatus::Active});
        // Proximity-collision monitor (catches grazing passes too).
        const FixedPoint* f = nearest_fixed(p);
        if (f && dist(f->p, p) < opts.collision_tol) add_collision(tr, t_next, f->id, false);
      }
      for (auto& [br, x_new] : pend.escapes) {
        // Refine the escape instant: the branch blows up when the row meets
        // the nearest root of the odd mode's y-factor.
        double t_esc = t_next;
        double best = 1e300;
        for (double y_star : fy) {
          const double d = std::abs(pend.row->y - y_star);
          if (d < best) {
            best = d;
            t_esc = y_star;
          }
        }
        if (best < 1.0) {
          const double y_star = t_esc;
          // The blow-up instant is where the row meets y_star. The radius
          // monitor can fire on either side of it, so search both ways.
          bool found = false;
          for (double dir : {+1.0, -1.0}) {
            if (found) break;
            double ta = t;
            double ya = pend.y_prev;
            for (int k = 1; k <= 200 && !found; ++k) {
              const double tb = t + dir * k * std::max(dt, 1e-4);
              if (tb > t1 + 1.0 || tb < t0) break;
              double yb = ya;
              try {
                double bd = 1e300;
                for (double r : y_roots_at(rs, tb, opts.solve)) {
                  if (std::abs(r - ya) < bd) {
                    bd = std::abs(r - ya);
                    yb = r;
                  }
                }
              } catch (const DegenerateTime&) {
                continue;
              }
              if ((ya - y_star) * (yb - y_star) <= 0) {
                t_esc = bisect_row_crossing(rs, opts.solve, std::min(ta, tb),
                                            std::max(ta, tb), dir > 0 ? ya : yb,
                                            dir > 0 ? yb : ya, y_star);
                found = true;
              } else {
                ta = tb;
                ya = yb;
              }
            }
          }
          if (!found) t_esc = t_next;
        } else {
          t_esc = next_sine_zero(rs, t);
        }
        br->active = false;
        NodeTrack& tr = track_by_id(br->id);
        tr.events.push_back({t_esc, EventKind::EscapeToInfinity, -1});
        tr.samples.push_back(
            {t_next, tr.samples.back().x, tr.samples.back().y, NodeStatus::Escaped});
      }
      for (auto& [br, x_new] : pend.returns) {
        br->active = true;
        br->x = x_new;
        NodeTrack& tr = track_by_id(br->id);
        tr.events.push_back({t_next, EventKind::Reappearance, -1});
        const Vec2 p = unswap(x_new, pend.y);
        tr.samples.push_back({t_next, p.x, p.y, NodeStatus::Active});
      }
    }
    for (const auto& f : fixed_pts) {
      NodeTrack& tr = track_by_id(f.id);
      tr.samples.push_back({t_next, f.p.x, f.p.y, NodeStatus::Active});
    }

    t = t_next;
    dt = std::min(dt * 1.3, dt_max);
  }

  for (auto& tr : tracks) std::sort(tr.events.begin(), tr.events.end(),
                                    [](const NodeEvent& a, const NodeEvent& b) { return a.t < b.t; });
  return tracks;
}

}  // namespace bohm
