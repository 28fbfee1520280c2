#include "incompat/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "incompat/errors.hpp"

namespace incompat {

namespace {

constexpr double kPolygonSlack = 1e-12;

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

}  // namespace

std::string_view to_string(EstimateMode m) {
  switch (m) {
    case EstimateMode::Relative:
      return "relative";
    case EstimateMode::KAbsoluteSampled:
      return "k_absolute_sampled";
    case EstimateMode::ClosedForm:
      return "closed_form";
  }
  return "relative";
}

Membership to_membership(Verdict v) {
  switch (v) {
    case Verdict::Feasible:
      return Membership::Inside;
    case Verdict::Infeasible:
      return Membership::Outside;
    case Verdict::Undecided:
      return Membership::Undecided;
  }
  return Membership::Undecided;
}

RobustnessEstimate relative_robustness(const SegmentOracle& oracle, double bisect_tol) {
  if (!(bisect_tol > 0.0)) throw ConstraintViolation("relative_robustness: bisect_tol must be positive");
  RobustnessEstimate est;
  est.mode = EstimateMode::Relative;
  auto inside = [&](double t) {
    ++est.oracle_calls;
    return oracle(t) == Membership::Inside;
  };

  int found = -1;
  for (int k = kScanIntervals; k >= 0; --k) {
    if (inside(static_cast<double>(k) / kScanIntervals)) {
      found = k;
      break;
    }
  }
  if (found < 0) {
    est.bracket_empty = true;
    return est;
  }
  double lo = static_cast<double>(found) / kScanIntervals;
  if (found == kScanIntervals) {
    est.value = est.lo = est.hi = 1.0;
    return est;
  }
  double hi = static_cast<double>(found + 1) / kScanIntervals;
  while (hi - lo > bisect_tol) {
    const double mid = 0.5 * (lo + hi);
    if (inside(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  est.value = est.lo = lo;
  est.hi = hi;
  return est;
}

RobustnessEstimate relative_robustness(std::span<const double> x, std::span<const double> y,
                                       const MembershipOracle& oracle, double bisect_tol) {
  if (x.size() != y.size()) throw DimensionError("relative_robustness: points differ in dimension");
  std::vector<double> p(x.size());
  return relative_robustness(
      [&](double t) {
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = t * x[i] + (1.0 - t) * y[i];
        return oracle(p);
      },
      bisect_tol);
}

RobustnessEstimate k_robustness_sampled(std::span<const SegmentOracle> candidates, double bisect_tol) {
  if (candidates.empty()) throw ConstraintViolation("k_robustness_sampled: no candidates");
  RobustnessEstimate best;
  int calls = 0;
  bool have = false;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    RobustnessEstimate e = relative_robustness(candidates[i], bisect_tol);
    calls += e.oracle_calls;
    if (!have || (!e.bracket_empty && (best.bracket_empty || e.value > best.value))) {
      best = e;
      best.witness_index = i;
      have = true;
    }
  }
  best.mode = EstimateMode::KAbsoluteSampled;
  best.oracle_calls = calls;
  return best;
}

double to_R(double w) {
  if (!(w >= 0.0 && w <= 1.0)) throw WeightOutOfRange("to_R: weight outside [0, 1]");
  if (w == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / w - 1.0;
}

double global_lower_bound() { return 0.5; }

double heinosaari_lower_bound(std::size_t d) {
  if (d < 2) throw DimensionError("heinosaari_lower_bound: dimension must be at least 2");
  const double x = static_cast<double>(d);
  return (2.0 + x) / (2.0 * (1.0 + x));
}

std::vector<Point2> convex_hull(std::span<const Point2> points) {
  std::vector<Point2> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

MembershipOracle polygon_oracle(std::span<const Point2> vertices) {
  std::vector<Point2> hull = convex_hull(vertices);
  if (hull.size() < 3) throw DegeneratePolygon("polygon_oracle: need three non-collinear vertices");
  return [hull = std::move(hull)](std::span<const double> p) {
    if (p.size() != 2) throw DimensionError("polygon oracle expects two coordinates");
    const Point2 q{p[0], p[1]};
    for (std::size_t i = 0; i < hull.size(); ++i) {
      const Point2& a = hull[i];
      const Point2& b = hull[(i + 1) % hull.size()];
      if (cross(a, b, q) < -kPolygonSlack) return Membership::Outside;
    }
    return Membership::Inside;
  };
}

}  // namespace incompat
