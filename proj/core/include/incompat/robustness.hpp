#pragma once

// Robustness of membership in a convex set L0: w(x|y) is the largest t with
// t x + (1 - t) y in L0, and the absolute version takes the supremum over
// noise points y from a set K.

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "incompat/compat.hpp"

namespace incompat {

enum class Membership { Inside, Outside, Undecided };

/// Membership test for points of a real coordinate space.
using MembershipOracle = std::function<Membership(std::span<const double>)>;
/// Membership of t x + (1 - t) y along a fixed segment.
using SegmentOracle = std::function<Membership(double t)>;

enum class EstimateMode { Relative, KAbsoluteSampled, ClosedForm };

std::string_view to_string(EstimateMode m);

struct RobustnessEstimate {
  /// Certified value; equals lo.
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  /// True when no grid point of the segment was inside.
  bool bracket_empty = false;
  EstimateMode mode = EstimateMode::Relative;
  /// Index of the noise candidate achieving the value (k_robustness_sampled).
  std::size_t witness_index = 0;
  int oracle_calls = 0;
};

inline constexpr int kScanIntervals = 32;

/// Scans t = 1, 31/32, ..., 0 for the first inside point and bisects the
/// boundary above it until hi - lo <= bisect_tol. Undecided answers count as
/// outside, so value = lo is always certified inside.
RobustnessEstimate relative_robustness(const SegmentOracle& oracle, double bisect_tol);
RobustnessEstimate relative_robustness(std::span<const double> x, std::span<const double> y,
                                       const MembershipOracle& oracle, double bisect_tol);

/// Best relative robustness over the candidates: a lower bound on the
/// absolute robustness unless an optimal noise point is among them.
RobustnessEstimate k_robustness_sampled(std::span<const SegmentOracle> candidates, double bisect_tol);

Membership to_membership(Verdict v);

/// w(x|y) for a device pair against its compatibility oracle.
template <class Pair>
RobustnessEstimate relative_robustness(const Pair& x, const Pair& y, const SolverConfig& cfg = {},
                                       double bisect_tol = 1e-3) {
  return relative_robustness(
      [&](double t) { return to_membership(compatibility_verdict(mix(x, y, t), cfg)); }, bisect_tol);
}

template <class Pair>
RobustnessEstimate k_robustness_sampled(const Pair& x, std::span<const Pair> candidates, const SolverConfig& cfg = {},
                                        double bisect_tol = 1e-3) {
  std::vector<SegmentOracle> oracles;
  for (const auto& y : candidates) {
    oracles.push_back([&x, &y, cfg](double t) { return to_membership(compatibility_verdict(mix(x, y, t), cfg)); });
  }
  return k_robustness_sampled(std::span<const SegmentOracle>(oracles), bisect_tol);
}

/// R = 1/w - 1; +infinity at w = 0. Throws WeightOutOfRange outside [0, 1].
double to_R(double w);
/// The value 1/2 below which no pair of devices can fall.
double global_lower_bound();
/// (2 + d) / (2 (1 + d)), the tighter bound for d-dimensional input.
double heinosaari_lower_bound(std::size_t d);

using Point2 = std::array<double, 2>;

/// Closed convex hull of the vertices; throws DegeneratePolygon for fewer
/// than three non-collinear points.
MembershipOracle polygon_oracle(std::span<const Point2> vertices);
/// Counter-clockwise hull vertices (monotone chain), collinear points dropped.
std::vector<Point2> convex_hull(std::span<const Point2> points);

}  // namespace incompat
