#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace incompat::testing {

namespace {

std::vector<std::size_t> digits(std::size_t flat, std::span<const std::size_t> dims) {
  std::vector<std::size_t> out(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    out[k] = flat % dims[k];
    flat /= dims[k];
  }
  return out;
}

std::size_t flatten(std::span<const std::size_t> idx, std::span<const std::size_t> dims) {
  std::size_t flat = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) flat = flat * dims[k] + idx[k];
  return flat;
}

CMatrix transpose_last_two(const CMatrix& m, std::size_t d) {
  const std::size_t dims[3] = {d, d, d};
  CMatrix out(m.dim());
  for (std::size_t r = 0; r < m.dim(); ++r)
    for (std::size_t c = 0; c < m.dim(); ++c) {
      auto ri = digits(r, dims);
      auto ci = digits(c, dims);
      std::swap(ri[1], ci[1]);
      std::swap(ri[2], ci[2]);
      out(flatten(ri, dims), flatten(ci, dims)) = m(r, c);
    }
  return out;
}

// Solves g c = b by Gaussian elimination; free variables (zero pivots) are set to 0.
std::vector<Complex> solve_consistent(std::vector<std::vector<Complex>> g, std::vector<Complex> b) {
  const std::size_t n = b.size();
  std::vector<int> pivot_col(n, -1);
  std::size_t row = 0;
  for (std::size_t col = 0; col < n && row < n; ++col) {
    std::size_t best = row;
    for (std::size_t r = row; r < n; ++r)
      if (std::abs(g[r][col]) > std::abs(g[best][col])) best = r;
    if (std::abs(g[best][col]) < 1e-9) continue;
    std::swap(g[row], g[best]);
    std::swap(b[row], b[best]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == row) continue;
      const Complex f = g[r][col] / g[row][col];
      for (std::size_t c = col; c < n; ++c) g[r][c] -= f * g[row][c];
      b[r] -= f * b[row];
    }
    pivot_col[row] = static_cast<int>(col);
    ++row;
  }
  std::vector<Complex> x(n, 0.0);
  for (std::size_t r = 0; r < row; ++r) x[pivot_col[r]] = b[r] / g[r][pivot_col[r]];
  return x;
}

double cross(const Pt& o, const Pt& a, const Pt& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

bool separated_along_edges(std::span<const Pt> a, std::span<const Pt> b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Pt& p = a[i];
    const Pt& q = a[(i + 1) % a.size()];
    const Pt n{q[1] - p[1], p[0] - q[0]};
    double amin = 1e300, amax = -1e300, bmin = 1e300, bmax = -1e300;
    for (const auto& v : a) {
      const double s = n[0] * v[0] + n[1] * v[1];
      amin = std::min(amin, s);
      amax = std::max(amax, s);
    }
    for (const auto& v : b) {
      const double s = n[0] * v[0] + n[1] * v[1];
      bmin = std::min(bmin, s);
      bmax = std::max(bmax, s);
    }
    if (amax < bmin - 1e-14 || bmax < amin - 1e-14) return true;
  }
  return false;
}

}  // namespace

CMatrix naive_partial_trace(const CMatrix& m, std::span<const std::size_t> dims, std::span<const std::size_t> keep) {
  std::vector<std::size_t> kept_dims;
  for (auto k : keep) kept_dims.push_back(dims[k]);
  std::size_t out_dim = 1;
  for (auto k : kept_dims) out_dim *= k;
  CMatrix out(out_dim);
  for (std::size_t r = 0; r < m.dim(); ++r)
    for (std::size_t c = 0; c < m.dim(); ++c) {
      const auto ri = digits(r, dims);
      const auto ci = digits(c, dims);
      bool traced_match = true;
      for (std::size_t k = 0; k < dims.size(); ++k) {
        if (std::find(keep.begin(), keep.end(), k) == keep.end() && ri[k] != ci[k]) traced_match = false;
      }
      if (!traced_match) continue;
      std::vector<std::size_t> rk, ck;
      for (auto k : keep) {
        rk.push_back(ri[k]);
        ck.push_back(ci[k]);
      }
      out(flatten(rk, kept_dims), flatten(ck, kept_dims)) += m(r, c);
    }
  return out;
}

CMatrix mc_twirl_choi(const ChannelChoi& e, int samples, Rng& rng) {
  const std::size_t d = e.din();
  CMatrix choi(d * d);
  for (int s = 0; s < samples; ++s) {
    const CMatrix u = haar_unitary(d, rng);
    const CMatrix ua = u.adjoint();
    for (std::size_t m = 0; m < d; ++m)
      for (std::size_t n = 0; n < d; ++n) {
        const CMatrix out = ua * apply_channel(e, u * CMatrix::unit(d, m, n) * ua) * u;
        choi += kron(out, CMatrix::unit(d, m, n));
      }
  }
  return choi / static_cast<double>(samples);
}

CMatrix slot_permutation(const std::array<int, 3>& slots, std::size_t d) {
  const std::size_t dims[3] = {d, d, d};
  CMatrix v(d * d * d);
  for (std::size_t flat = 0; flat < d * d * d; ++flat) {
    const auto x = digits(flat, dims);
    const std::size_t y[3] = {x[slots[0]], x[slots[1]], x[slots[2]]};
    v(flatten(y, dims), flat) = 1.0;
  }
  return v;
}

CMatrix commutant_projection(const CMatrix& x, std::size_t d) {
  const std::array<std::array<int, 3>, 6> slots = {
      {{0, 1, 2}, {1, 0, 2}, {2, 1, 0}, {0, 2, 1}, {1, 2, 0}, {2, 0, 1}}};
  std::vector<CMatrix> basis;
  for (const auto& s : slots) basis.push_back(transpose_last_two(slot_permutation(s, d), d));
  std::vector<std::vector<Complex>> g(6, std::vector<Complex>(6));
  std::vector<Complex> b(6);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) g[i][j] = hs_inner(basis[i], basis[j]);
    b[i] = hs_inner(basis[i], x);
  }
  const auto c = solve_consistent(g, b);
  CMatrix out(x.dim());
  for (std::size_t i = 0; i < 6; ++i) out += c[i] * basis[i];
  return out;
}

double brute_fourier_optimum(std::size_t d) {
  // e0 and the orthonormalized f0 span the plane; the overlaps with e0 and f0
  // are real there, so a real angle covers the optimum.
  const double c = 1.0 / std::sqrt(static_cast<double>(d));
  const double s = std::sqrt(1.0 - c * c);
  auto value = [&](double theta) {
    const double a = std::cos(theta);
    const double b = std::sin(theta);
    const double w1 = a * a;
    const double inner_f = c * a + s * b;
    return std::min(w1, inner_f * inner_f);
  };
  constexpr int steps = 20000;
  double best_theta = 0.0, best = -1.0;
  for (int i = 0; i <= steps; ++i) {
    const double th = std::numbers::pi * i / steps;
    const double v = value(th);
    if (v > best) {
      best = v;
      best_theta = th;
    }
  }
  double lo = best_theta - std::numbers::pi / steps;
  double hi = best_theta + std::numbers::pi / steps;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 0; i < 200; ++i) {
    const double m1 = hi - g * (hi - lo);
    const double m2 = lo + g * (hi - lo);
    (value(m1) < value(m2) ? lo : hi) = (value(m1) < value(m2) ? m1 : m2);
  }
  return value(0.5 * (lo + hi));
}

double busch_margin(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  double plus = 0.0, minus = 0.0;
  for (int i = 0; i < 3; ++i) {
    plus += (a[i] + b[i]) * (a[i] + b[i]);
    minus += (a[i] - b[i]) * (a[i] - b[i]);
  }
  return 2.0 - std::sqrt(plus) - std::sqrt(minus);
}

Povm qubit_binary_observable(const std::array<double, 3>& r) {
  const CMatrix sx{{0.0, 1.0}, {1.0, 0.0}};
  const CMatrix sy{{0.0, Complex(0.0, -1.0)}, {Complex(0.0, 1.0), 0.0}};
  const CMatrix sz{{1.0, 0.0}, {0.0, -1.0}};
  const CMatrix rs = r[0] * sx + r[1] * sy + r[2] * sz;
  const CMatrix id = CMatrix::identity(2);
  return Povm(2, {0.5 * (id + rs), 0.5 * (id - rs)});
}

std::vector<Pt> random_polygon(Rng& rng, int points) {
  std::uniform_real_distribution<double> axis(0.5, 2.0), angle(0.0, 2.0 * std::numbers::pi), shift(-0.3, 0.3);
  const double a = axis(rng), b = axis(rng), rot = angle(rng);
  const double cx = shift(rng), cy = shift(rng);
  std::vector<double> angles(points);
  for (auto& t : angles) t = angle(rng);
  std::sort(angles.begin(), angles.end());
  std::vector<Pt> poly;
  for (double t : angles) {
    const double x = a * std::cos(t), y = b * std::sin(t);
    poly.push_back({cx + std::cos(rot) * x - std::sin(rot) * y, cy + std::sin(rot) * x + std::cos(rot) * y});
  }
  return poly;
}

double exact_segment_robustness(std::span<const Pt> poly, const Pt& x, const Pt& y) {
  double t = 1.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Pt& p = poly[i];
    const Pt& q = poly[(i + 1) % poly.size()];
    const double a = cross(p, q, y);
    if (a < -1e-12) return -1.0;
    const Pt dir{x[0] - y[0], x[1] - y[1]};
    const double b = (q[0] - p[0]) * dir[1] - (q[1] - p[1]) * dir[0];
    if (b < 0.0) t = std::min(t, a / -b);
  }
  return t;
}

bool polygons_intersect(std::span<const Pt> a, std::span<const Pt> b) {
  return !separated_along_edges(a, b) && !separated_along_edges(b, a);
}

double polygon_k_robustness(std::span<const Pt> l, std::span<const Pt> k, const Pt& x, double tol) {
  auto feasible = [&](double t) {
    std::vector<Pt> moved;
    for (const auto& v : k) moved.push_back({t * x[0] + (1.0 - t) * v[0], t * x[1] + (1.0 - t) * v[1]});
    return polygons_intersect(l, moved);
  };
  if (!feasible(0.0)) throw std::invalid_argument("polygon_k_robustness: K does not meet L");
  if (feasible(1.0)) return 1.0;
  double lo = 0.0, hi = 1.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return lo;
}

Pt random_inside(std::span<const Pt> poly, Rng& rng) {
  const auto w = random_distribution(poly.size(), rng);
  Pt p{0.0, 0.0};
  for (std::size_t i = 0; i < poly.size(); ++i) {
    p[0] += w[i] * poly[i][0];
    p[1] += w[i] * poly[i][1];
  }
  return p;
}

}  // namespace incompat::testing
