#include "incompat/random.hpp"

#include <cmath>

#include "incompat/errors.hpp"

namespace incompat {

namespace {

Complex gaussian(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double re = n(rng);
  const double im = n(rng);
  return {re / std::sqrt(2.0), im / std::sqrt(2.0)};
}

// Orthonormalizes `cols` (each of length rows) in place by modified Gram-Schmidt.
void orthonormalize(std::vector<CVector>& cols) {
  for (std::size_t k = 0; k < cols.size(); ++k) {
    for (std::size_t i = 0; i < k; ++i) {
      const Complex c = inner(cols[i], cols[k]);
      for (std::size_t r = 0; r < cols[k].size(); ++r) cols[k][r] -= c * cols[i][r];
    }
    const double nk = norm(cols[k]);
    if (nk < 1e-12) throw OracleError("orthonormalize: degenerate Gaussian sample");
    for (auto& z : cols[k]) z /= nk;
  }
}

// Haar isometry C^din -> C^rows, returned as din columns.
std::vector<CVector> random_isometry(std::size_t rows, std::size_t din, Rng& rng) {
  if (rows < din) throw DimensionError("random_isometry: target smaller than source");
  std::vector<CVector> cols(din, CVector(rows));
  for (auto& c : cols)
    for (auto& z : c) z = gaussian(rng);
  orthonormalize(cols);
  return cols;
}

}  // namespace

CMatrix ginibre(std::size_t d, Rng& rng) {
  CMatrix g(d);
  for (auto& z : g.entries()) z = gaussian(rng);
  return g;
}

CMatrix haar_unitary(std::size_t d, Rng& rng) {
  const auto cols = random_isometry(d, d, rng);
  CMatrix u(d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < d; ++i) u(i, j) = cols[j][i];
  return u;
}

std::vector<double> random_distribution(std::size_t n, Rng& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(n);
  double s = 0.0;
  for (auto& x : p) {
    x = e(rng);
    s += x;
  }
  for (auto& x : p) x /= s;
  return p;
}

CMatrix random_hermitian(std::size_t d, Rng& rng) { return ginibre(d, rng).hermitian_part(); }

CMatrix random_state(std::size_t d, Rng& rng) {
  const CMatrix g = ginibre(d, rng);
  CMatrix rho = (g * g.adjoint()).hermitian_part();
  return rho / rho.trace().real();
}

CVector random_unit_vector(std::size_t d, Rng& rng) {
  CVector v(d);
  for (auto& z : v) z = gaussian(rng);
  const double n = norm(v);
  for (auto& z : v) z /= n;
  return v;
}

Povm random_povm(std::size_t d, std::size_t outcomes, Rng& rng) {
  std::vector<CMatrix> parts;
  CMatrix sum(d);
  for (std::size_t j = 0; j < outcomes; ++j) {
    const CMatrix g = ginibre(d, rng);
    parts.push_back((g * g.adjoint()).hermitian_part());
    sum += parts.back();
  }
  const CMatrix s = inverse_sqrt(sum);
  std::vector<CMatrix> effects;
  for (const auto& p : parts) effects.push_back((s * p * s).hermitian_part());
  return Povm(d, std::move(effects));
}

ChannelChoi random_channel(std::size_t din, std::size_t dout, std::size_t kraus_rank, Rng& rng) {
  const auto v = random_isometry(dout * kraus_rank, din, rng);
  CMatrix choi(dout * din);
  for (std::size_t i = 0; i < kraus_rank; ++i) {
    // Kraus operator K_i(a, m) = v[m][a * rank + i].
    CVector vec(dout * din);
    for (std::size_t a = 0; a < dout; ++a)
      for (std::size_t m = 0; m < din; ++m) vec[a * din + m] = v[m][a * kraus_rank + i];
    choi += CMatrix::projector(vec);
  }
  return ChannelChoi(din, dout, choi.hermitian_part());
}

MarkovKernel random_kernel(std::size_t rows, std::size_t cols, Rng& rng) {
  std::vector<double> e(rows * cols);
  for (std::size_t w = 0; w < cols; ++w) {
    const auto p = random_distribution(rows, rng);
    for (std::size_t y = 0; y < rows; ++y) e[y * cols + w] = p[y];
  }
  return MarkovKernel(rows, cols, std::move(e));
}

Instrument random_instrument(std::size_t d, std::size_t outcomes, Rng& rng) {
  // A channel into C^d (x) C^outcomes read out on the second factor.
  const ChannelChoi joint = random_channel(d, d * outcomes, 2, rng);
  std::vector<CMatrix> blocks(outcomes, CMatrix(d * d));
  for (std::size_t j = 0; j < outcomes; ++j)
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b)
        for (std::size_t m = 0; m < d; ++m)
          for (std::size_t n = 0; n < d; ++n)
            blocks[j](a * d + m, b * d + n) = joint.choi()((a * outcomes + j) * d + m, (b * outcomes + j) * d + n);
  for (auto& b : blocks) b = b.hermitian_part();
  return Instrument(d, d, std::move(blocks));
}

}  // namespace incompat
