#include <gtest/gtest.h>

#include <cmath>

#include "incompat/errors.hpp"
#include "incompat/linalg.hpp"
#include "incompat/random.hpp"
#include "oracles.hpp"

namespace incompat {
namespace {

const CMatrix kSx{{0.0, 1.0}, {1.0, 0.0}};
const CMatrix kSz{{1.0, 0.0}, {0.0, -1.0}};

CMatrix diag(std::initializer_list<double> v) {
  std::vector<double> vals(v);
  return CMatrix::diagonal(vals);
}

TEST(Kron, IdentityTimesIdentity) { EXPECT_EQ(kron(CMatrix::identity(2), CMatrix::identity(2)), CMatrix::identity(4)); }

TEST(Kron, DiagonalProduct) { EXPECT_EQ(kron(diag({1, 2}), diag({3, 4})), diag({3, 4, 6, 8})); }

TEST(Kron, PauliEntries) {
  const CMatrix k = kron(kSx, kSz);
  EXPECT_EQ(k(0, 2), Complex(1.0));
  EXPECT_EQ(k(1, 3), Complex(-1.0));
  EXPECT_EQ(k(0, 0), Complex(0.0));
}

TEST(PartialTrace, OmegaReducesToIdentity) {
  EXPECT_LT(max_abs_diff(partial_trace(omega(2), {2, 2}, {1}), CMatrix::identity(2)), 1e-15);
  EXPECT_LT(max_abs_diff(partial_trace(omega(3), {3, 3}, {0}), CMatrix::identity(3)), 1e-15);
}

TEST(PartialTrace, KeepEverything) {
  Rng rng(1);
  const CMatrix rho = random_state(3, rng);
  EXPECT_EQ(partial_trace(rho, {3}, {0}), rho);
}

TEST(PartialTrace, ProductOperators) {
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const CMatrix a = ginibre(2, rng);
    const CMatrix b = ginibre(3, rng);
    const CMatrix ab = kron(a, b);
    EXPECT_LT(max_abs_diff(partial_trace(ab, {2, 3}, {0}), b.trace() * a), 1e-12);
    EXPECT_LT(max_abs_diff(partial_trace(ab, {2, 3}, {1}), a.trace() * b), 1e-12);
  }
}

TEST(PartialTrace, AgreesWithBruteForce) {
  Rng rng(3);
  const std::vector<std::size_t> dims{2, 3, 2};
  const CMatrix m = ginibre(12, rng);
  for (const std::vector<std::size_t>& keep :
       {std::vector<std::size_t>{0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}, {0, 1, 2}}) {
    const CMatrix fast = partial_trace(m, dims, keep);
    const CMatrix slow = testing::naive_partial_trace(m, dims, keep);
    EXPECT_LT(max_abs_diff(fast, slow), 1e-12);
    EXPECT_NEAR(std::abs(fast.trace() - m.trace()), 0.0, 1e-12);
  }
}

TEST(PartialTrace, RejectsBadFactorisation) {
  EXPECT_THROW(partial_trace(CMatrix::identity(4), {2, 3}, {0}), DimensionError);
  EXPECT_THROW(partial_trace(CMatrix::identity(4), {2, 2}, {2}), DimensionError);
}

TEST(PartialTranspose, TransposesListedFactors) {
  Rng rng(4);
  const CMatrix a = ginibre(2, rng), b = ginibre(2, rng), c = ginibre(2, rng);
  const CMatrix abc = kron(kron(a, b), c);
  EXPECT_LT(max_abs_diff(partial_transpose(abc, {2, 2, 2}, {1, 2}), kron(kron(a, b.transpose()), c.transpose())),
            1e-14);
  EXPECT_LT(max_abs_diff(partial_transpose(abc, {2, 2, 2}, {0}), kron(kron(a.transpose(), b), c)), 1e-14);
}

TEST(PartialTranspose, IsAnInvolution) {
  Rng rng(5);
  const CMatrix m = ginibre(8, rng);
  EXPECT_EQ(partial_transpose(partial_transpose(m, {2, 2, 2}, {1, 2}), {2, 2, 2}, {1, 2}), m);
}

TEST(PartialTranspose, FixesRealSymmetricProducts) {
  const CMatrix s = kron(kSx, kSz);
  EXPECT_EQ(partial_transpose(s, {2, 2}, {0}), s);
  EXPECT_EQ(partial_transpose(s, {2, 2}, {1}), s);
}

TEST(PermuteSystems, SwapMatchesFlipConjugation) {
  Rng rng(6);
  const CMatrix a = ginibre(3, rng), b = ginibre(3, rng);
  const CMatrix f = swap_operator(3);
  EXPECT_LT(max_abs_diff(permute_systems(kron(a, b), {3, 3}, {1, 0}), kron(b, a)), 1e-14);
  EXPECT_LT(max_abs_diff(f * kron(a, b) * f, kron(b, a)), 1e-14);
}

TEST(HermitianEig, DiagonalSpectrum) {
  const auto e = hermitian_eig(diag({3, 1, 2}));
  ASSERT_EQ(e.values.size(), 3u);
  EXPECT_NEAR(e.values[0], 1.0, 1e-15);
  EXPECT_NEAR(e.values[1], 2.0, 1e-15);
  EXPECT_NEAR(e.values[2], 3.0, 1e-15);
}

TEST(HermitianEig, PauliSpectrum) {
  const auto e = hermitian_eig(kSx);
  EXPECT_NEAR(e.values[0], -1.0, 1e-14);
  EXPECT_NEAR(e.values[1], 1.0, 1e-14);
}

TEST(HermitianEig, RankOneProjectorFromFourierVectors) {
  const std::size_t d = 4;
  CVector v(d, 1.0 / std::sqrt(static_cast<double>(d)));
  v[0] += 1.0;
  const double n = norm(v);
  for (auto& x : v) x /= n;
  const auto e = hermitian_eig(CMatrix::projector(v));
  for (std::size_t i = 0; i + 1 < d; ++i) EXPECT_NEAR(e.values[i], 0.0, 1e-12);
  EXPECT_NEAR(e.values[d - 1], 1.0, 1e-12);
}

TEST(HermitianEig, RandomReconstructionAndOrthonormality) {
  Rng rng(7);
  for (std::size_t d : {1u, 2u, 3u, 5u, 8u, 12u, 16u}) {
    const CMatrix m = random_hermitian(d, rng);
    const auto e = hermitian_eig(m);
    const double scale = std::max(1.0, m.frobenius_norm());
    EXPECT_LE((m - e.reconstruct()).frobenius_norm(), 1e-9 * scale) << "d=" << d;
    EXPECT_LE((e.vectors.adjoint() * e.vectors - CMatrix::identity(d)).frobenius_norm(), 1e-10);
    for (std::size_t k = 0; k + 1 < d; ++k) EXPECT_LE(e.values[k], e.values[k + 1]);
  }
}

TEST(HermitianEig, PhaseNormalisation) {
  Rng rng(8);
  const auto e = hermitian_eig(random_hermitian(6, rng));
  for (std::size_t k = 0; k < 6; ++k) {
    const CVector v = e.vector(k);
    for (const auto& z : v) {
      if (std::abs(z) > 1e-12) {
        EXPECT_NEAR(z.imag(), 0.0, 1e-12);
        EXPECT_GT(z.real(), 0.0);
        break;
      }
    }
  }
}

TEST(HermitianEig, Deterministic) {
  Rng rng(9);
  const CMatrix m = random_hermitian(7, rng);
  const auto a = hermitian_eig(m);
  const auto b = hermitian_eig(m);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.vectors, b.vectors);
}

TEST(HermitianEig, WarmStartMatchesColdStart) {
  Rng rng(10);
  const CMatrix m = random_hermitian(9, rng);
  const auto cold = hermitian_eig(m);
  const CMatrix nearby = m + 1e-6 * random_hermitian(9, rng).hermitian_part();
  const auto warm = hermitian_eig_from(nearby.hermitian_part(), cold.vectors);
  const auto ref = hermitian_eig(nearby.hermitian_part());
  for (std::size_t k = 0; k < 9; ++k) EXPECT_NEAR(warm.values[k], ref.values[k], 1e-11);
}

TEST(HermitianEig, RejectsNonHermitian) {
  CMatrix m = CMatrix::identity(2);
  m(0, 1) = 1.0;
  EXPECT_THROW(hermitian_eig(m), NotHermitian);
  EXPECT_THROW(psd_project(m), NotHermitian);
  EXPECT_THROW(min_eigenvalue(m), NotHermitian);
}

TEST(PsdProject, ClipsNegativeEigenvalues) {
  EXPECT_LT(max_abs_diff(psd_project(diag({2, -1})), diag({2, 0})), 1e-15);
  EXPECT_LT(max_abs_diff(psd_project(kSz), diag({1, 0})), 1e-15);
}

TEST(PsdProject, FixedPointIdempotentNonExpansive) {
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    const CMatrix rho = random_state(4, rng);
    EXPECT_LT(max_abs_diff(psd_project(rho), rho), 1e-10);
    const CMatrix a = random_hermitian(4, rng);
    const CMatrix b = random_hermitian(4, rng);
    const CMatrix pa = psd_project(a);
    EXPECT_LT(max_abs_diff(psd_project(pa), pa), 1e-10);
    EXPECT_GE(min_eigenvalue(pa), -1e-10);
    EXPECT_LE((pa - psd_project(b)).frobenius_norm(), (a - b).frobenius_norm() + 1e-10);
  }
}

TEST(PsdProject, IsNearestPositiveMatrix) {
  // Any PSD competitor is at least as far away as the clipped matrix.
  Rng rng(12);
  const CMatrix a = random_hermitian(3, rng);
  const double best = (a - psd_project(a)).frobenius_norm();
  for (int i = 0; i < 200; ++i) {
    const CMatrix g = ginibre(3, rng);
    const CMatrix p = g * g.adjoint() / 3.0;
    EXPECT_GE((a - p).frobenius_norm(), best - 1e-12);
  }
}

TEST(MinEigenvalue, Identity) { EXPECT_NEAR(min_eigenvalue(CMatrix::identity(5)), 1.0, 1e-15); }

TEST(MinEigenvalue, ClonerBoundaryOperator) {
  // (I + (d+2) Omega) / (2 (d+1)) - t Omega at d = 2: zero at t = 3/4, negative beyond.
  const double d = 2.0;
  const CMatrix base = (CMatrix::identity(4) + (d + 2.0) * omega(2)) / (2.0 * (d + 1.0));
  EXPECT_NEAR(min_eigenvalue(base - 0.75 * omega(2)), 0.0, 1e-10);
  EXPECT_LT(min_eigenvalue(base - 0.76 * omega(2)), -1e-3);
}

TEST(PsdSqrt, SquaresBack) {
  Rng rng(13);
  const CMatrix rho = random_state(4, rng);
  const CMatrix s = psd_sqrt(rho);
  EXPECT_LT(max_abs_diff(s * s, rho), 1e-12);
  const CMatrix inv = inverse_sqrt(rho);
  EXPECT_LT(max_abs_diff(inv * rho * inv, CMatrix::identity(4)), 1e-9);
  EXPECT_THROW(inverse_sqrt(diag({1, 0})), ConstraintViolation);
}

TEST(SpecialOperators, OmegaAndSwap) {
  EXPECT_NEAR(omega(3).trace().real(), 3.0, 1e-15);
  EXPECT_EQ(swap_operator(3) * swap_operator(3), CMatrix::identity(9));
  // Omega^Gamma = F
  EXPECT_EQ(partial_transpose(omega(3), {3, 3}, {1}), swap_operator(3));
}

TEST(Matrix, ConstructionChecks) {
  EXPECT_THROW(CMatrix(2, std::vector<Complex>(3)), DimensionError);
  EXPECT_THROW((CMatrix{{1.0, 2.0}, {3.0}}), DimensionError);
  EXPECT_THROW(CMatrix::identity(2) * CMatrix::identity(3), DimensionError);
}

}  // namespace
}  // namespace incompat
