#pragma once

// Dense complex linear algebra used by every other part of the library.
//
// Tensor-product convention: for a factorisation dims = {d0, d1, ...} the
// first subsystem is the slowest-varying index, so the basis vector
// |i0 i1 ...> sits at flat position ((i0 * d1) + i1) * d2 + ... .
// Subsystem indices passed to the partial operations are 0-based.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace incompat {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

/// Absolute entrywise tolerance used when a matrix must be Hermitian.
inline constexpr double kHermitianTol = 1e-10;

/// Square complex matrix stored row-major.
class CMatrix {
 public:
  CMatrix() = default;
  /// Zero matrix of the given dimension.
  explicit CMatrix(std::size_t dim);
  /// Takes ownership of dim*dim row-major entries.
  CMatrix(std::size_t dim, std::vector<Complex> entries);
  CMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static CMatrix identity(std::size_t dim);
  static CMatrix diagonal(std::span<const double> values);
  /// |u><v|
  static CMatrix outer(std::span<const Complex> u, std::span<const Complex> v);
  /// |v><v|
  static CMatrix projector(std::span<const Complex> v);
  /// |i><j| in dimension dim.
  static CMatrix unit(std::size_t dim, std::size_t i, std::size_t j);

  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return dim_ == 0; }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }

  std::span<Complex> entries() noexcept { return data_; }
  std::span<const Complex> entries() const noexcept { return data_; }

  CMatrix adjoint() const;
  CMatrix transpose() const;
  CMatrix conjugate() const;
  /// (M + M^dagger) / 2
  CMatrix hermitian_part() const;

  Complex trace() const;
  double frobenius_norm() const;
  double max_abs() const;
  bool is_hermitian(double tol = kHermitianTol) const;

  CMatrix& operator+=(const CMatrix& other);
  CMatrix& operator-=(const CMatrix& other);
  CMatrix& operator*=(Complex s);
  CMatrix& operator*=(double s);
  CMatrix& operator/=(double s);

  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator-(CMatrix a) { return a *= -1.0; }
  friend CMatrix operator*(CMatrix a, double s) { return a *= s; }
  friend CMatrix operator*(double s, CMatrix a) { return a *= s; }
  friend CMatrix operator*(CMatrix a, Complex s) { return a *= s; }
  friend CMatrix operator*(Complex s, CMatrix a) { return a *= s; }
  friend CMatrix operator/(CMatrix a, double s) { return a /= s; }
  friend bool operator==(const CMatrix&, const CMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<Complex> data_;
};

/// Matrix product.
CMatrix operator*(const CMatrix& a, const CMatrix& b);
/// Matrix-vector product.
CVector apply(const CMatrix& m, std::span<const Complex> v);
/// <u|v>, antilinear in the first slot.
Complex inner(std::span<const Complex> u, std::span<const Complex> v);
double norm(std::span<const Complex> v);
/// tr(a^dagger b)
Complex hs_inner(const CMatrix& a, const CMatrix& b);
double max_abs_diff(const CMatrix& a, const CMatrix& b);
/// Standard basis vector e_i of dimension dim.
CVector basis_vector(std::size_t dim, std::size_t i);

CMatrix kron(const CMatrix& a, const CMatrix& b);
std::size_t dims_product(std::span<const std::size_t> dims);

/// Reduced operator on the subsystems listed in `keep` (in increasing order).
/// Throws DimensionError if the factorisation does not match the matrix.
CMatrix partial_trace(const CMatrix& m, std::span<const std::size_t> dims,
                      std::span<const std::size_t> keep);
CMatrix partial_trace(const CMatrix& m, std::initializer_list<std::size_t> dims,
                      std::initializer_list<std::size_t> keep);

/// Transpose on the listed subsystems only.
CMatrix partial_transpose(const CMatrix& m, std::span<const std::size_t> dims,
                          std::span<const std::size_t> systems);
CMatrix partial_transpose(const CMatrix& m, std::initializer_list<std::size_t> dims,
                          std::initializer_list<std::size_t> systems);

/// Reorders tensor factors: factor k of the result is factor order[k] of m.
CMatrix permute_systems(const CMatrix& m, std::span<const std::size_t> dims,
                        std::span<const std::size_t> order);
CMatrix permute_systems(const CMatrix& m, std::initializer_list<std::size_t> dims,
                        std::initializer_list<std::size_t> order);

/// Eigen-decomposition of a Hermitian matrix. Eigenvalues ascend; column k of
/// `vectors` is the eigenvector for values[k], with its first non-negligible
/// component real and positive.
struct EigDecomposition {
  std::vector<double> values;
  CMatrix vectors;

  CVector vector(std::size_t k) const;
  /// V diag(values) V^dagger
  CMatrix reconstruct() const;
};

/// Cyclic Jacobi. Throws NotHermitian when m deviates from its adjoint by more
/// than kHermitianTol in any entry.
EigDecomposition hermitian_eig(const CMatrix& m);

/// Same decomposition, starting the Jacobi sweeps in the unitary basis `start`.
/// When `start` nearly diagonalises m this needs only one or two sweeps, which
/// is what the alternating-projection solvers rely on. No Hermiticity check.
EigDecomposition hermitian_eig_from(const CMatrix& m, const CMatrix& start);

/// Frobenius-nearest positive semidefinite matrix (negative eigenvalues clipped).
CMatrix psd_project(const CMatrix& m);
double min_eigenvalue(const CMatrix& m);
/// Square root of the PSD part of m.
CMatrix psd_sqrt(const CMatrix& m);
/// m^{-1/2} for positive definite m; throws ConstraintViolation below `floor`.
CMatrix inverse_sqrt(const CMatrix& m, double floor = 1e-14);

/// Omega_d = sum_{m,n} |mm><nn| on C^d (x) C^d.
CMatrix omega(std::size_t d);
/// Flip operator F(u (x) v) = v (x) u on C^d (x) C^d.
CMatrix swap_operator(std::size_t d);

}  // namespace incompat
