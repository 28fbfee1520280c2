#include "incompat/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "incompat/errors.hpp"

namespace incompat {

namespace {

// Hot loops avoid std::complex operator* (which carries NaN/Inf recovery code
// under strict IEEE settings).
inline void fma_into(double& re, double& im, const Complex& a, const Complex& b) {
  re += a.real() * b.real() - a.imag() * b.imag();
  im += a.real() * b.imag() + a.imag() * b.real();
}

void require_same_dim(const CMatrix& a, const CMatrix& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a.dim()) +
                         " vs " + std::to_string(b.dim()) + ")");
  }
}

// Mixed-radix digits of every flat index for a tensor factorisation.
struct Digits {
  std::vector<std::size_t> dims;
  std::vector<std::size_t> strides;

  explicit Digits(std::span<const std::size_t> d) : dims(d.begin(), d.end()), strides(d.size()) {
    std::size_t s = 1;
    for (std::size_t k = dims.size(); k-- > 0;) {
      strides[k] = s;
      s *= dims[k];
    }
  }
  std::size_t digit(std::size_t flat, std::size_t k) const { return (flat / strides[k]) % dims[k]; }
};

void check_factorisation(const CMatrix& m, std::span<const std::size_t> dims, const char* what) {
  if (dims.empty()) throw DimensionError(std::string(what) + ": empty factorisation");
  for (auto d : dims) {
    if (d == 0) throw DimensionError(std::string(what) + ": zero-dimensional factor");
  }
  if (dims_product(dims) != m.dim()) {
    throw DimensionError(std::string(what) + ": product of dims " + std::to_string(dims_product(dims)) +
                         " does not match matrix dimension " + std::to_string(m.dim()));
  }
}

void check_subsystems(std::span<const std::size_t> systems, std::size_t n, const char* what) {
  for (std::size_t i = 0; i < systems.size(); ++i) {
    if (systems[i] >= n) throw DimensionError(std::string(what) + ": subsystem index out of range");
    for (std::size_t j = 0; j < i; ++j) {
      if (systems[i] == systems[j]) throw DimensionError(std::string(what) + ": repeated subsystem");
    }
  }
}

void require_hermitian(const CMatrix& m, const char* what) {
  if (!m.is_hermitian(kHermitianTol)) throw NotHermitian(std::string(what) + ": matrix is not Hermitian");
}

// One cyclic Jacobi run on a (already Hermitian) working matrix `a`,
// accumulating the rotations into `v`.
void jacobi_sweeps(CMatrix& a, CMatrix& v) {
  const std::size_t n = a.dim();
  if (n < 2) return;
  double total = 0.0;
  for (const auto& z : a.entries()) total += std::norm(z);
  const double scale = std::sqrt(total);
  if (scale == 0.0) return;
  const double stop = 1e-15 * scale;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(2.0 * off) <= stop) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag <= 1e-300 || mag < 1e-18 * scale) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        // Phase-rotate so the pivot is real, then apply the real rotation.
        const Complex phase = apq / mag;  // e^{i phi}
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // G = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] acting on columns p, q.
        const Complex g00 = c;
        const Complex g01 = s;
        const Complex g10 = -s * std::conj(phase);
        const Complex g11 = c * std::conj(phase);

        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = akp * g00 + akq * g10;
          a(k, q) = akp * g01 + akq * g11;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = std::conj(g00) * apk + std::conj(g10) * aqk;
          a(q, k) = std::conj(g01) * apk + std::conj(g11) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = app - t * mag;
        a(q, q) = aqq + t * mag;
        for (std::size_t k = 0; k < n; ++k) {
          const Complex vkp = v(k, p);
          const Complex vkq = v(k, q);
          v(k, p) = vkp * g00 + vkq * g10;
          v(k, q) = vkp * g01 + vkq * g11;
        }
      }
    }
  }
}

EigDecomposition finish_decomposition(const CMatrix& a, const CMatrix& v) {
  const std::size_t n = a.dim();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  EigDecomposition out;
  out.values.resize(n);
  out.vectors = CMatrix(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.values[k] = a(src, src).real();
    Complex phase = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double mag = std::abs(v(i, src));
      if (mag > 1e-12) {
        phase = std::conj(v(i, src)) / mag;
        break;
      }
    }
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, src) * phase;
  }
  return out;
}

}  // namespace

CMatrix::CMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

CMatrix::CMatrix(std::size_t dim, std::vector<Complex> entries) : dim_(dim), data_(std::move(entries)) {
  if (data_.size() != dim_ * dim_) {
    throw DimensionError("CMatrix: expected " + std::to_string(dim_ * dim_) + " entries, got " +
                         std::to_string(data_.size()));
  }
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<Complex>> rows) : dim_(rows.size()) {
  data_.reserve(dim_ * dim_);
  for (const auto& row : rows) {
    if (row.size() != dim_) throw DimensionError("CMatrix: rows must form a square matrix");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

CMatrix CMatrix::identity(std::size_t dim) {
  CMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::diagonal(std::span<const double> values) {
  CMatrix m(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

CMatrix CMatrix::outer(std::span<const Complex> u, std::span<const Complex> v) {
  if (u.size() != v.size()) throw DimensionError("outer: vector length mismatch");
  CMatrix m(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * std::conj(v[j]);
  return m;
}

CMatrix CMatrix::projector(std::span<const Complex> v) { return outer(v, v); }

CMatrix CMatrix::unit(std::size_t dim, std::size_t i, std::size_t j) {
  CMatrix m(dim);
  m(i, j) = 1.0;
  return m;
}

CMatrix CMatrix::adjoint() const {
  CMatrix out(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

CMatrix CMatrix::transpose() const {
  CMatrix out(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

CMatrix CMatrix::conjugate() const {
  CMatrix out(*this);
  for (auto& z : out.data_) z = std::conj(z);
  return out;
}

CMatrix CMatrix::hermitian_part() const {
  CMatrix out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    out(i, i) = (*this)(i, i).real();
    for (std::size_t j = i + 1; j < dim_; ++j) {
      const Complex z = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
      out(i, j) = z;
      out(j, i) = std::conj(z);
    }
  }
  return out;
}

Complex CMatrix::trace() const {
  Complex t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double CMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

double CMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& z : data_) m = std::max(m, std::abs(z));
  return m;
}

bool CMatrix::is_hermitian(double tol) const {
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = i; j < dim_; ++j)
      if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol) return false;
  return true;
}

CMatrix& CMatrix::operator+=(const CMatrix& other) {
  require_same_dim(*this, other, "operator+");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& other) {
  require_same_dim(*this, other, "operator-");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

CMatrix& CMatrix::operator*=(Complex s) {
  for (auto& z : data_) z *= s;
  return *this;
}

CMatrix& CMatrix::operator*=(double s) {
  for (auto& z : data_) z *= s;
  return *this;
}

CMatrix& CMatrix::operator/=(double s) {
  for (auto& z : data_) z /= s;
  return *this;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  require_same_dim(a, b, "matrix product");
  const std::size_t n = a.dim();
  std::vector<double> acc(2 * n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double* row = acc.data() + 2 * i * n;
    for (std::size_t k = 0; k < n; ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      const double ar = aik.real();
      const double ai = aik.imag();
      const Complex* brow = &b(k, 0);
      for (std::size_t j = 0; j < n; ++j) {
        const double br = brow[j].real();
        const double bi = brow[j].imag();
        row[2 * j] += ar * br - ai * bi;
        row[2 * j + 1] += ar * bi + ai * br;
      }
    }
  }
  CMatrix c(n);
  for (std::size_t k = 0; k < n * n; ++k) c.entries()[k] = Complex(acc[2 * k], acc[2 * k + 1]);
  return c;
}

CVector apply(const CMatrix& m, std::span<const Complex> v) {
  if (v.size() != m.dim()) throw DimensionError("apply: vector length mismatch");
  CVector out(v.size());
  for (std::size_t i = 0; i < m.dim(); ++i) {
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < m.dim(); ++j) fma_into(re, im, m(i, j), v[j]);
    out[i] = Complex(re, im);
  }
  return out;
}

Complex inner(std::span<const Complex> u, std::span<const Complex> v) {
  if (u.size() != v.size()) throw DimensionError("inner: vector length mismatch");
  Complex s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * v[i];
  return s;
}

double norm(std::span<const Complex> v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

Complex hs_inner(const CMatrix& a, const CMatrix& b) {
  require_same_dim(a, b, "hs_inner");
  Complex s = 0.0;
  for (std::size_t k = 0; k < a.entries().size(); ++k) s += std::conj(a.entries()[k]) * b.entries()[k];
  return s;
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  require_same_dim(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t k = 0; k < a.entries().size(); ++k) m = std::max(m, std::abs(a.entries()[k] - b.entries()[k]));
  return m;
}

CVector basis_vector(std::size_t dim, std::size_t i) {
  CVector v(dim);
  v.at(i) = 1.0;
  return v;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  const std::size_t na = a.dim();
  const std::size_t nb = b.dim();
  CMatrix out(na * nb);
  for (std::size_t i1 = 0; i1 < na; ++i1)
    for (std::size_t j1 = 0; j1 < na; ++j1) {
      const Complex x = a(i1, j1);
      if (x == Complex{}) continue;
      for (std::size_t i2 = 0; i2 < nb; ++i2)
        for (std::size_t j2 = 0; j2 < nb; ++j2) out(i1 * nb + i2, j1 * nb + j2) = x * b(i2, j2);
    }
  return out;
}

std::size_t dims_product(std::span<const std::size_t> dims) {
  std::size_t p = 1;
  for (auto d : dims) p *= d;
  return p;
}

CMatrix partial_trace(const CMatrix& m, std::span<const std::size_t> dims, std::span<const std::size_t> keep) {
  check_factorisation(m, dims, "partial_trace");
  if (keep.empty()) throw DimensionError("partial_trace: keep set must be nonempty");
  check_subsystems(keep, dims.size(), "partial_trace");
  std::vector<std::size_t> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  std::vector<std::size_t> traced;
  for (std::size_t k = 0; k < dims.size(); ++k)
    if (!std::binary_search(kept.begin(), kept.end(), k)) traced.push_back(k);

  const Digits digits(dims);
  const std::size_t n = m.dim();
  std::vector<std::size_t> kept_index(n), traced_index(n);
  std::size_t kept_dim = 1;
  for (auto k : kept) kept_dim *= dims[k];
  for (std::size_t flat = 0; flat < n; ++flat) {
    std::size_t ki = 0, ti = 0;
    for (auto k : kept) ki = ki * dims[k] + digits.digit(flat, k);
    for (auto k : traced) ti = ti * dims[k] + digits.digit(flat, k);
    kept_index[flat] = ki;
    traced_index[flat] = ti;
  }
  CMatrix out(kept_dim);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (traced_index[i] == traced_index[j]) out(kept_index[i], kept_index[j]) += m(i, j);
  return out;
}

CMatrix partial_trace(const CMatrix& m, std::initializer_list<std::size_t> dims,
                      std::initializer_list<std::size_t> keep) {
  return partial_trace(m, std::span<const std::size_t>(dims.begin(), dims.size()),
                       std::span<const std::size_t>(keep.begin(), keep.size()));
}

CMatrix partial_transpose(const CMatrix& m, std::span<const std::size_t> dims, std::span<const std::size_t> systems) {
  check_factorisation(m, dims, "partial_transpose");
  check_subsystems(systems, dims.size(), "partial_transpose");
  const Digits digits(dims);
  const std::size_t n = m.dim();
  CMatrix out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t ii = i, jj = j;
      for (auto k : systems) {
        const std::size_t di = digits.digit(i, k);
        const std::size_t dj = digits.digit(j, k);
        ii = ii - di * digits.strides[k] + dj * digits.strides[k];
        jj = jj - dj * digits.strides[k] + di * digits.strides[k];
      }
      out(ii, jj) = m(i, j);
    }
  return out;
}

CMatrix partial_transpose(const CMatrix& m, std::initializer_list<std::size_t> dims,
                          std::initializer_list<std::size_t> systems) {
  return partial_transpose(m, std::span<const std::size_t>(dims.begin(), dims.size()),
                           std::span<const std::size_t>(systems.begin(), systems.size()));
}

CMatrix permute_systems(const CMatrix& m, std::span<const std::size_t> dims, std::span<const std::size_t> order) {
  check_factorisation(m, dims, "permute_systems");
  if (order.size() != dims.size()) throw DimensionError("permute_systems: order must list every subsystem");
  check_subsystems(order, dims.size(), "permute_systems");
  std::vector<std::size_t> new_dims(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) new_dims[k] = dims[order[k]];
  const Digits old_digits(dims);
  const Digits new_digits(new_dims);
  const std::size_t n = m.dim();
  std::vector<std::size_t> map(n);
  for (std::size_t flat = 0; flat < n; ++flat) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < order.size(); ++k) idx += old_digits.digit(flat, order[k]) * new_digits.strides[k];
    map[flat] = idx;
  }
  CMatrix out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(map[i], map[j]) = m(i, j);
  return out;
}

CMatrix permute_systems(const CMatrix& m, std::initializer_list<std::size_t> dims,
                        std::initializer_list<std::size_t> order) {
  return permute_systems(m, std::span<const std::size_t>(dims.begin(), dims.size()),
                         std::span<const std::size_t>(order.begin(), order.size()));
}

CVector EigDecomposition::vector(std::size_t k) const {
  CVector v(vectors.dim());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = vectors(i, k);
  return v;
}

CMatrix EigDecomposition::reconstruct() const {
  const std::size_t n = vectors.dim();
  CMatrix scaled(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) scaled(i, k) = vectors(i, k) * values[k];
  return scaled * vectors.adjoint();
}

EigDecomposition hermitian_eig(const CMatrix& m) {
  require_hermitian(m, "hermitian_eig");
  CMatrix a = m.hermitian_part();
  CMatrix v = CMatrix::identity(m.dim());
  jacobi_sweeps(a, v);
  return finish_decomposition(a, v);
}

EigDecomposition hermitian_eig_from(const CMatrix& m, const CMatrix& start) {
  if (start.dim() != m.dim()) throw DimensionError("hermitian_eig_from: basis dimension mismatch");
  CMatrix a = (start.adjoint() * m * start).hermitian_part();
  CMatrix v = start;
  jacobi_sweeps(a, v);
  return finish_decomposition(a, v);
}

CMatrix psd_project(const CMatrix& m) {
  auto eig = hermitian_eig(m);
  for (auto& x : eig.values) x = std::max(x, 0.0);
  return eig.reconstruct().hermitian_part();
}

double min_eigenvalue(const CMatrix& m) {
  if (m.empty()) throw DimensionError("min_eigenvalue: empty matrix");
  return hermitian_eig(m).values.front();
}

CMatrix psd_sqrt(const CMatrix& m) {
  auto eig = hermitian_eig(m);
  for (auto& x : eig.values) x = std::sqrt(std::max(x, 0.0));
  return eig.reconstruct().hermitian_part();
}

CMatrix inverse_sqrt(const CMatrix& m, double floor) {
  auto eig = hermitian_eig(m);
  for (auto& x : eig.values) {
    if (x < floor) throw ConstraintViolation("inverse_sqrt: matrix is not positive definite");
    x = 1.0 / std::sqrt(x);
  }
  return eig.reconstruct().hermitian_part();
}

CMatrix omega(std::size_t d) {
  CMatrix out(d * d);
  for (std::size_t m = 0; m < d; ++m)
    for (std::size_t n = 0; n < d; ++n) out(m * d + m, n * d + n) = 1.0;
  return out;
}

CMatrix swap_operator(std::size_t d) {
  CMatrix out(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) out(j * d + i, i * d + j) = 1.0;
  return out;
}

}  // namespace incompat
