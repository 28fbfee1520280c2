#include "incompat/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "incompat/errors.hpp"

namespace incompat {

namespace {

std::size_t mod(long long a, std::size_t d) {
  const long long m = static_cast<long long>(d);
  return static_cast<std::size_t>(((a % m) + m) % m);
}

void require_dim(std::size_t d, const char* what) {
  if (d < 2) throw DimensionError(std::string(what) + ": dimension must be at least 2");
}

void require_distribution(std::span<const double> p, const char* what) {
  double s = 0.0;
  for (double x : p) {
    if (!(x >= 0.0)) throw InvalidDistribution(std::string(what) + ": negative probability");
    s += x;
  }
  if (std::abs(s - 1.0) > 1e-12) throw InvalidDistribution(std::string(what) + ": probabilities do not sum to 1");
}

CMatrix matrix_power(const CMatrix& m, int k) {
  CMatrix out = CMatrix::identity(m.dim());
  for (int i = 0; i < k; ++i) out = out * m;
  return out;
}

double real_part_checked(Complex z) { return z.real(); }

}  // namespace

Complex character(long long j, long long k, std::size_t d) {
  const std::size_t r = mod(j * k, d);
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(d);
  return {std::cos(angle), std::sin(angle)};
}

CMatrix fourier_operator(std::size_t d) {
  CMatrix f(d);
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) f(i, j) = s * std::conj(character(static_cast<long long>(i), static_cast<long long>(j), d));
  return f;
}

WeylRep weyl_rep(std::size_t d) {
  require_dim(d, "weyl_rep");
  WeylRep rep;
  rep.d = d;
  for (std::size_t q = 0; q < d; ++q) {
    CMatrix u(d);
    for (std::size_t n = 0; n < d; ++n) u((n + q) % d, n) = 1.0;
    rep.U.push_back(std::move(u));
  }
  for (std::size_t p = 0; p < d; ++p) {
    CMatrix v(d);
    for (std::size_t n = 0; n < d; ++n) v(n, n) = character(static_cast<long long>(n), static_cast<long long>(p), d);
    rep.V.push_back(std::move(v));
  }
  for (std::size_t q = 0; q < d; ++q)
    for (std::size_t p = 0; p < d; ++p) rep.W.push_back(rep.U[q] * rep.V[p]);
  return rep;
}

Povm position_observable(std::size_t d) { return standard_basis_observable(d); }

Povm momentum_observable(std::size_t d) { return basis_observable(fourier_operator(d).adjoint()); }

ObsPair covariant_obs_pair(std::span<const double> mu, std::span<const double> nu) {
  const std::size_t d = mu.size();
  if (nu.size() != d) throw DimensionError("covariant_obs_pair: distributions differ in length");
  require_dim(d, "covariant_obs_pair");
  require_distribution(mu, "covariant_obs_pair");
  require_distribution(nu, "covariant_obs_pair");
  const Povm q = position_observable(d);
  const Povm p = momentum_observable(d);
  std::vector<CMatrix> m(d, CMatrix(d)), n(d, CMatrix(d));
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t s = 0; s < d; ++s) {
      m[j] += mu[mod(static_cast<long long>(j) - static_cast<long long>(s), d)] * q[s];
      n[j] += nu[mod(static_cast<long long>(j) - static_cast<long long>(s), d)] * p[s];
    }
  return {Povm(d, std::move(m)), Povm(d, std::move(n))};
}

ObsPair covariantize_obs_pair(const Povm& m, const Povm& n, const WeylRep& rep) {
  const std::size_t d = rep.d;
  if (m.dim() != d || n.dim() != d || m.outcomes() != d || n.outcomes() != d) {
    throw DimensionError("covariantize_obs_pair: expected d-outcome observables on C^d");
  }
  const double norm = 1.0 / static_cast<double>(d * d);
  std::vector<CMatrix> mw(d, CMatrix(d)), nw(d, CMatrix(d));
  for (std::size_t q = 0; q < d; ++q)
    for (std::size_t p = 0; p < d; ++p) {
      const CMatrix& w = rep.w(q, p);
      const CMatrix wa = w.adjoint();
      for (std::size_t j = 0; j < d; ++j) {
        mw[j] += w * m[mod(static_cast<long long>(j) - static_cast<long long>(q), d)] * wa;
        nw[j] += w * n[mod(static_cast<long long>(j) - static_cast<long long>(p), d)] * wa;
      }
    }
  for (auto& x : mw) x = (norm * x).hermitian_part();
  for (auto& x : nw) x = (norm * x).hermitian_part();
  return {Povm::unchecked(d, std::move(mw)), Povm::unchecked(d, std::move(nw))};
}

JointObservable covariantize_joint(const JointObservable& g, const WeylRep& rep) {
  const std::size_t d = rep.d;
  if (g.dim() != d || g.rows() != d || g.cols() != d) throw DimensionError("covariantize_joint: expected a d x d grid");
  const double norm = 1.0 / static_cast<double>(d * d);
  std::vector<CMatrix> grid(d * d, CMatrix(d));
  for (std::size_t q = 0; q < d; ++q)
    for (std::size_t p = 0; p < d; ++p) {
      const CMatrix& w = rep.w(q, p);
      const CMatrix wa = w.adjoint();
      for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k) {
          grid[j * d + k] += w *
                             g(mod(static_cast<long long>(j) - static_cast<long long>(q), d),
                               mod(static_cast<long long>(k) - static_cast<long long>(p), d)) *
                             wa;
        }
    }
  for (auto& x : grid) x = (norm * x).hermitian_part();
  return JointObservable::unchecked(d, d, d, std::move(grid));
}

CMatrix conjugate_map(const CMatrix& choi, std::size_t din, std::size_t dout, const CMatrix& a, const CMatrix& b) {
  if (a.dim() != dout || b.dim() != din || choi.dim() != din * dout) {
    throw DimensionError("conjugate_map: dimension mismatch");
  }
  const CMatrix k = kron(a, b.transpose());
  return k * choi * k.adjoint();
}

ChannelChoi covariantize_channel(const ChannelChoi& e, const WeylRep& rep) {
  const std::size_t d = rep.d;
  if (e.din() != d || e.dout() != d) throw DimensionError("covariantize_channel: expected a channel on C^d");
  CMatrix sum(d * d);
  for (const auto& w : rep.W) sum += conjugate_map(e.choi(), d, d, w.adjoint(), w);
  return ChannelChoi::unchecked(d, d, (sum / static_cast<double>(d * d)).hermitian_part());
}

Instrument covariantize_instrument(const Instrument& g, const WeylRep& rep) {
  const std::size_t d = rep.d;
  if (g.din() != d || g.dout() != d || g.outcomes() != d) {
    throw DimensionError("covariantize_instrument: expected a d-outcome instrument on C^d");
  }
  std::vector<CMatrix> blocks(d, CMatrix(d * d));
  for (std::size_t q = 0; q < d; ++q)
    for (std::size_t p = 0; p < d; ++p) {
      const CMatrix& w = rep.w(q, p);
      for (std::size_t j = 0; j < d; ++j) {
        // rho -> W Gamma_{j-q}(W^* rho W) W^*, so the observable marginal picks up M_{j-q} -> M_j.
        blocks[j] += conjugate_map(g.blocks()[mod(static_cast<long long>(j) - static_cast<long long>(q), d)], d, d, w,
                                   w.adjoint());
      }
    }
  for (auto& b : blocks) b = (b / static_cast<double>(d * d)).hermitian_part();
  return Instrument::unchecked(d, d, std::move(blocks));
}

// ---- state-existence oracle ----------------------------------------------

CovariantOracleResult covariant_pair_jm_oracle(std::span<const double> mu, std::span<const double> nu, std::size_t d,
                                               const SolverConfig& cfg) {
  require_dim(d, "covariant_pair_jm_oracle");
  if (mu.size() != d || nu.size() != d) throw DimensionError("covariant_pair_jm_oracle: distribution length");
  require_distribution(mu, "covariant_pair_jm_oracle");
  require_distribution(nu, "covariant_pair_jm_oracle");
  const Povm q = position_observable(d);
  const Povm p = momentum_observable(d);
  // Targets: tr(rho Q_j) = mu_{-j}, tr(rho P_k) = nu_{-k}.
  std::vector<double> a(d), b(d);
  for (std::size_t j = 0; j < d; ++j) {
    a[j] = mu[mod(-static_cast<long long>(j), d)];
    b[j] = nu[mod(-static_cast<long long>(j), d)];
  }

  BlockProblem problem;
  problem.start.push_back(CMatrix::identity(d) / static_cast<double>(d));
  problem.project_affine = [&](std::vector<CMatrix>& blocks) {
    CMatrix& rho = blocks[0];
    CMatrix delta(d);
    for (std::size_t j = 0; j < d; ++j) {
      delta -= (hs_inner(q[j], rho).real() - a[j]) * q[j];
      delta -= (hs_inner(p[j], rho).real() - b[j]) * p[j];
    }
    delta += ((rho.trace().real() - 1.0) / static_cast<double>(d)) * CMatrix::identity(d);
    rho += delta;
  };
  problem.residual = [&](const std::vector<CMatrix>& blocks) {
    double r = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      r = std::max(r, std::abs(hs_inner(q[j], blocks[0]).real() - a[j]));
      r = std::max(r, std::abs(hs_inner(p[j], blocks[0]).real() - b[j]));
    }
    return r;
  };

  CovariantOracleResult result;
  result.solution = solve_block_feasibility(problem, cfg);
  result.verdict = to_membership(result.solution.verdict);
  if (result.solution.verdict == Verdict::Feasible) result.state = result.solution.point[0];
  return result;
}

JointObservable covariant_joint_from_state(const CMatrix& rho, const WeylRep& rep) {
  const std::size_t d = rep.d;
  if (rho.dim() != d) throw DimensionError("covariant_joint_from_state: state dimension mismatch");
  std::vector<CMatrix> grid;
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = 0; k < d; ++k) {
      const CMatrix& w = rep.w(j, k);
      grid.push_back((w * rho * w.adjoint() / static_cast<double>(d)).hermitian_part());
    }
  return JointObservable::unchecked(d, d, d, std::move(grid));
}

// ---- unitary covariance --------------------------------------------------

ChannelChoi depolarizing_mixture(double lambda, std::size_t d) {
  require_dim(d, "depolarizing_mixture");
  const CMatrix choi = (lambda / static_cast<double>(d)) * CMatrix::identity(d * d) + (1.0 - lambda) * omega(d);
  return ChannelChoi(d, d, choi);
}

double twirl_parameter(const ChannelChoi& e) {
  if (e.din() != e.dout()) throw DimensionError("twirl_parameter: expected a channel on C^d");
  const std::size_t d = e.din();
  require_dim(d, "twirl_parameter");
  double overlap = 0.0;
  for (std::size_t m = 0; m < d; ++m)
    for (std::size_t n = 0; n < d; ++n) overlap += e.choi()(n * d + n, m * d + m).real();
  const double dd = static_cast<double>(d * d);
  return (dd - overlap) / (dd - 1.0);
}

ChannelChoi unitary_twirl_channel(const ChannelChoi& e) { return depolarizing_mixture(twirl_parameter(e), e.din()); }

CMatrix permutation_operator(const std::array<int, 3>& pi, std::size_t d) {
  std::array<int, 3> inv{};
  for (int i = 0; i < 3; ++i) {
    if (pi[i] < 0 || pi[i] > 2) throw DimensionError("permutation_operator: not a permutation of {0,1,2}");
    inv[pi[i]] = i;
  }
  if (inv[0] == inv[1] || inv[1] == inv[2] || inv[0] == inv[2]) {
    throw DimensionError("permutation_operator: not a permutation of {0,1,2}");
  }
  const std::size_t dim = d * d * d;
  CMatrix v(dim);
  for (std::size_t flat = 0; flat < dim; ++flat) {
    const std::size_t x[3] = {flat / (d * d), (flat / d) % d, flat % d};
    const std::size_t image = (x[inv[0]] * d + x[inv[1]]) * d + x[inv[2]];
    v(image, flat) = 1.0;
  }
  return v;
}

std::array<CMatrix, 6> ew_permutations(std::size_t d) {
  require_dim(d, "ew_permutations");
  // pi as the image list (pi(0), pi(1), pi(2)).
  const std::array<std::array<int, 3>, 6> perms = {{
      {0, 1, 2},  // e
      {1, 0, 2},  // (12)
      {2, 1, 0},  // (13)
      {0, 2, 1},  // (23)
      {2, 0, 1},  // labelled (123): x0 (x) x1 (x) x2 -> x1 (x) x2 (x) x0
      {1, 2, 0},  // labelled (132)
  }};
  std::array<CMatrix, 6> out;
  for (std::size_t i = 0; i < 6; ++i) out[i] = partial_transpose(permutation_operator(perms[i], d), {d, d, d}, {1, 2});
  return out;
}

EwBasis ew_basis(std::size_t d) {
  const auto v = ew_permutations(d);
  const CMatrix& e = v[0];
  const CMatrix& p12 = v[1];
  const CMatrix& p13 = v[2];
  const CMatrix& p23 = v[3];
  const CMatrix& p123 = v[4];
  const CMatrix& p132 = v[5];
  const double x = static_cast<double>(d);
  EwBasis s;
  s.d = d;
  s.S_plus = 0.5 * (e + p23 - (p12 + p13 + p123 + p132) / (x + 1.0));
  s.S_minus = 0.5 * (e - p23 - (p12 + p13 - p123 - p132) / (x - 1.0));
  s.S0 = (x * (p12 + p13) - (p123 + p132)) / (x * x - 1.0);
  s.S1 = (x * (p123 + p132) - (p12 + p13)) / (x * x - 1.0);
  s.S2 = (p12 - p13) / std::sqrt(x * x - 1.0);
  s.S3 = Complex(0.0, 1.0 / std::sqrt(x * x - 1.0)) * (p123 - p132);
  return s;
}

CMatrix ew_tetrahedron_point(double t_plus, double t_minus, double t0, double t1, std::size_t d) {
  require_dim(d, "ew_tetrahedron_point");
  constexpr double tol = 1e-12;
  if (t_plus < -tol || t_minus < -tol || t0 < -tol || std::abs(t1) > t0 + tol ||
      std::abs(t_plus + t_minus + t0 - 1.0) > tol) {
    throw ConstraintViolation("ew_tetrahedron_point: parameters outside the tetrahedron");
  }
  if (d == 2 && std::abs(t_minus) > tol) {
    throw ConstraintViolation("ew_tetrahedron_point: t_minus must vanish for d = 2");
  }
  const EwBasis s = ew_basis(d);
  const double x = static_cast<double>(d);
  CMatrix m = (2.0 * t_plus / ((x - 1.0) * (x + 2.0))) * s.S_plus + 0.5 * (t0 * s.S0 + t1 * s.S1);
  if (d > 2) m += (2.0 * t_minus / ((x + 1.0) * (x - 2.0))) * s.S_minus;
  return m.hermitian_part();
}

ChannelChoi ew_joint_channel(double t_plus, double t_minus, double t0, double t1, std::size_t d) {
  return from_dual_choi(ew_tetrahedron_point(t_plus, t_minus, t0, t1, d), d, d * d);
}

std::pair<double, double> self_compatible_covariant_interval(std::size_t d) {
  require_dim(d, "self_compatible_covariant_interval");
  const double x = static_cast<double>(d);
  return {x / (2.0 * (x + 1.0)), x * x / (x * x - 1.0)};
}

ChannelChoi optimal_cloner(std::size_t d) {
  require_dim(d, "optimal_cloner");
  const CMatrix sym = 0.5 * (CMatrix::identity(d * d) + swap_operator(d));
  const double c = std::sqrt(2.0 / (static_cast<double>(d) + 1.0));
  const std::size_t dout = d * d;
  CMatrix choi(dout * d);
  for (std::size_t i = 0; i < d; ++i) {
    // Kraus operator K_i = c S (I (x) |i>), a map C^d -> C^d (x) C^d.
    CVector vec(dout * d);
    for (std::size_t a = 0; a < dout; ++a)
      for (std::size_t m = 0; m < d; ++m) vec[a * d + m] = c * sym(a, m * d + i);
    choi += CMatrix::projector(vec);
  }
  return ChannelChoi(d, dout, choi.hermitian_part());
}

// ---- covariant observable-channel structure ------------------------------

Povm covariant_obs_from_C(const CMatrix& c, const WeylRep& rep) {
  const std::size_t d = rep.d;
  if (c.dim() != d) throw DimensionError("covariant_obs_from_C: operator dimension mismatch");
  constexpr double tol = 1e-10;
  if (!c.is_hermitian(tol) || min_eigenvalue(c.hermitian_part()) < -tol) {
    throw ConstraintViolation("covariant_obs_from_C: C is not positive");
  }
  for (const auto& v : rep.V) {
    if (max_abs_diff(v * c, c * v) > tol) throw ConstraintViolation("covariant_obs_from_C: C does not commute with V_p");
  }
  std::vector<CMatrix> effects;
  CMatrix sum(d);
  for (const auto& u : rep.U) {
    effects.push_back((u * c * u.adjoint()).hermitian_part());
    sum += effects.back();
  }
  if (max_abs_diff(sum, CMatrix::identity(d)) > tol) {
    throw ConstraintViolation("covariant_obs_from_C: translates of C do not sum to the identity");
  }
  return Povm(d, std::move(effects));
}

FourierPositivity kernel_fourier_positivity(const CovariantChannelKernel& k) {
  const std::size_t d = k.d;
  if (k.phi.size() != d * d) throw DimensionError("kernel_fourier_positivity: kernel must be d x d");
  FourierPositivity out;
  out.hat.resize(d * d);
  out.min_real = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t kk = 0; kk < d; ++kk) {
      Complex s = 0.0;
      for (std::size_t q = 0; q < d; ++q)
        for (std::size_t p = 0; p < d; ++p) {
          s += std::conj(character(static_cast<long long>(q), static_cast<long long>(kk), d)) *
               character(static_cast<long long>(j), static_cast<long long>(p), d) * k(q, p);
        }
      s /= static_cast<double>(d);
      out.hat[j * d + kk] = s;
      out.min_real = std::min(out.min_real, s.real());
      out.max_imag = std::max(out.max_imag, std::abs(s.imag()));
    }
  out.pass = out.min_real >= -1e-10 && out.max_imag <= 1e-10;
  return out;
}

ChannelChoi covariant_channel_from_kernel(const CovariantChannelKernel& k, const WeylRep& rep) {
  const std::size_t d = rep.d;
  if (k.d != d) throw DimensionError("covariant_channel_from_kernel: kernel dimension mismatch");
  const FourierPositivity pos = kernel_fourier_positivity(k);
  if (!pos.pass) throw ConstraintViolation("covariant_channel_from_kernel: kernel is not positive");
  if (std::abs(k(0, 0) - 1.0) > 1e-10) throw ConstraintViolation("covariant_channel_from_kernel: Phi_{0,0} != 1");
  CMatrix choi(d * d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t kk = 0; kk < d; ++kk) {
      const double weight = real_part_checked(pos.hat[j * d + kk]) / static_cast<double>(d);
      if (weight == 0.0) continue;
      // With E^*(W) = Phi W the weight hat(Phi)_{j,k} belongs to W_{-j,-k}.
      const CMatrix w[1] = {rep.w(d - j, d - kk)};
      choi += weight * kraus_choi(w);
    }
  return ChannelChoi(d, d, choi.hermitian_part());
}

CMatrix alpha_operation_choi(const AlphaInstrument& a) {
  const std::size_t d = a.d;
  if (a.alpha.size() != d) throw DimensionError("alpha_operation_choi: need d blocks");
  CMatrix choi(d * d);
  for (std::size_t m = 0; m < d; ++m)
    for (std::size_t n = 0; n < d; ++n)
      for (std::size_t r = 0; r < d; ++r) {
        // alpha^n_{r,s} are the entries of the dual Choi operator on |n+r, r><n+s, s|,
        // so D(|m><n|) has entry alpha^{m-r}_{s,r} at (r, s) when m - r = n - s.
        const std::size_t shift = mod(static_cast<long long>(m) - static_cast<long long>(r), d);
        const std::size_t s = mod(static_cast<long long>(n) - static_cast<long long>(shift), d);
        choi(r * d + m, s * d + n) = a.alpha[shift](s, r);
      }
  return choi;
}

Instrument instrument_from_alpha(const AlphaInstrument& a, const WeylRep& rep) {
  const std::size_t d = rep.d;
  if (a.d != d || a.alpha.size() != d) throw DimensionError("instrument_from_alpha: dimension mismatch");
  constexpr double tol = 1e-10;
  double total = 0.0;
  for (const auto& blk : a.alpha) {
    if (blk.dim() != d) throw DimensionError("instrument_from_alpha: blocks must be d x d");
    if (!blk.is_hermitian(tol) || min_eigenvalue(blk.hermitian_part()) < -tol) {
      throw ConstraintViolation("instrument_from_alpha: block is not positive");
    }
    total += blk.trace().real();
  }
  if (std::abs(total - 1.0) > tol) throw ConstraintViolation("instrument_from_alpha: diagonal does not sum to 1");
  const CMatrix op = alpha_operation_choi(a);
  std::vector<CMatrix> blocks;
  for (const auto& u : rep.U) blocks.push_back(conjugate_map(op, d, d, u, u.adjoint()).hermitian_part());
  return Instrument(d, d, std::move(blocks));
}

CMatrix alpha_observable_operator(const AlphaInstrument& a) {
  const std::size_t d = a.d;
  CMatrix c(d);
  for (std::size_t n = 0; n < d; ++n)
    for (std::size_t r = 0; r < d; ++r) c((n + r) % d, (n + r) % d) += a.alpha.at(n)(r, r);
  return c;
}

CovariantChannelKernel alpha_channel_kernel(const AlphaInstrument& a) {
  const std::size_t d = a.d;
  CovariantChannelKernel k{d, std::vector<Complex>(d * d)};
  for (std::size_t q = 0; q < d; ++q)
    for (std::size_t p = 0; p < d; ++p) {
      Complex s = 0.0;
      for (std::size_t n = 0; n < d; ++n)
        for (std::size_t r = 0; r < d; ++r) {
          s += std::conj(character(static_cast<long long>(n), static_cast<long long>(p), d)) *
               a.alpha.at(n)(r, mod(static_cast<long long>(r) - static_cast<long long>(q), d));
        }
      k.phi[q * d + p] = s;
    }
  return k;
}

CovariantChannelKernel channel_kernel(const ChannelChoi& e, const WeylRep& rep) {
  const std::size_t d = rep.d;
  if (e.din() != d || e.dout() != d) throw DimensionError("channel_kernel: expected a channel on C^d");
  CovariantChannelKernel k{d, std::vector<Complex>(d * d)};
  for (std::size_t q = 0; q < d; ++q)
    for (std::size_t p = 0; p < d; ++p) {
      const CMatrix& w = rep.w(q, p);
      k.phi[q * d + p] = (w.adjoint() * apply_dual_channel(e, w)).trace() / static_cast<double>(d);
    }
  return k;
}

std::pair<double, double> w1_w2(const AlphaInstrument& a) {
  const std::size_t d = a.d;
  if (a.alpha.size() != d) throw DimensionError("w1_w2: need d blocks");
  double w1 = 0.0;
  for (std::size_t n = 0; n < d; ++n) {
    const std::size_t i = mod(-static_cast<long long>(n), d);
    w1 += a.alpha[n](i, i).real();
  }
  Complex s = 0.0;
  for (const auto& z : a.alpha[0].entries()) s += z;
  return {w1, s.real() / static_cast<double>(d)};
}

std::pair<double, double> block_w1_w2(const CMatrix& a) {
  const std::size_t d = a.dim();
  Complex s = 0.0;
  for (const auto& z : a.entries()) s += z;
  return {a(0, 0).real(), s.real() / static_cast<double>(d)};
}

AlphaInstrument concentrate_off_blocks(const AlphaInstrument& a) {
  const std::size_t d = a.d;
  AlphaInstrument out{d, {}};
  out.alpha.push_back(a.alpha.at(0));
  for (std::size_t n = 1; n < d; ++n) {
    const double mass = a.alpha.at(n).trace().real();
    const std::size_t i = mod(-static_cast<long long>(n), d);
    out.alpha.push_back(mass * CMatrix::unit(d, i, i));
  }
  return out;
}

AlphaInstrument collapse_to_upper_block(const AlphaInstrument& a) {
  const std::size_t d = a.d;
  AlphaInstrument out{d, std::vector<CMatrix>(d, CMatrix(d))};
  out.alpha[0] = a.alpha.at(0);
  for (std::size_t n = 1; n < d; ++n) {
    const std::size_t i = mod(-static_cast<long long>(n), d);
    out.alpha[0](0, 0) += a.alpha.at(n)(i, i).real();
  }
  return out;
}

AlphaInstrument alpha_from_upper_block(const CMatrix& a) {
  const std::size_t d = a.dim();
  AlphaInstrument out{d, std::vector<CMatrix>(d, CMatrix(d))};
  out.alpha[0] = a;
  return out;
}

CMatrix fourier_average(const CMatrix& a) {
  const CMatrix f = fourier_operator(a.dim());
  CMatrix sum(a.dim());
  CMatrix fk = CMatrix::identity(a.dim());
  for (int k = 1; k <= 4; ++k) {
    fk = fk * f;
    sum += fk * a * fk.adjoint();
  }
  return (sum / 4.0).hermitian_part();
}

FourierOptimum fourier_invariant_optimum(std::size_t d) {
  require_dim(d, "fourier_invariant_optimum");
  const CMatrix f = fourier_operator(d);
  const CMatrix id = CMatrix::identity(d);
  const CMatrix f2 = matrix_power(f, 2);
  const CMatrix f3 = matrix_power(f, 3);
  FourierOptimum out;
  const Complex i_unit(0.0, 1.0);
  for (int k = 1; k <= 4; ++k) {
    const Complex ik = std::pow(i_unit, k);
    const Complex minus_ik = std::pow(-i_unit, k);
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    out.projections[k - 1] = 0.25 * (id + minus_ik * f + sign * f2 + ik * f3);
  }
  const CVector e0 = basis_vector(d, 0);
  const CVector f0 = incompat::apply(f, e0);
  const double sd = std::sqrt(static_cast<double>(d));
  CVector vp(d), vm(d);
  const double cp = std::sqrt(sd / (2.0 * (sd + 1.0)));
  const double cm = std::sqrt(sd / (2.0 * (sd - 1.0)));
  for (std::size_t i = 0; i < d; ++i) {
    vp[i] = cp * (e0[i] + f0[i]);
    vm[i] = cm * (e0[i] - f0[i]);
  }
  out.a_plus = CMatrix::projector(vp);
  out.a_minus = CMatrix::projector(vm);
  const auto [w1p, w2p] = block_w1_w2(out.a_plus);
  const auto [w1m, w2m] = block_w1_w2(out.a_minus);
  out.value = std::min(w1p, w2p);
  out.w0_minus = std::min(w1m, w2m);
  return out;
}

}  // namespace incompat
