#pragma once

// Symmetry tools: the discrete Weyl representation, covariantization maps,
// covariant parametrizations of observables, channels and instruments, the
// algebra of operators commuting with U (x) conj(U) (x) conj(U), and the
// Fourier-invariant reduction for the observable-channel problem.
//
// Index arithmetic on Z_d is cyclic throughout. The character is
// <j|k> = exp(2 pi i j k / d).

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "incompat/compat.hpp"
#include "incompat/devices.hpp"
#include "incompat/robustness.hpp"

namespace incompat {

/// exp(2 pi i j k / d)
Complex character(long long j, long long k, std::size_t d);

/// F phi_j = d^{-1/2} sum_i exp(-2 pi i i j / d) phi_i.
CMatrix fourier_operator(std::size_t d);

struct WeylRep {
  std::size_t d = 0;
  /// U_q |n> = |n + q>
  std::vector<CMatrix> U;
  /// V_p |n> = <n|p> |n>
  std::vector<CMatrix> V;
  /// W_{q,p} = U_q V_p stored at q * d + p.
  std::vector<CMatrix> W;

  const CMatrix& w(std::size_t q, std::size_t p) const { return W.at((q % d) * d + (p % d)); }
};

WeylRep weyl_rep(std::size_t d);

/// Q_j = |phi_j><phi_j| in the standard basis.
Povm position_observable(std::size_t d);
/// P_k = |psi_k><psi_k| with psi_k = F^* phi_k.
Povm momentum_observable(std::size_t d);

/// (mu * Q, nu * P): M_j = sum_q mu_{j-q} Q_q and N_k = sum_p nu_{k-p} P_p.
ObsPair covariant_obs_pair(std::span<const double> mu, std::span<const double> nu);

/// Group averages with respect to W_{q,p}; fixed points are exactly the covariant devices.
ObsPair covariantize_obs_pair(const Povm& m, const Povm& n, const WeylRep& rep);
JointObservable covariantize_joint(const JointObservable& g, const WeylRep& rep);
ChannelChoi covariantize_channel(const ChannelChoi& e, const WeylRep& rep);
Instrument covariantize_instrument(const Instrument& g, const WeylRep& rep);

/// Choi matrix of rho -> A E(B rho B^*) A^*.
CMatrix conjugate_map(const CMatrix& choi, std::size_t din, std::size_t dout, const CMatrix& a, const CMatrix& b);

struct CovariantOracleResult {
  Membership verdict = Membership::Undecided;
  /// A state with tr(rho Q_{-j}) = mu_j and tr(rho P_{-k}) = nu_k, when found.
  std::optional<CMatrix> state;
  BlockSolution solution;
};

/// Decides whether (mu * Q, nu * P) is jointly measurable by searching for a
/// state with the prescribed distributions in both bases.
CovariantOracleResult covariant_pair_jm_oracle(std::span<const double> mu, std::span<const double> nu,
                                               std::size_t d, const SolverConfig& cfg = {});
/// G_{j,k} = W_{j,k} rho W_{j,k}^* / d, a joint observable for the pair the state encodes.
JointObservable covariant_joint_from_state(const CMatrix& rho, const WeylRep& rep);

// ---- full unitary covariance --------------------------------------------

/// lambda T + (1 - lambda) id with T the completely depolarizing channel.
ChannelChoi depolarizing_mixture(double lambda, std::size_t d);
/// The lambda of the Haar twirl of e, fixed by the overlap tr(Omega J).
double twirl_parameter(const ChannelChoi& e);
ChannelChoi unitary_twirl_channel(const ChannelChoi& e);

/// Permutation operator on three copies of C^d:
/// V_pi (x_0 (x) x_1 (x) x_2) = x_{pi^{-1}(0)} (x) x_{pi^{-1}(1)} (x) x_{pi^{-1}(2)}.
CMatrix permutation_operator(const std::array<int, 3>& pi, std::size_t d);

struct EwBasis {
  std::size_t d = 0;
  CMatrix S_plus, S_minus, S0, S1, S2, S3;
};

/// Basis of the algebra spanned by the partially transposed permutation operators.
EwBasis ew_basis(std::size_t d);
/// Partially transposed permutation operators V_pi^Gamma in the order
/// e, (12), (13), (23), (123), (132), with the cycle labels of the last two
/// chosen so that S1 S2 = i S3.
std::array<CMatrix, 6> ew_permutations(std::size_t d);

/// Dual-picture Choi operator M(t+, t-, t0, t1) on C^d (x) C^d (x) C^d
/// (input first). Throws ConstraintViolation outside the tetrahedron.
CMatrix ew_tetrahedron_point(double t_plus, double t_minus, double t0, double t1, std::size_t d);
/// The corresponding joint channel C^d -> C^d (x) C^d.
ChannelChoi ew_joint_channel(double t_plus, double t_minus, double t0, double t1, std::size_t d);

/// Endpoints of the self-compatible range of lambda T + (1 - lambda) id.
std::pair<double, double> self_compatible_covariant_interval(std::size_t d);

/// rho -> 2/(d+1) S (rho (x) I) S with S the symmetric projector.
ChannelChoi optimal_cloner(std::size_t d);

// ---- covariant observable-channel structure ------------------------------

/// Phi_{q,p} stored at q * d + p.
struct CovariantChannelKernel {
  std::size_t d = 0;
  std::vector<Complex> phi;

  Complex operator()(std::size_t q, std::size_t p) const { return phi.at((q % d) * d + (p % d)); }
};

/// alpha[n](r, s) = alpha^n_{r,s}.
struct AlphaInstrument {
  std::size_t d = 0;
  std::vector<CMatrix> alpha;
};

/// M_j = U_j C U_j^*. Throws ConstraintViolation unless C >= 0, C commutes
/// with every V_p and sum_j U_j C U_j^* = I.
Povm covariant_obs_from_C(const CMatrix& c, const WeylRep& rep);
/// E(rho) = d^{-1} sum hat(Phi)_{j,k} W_{-j,-k} rho W_{-j,-k}^*, the channel with
/// E^*(W_{q,p}) = Phi_{q,p} W_{q,p}. Throws
/// ConstraintViolation unless the kernel is positive and Phi_{0,0} = 1.
ChannelChoi covariant_channel_from_kernel(const CovariantChannelKernel& k, const WeylRep& rep);
/// Gamma_j(rho) = U_j D(U_j^* rho U_j) U_j^* with D built from alpha.
/// Throws ConstraintViolation unless every alpha^n is PSD and the diagonal sums to 1.
Instrument instrument_from_alpha(const AlphaInstrument& a, const WeylRep& rep);

/// Choi matrix of D(X) = sum alpha^n_{s,r} <n+r|X|n+s> |r><s|, i.e. the dual
/// Choi operator of D is sum alpha^n_{r,s} |n+r, r><n+s, s|.
CMatrix alpha_operation_choi(const AlphaInstrument& a);
/// C = sum alpha^n_{r,r} |n+r><n+r|.
CMatrix alpha_observable_operator(const AlphaInstrument& a);
/// Phi_{q,p} = sum conj(<n|p>) alpha^n_{r,r-q}.
CovariantChannelKernel alpha_channel_kernel(const AlphaInstrument& a);
/// Phi_{q,p} = tr(W^* E^*(W)) / d for a covariant channel.
CovariantChannelKernel channel_kernel(const ChannelChoi& e, const WeylRep& rep);

struct FourierPositivity {
  bool pass = false;
  double min_real = 0.0;
  double max_imag = 0.0;
  /// hat(Phi)_{j,k} at j * d + k.
  std::vector<Complex> hat;
};

FourierPositivity kernel_fourier_positivity(const CovariantChannelKernel& k);

/// (w1, w2) = (sum_n alpha^n_{-n,-n}, d^{-1} sum_{r,s} alpha^0_{r,s}).
std::pair<double, double> w1_w2(const AlphaInstrument& a);
/// (<e0|A e0>, <f0|A f0>) for the upper block A, f0 = F e0.
std::pair<double, double> block_w1_w2(const CMatrix& a);

/// For n != 0 moves the diagonal mass of alpha^n onto alpha^n_{-n,-n}.
AlphaInstrument concentrate_off_blocks(const AlphaInstrument& a);
/// Collects every alpha^n_{-n,-n} into alpha^0_{0,0} and clears the n != 0 blocks.
AlphaInstrument collapse_to_upper_block(const AlphaInstrument& a);
/// alpha^0 = A, all other blocks zero.
AlphaInstrument alpha_from_upper_block(const CMatrix& a);
/// (1/4) sum_{k=1..4} F^k A F^{*k}.
CMatrix fourier_average(const CMatrix& a);

struct FourierOptimum {
  double value = 0.0;
  CMatrix a_plus;
  CMatrix a_minus;
  double w0_minus = 0.0;
  /// Eigenprojections P_1..P_4 of F for eigenvalues i, -1, -i, 1.
  std::array<CMatrix, 4> projections;
};

FourierOptimum fourier_invariant_optimum(std::size_t d);

}  // namespace incompat
