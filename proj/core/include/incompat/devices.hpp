#pragma once

// Observables, channels and instruments on finite-dimensional spaces.
//
// Choi convention: a map E from L(C^din) to L(C^dout) is stored as
//   choi(E) = sum_{m,n} E(|m><n|) (x) |m><n|
// on C^dout (x) C^din, output factor first. The identity channel has Choi
// matrix omega(d); the constant channel rho -> sigma has sigma (x) I.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "incompat/linalg.hpp"

namespace incompat {

/// Tolerance used by device validation when none is passed explicitly.
double device_tolerance();
/// Overrides the default validation tolerance for the whole process.
void set_device_tolerance(double tol);

/// Finite-outcome observable: effects indexed by 0..n-1.
class Povm {
 public:
  Povm() = default;
  /// Validates positivity and normalization; throws InvalidPovm.
  Povm(std::size_t dim, std::vector<CMatrix> effects, double tol = device_tolerance());
  /// Skips validation; for results that are valid by construction.
  static Povm unchecked(std::size_t dim, std::vector<CMatrix> effects);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t outcomes() const noexcept { return effects_.size(); }
  const std::vector<CMatrix>& effects() const noexcept { return effects_; }
  const CMatrix& operator[](std::size_t j) const { return effects_.at(j); }

 private:
  std::size_t dim_ = 0;
  std::vector<CMatrix> effects_;
};

/// Channel stored as its Choi matrix on C^dout (x) C^din.
class ChannelChoi {
 public:
  ChannelChoi() = default;
  /// Validates complete positivity and trace preservation; throws InvalidChannel.
  ChannelChoi(std::size_t din, std::size_t dout, CMatrix choi, double tol = device_tolerance());
  static ChannelChoi unchecked(std::size_t din, std::size_t dout, CMatrix choi);

  std::size_t din() const noexcept { return din_; }
  std::size_t dout() const noexcept { return dout_; }
  const CMatrix& choi() const noexcept { return choi_; }

 private:
  std::size_t din_ = 0;
  std::size_t dout_ = 0;
  CMatrix choi_;
};

/// Outcome-indexed completely positive maps (Choi blocks) summing to a channel.
class Instrument {
 public:
  Instrument() = default;
  /// Validates every block and the trace preservation of their sum; throws InvalidInstrument.
  Instrument(std::size_t din, std::size_t dout, std::vector<CMatrix> blocks, double tol = device_tolerance());
  static Instrument unchecked(std::size_t din, std::size_t dout, std::vector<CMatrix> blocks);

  std::size_t din() const noexcept { return din_; }
  std::size_t dout() const noexcept { return dout_; }
  std::size_t outcomes() const noexcept { return blocks_.size(); }
  const std::vector<CMatrix>& blocks() const noexcept { return blocks_; }

 private:
  std::size_t din_ = 0;
  std::size_t dout_ = 0;
  std::vector<CMatrix> blocks_;
};

/// Column-stochastic matrix: entry (y, w) is the probability of output y given input w.
class MarkovKernel {
 public:
  MarkovKernel() = default;
  /// Throws InvalidDistribution unless entries are non-negative and columns sum to 1.
  MarkovKernel(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static MarkovKernel identity(std::size_t n);
  /// Sends every input to output `to` (of `rows` outputs).
  static MarkovKernel constant(std::size_t rows, std::size_t cols, std::size_t to);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t y, std::size_t w) const { return entries_[y * cols_ + w]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

/// Joint observable with outcomes (j, k); grid is stored row-major.
class JointObservable {
 public:
  JointObservable() = default;
  /// Validates blockwise positivity and normalization; throws InvalidPovm.
  JointObservable(std::size_t dim, std::size_t rows, std::size_t cols, std::vector<CMatrix> grid,
                  double tol = device_tolerance());
  static JointObservable unchecked(std::size_t dim, std::size_t rows, std::size_t cols, std::vector<CMatrix> grid);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  const CMatrix& operator()(std::size_t j, std::size_t k) const { return grid_.at(j * cols_ + k); }
  const std::vector<CMatrix>& grid() const noexcept { return grid_; }

  /// Effects sum_k G_{j,k}; unvalidated so near-feasible witnesses can be inspected.
  std::vector<CMatrix> first_marginal() const;
  /// Effects sum_j G_{j,k}.
  std::vector<CMatrix> second_marginal() const;

 private:
  std::size_t dim_ = 0;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<CMatrix> grid_;
};

// Device pairs used by the robustness measures.
struct ObsPair {
  Povm first;
  Povm second;
};

struct ChannelPair {
  ChannelChoi first;
  ChannelChoi second;
};

struct ObsChannelPair {
  Povm first;
  ChannelChoi second;
};

// ---- constructors ---------------------------------------------------------

Povm trivial_observable(std::span<const double> p, std::size_t d);
/// Rank-one projective observable |e_j><e_j| in the standard basis.
Povm standard_basis_observable(std::size_t d);
/// Projective observable onto the columns of a unitary.
Povm basis_observable(const CMatrix& unitary);

ChannelChoi identity_channel(std::size_t d);
ChannelChoi unitary_channel(const CMatrix& u);
/// rho -> sigma for every input state on C^din. Throws NotAState.
ChannelChoi constant_channel(const CMatrix& sigma, std::size_t din);
/// rho -> I/d.
ChannelChoi completely_depolarizing_channel(std::size_t d);
/// Square Kraus operators: rho -> sum_i K_i rho K_i^dagger.
ChannelChoi kraus_channel(std::span<const CMatrix> kraus);
/// rho -> sum_j sqrt(A_j) rho sqrt(A_j).
ChannelChoi lueders_channel(const Povm& a);

/// Choi matrix of an arbitrary square-Kraus CP map (no trace check).
CMatrix kraus_choi(std::span<const CMatrix> kraus);

// ---- action --------------------------------------------------------------

/// E(rho) for a map given by its Choi matrix.
CMatrix apply_map(const CMatrix& choi, std::size_t din, std::size_t dout, const CMatrix& rho);
/// Heisenberg picture E^*(X).
CMatrix apply_dual_map(const CMatrix& choi, std::size_t din, std::size_t dout, const CMatrix& x);
/// Choi matrix of f o g for maps g: din_g -> dout_g and f: dout_g -> dout_f.
CMatrix compose_maps(const CMatrix& f, std::size_t dout_f, const CMatrix& g, std::size_t din_g, std::size_t dout_g);

CMatrix apply_channel(const ChannelChoi& e, const CMatrix& rho);
CMatrix apply_dual_channel(const ChannelChoi& e, const CMatrix& x);

// ---- processing ----------------------------------------------------------

/// Effects E^*(M_j).
Povm pre_process_observable(const Povm& m, const ChannelChoi& e);
/// Effects sum_w beta(y, w) M_w.
Povm post_process_observable(const Povm& m, const MarkovKernel& beta);
/// f o g.
ChannelChoi compose_channels(const ChannelChoi& f, const ChannelChoi& g);
/// e (x) f acting on C^din(e) (x) C^din(f).
ChannelChoi tensor_channels(const ChannelChoi& e, const ChannelChoi& f);
/// Blocks Gamma_j o g.
Instrument pre_process_instrument(const Instrument& gamma, const ChannelChoi& g);
/// Blocks sum_j beta(y, j) (b o Gamma_j).
Instrument post_process_instrument(const Instrument& gamma, const MarkovKernel& beta, const ChannelChoi& b);
/// Joint observable with effects sum beta1(y, j) beta2(z, k) G_{j,k}.
JointObservable post_process_joint(const JointObservable& g, const MarkovKernel& beta1, const MarkovKernel& beta2);
JointObservable pre_process_joint(const JointObservable& g, const ChannelChoi& e);

// ---- marginals -----------------------------------------------------------

/// Output marginals of a channel into C^k1 (x) C^k2.
std::pair<ChannelChoi, ChannelChoi> channel_marginals(const ChannelChoi& f, std::size_t k1, std::size_t k2);
/// Observable Gamma_j^*(I) and channel sum_j Gamma_j.
std::pair<Povm, ChannelChoi> instrument_marginals(const Instrument& g);
/// Effects Gamma_j^*(I) without validation.
std::vector<CMatrix> instrument_effects(const Instrument& g);

// ---- Choi conventions ----------------------------------------------------

/// The dual-picture Choi operator (E^* (x) id)(Omega) on C^din (x) C^dout
/// (input factor first). For a channel its partial trace over the output
/// factor is the identity.
CMatrix dual_choi(const ChannelChoi& e);
/// Inverse of dual_choi.
ChannelChoi from_dual_choi(const CMatrix& m, std::size_t din, std::size_t dout, double tol = device_tolerance());

// ---- convex combinations -------------------------------------------------

/// t*x + (1-t)*y. Throws WeightOutOfRange unless t is in [0, 1] and
/// DimensionError on shape mismatch.
Povm mix(const Povm& x, const Povm& y, double t);
ChannelChoi mix(const ChannelChoi& x, const ChannelChoi& y, double t);
Instrument mix(const Instrument& x, const Instrument& y, double t);
ObsPair mix(const ObsPair& x, const ObsPair& y, double t);
ChannelPair mix(const ChannelPair& x, const ChannelPair& y, double t);
ObsChannelPair mix(const ObsChannelPair& x, const ObsChannelPair& y, double t);

/// Affine combination sum_i c_i E_i with arbitrary real weights; the result
/// must still be a valid device (e.g. the noise channels built from id and T).
ChannelChoi affine_channel(std::span<const double> weights, std::span<const ChannelChoi> channels,
                           double tol = device_tolerance());
Povm affine_observable(std::span<const double> weights, std::span<const Povm> observables,
                       double tol = device_tolerance());

/// Largest entrywise deviation between two effect lists of equal shape.
double max_effect_diff(std::span<const CMatrix> a, std::span<const CMatrix> b);

}  // namespace incompat
