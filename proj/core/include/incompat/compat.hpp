#pragma once

// Compatibility deciders. Each problem is posed as the intersection of a
// product of PSD cones with an affine set of marginal constraints and solved
// by Dykstra's alternating projections.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "incompat/devices.hpp"

namespace incompat {

enum class Verdict { Feasible, Infeasible, Undecided };

std::string_view to_string(Verdict v);

struct SolverConfig {
  /// Marginal residual below which a PSD iterate is accepted as a witness.
  double feas_tol = 1e-7;
  /// Minimum distance between the two convex sets for an Infeasible verdict.
  double infeas_threshold = 1e-4;
  int max_iters = 20000;
  /// The gap counts as converged when it moves by less than this relative
  /// amount over `stall_window` iterations.
  double stall_rel_tol = 1e-8;
  int stall_window = 100;
  /// When the budget runs out, Infeasible also needs the gap to have moved by
  /// at most this relative amount over the last window; otherwise Undecided.
  double budget_drift_tol = 1e-3;

  /// Throws ConstraintViolation unless 0 < feas_tol < infeas_threshold and max_iters > 0.
  void validate() const;
};

template <class Witness>
struct FeasibilityReport {
  Verdict verdict = Verdict::Undecided;
  /// Present exactly when verdict == Feasible.
  std::optional<Witness> witness;
  /// Largest entrywise marginal violation of the final PSD iterate.
  double residual = 0.0;
  int iterations = 0;
  /// Frobenius distance between the final affine and PSD iterates.
  double gap = 0.0;
};

using JmReport = FeasibilityReport<JointObservable>;
using ChannelReport = FeasibilityReport<ChannelChoi>;
using InstrumentReport = FeasibilityReport<Instrument>;

/// A feasibility problem over a list of Hermitian blocks, each constrained to
/// be PSD, jointly constrained to an affine set.
struct BlockProblem {
  std::vector<CMatrix> start;
  /// Orthogonal projection (Frobenius metric) onto the affine set, in place.
  std::function<void(std::vector<CMatrix>&)> project_affine;
  /// Largest entrywise violation of the affine constraints.
  std::function<double(const std::vector<CMatrix>&)> residual;
};

struct BlockSolution {
  Verdict verdict = Verdict::Undecided;
  std::vector<CMatrix> point;
  double residual = 0.0;
  double gap = 0.0;
  int iterations = 0;
};

BlockSolution solve_block_feasibility(const BlockProblem& problem, const SolverConfig& cfg);

/// Joint measurability of two observables on the same space.
JmReport jm_feasible(const Povm& a, const Povm& b, const SolverConfig& cfg = {});
/// Compatibility of two channels with a common input; the witness maps
/// C^din into C^dout(e) (x) C^dout(f).
ChannelReport channel_compat_feasible(const ChannelChoi& e, const ChannelChoi& f, const SolverConfig& cfg = {});
/// Compatibility of an observable and a channel; the witness is a joint instrument.
InstrumentReport obs_channel_feasible(const Povm& m, const ChannelChoi& e, const SolverConfig& cfg = {});

bool is_compatible(const ObsPair& p, const SolverConfig& cfg = {});
bool is_compatible(const ChannelPair& p, const SolverConfig& cfg = {});
bool is_compatible(const ObsChannelPair& p, const SolverConfig& cfg = {});
Verdict compatibility_verdict(const ObsPair& p, const SolverConfig& cfg = {});
Verdict compatibility_verdict(const ChannelPair& p, const SolverConfig& cfg = {});
Verdict compatibility_verdict(const ObsChannelPair& p, const SolverConfig& cfg = {});

/// Independent re-validation of a joint device against its targets.
struct WitnessCheck {
  double marginal_residual = 0.0;
  double min_eigenvalue = 0.0;
  bool ok(double tol) const { return marginal_residual <= tol && min_eigenvalue >= -tol; }
};

WitnessCheck check_joint_observable(const JointObservable& g, const Povm& a, const Povm& b);
WitnessCheck check_joint_channel(const ChannelChoi& joint, const ChannelChoi& e, const ChannelChoi& f);
WitnessCheck check_joint_instrument(const Instrument& gamma, const Povm& m, const ChannelChoi& e);

/// Gamma_j(rho) = t tr(rho M_j) sigma + (1-t) p_j E(rho); its marginals are
/// (t M + (1-t) T_p, t T_sigma + (1-t) E).
Instrument half_witness_instrument(const Povm& m, const ChannelChoi& e, std::span<const double> p, const CMatrix& sigma,
                               double t);
/// G_{j,k} = t A_j q_k + (1-t) p_j B_k; marginals (t A + (1-t) T_p, t T_q + (1-t) B).
JointObservable obs_half_witness(const Povm& a, const Povm& b, std::span<const double> p, std::span<const double> q,
                                 double t);
/// rho -> t E(rho) (x) tau + (1-t) sigma (x) F(rho); marginals
/// (t E + (1-t) T_sigma, t T_tau + (1-t) F).
ChannelChoi channel_half_witness(const ChannelChoi& e, const ChannelChoi& f, const CMatrix& sigma, const CMatrix& tau,
                                 double t);

}  // namespace incompat
