#pragma once

// Closed-form robustness values for three example pairs, together with the
// explicit optimal devices that attain them, checked end to end against the
// numerical deciders.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "incompat/compat.hpp"
#include "incompat/covariance.hpp"

namespace incompat {

/// Allowed gap between a bisected estimate and its closed form.
inline constexpr double kTheoremTolerance = 2e-3;
/// Tolerance at which the explicit witnesses must validate.
inline constexpr double kWitnessTolerance = 1e-8;

struct TheoremReport {
  std::string name;
  std::size_t d = 0;
  double closed_form = 0.0;
  double numeric_estimate = 0.0;
  bool witnesses_validated = false;
  /// Named residuals and flags of the individual checks.
  std::map<std::string, double> residuals;

  bool pass(double tol = kTheoremTolerance) const;
};

nlohmann::json to_json(const TheoremReport& r);

/// 1/2 (1 + 1/sqrt(d))
double weyl_closed_form(std::size_t d);
/// 1/2 (1 + 1/d)
double decodable_closed_form(std::size_t d);

// ---- sharp Weyl pair -----------------------------------------------------

ObsPair weyl_pair(std::size_t d);
/// Covariant noise with mu_0 = nu_0 = 0 and mu_j = nu_j = 1/(d-1) otherwise.
ObsPair weyl_optimal_noise(std::size_t d);
/// eta = c (phi_0 + psi_0) (x) xi in C^d (x) C^d with c^2 = sqrt(d) / (2 (sqrt(d) + 1)).
CVector weyl_witness_vector(std::size_t d, std::span<const Complex> xi);
/// Reduced state of eta on the first factor.
CMatrix weyl_witness_state(std::size_t d);
/// Joint observable of the optimal mixture built from the witness state.
JointObservable weyl_witness_joint(std::size_t d);

// ---- decodable channels --------------------------------------------------

/// (d + 2)/(2 (d + 1)) id + d/(2 (d + 1)) T
ChannelChoi decodable_optimal_mixture(std::size_t d);
/// -(d^2 - 1)^{-1} id + d^2 (d^2 - 1)^{-1} T
ChannelChoi decodable_noise(std::size_t d);

// ---- von Neumann observable and identity channel -------------------------

/// (B, B-channel) with B = -(d-1)^{-1} A + d (d-1)^{-1} T and
/// -(d-1)^{-1} id + d (d-1)^{-1} E_A, for A the standard basis observable.
ObsChannelPair vn_noise_pair(std::size_t d);
/// The mixture of (A, id) with vn_noise_pair at weight 1/2 (1 + 1/sqrt(d)).
ObsChannelPair vn_optimal_pair(std::size_t d);
/// Gamma_j(rho) = c (I/sqrt(d) + A_j) rho (I/sqrt(d) + A_j), c = sqrt(d) / (2 (sqrt(d) + 1)).
Instrument vn_optimal_instrument(std::size_t d);

TheoremReport weyl_pair_theorem(std::size_t d, const SolverConfig& cfg = {});
TheoremReport decodable_channels_theorem(std::size_t d, const SolverConfig& cfg = {});
TheoremReport vn_obs_decodable_theorem(std::size_t d, const SolverConfig& cfg = {});

// ---- processing monotonicity ---------------------------------------------

struct MonotonicityCase {
  std::string pair;
  std::string processing;
  /// Certified weight of the unprocessed pair.
  double original = 0.0;
  /// Weight certified for the processed pair by the transported witness.
  double bound = 0.0;
  double witness_residual = 0.0;
  bool pass = false;
};

struct MonotonicityReport {
  std::vector<MonotonicityCase> cases;
  bool pass() const;
};

/// Applies `samples` random pre-processings and `samples` random
/// post-processings to each of the three optimal decompositions at d = 2 and
/// checks that the processed witnesses certify the same weight.
MonotonicityReport monotonicity_suite(std::uint64_t seed, int samples = 20);

nlohmann::json to_json(const MonotonicityReport& r);

}  // namespace incompat
