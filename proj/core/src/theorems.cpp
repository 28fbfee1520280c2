#include "incompat/theorems.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "incompat/errors.hpp"
#include "incompat/random.hpp"
#include "incompat/robustness.hpp"

namespace incompat {

namespace {

constexpr double kBisectTol = 5e-4;
constexpr double kAboveStep = 5e-3;

void require_range(std::size_t d, std::size_t lo, std::size_t hi, const char* what) {
  if (d < lo || d > hi) {
    throw DimensionError(std::string(what) + ": d must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

double flag(bool b) { return b ? 1.0 : 0.0; }

ChannelChoi channel_combination(double a, const ChannelChoi& x, double b, const ChannelChoi& y) {
  const std::array<double, 2> w{a, b};
  const std::array<ChannelChoi, 2> c{x, y};
  return affine_channel(w, c);
}

double pair_diff(const ObsChannelPair& x, const ObsChannelPair& y) {
  return std::max(max_effect_diff(x.first.effects(), y.first.effects()), max_abs_diff(x.second.choi(), y.second.choi()));
}

double witness_error(const WitnessCheck& c) { return std::max(c.marginal_residual, -c.min_eigenvalue); }

}  // namespace

bool TheoremReport::pass(double tol) const {
  return witnesses_validated && std::abs(numeric_estimate - closed_form) <= tol;
}

nlohmann::json to_json(const TheoremReport& r) {
  nlohmann::json res = nlohmann::json::object();
  for (const auto& [k, v] : r.residuals) res[k] = v;
  return {{"name", r.name},
          {"d", r.d},
          {"closed_form", r.closed_form},
          {"numeric_estimate", r.numeric_estimate},
          {"witnesses_validated", r.witnesses_validated},
          {"pass", r.pass()},
          {"residuals", std::move(res)}};
}

double weyl_closed_form(std::size_t d) {
  if (d < 2) throw DimensionError("weyl_closed_form: dimension must be at least 2");
  return 0.5 * (1.0 + 1.0 / std::sqrt(static_cast<double>(d)));
}

double decodable_closed_form(std::size_t d) {
  if (d < 2) throw DimensionError("decodable_closed_form: dimension must be at least 2");
  return 0.5 * (1.0 + 1.0 / static_cast<double>(d));
}

// ---- sharp Weyl pair -----------------------------------------------------

ObsPair weyl_pair(std::size_t d) { return {position_observable(d), momentum_observable(d)}; }

ObsPair weyl_optimal_noise(std::size_t d) {
  if (d < 2) throw DimensionError("weyl_optimal_noise: dimension must be at least 2");
  std::vector<double> mu(d, 1.0 / static_cast<double>(d - 1));
  mu[0] = 0.0;
  return covariant_obs_pair(mu, mu);
}

CVector weyl_witness_vector(std::size_t d, std::span<const Complex> xi) {
  if (xi.size() != d) throw DimensionError("weyl_witness_vector: xi has the wrong dimension");
  const CMatrix f = fourier_operator(d);
  const double sd = std::sqrt(static_cast<double>(d));
  const double c = std::sqrt(sd / (2.0 * (sd + 1.0)));
  // phi_0 + psi_0 with psi_0 = F^* phi_0.
  CVector v(d);
  for (std::size_t i = 0; i < d; ++i) v[i] = std::conj(f(0, i));
  v[0] += 1.0;
  CVector eta(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k) eta[i * d + k] = c * v[i] * xi[k];
  return eta;
}

CMatrix weyl_witness_state(std::size_t d) {
  const CVector xi = basis_vector(d, 0);
  const CVector eta = weyl_witness_vector(d, xi);
  const std::size_t dims[2] = {d, d};
  const std::size_t keep[1] = {0};
  return partial_trace(CMatrix::projector(eta), dims, keep);
}

JointObservable weyl_witness_joint(std::size_t d) { return covariant_joint_from_state(weyl_witness_state(d), weyl_rep(d)); }

TheoremReport weyl_pair_theorem(std::size_t d, const SolverConfig& cfg) {
  require_range(d, 2, 5, "weyl_pair_theorem");
  TheoremReport r;
  r.name = "weyl_pair";
  r.d = d;
  r.closed_form = weyl_closed_form(d);
  const double t = r.closed_form;
  const ObsPair x = weyl_pair(d);
  const ObsPair y = weyl_optimal_noise(d);

  const ObsPair at = mix(x, y, t);
  const WitnessCheck w = check_joint_observable(weyl_witness_joint(d), at.first, at.second);
  r.residuals["witness_marginal_residual"] = w.marginal_residual;
  r.residuals["witness_min_eigenvalue"] = w.min_eigenvalue;

  const JmReport solver_at = jm_feasible(at.first, at.second, cfg);
  r.residuals["solver_feasible_at_closed_form"] = flag(solver_at.verdict == Verdict::Feasible);
  r.residuals["solver_residual_at_closed_form"] = solver_at.residual;
  const ObsPair above = mix(x, y, t + kAboveStep);
  const JmReport solver_above = jm_feasible(above.first, above.second, cfg);
  r.residuals["solver_infeasible_above"] = flag(solver_above.verdict == Verdict::Infeasible);

  // Distributions of the mixture: t delta + (1 - t) mu.
  auto distribution = [&](double s) {
    std::vector<double> p(d, (1.0 - s) / static_cast<double>(d - 1));
    p[0] = s;
    return p;
  };
  auto state_oracle = [&](double s) {
    const auto p = distribution(s);
    return covariant_pair_jm_oracle(p, p, d, cfg).verdict;
  };
  r.residuals["state_oracle_inside_at_closed_form"] = flag(state_oracle(t) == Membership::Inside);
  r.residuals["state_oracle_outside_above"] = flag(state_oracle(t + kAboveStep) == Membership::Outside);
  const RobustnessEstimate state_est = relative_robustness(SegmentOracle(state_oracle), kBisectTol);
  r.residuals["state_oracle_estimate"] = state_est.value;

  const RobustnessEstimate est = relative_robustness(x, y, cfg, kBisectTol);
  r.numeric_estimate = est.value;

  r.witnesses_validated = w.ok(kWitnessTolerance) && solver_at.verdict == Verdict::Feasible &&
                          solver_above.verdict == Verdict::Infeasible &&
                          r.residuals["state_oracle_inside_at_closed_form"] == 1.0 &&
                          r.residuals["state_oracle_outside_above"] == 1.0 &&
                          std::abs(state_est.value - t) <= kTheoremTolerance;
  return r;
}

// ---- decodable channels --------------------------------------------------

ChannelChoi decodable_optimal_mixture(std::size_t d) {
  if (d < 2) throw DimensionError("decodable_optimal_mixture: dimension must be at least 2");
  const double x = static_cast<double>(d);
  return channel_combination((x + 2.0) / (2.0 * (x + 1.0)), identity_channel(d), x / (2.0 * (x + 1.0)),
                             completely_depolarizing_channel(d));
}

ChannelChoi decodable_noise(std::size_t d) {
  if (d < 2) throw DimensionError("decodable_noise: dimension must be at least 2");
  const double x2 = static_cast<double>(d * d);
  return channel_combination(-1.0 / (x2 - 1.0), identity_channel(d), x2 / (x2 - 1.0),
                             completely_depolarizing_channel(d));
}

TheoremReport decodable_channels_theorem(std::size_t d, const SolverConfig& cfg) {
  require_range(d, 2, 4, "decodable_channels_theorem");
  TheoremReport r;
  r.name = "decodable_channels";
  r.d = d;
  r.closed_form = decodable_closed_form(d);
  const double t = r.closed_form;
  const ChannelChoi id = identity_channel(d);
  const ChannelChoi a = decodable_optimal_mixture(d);
  const ChannelChoi e = decodable_noise(d);

  // (i) the cloner reproduces the optimal mixture on both outputs.
  const ChannelChoi cloner = optimal_cloner(d);
  const WitnessCheck wc = check_joint_channel(cloner, a, a);
  r.residuals["cloner_marginal_residual"] = wc.marginal_residual;
  r.residuals["cloner_min_eigenvalue"] = wc.min_eigenvalue;

  // (ii) the noise is a channel and compatible with itself.
  r.residuals["noise_min_eigenvalue"] = min_eigenvalue(e.choi());
  const ChannelReport self = channel_compat_feasible(e, e, cfg);
  r.residuals["noise_self_compatible"] = flag(self.verdict == Verdict::Feasible);
  const WitnessCheck ew = check_joint_channel(ew_joint_channel(1.0, 0.0, 0.0, 0.0, d), e, e);
  r.residuals["noise_joint_residual"] = witness_error(ew);

  // (iii) A = t id + (1 - t) E.
  r.residuals["decomposition_residual"] = max_abs_diff(a.choi(), mix(id, e, t).choi());

  // (iv) tr_2[M] - s Omega stops being positive at s = t.
  const CMatrix m = ew_tetrahedron_point(0.0, 0.0, 1.0, 1.0, d);
  const CMatrix marginal = partial_trace(m, {d, d, d}, {0, 1});
  const CMatrix om = omega(d);
  auto boundary = [&](double s) { return min_eigenvalue(marginal - s * om); };
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (boundary(mid) >= 0.0 ? lo : hi) = mid;
  }
  r.residuals["boundary_flip_error"] = std::abs(0.5 * (lo + hi) - t);

  const ChannelPair x{id, id};
  const ChannelPair y{e, e};
  const ChannelPair at = mix(x, y, t);
  const ChannelReport solver_at = channel_compat_feasible(at.first, at.second, cfg);
  r.residuals["solver_feasible_at_closed_form"] = flag(solver_at.verdict == Verdict::Feasible);
  const ChannelPair above = mix(x, y, t + kAboveStep);
  const ChannelReport solver_above = channel_compat_feasible(above.first, above.second, cfg);
  r.residuals["solver_infeasible_above"] = flag(solver_above.verdict == Verdict::Infeasible);

  r.numeric_estimate = relative_robustness(x, y, cfg, kBisectTol).value;

  // Two unitary channels: post-processing by unitaries transports the whole decomposition.
  const WeylRep rep = weyl_rep(d);
  const ChannelChoi v = unitary_channel(fourier_operator(d));
  const ChannelChoi w = unitary_channel(rep.w(1, 1));
  const ChannelPair ux{v, w};
  const ChannelPair uy{compose_channels(v, e), compose_channels(w, e)};
  const ChannelPair uat = mix(ux, uy, t);
  const ChannelChoi ujoint = compose_channels(tensor_channels(v, w), cloner);
  const WitnessCheck uw = check_joint_channel(ujoint, uat.first, uat.second);
  r.residuals["unitary_pair_witness_residual"] = witness_error(uw);
  const ChannelPair uabove = mix(ux, uy, t + kAboveStep);
  const ChannelReport uinf = channel_compat_feasible(uabove.first, uabove.second, cfg);
  r.residuals["unitary_pair_infeasible_above"] = flag(uinf.verdict == Verdict::Infeasible);

  r.witnesses_validated = wc.marginal_residual <= 1e-10 && wc.min_eigenvalue >= -kWitnessTolerance &&
                          r.residuals["noise_min_eigenvalue"] >= -kWitnessTolerance &&
                          self.verdict == Verdict::Feasible && ew.ok(kWitnessTolerance) &&
                          r.residuals["decomposition_residual"] <= 1e-12 &&
                          r.residuals["boundary_flip_error"] <= 1e-9 && solver_at.verdict == Verdict::Feasible &&
                          solver_above.verdict == Verdict::Infeasible && uw.ok(kWitnessTolerance) &&
                          uinf.verdict == Verdict::Infeasible;
  return r;
}

// ---- von Neumann observable and identity channel -------------------------

ObsChannelPair vn_noise_pair(std::size_t d) {
  if (d < 2) throw DimensionError("vn_noise_pair: dimension must be at least 2");
  const Povm a = standard_basis_observable(d);
  const double x = static_cast<double>(d);
  const std::vector<double> uniform(d, 1.0 / x);
  const std::array<double, 2> w{-1.0 / (x - 1.0), x / (x - 1.0)};
  const std::array<Povm, 2> obs{a, trivial_observable(uniform, d)};
  return {affine_observable(w, obs), channel_combination(w[0], identity_channel(d), w[1], lueders_channel(a))};
}

ObsChannelPair vn_optimal_pair(std::size_t d) {
  const ObsChannelPair x{standard_basis_observable(d), identity_channel(d)};
  return mix(x, vn_noise_pair(d), weyl_closed_form(d));
}

Instrument vn_optimal_instrument(std::size_t d) {
  if (d < 2) throw DimensionError("vn_optimal_instrument: dimension must be at least 2");
  const Povm a = standard_basis_observable(d);
  const double sd = std::sqrt(static_cast<double>(d));
  const double c = sd / (2.0 * (sd + 1.0));
  std::vector<CMatrix> blocks;
  for (std::size_t j = 0; j < d; ++j) {
    const CMatrix k = std::sqrt(c) * (CMatrix::identity(d) / sd + a[j]);
    const CMatrix kraus[1] = {k};
    blocks.push_back(kraus_choi(kraus));
  }
  return Instrument(d, d, std::move(blocks));
}

TheoremReport vn_obs_decodable_theorem(std::size_t d, const SolverConfig& cfg) {
  require_range(d, 2, 5, "vn_obs_decodable_theorem");
  TheoremReport r;
  r.name = "vn_obs_decodable";
  r.d = d;
  r.closed_form = weyl_closed_form(d);
  const double t = r.closed_form;
  const Povm a = standard_basis_observable(d);
  const ObsChannelPair x{a, identity_channel(d)};

  // (i) noise devices are valid.
  const ObsChannelPair y = vn_noise_pair(d);
  double noise_min = min_eigenvalue(y.second.choi());
  for (const auto& b : y.first.effects()) noise_min = std::min(noise_min, min_eigenvalue(b));
  r.residuals["noise_min_eigenvalue"] = noise_min;

  // (ii) the explicit instrument has the stated marginals.
  const double sd = std::sqrt(static_cast<double>(d));
  const double p = (sd + 2.0) / (2.0 * (sd + 1.0));
  const double q = sd / (2.0 * (sd + 1.0));
  const std::vector<double> uniform(d, 1.0 / static_cast<double>(d));
  const std::array<double, 2> w{p, q};
  const std::array<Povm, 2> obs{a, trivial_observable(uniform, d)};
  const ObsChannelPair target{affine_observable(w, obs),
                              channel_combination(p, identity_channel(d), q, lueders_channel(a))};
  const Instrument gamma = vn_optimal_instrument(d);
  const WitnessCheck wc = check_joint_instrument(gamma, target.first, target.second);
  r.residuals["witness_marginal_residual"] = wc.marginal_residual;
  r.residuals["witness_min_eigenvalue"] = wc.min_eigenvalue;
  const FourierOptimum opt = fourier_invariant_optimum(d);
  const Instrument from_alpha = instrument_from_alpha(alpha_from_upper_block(opt.a_plus), weyl_rep(d));
  double alpha_diff = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    alpha_diff = std::max(alpha_diff, max_abs_diff(from_alpha.blocks()[j], gamma.blocks()[j]));
  }
  r.residuals["alpha_instrument_residual"] = alpha_diff;

  // (iii) the optimal pair is the t-mixture.
  r.residuals["decomposition_residual"] = pair_diff(mix(x, y, t), target);

  // (iv) solver flip.
  const ObsChannelPair at = mix(x, y, t);
  const InstrumentReport solver_at = obs_channel_feasible(at.first, at.second, cfg);
  r.residuals["solver_feasible_at_closed_form"] = flag(solver_at.verdict == Verdict::Feasible);
  const ObsChannelPair above = mix(x, y, t + kAboveStep);
  const InstrumentReport solver_above = obs_channel_feasible(above.first, above.second, cfg);
  r.residuals["solver_infeasible_above"] = flag(solver_above.verdict == Verdict::Infeasible);
  r.numeric_estimate = relative_robustness(x, y, cfg, kBisectTol).value;

  // (v) Fourier-invariant reduction.
  r.residuals["fourier_optimum_error"] = std::abs(opt.value - t);
  r.residuals["fourier_runner_up"] = opt.w0_minus;

  r.witnesses_validated = noise_min >= -kWitnessTolerance && wc.marginal_residual <= 1e-10 &&
                          wc.min_eigenvalue >= -kWitnessTolerance && alpha_diff <= 1e-10 &&
                          r.residuals["decomposition_residual"] <= 1e-12 && solver_at.verdict == Verdict::Feasible &&
                          solver_above.verdict == Verdict::Infeasible &&
                          r.residuals["fourier_optimum_error"] <= 1e-9 && opt.w0_minus < opt.value;
  return r;
}

// ---- processing monotonicity ---------------------------------------------

bool MonotonicityReport::pass() const {
  return !cases.empty() && std::all_of(cases.begin(), cases.end(), [](const auto& c) { return c.pass; });
}

nlohmann::json to_json(const MonotonicityReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& c : r.cases) {
    rows.push_back({{"pair", c.pair},
                    {"processing", c.processing},
                    {"original", c.original},
                    {"bound", c.bound},
                    {"witness_residual", c.witness_residual},
                    {"pass", c.pass}});
  }
  return {{"cases", std::move(rows)}, {"pass", r.pass()}};
}

MonotonicityReport monotonicity_suite(std::uint64_t seed, int samples) {
  if (samples < 0) throw ConstraintViolation("monotonicity_suite: negative sample count");
  constexpr std::size_t d = 2;
  Rng rng(seed);
  MonotonicityReport report;
  const double t = weyl_closed_form(d);
  const double tc = decodable_closed_form(d);

  auto record = [&](std::string pair, std::string processing, double original, double bound, double residual) {
    MonotonicityCase c{std::move(pair), std::move(processing), original, bound, residual, false};
    c.pass = residual <= kWitnessTolerance && bound >= original - kTheoremTolerance;
    report.cases.push_back(std::move(c));
  };

  const ObsPair wx = weyl_pair(d);
  const ObsPair wy = weyl_optimal_noise(d);
  const JointObservable wg = weyl_witness_joint(d);

  const ChannelPair cx{identity_channel(d), identity_channel(d)};
  const ChannelPair cy{decodable_noise(d), decodable_noise(d)};
  const ChannelChoi cj = optimal_cloner(d);

  const ObsChannelPair ox{standard_basis_observable(d), identity_channel(d)};
  const ObsChannelPair oy = vn_noise_pair(d);
  const Instrument og = vn_optimal_instrument(d);

  for (int i = 0; i < samples; ++i) {
    const ChannelChoi g = random_channel(d, d, 2, rng);
    {
      const ObsPair px{pre_process_observable(wx.first, g), pre_process_observable(wx.second, g)};
      const ObsPair py{pre_process_observable(wy.first, g), pre_process_observable(wy.second, g)};
      const ObsPair at = mix(px, py, t);
      record("weyl", "pre", t, t, witness_error(check_joint_observable(pre_process_joint(wg, g), at.first, at.second)));
    }
    {
      const ChannelPair px{compose_channels(cx.first, g), compose_channels(cx.second, g)};
      const ChannelPair py{compose_channels(cy.first, g), compose_channels(cy.second, g)};
      const ChannelPair at = mix(px, py, tc);
      record("identity_channels", "pre", tc, tc,
             witness_error(check_joint_channel(compose_channels(cj, g), at.first, at.second)));
    }
    {
      const ObsChannelPair px{pre_process_observable(ox.first, g), compose_channels(ox.second, g)};
      const ObsChannelPair py{pre_process_observable(oy.first, g), compose_channels(oy.second, g)};
      const ObsChannelPair at = mix(px, py, t);
      record("vn_identity", "pre", t, t,
             witness_error(check_joint_instrument(pre_process_instrument(og, g), at.first, at.second)));
    }
  }

  for (int i = 0; i < samples; ++i) {
    const MarkovKernel b1 = random_kernel(d, d, rng);
    const MarkovKernel b2 = random_kernel(d, d, rng);
    const ChannelChoi c1 = random_channel(d, d, 2, rng);
    const ChannelChoi c2 = random_channel(d, d, 2, rng);
    {
      const ObsPair px{post_process_observable(wx.first, b1), post_process_observable(wx.second, b2)};
      const ObsPair py{post_process_observable(wy.first, b1), post_process_observable(wy.second, b2)};
      const ObsPair at = mix(px, py, t);
      record("weyl", "post", t, t,
             witness_error(check_joint_observable(post_process_joint(wg, b1, b2), at.first, at.second)));
    }
    {
      const ChannelPair px{compose_channels(c1, cx.first), compose_channels(c2, cx.second)};
      const ChannelPair py{compose_channels(c1, cy.first), compose_channels(c2, cy.second)};
      const ChannelPair at = mix(px, py, tc);
      const ChannelChoi joint = compose_channels(tensor_channels(c1, c2), cj);
      record("identity_channels", "post", tc, tc, witness_error(check_joint_channel(joint, at.first, at.second)));
    }
    {
      const ObsChannelPair px{post_process_observable(ox.first, b1), compose_channels(c1, ox.second)};
      const ObsChannelPair py{post_process_observable(oy.first, b1), compose_channels(c1, oy.second)};
      const ObsChannelPair at = mix(px, py, t);
      record("vn_identity", "post", t, t,
             witness_error(check_joint_instrument(post_process_instrument(og, b1, c1), at.first, at.second)));
    }
  }

  // Reversible processings leave the robustness unchanged; re-solve to confirm.
  {
    const CMatrix u = haar_unitary(d, rng);
    const ChannelChoi g = unitary_channel(u);
    const ObsPair px{pre_process_observable(wx.first, g), pre_process_observable(wx.second, g)};
    const ObsPair py{pre_process_observable(wy.first, g), pre_process_observable(wy.second, g)};
    const double est = relative_robustness(px, py, SolverConfig{}, kBisectTol).value;
    record("weyl", "unitary_pre_resolved", t, est, std::abs(est - t) <= kTheoremTolerance ? 0.0 : std::abs(est - t));
  }
  {
    const ChannelChoi v = unitary_channel(haar_unitary(d, rng));
    const ChannelChoi w = unitary_channel(haar_unitary(d, rng));
    const ChannelPair px{v, w};
    const ChannelPair py{compose_channels(v, cy.first), compose_channels(w, cy.second)};
    const double est = relative_robustness(px, py, SolverConfig{}, kBisectTol).value;
    record("identity_channels", "unitary_post_resolved", tc, est,
           std::abs(est - tc) <= kTheoremTolerance ? 0.0 : std::abs(est - tc));
  }
  {
    // Merging both outcomes of A leaves a trivial observable, compatible with anything.
    const MarkovKernel merge = MarkovKernel::constant(1, d, 0);
    const ObsChannelPair px{post_process_observable(ox.first, merge), ox.second};
    const ObsChannelPair py{post_process_observable(oy.first, merge), oy.second};
    const ObsChannelPair at = mix(px, py, t);
    const double transported =
        witness_error(check_joint_instrument(post_process_instrument(og, merge, identity_channel(d)), at.first, at.second));
    record("vn_identity", "coarse_grain", t, t, transported);
    const double est = relative_robustness(px, py, SolverConfig{}, kBisectTol).value;
    record("vn_identity", "coarse_grain_resolved", t, est, 0.0);
  }
  return report;
}

}  // namespace incompat
