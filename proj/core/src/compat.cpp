#include "incompat/compat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "incompat/errors.hpp"

namespace incompat {

namespace {

// Writes x (x) I_k into the middle factor of [d1, k, d3] from x on [d1, d3].
CMatrix embed_middle(const CMatrix& x, std::size_t d1, std::size_t k, std::size_t d3) {
  CMatrix out(d1 * k * d3);
  for (std::size_t a = 0; a < d1; ++a)
    for (std::size_t m = 0; m < d3; ++m)
      for (std::size_t a2 = 0; a2 < d1; ++a2)
        for (std::size_t n = 0; n < d3; ++n) {
          const Complex v = x(a * d3 + m, a2 * d3 + n);
          if (v == Complex{}) continue;
          for (std::size_t b = 0; b < k; ++b) out((a * k + b) * d3 + m, (a2 * k + b) * d3 + n) = v;
        }
  return out;
}

CMatrix block_sum(const std::vector<CMatrix>& blocks) {
  CMatrix s(blocks.front().dim());
  for (const auto& b : blocks) s += b;
  return s;
}

double frobenius_distance(const std::vector<CMatrix>& x, const std::vector<CMatrix>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = (x[i] - y[i]).frobenius_norm();
    s += f * f;
  }
  return std::sqrt(s);
}

double min_block_eigenvalue(std::span<const CMatrix> blocks) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& b : blocks) m = std::min(m, min_eigenvalue(b.hermitian_part()));
  return m;
}

template <class W>
FeasibilityReport<W> to_report(BlockSolution sol, std::optional<W> witness) {
  FeasibilityReport<W> r;
  r.verdict = sol.verdict;
  r.residual = sol.residual;
  r.iterations = sol.iterations;
  r.gap = sol.gap;
  if (sol.verdict == Verdict::Feasible) r.witness = std::move(witness);
  return r;
}

void check_weight(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw WeightOutOfRange("weight " + std::to_string(t) + " outside [0, 1]");
}

void check_distribution(std::span<const double> p, std::size_t n, const char* what) {
  if (p.size() != n) throw DimensionError(std::string(what) + ": distribution length does not match outcomes");
  double s = 0.0;
  for (double x : p) {
    if (!(x >= 0.0)) throw InvalidDistribution(std::string(what) + ": negative probability");
    s += x;
  }
  if (std::abs(s - 1.0) > 1e-12) throw InvalidDistribution(std::string(what) + ": probabilities do not sum to 1");
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Feasible:
      return "Feasible";
    case Verdict::Infeasible:
      return "Infeasible";
    case Verdict::Undecided:
      return "Undecided";
  }
  return "Undecided";
}

void SolverConfig::validate() const {
  if (!(feas_tol > 0.0 && feas_tol < infeas_threshold)) {
    throw ConstraintViolation("SolverConfig: need 0 < feas_tol < infeas_threshold");
  }
  if (max_iters <= 0) throw ConstraintViolation("SolverConfig: max_iters must be positive");
  if (stall_window <= 0 || !(stall_rel_tol >= 0.0) || !(budget_drift_tol >= 0.0)) throw ConstraintViolation("SolverConfig: bad stall settings");
}

BlockSolution solve_block_feasibility(const BlockProblem& problem, const SolverConfig& cfg) {
  cfg.validate();
  const std::size_t nblocks = problem.start.size();
  std::vector<CMatrix> x;
  std::vector<CMatrix> bases;
  for (const auto& b : problem.start) {
    auto eig = hermitian_eig(b.hermitian_part());
    for (auto& v : eig.values) v = std::max(v, 0.0);
    x.push_back(eig.reconstruct().hermitian_part());
    bases.push_back(eig.vectors);
  }
  std::vector<CMatrix> increment;
  for (const auto& b : x) increment.emplace_back(b.dim());

  BlockSolution sol;
  double checkpoint_gap = -1.0;
  double drift = std::numeric_limits<double>::infinity();
  for (int it = 0;; ++it) {
    sol.residual = problem.residual(x);
    sol.iterations = it;
    if (sol.residual < cfg.feas_tol) {
      sol.verdict = Verdict::Feasible;
      sol.point = std::move(x);
      return sol;
    }
    if (it >= cfg.max_iters) break;

    // The affine set needs no Dykstra correction; the cone step does.
    std::vector<CMatrix> y = x;
    problem.project_affine(y);
    for (std::size_t i = 0; i < nblocks; ++i) {
      CMatrix z = y[i] + increment[i];
      auto eig = hermitian_eig_from(z, bases[i]);
      bases[i] = eig.vectors;
      for (auto& v : eig.values) v = std::max(v, 0.0);
      x[i] = eig.reconstruct().hermitian_part();
      increment[i] = z - x[i];
    }
    sol.gap = frobenius_distance(x, y);

    if ((it + 1) % cfg.stall_window == 0) {
      if (checkpoint_gap >= 0.0 && std::abs(sol.gap - checkpoint_gap) <= cfg.stall_rel_tol * checkpoint_gap &&
          sol.gap >= cfg.infeas_threshold) {
        sol.verdict = Verdict::Infeasible;
        sol.iterations = it + 1;
        sol.residual = problem.residual(x);
        sol.point = std::move(x);
        return sol;
      }
      if (checkpoint_gap > 0.0) drift = std::abs(sol.gap - checkpoint_gap) / checkpoint_gap;
      checkpoint_gap = sol.gap;
    }
  }
  // A gap that is still shrinking may be slow convergence onto a face of the cone.
  const bool settled = drift <= cfg.budget_drift_tol;
  sol.verdict = sol.gap >= cfg.infeas_threshold && settled ? Verdict::Infeasible : Verdict::Undecided;
  sol.point = std::move(x);
  return sol;
}

// ---- observable pairs ----------------------------------------------------

JmReport jm_feasible(const Povm& a, const Povm& b, const SolverConfig& cfg) {
  if (a.dim() != b.dim()) throw DimensionError("jm_feasible: observables act on different spaces");
  const std::size_t d = a.dim();
  const std::size_t n = a.outcomes();
  const std::size_t m = b.outcomes();

  BlockProblem problem;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < m; ++k) problem.start.push_back((a[j] + b[k]) / static_cast<double>(n + m));

  const CMatrix total = block_sum(a.effects());
  problem.project_affine = [&](std::vector<CMatrix>& g) {
    std::vector<CMatrix> row_err(n, CMatrix(d)), col_err(m, CMatrix(d));
    CMatrix s(d);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < m; ++k) {
        row_err[j] += g[j * m + k];
        col_err[k] += g[j * m + k];
        s += g[j * m + k];
      }
    for (std::size_t j = 0; j < n; ++j) row_err[j] -= a[j];
    for (std::size_t k = 0; k < m; ++k) col_err[k] -= b[k];
    const CMatrix common = (s - total) / static_cast<double>(n * m);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < m; ++k) {
        CMatrix& x = g[j * m + k];
        x -= row_err[j] / static_cast<double>(m);
        x -= col_err[k] / static_cast<double>(n);
        x += common;
      }
  };
  problem.residual = [&](const std::vector<CMatrix>& g) {
    const auto joint = JointObservable::unchecked(d, n, m, g);
    return std::max(max_effect_diff(joint.first_marginal(), a.effects()),
                    max_effect_diff(joint.second_marginal(), b.effects()));
  };

  BlockSolution sol = solve_block_feasibility(problem, cfg);
  std::optional<JointObservable> w;
  if (sol.verdict == Verdict::Feasible) w = JointObservable::unchecked(d, n, m, sol.point);
  return to_report(std::move(sol), std::move(w));
}

// ---- channel pairs -------------------------------------------------------

ChannelReport channel_compat_feasible(const ChannelChoi& e, const ChannelChoi& f, const SolverConfig& cfg) {
  if (e.din() != f.din()) throw DimensionError("channel_compat_feasible: channels have different inputs");
  const std::size_t din = e.din();
  const std::size_t d1 = e.dout();
  const std::size_t d2 = f.dout();
  const std::size_t dims[3] = {d1, d2, din};
  const std::size_t keep1[2] = {0, 2};
  const std::size_t keep2[2] = {1, 2};

  BlockProblem problem;
  problem.start.push_back(CMatrix::identity(d1 * d2 * din) / static_cast<double>(d1 * d2));
  problem.project_affine = [&](std::vector<CMatrix>& blocks) {
    CMatrix& j = blocks[0];
    const CMatrix dx = e.choi() - partial_trace(j, dims, keep1);
    const CMatrix dy = f.choi() - partial_trace(j, dims, keep2);
    const CMatrix din_err = partial_trace(dx, {d1, din}, {1});
    j += embed_middle(dx, d1, d2, din) / static_cast<double>(d2);
    j += kron(CMatrix::identity(d1), dy) / static_cast<double>(d1);
    j -= kron(CMatrix::identity(d1 * d2), din_err) / static_cast<double>(d1 * d2);
  };
  problem.residual = [&](const std::vector<CMatrix>& blocks) {
    return std::max(max_abs_diff(partial_trace(blocks[0], dims, keep1), e.choi()),
                    max_abs_diff(partial_trace(blocks[0], dims, keep2), f.choi()));
  };

  BlockSolution sol = solve_block_feasibility(problem, cfg);
  std::optional<ChannelChoi> w;
  if (sol.verdict == Verdict::Feasible) w = ChannelChoi::unchecked(din, d1 * d2, sol.point[0]);
  return to_report(std::move(sol), std::move(w));
}

// ---- observable and channel ----------------------------------------------

InstrumentReport obs_channel_feasible(const Povm& m, const ChannelChoi& e, const SolverConfig& cfg) {
  if (m.dim() != e.din()) throw DimensionError("obs_channel_feasible: observable and channel input differ");
  const std::size_t din = e.din();
  const std::size_t dout = e.dout();
  const std::size_t n = m.outcomes();
  std::vector<CMatrix> targets;
  for (const auto& x : m.effects()) targets.push_back(x.transpose());

  BlockProblem problem;
  const CMatrix maximally_mixed = CMatrix::identity(dout) / static_cast<double>(dout);
  for (const auto& t : targets) problem.start.push_back(kron(maximally_mixed, t));
  problem.project_affine = [&](std::vector<CMatrix>& blocks) {
    std::vector<CMatrix> dm;
    CMatrix dsum(din);
    for (std::size_t j = 0; j < n; ++j) {
      dm.push_back(targets[j] - partial_trace(blocks[j], {dout, din}, {1}));
      dsum += dm.back();
    }
    const CMatrix dc = e.choi() - block_sum(blocks);
    const CMatrix common = dc / static_cast<double>(n) -
                           kron(CMatrix::identity(dout), dsum) / static_cast<double>(n * dout);
    for (std::size_t j = 0; j < n; ++j) {
      blocks[j] += kron(CMatrix::identity(dout), dm[j]) / static_cast<double>(dout);
      blocks[j] += common;
    }
  };
  problem.residual = [&](const std::vector<CMatrix>& blocks) {
    double r = max_abs_diff(block_sum(blocks), e.choi());
    for (std::size_t j = 0; j < n; ++j) {
      r = std::max(r, max_abs_diff(partial_trace(blocks[j], {dout, din}, {1}), targets[j]));
    }
    return r;
  };

  BlockSolution sol = solve_block_feasibility(problem, cfg);
  std::optional<Instrument> w;
  if (sol.verdict == Verdict::Feasible) w = Instrument::unchecked(din, dout, sol.point);
  return to_report(std::move(sol), std::move(w));
}

Verdict compatibility_verdict(const ObsPair& p, const SolverConfig& cfg) {
  return jm_feasible(p.first, p.second, cfg).verdict;
}
Verdict compatibility_verdict(const ChannelPair& p, const SolverConfig& cfg) {
  return channel_compat_feasible(p.first, p.second, cfg).verdict;
}
Verdict compatibility_verdict(const ObsChannelPair& p, const SolverConfig& cfg) {
  return obs_channel_feasible(p.first, p.second, cfg).verdict;
}

bool is_compatible(const ObsPair& p, const SolverConfig& cfg) {
  return compatibility_verdict(p, cfg) == Verdict::Feasible;
}
bool is_compatible(const ChannelPair& p, const SolverConfig& cfg) {
  return compatibility_verdict(p, cfg) == Verdict::Feasible;
}
bool is_compatible(const ObsChannelPair& p, const SolverConfig& cfg) {
  return compatibility_verdict(p, cfg) == Verdict::Feasible;
}

// ---- witness checks ------------------------------------------------------

WitnessCheck check_joint_observable(const JointObservable& g, const Povm& a, const Povm& b) {
  if (g.dim() != a.dim() || g.rows() != a.outcomes() || g.cols() != b.outcomes() || a.dim() != b.dim()) {
    throw DimensionError("check_joint_observable: shape mismatch");
  }
  WitnessCheck c;
  c.marginal_residual =
      std::max(max_effect_diff(g.first_marginal(), a.effects()), max_effect_diff(g.second_marginal(), b.effects()));
  c.min_eigenvalue = min_block_eigenvalue(g.grid());
  return c;
}

WitnessCheck check_joint_channel(const ChannelChoi& joint, const ChannelChoi& e, const ChannelChoi& f) {
  if (joint.din() != e.din() || e.din() != f.din() || joint.dout() != e.dout() * f.dout()) {
    throw DimensionError("check_joint_channel: shape mismatch");
  }
  const auto [m1, m2] = channel_marginals(joint, e.dout(), f.dout());
  WitnessCheck c;
  c.marginal_residual = std::max(max_abs_diff(m1.choi(), e.choi()), max_abs_diff(m2.choi(), f.choi()));
  const CMatrix blocks[1] = {joint.choi()};
  c.min_eigenvalue = min_block_eigenvalue(blocks);
  return c;
}

WitnessCheck check_joint_instrument(const Instrument& gamma, const Povm& m, const ChannelChoi& e) {
  if (gamma.din() != e.din() || gamma.dout() != e.dout() || gamma.outcomes() != m.outcomes() || m.dim() != e.din()) {
    throw DimensionError("check_joint_instrument: shape mismatch");
  }
  const auto effects = instrument_effects(gamma);
  WitnessCheck c;
  c.marginal_residual =
      std::max(max_effect_diff(effects, m.effects()), max_abs_diff(block_sum(gamma.blocks()), e.choi()));
  c.min_eigenvalue = min_block_eigenvalue(gamma.blocks());
  return c;
}

// ---- constructive witnesses ----------------------------------------------

Instrument half_witness_instrument(const Povm& m, const ChannelChoi& e, std::span<const double> p, const CMatrix& sigma,
                               double t) {
  check_weight(t);
  if (m.dim() != e.din() || sigma.dim() != e.dout()) throw DimensionError("half_witness_instrument: shape mismatch");
  check_distribution(p, m.outcomes(), "half_witness_instrument");
  std::vector<CMatrix> blocks;
  for (std::size_t j = 0; j < m.outcomes(); ++j) {
    blocks.push_back(t * kron(sigma, m[j].transpose()) + ((1.0 - t) * p[j]) * e.choi());
  }
  return Instrument(e.din(), e.dout(), std::move(blocks));
}

JointObservable obs_half_witness(const Povm& a, const Povm& b, std::span<const double> p, std::span<const double> q,
                                 double t) {
  check_weight(t);
  if (a.dim() != b.dim()) throw DimensionError("obs_half_witness: observables act on different spaces");
  check_distribution(p, a.outcomes(), "obs_half_witness");
  check_distribution(q, b.outcomes(), "obs_half_witness");
  std::vector<CMatrix> grid;
  for (std::size_t j = 0; j < a.outcomes(); ++j)
    for (std::size_t k = 0; k < b.outcomes(); ++k) grid.push_back((t * q[k]) * a[j] + ((1.0 - t) * p[j]) * b[k]);
  return JointObservable(a.dim(), a.outcomes(), b.outcomes(), std::move(grid));
}

ChannelChoi channel_half_witness(const ChannelChoi& e, const ChannelChoi& f, const CMatrix& sigma, const CMatrix& tau,
                                 double t) {
  check_weight(t);
  if (e.din() != f.din() || sigma.dim() != e.dout() || tau.dim() != f.dout()) {
    throw DimensionError("channel_half_witness: shape mismatch");
  }
  const std::size_t din = e.din();
  const std::size_t d1 = e.dout();
  const std::size_t d2 = f.dout();
  const CMatrix& first = e.choi();
  CMatrix left(d1 * d2 * din), right(d1 * d2 * din);
  for (std::size_t a = 0; a < d1; ++a)
    for (std::size_t a2 = 0; a2 < d1; ++a2)
      for (std::size_t b = 0; b < d2; ++b)
        for (std::size_t b2 = 0; b2 < d2; ++b2)
          for (std::size_t m = 0; m < din; ++m)
            for (std::size_t n = 0; n < din; ++n) {
              const std::size_t r = (a * d2 + b) * din + m;
              const std::size_t c = (a2 * d2 + b2) * din + n;
              left(r, c) = first(a * din + m, a2 * din + n) * tau(b, b2);
              right(r, c) = sigma(a, a2) * f.choi()(b * din + m, b2 * din + n);
            }
  return ChannelChoi(din, d1 * d2, t * left + (1.0 - t) * right);
}

}  // namespace incompat
