#include "incompat/devices.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include "incompat/errors.hpp"

namespace incompat {

namespace {

std::atomic<double> g_device_tol{1e-10};

// Hermitian within tol and min eigenvalue >= -tol.
bool is_psd(const CMatrix& m, double tol) {
  if (!m.is_hermitian(std::max(tol, kHermitianTol))) return false;
  return min_eigenvalue(m.hermitian_part()) >= -tol;
}

bool close_to_identity(const CMatrix& m, double tol) {
  return max_abs_diff(m, CMatrix::identity(m.dim())) <= tol;
}

void check_weight(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw WeightOutOfRange("mix: weight " + std::to_string(t) + " outside [0, 1]");
}

CMatrix output_trace(const CMatrix& choi, std::size_t din, std::size_t dout) {
  return partial_trace(choi, {dout, din}, {1});
}

std::vector<CMatrix> mix_lists(const std::vector<CMatrix>& x, const std::vector<CMatrix>& y, double t) {
  std::vector<CMatrix> out;
  out.reserve(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out.push_back(t * x[j] + (1.0 - t) * y[j]);
  return out;
}

}  // namespace

double device_tolerance() { return g_device_tol.load(); }

void set_device_tolerance(double tol) {
  if (!(tol > 0.0)) throw ConstraintViolation("device tolerance must be positive");
  g_device_tol.store(tol);
}

// ---- Povm ----------------------------------------------------------------

Povm::Povm(std::size_t dim, std::vector<CMatrix> effects, double tol) : dim_(dim), effects_(std::move(effects)) {
  if (dim_ == 0) throw DimensionError("Povm: dimension must be positive");
  if (effects_.empty()) throw InvalidPovm("Povm: needs at least one effect");
  CMatrix sum(dim_);
  for (std::size_t j = 0; j < effects_.size(); ++j) {
    if (effects_[j].dim() != dim_) throw DimensionError("Povm: effect " + std::to_string(j) + " has wrong dimension");
    if (!is_psd(effects_[j], tol)) throw InvalidPovm("Povm: effect " + std::to_string(j) + " is not positive");
    sum += effects_[j];
  }
  if (!close_to_identity(sum, tol)) throw InvalidPovm("Povm: effects do not sum to the identity");
}

Povm Povm::unchecked(std::size_t dim, std::vector<CMatrix> effects) {
  Povm p;
  p.dim_ = dim;
  p.effects_ = std::move(effects);
  return p;
}

// ---- ChannelChoi ---------------------------------------------------------

ChannelChoi::ChannelChoi(std::size_t din, std::size_t dout, CMatrix choi, double tol)
    : din_(din), dout_(dout), choi_(std::move(choi)) {
  if (din_ == 0 || dout_ == 0) throw DimensionError("ChannelChoi: dimensions must be positive");
  if (choi_.dim() != din_ * dout_) throw DimensionError("ChannelChoi: Choi matrix must have dimension din*dout");
  if (!is_psd(choi_, tol)) throw InvalidChannel("ChannelChoi: Choi matrix is not positive (map not CP)");
  if (!close_to_identity(output_trace(choi_, din_, dout_), tol)) {
    throw InvalidChannel("ChannelChoi: map is not trace preserving");
  }
}

ChannelChoi ChannelChoi::unchecked(std::size_t din, std::size_t dout, CMatrix choi) {
  ChannelChoi c;
  c.din_ = din;
  c.dout_ = dout;
  c.choi_ = std::move(choi);
  return c;
}

// ---- Instrument ----------------------------------------------------------

Instrument::Instrument(std::size_t din, std::size_t dout, std::vector<CMatrix> blocks, double tol)
    : din_(din), dout_(dout), blocks_(std::move(blocks)) {
  if (din_ == 0 || dout_ == 0) throw DimensionError("Instrument: dimensions must be positive");
  if (blocks_.empty()) throw InvalidInstrument("Instrument: needs at least one outcome");
  CMatrix sum(din_ * dout_);
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    if (blocks_[j].dim() != din_ * dout_) {
      throw DimensionError("Instrument: block " + std::to_string(j) + " has wrong dimension");
    }
    if (!is_psd(blocks_[j], tol)) throw InvalidInstrument("Instrument: block " + std::to_string(j) + " is not CP");
    sum += blocks_[j];
  }
  if (!close_to_identity(output_trace(sum, din_, dout_), tol)) {
    throw InvalidInstrument("Instrument: total operation is not trace preserving");
  }
}

Instrument Instrument::unchecked(std::size_t din, std::size_t dout, std::vector<CMatrix> blocks) {
  Instrument g;
  g.din_ = din;
  g.dout_ = dout;
  g.blocks_ = std::move(blocks);
  return g;
}

// ---- MarkovKernel --------------------------------------------------------

MarkovKernel::MarkovKernel(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows_ == 0 || cols_ == 0) throw DimensionError("MarkovKernel: shape must be nonempty");
  if (entries_.size() != rows_ * cols_) throw DimensionError("MarkovKernel: entry count does not match shape");
  for (std::size_t w = 0; w < cols_; ++w) {
    double s = 0.0;
    for (std::size_t y = 0; y < rows_; ++y) {
      const double v = entries_[y * cols_ + w];
      if (!(v >= 0.0)) throw InvalidDistribution("MarkovKernel: negative entry");
      s += v;
    }
    if (std::abs(s - 1.0) > 1e-12) throw InvalidDistribution("MarkovKernel: column does not sum to 1");
  }
}

MarkovKernel MarkovKernel::identity(std::size_t n) {
  std::vector<double> e(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) e[i * n + i] = 1.0;
  return MarkovKernel(n, n, std::move(e));
}

MarkovKernel MarkovKernel::constant(std::size_t rows, std::size_t cols, std::size_t to) {
  if (to >= rows) throw DimensionError("MarkovKernel::constant: target outcome out of range");
  std::vector<double> e(rows * cols, 0.0);
  for (std::size_t w = 0; w < cols; ++w) e[to * cols + w] = 1.0;
  return MarkovKernel(rows, cols, std::move(e));
}

// ---- JointObservable -----------------------------------------------------

JointObservable::JointObservable(std::size_t dim, std::size_t rows, std::size_t cols, std::vector<CMatrix> grid,
                                 double tol)
    : dim_(dim), rows_(rows), cols_(cols), grid_(std::move(grid)) {
  if (grid_.size() != rows_ * cols_ || grid_.empty()) throw DimensionError("JointObservable: grid shape mismatch");
  CMatrix sum(dim_);
  for (const auto& g : grid_) {
    if (g.dim() != dim_) throw DimensionError("JointObservable: block has wrong dimension");
    if (!is_psd(g, tol)) throw InvalidPovm("JointObservable: block is not positive");
    sum += g;
  }
  if (!close_to_identity(sum, tol)) throw InvalidPovm("JointObservable: blocks do not sum to the identity");
}

JointObservable JointObservable::unchecked(std::size_t dim, std::size_t rows, std::size_t cols,
                                           std::vector<CMatrix> grid) {
  JointObservable g;
  g.dim_ = dim;
  g.rows_ = rows;
  g.cols_ = cols;
  g.grid_ = std::move(grid);
  return g;
}

std::vector<CMatrix> JointObservable::first_marginal() const {
  std::vector<CMatrix> out(rows_, CMatrix(dim_));
  for (std::size_t j = 0; j < rows_; ++j)
    for (std::size_t k = 0; k < cols_; ++k) out[j] += (*this)(j, k);
  return out;
}

std::vector<CMatrix> JointObservable::second_marginal() const {
  std::vector<CMatrix> out(cols_, CMatrix(dim_));
  for (std::size_t j = 0; j < rows_; ++j)
    for (std::size_t k = 0; k < cols_; ++k) out[k] += (*this)(j, k);
  return out;
}

// ---- constructors --------------------------------------------------------

Povm trivial_observable(std::span<const double> p, std::size_t d) {
  if (p.empty()) throw InvalidDistribution("trivial_observable: empty distribution");
  double s = 0.0;
  for (double x : p) {
    if (!(x >= 0.0)) throw InvalidDistribution("trivial_observable: negative probability");
    s += x;
  }
  if (std::abs(s - 1.0) > 1e-12) throw InvalidDistribution("trivial_observable: probabilities do not sum to 1");
  std::vector<CMatrix> effects;
  for (double x : p) effects.push_back(x * CMatrix::identity(d));
  return Povm(d, std::move(effects));
}

Povm standard_basis_observable(std::size_t d) {
  std::vector<CMatrix> effects;
  for (std::size_t j = 0; j < d; ++j) effects.push_back(CMatrix::unit(d, j, j));
  return Povm(d, std::move(effects));
}

Povm basis_observable(const CMatrix& unitary) {
  const std::size_t d = unitary.dim();
  std::vector<CMatrix> effects;
  for (std::size_t j = 0; j < d; ++j) {
    CVector col(d);
    for (std::size_t i = 0; i < d; ++i) col[i] = unitary(i, j);
    effects.push_back(CMatrix::projector(col));
  }
  return Povm(d, std::move(effects));
}

ChannelChoi identity_channel(std::size_t d) { return ChannelChoi(d, d, omega(d)); }

CMatrix kraus_choi(std::span<const CMatrix> kraus) {
  if (kraus.empty()) throw DimensionError("kraus_choi: no Kraus operators");
  const std::size_t d = kraus.front().dim();
  CMatrix out(d * d);
  for (const auto& k : kraus) {
    if (k.dim() != d) throw DimensionError("kraus_choi: Kraus operators differ in dimension");
    // (K (x) I)|Omega> has components K(a, m) at (a, m).
    CVector v(d * d);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t m = 0; m < d; ++m) v[a * d + m] = k(a, m);
    out += CMatrix::projector(v);
  }
  return out;
}

ChannelChoi unitary_channel(const CMatrix& u) {
  const CMatrix k[1] = {u};
  return ChannelChoi(u.dim(), u.dim(), kraus_choi(k));
}

ChannelChoi constant_channel(const CMatrix& sigma, std::size_t din) {
  if (!is_psd(sigma, device_tolerance()) || std::abs(sigma.trace() - 1.0) > device_tolerance()) {
    throw NotAState("constant_channel: sigma is not a density matrix");
  }
  return ChannelChoi(din, sigma.dim(), kron(sigma, CMatrix::identity(din)));
}

ChannelChoi completely_depolarizing_channel(std::size_t d) {
  return constant_channel(CMatrix::identity(d) / static_cast<double>(d), d);
}

ChannelChoi kraus_channel(std::span<const CMatrix> kraus) {
  const std::size_t d = kraus.empty() ? 0 : kraus.front().dim();
  return ChannelChoi(d, d, kraus_choi(kraus));
}

ChannelChoi lueders_channel(const Povm& a) {
  std::vector<CMatrix> kraus;
  for (const auto& e : a.effects()) kraus.push_back(psd_sqrt(e.hermitian_part()));
  try {
    return kraus_channel(kraus);
  } catch (const InvalidChannel& err) {
    throw InvalidPovm(std::string("lueders_channel: ") + err.what());
  }
}

// ---- action --------------------------------------------------------------

CMatrix apply_map(const CMatrix& choi, std::size_t din, std::size_t dout, const CMatrix& rho) {
  if (choi.dim() != din * dout || rho.dim() != din) throw DimensionError("apply_map: dimension mismatch");
  CMatrix out(dout);
  for (std::size_t a = 0; a < dout; ++a)
    for (std::size_t b = 0; b < dout; ++b) {
      Complex s = 0.0;
      for (std::size_t m = 0; m < din; ++m)
        for (std::size_t n = 0; n < din; ++n) s += choi(a * din + m, b * din + n) * rho(m, n);
      out(a, b) = s;
    }
  return out;
}

CMatrix apply_dual_map(const CMatrix& choi, std::size_t din, std::size_t dout, const CMatrix& x) {
  if (choi.dim() != din * dout || x.dim() != dout) throw DimensionError("apply_dual_map: dimension mismatch");
  CMatrix out(din);
  for (std::size_t m = 0; m < din; ++m)
    for (std::size_t n = 0; n < din; ++n) {
      Complex s = 0.0;
      for (std::size_t a = 0; a < dout; ++a)
        for (std::size_t b = 0; b < dout; ++b) s += x(a, b) * choi(b * din + n, a * din + m);
      out(m, n) = s;
    }
  return out;
}

CMatrix compose_maps(const CMatrix& f, std::size_t dout_f, const CMatrix& g, std::size_t din_g, std::size_t dout_g) {
  if (g.dim() != din_g * dout_g || f.dim() != dout_g * dout_f) throw DimensionError("compose_maps: dimension mismatch");
  CMatrix out(dout_f * din_g);
  CMatrix block(dout_g);
  for (std::size_t m = 0; m < din_g; ++m)
    for (std::size_t n = 0; n < din_g; ++n) {
      for (std::size_t a = 0; a < dout_g; ++a)
        for (std::size_t b = 0; b < dout_g; ++b) block(a, b) = g(a * din_g + m, b * din_g + n);
      const CMatrix image = apply_map(f, dout_g, dout_f, block);
      for (std::size_t c = 0; c < dout_f; ++c)
        for (std::size_t e = 0; e < dout_f; ++e) out(c * din_g + m, e * din_g + n) = image(c, e);
    }
  return out;
}

CMatrix apply_channel(const ChannelChoi& e, const CMatrix& rho) { return apply_map(e.choi(), e.din(), e.dout(), rho); }

CMatrix apply_dual_channel(const ChannelChoi& e, const CMatrix& x) {
  return apply_dual_map(e.choi(), e.din(), e.dout(), x);
}

// ---- processing ----------------------------------------------------------

Povm pre_process_observable(const Povm& m, const ChannelChoi& e) {
  if (e.dout() != m.dim()) throw DimensionError("pre_process_observable: channel output does not match observable");
  std::vector<CMatrix> effects;
  for (const auto& x : m.effects()) effects.push_back(apply_dual_channel(e, x).hermitian_part());
  return Povm::unchecked(e.din(), std::move(effects));
}

Povm post_process_observable(const Povm& m, const MarkovKernel& beta) {
  if (beta.cols() != m.outcomes()) throw DimensionError("post_process_observable: kernel does not match outcomes");
  std::vector<CMatrix> effects(beta.rows(), CMatrix(m.dim()));
  for (std::size_t y = 0; y < beta.rows(); ++y)
    for (std::size_t w = 0; w < beta.cols(); ++w)
      if (beta(y, w) != 0.0) effects[y] += beta(y, w) * m[w];
  return Povm::unchecked(m.dim(), std::move(effects));
}

ChannelChoi compose_channels(const ChannelChoi& f, const ChannelChoi& g) {
  if (g.dout() != f.din()) throw DimensionError("compose_channels: output of g does not match input of f");
  return ChannelChoi::unchecked(g.din(), f.dout(), compose_maps(f.choi(), f.dout(), g.choi(), g.din(), g.dout()));
}

ChannelChoi tensor_channels(const ChannelChoi& e, const ChannelChoi& f) {
  const CMatrix k = kron(e.choi(), f.choi());
  const std::size_t dims[4] = {e.dout(), e.din(), f.dout(), f.din()};
  const std::size_t order[4] = {0, 2, 1, 3};
  return ChannelChoi::unchecked(e.din() * f.din(), e.dout() * f.dout(), permute_systems(k, dims, order));
}

Instrument pre_process_instrument(const Instrument& gamma, const ChannelChoi& g) {
  if (g.dout() != gamma.din()) throw DimensionError("pre_process_instrument: channel output does not match input");
  std::vector<CMatrix> blocks;
  for (const auto& b : gamma.blocks()) blocks.push_back(compose_maps(b, gamma.dout(), g.choi(), g.din(), g.dout()));
  return Instrument::unchecked(g.din(), gamma.dout(), std::move(blocks));
}

Instrument post_process_instrument(const Instrument& gamma, const MarkovKernel& beta, const ChannelChoi& b) {
  if (beta.cols() != gamma.outcomes()) throw DimensionError("post_process_instrument: kernel does not match outcomes");
  if (b.din() != gamma.dout()) throw DimensionError("post_process_instrument: channel input does not match output");
  std::vector<CMatrix> processed;
  for (const auto& blk : gamma.blocks()) processed.push_back(compose_maps(b.choi(), b.dout(), blk, gamma.din(), gamma.dout()));
  std::vector<CMatrix> blocks(beta.rows(), CMatrix(gamma.din() * b.dout()));
  for (std::size_t y = 0; y < beta.rows(); ++y)
    for (std::size_t j = 0; j < beta.cols(); ++j)
      if (beta(y, j) != 0.0) blocks[y] += beta(y, j) * processed[j];
  return Instrument::unchecked(gamma.din(), b.dout(), std::move(blocks));
}

JointObservable post_process_joint(const JointObservable& g, const MarkovKernel& beta1, const MarkovKernel& beta2) {
  if (beta1.cols() != g.rows() || beta2.cols() != g.cols()) throw DimensionError("post_process_joint: kernel mismatch");
  std::vector<CMatrix> grid(beta1.rows() * beta2.rows(), CMatrix(g.dim()));
  for (std::size_t y = 0; y < beta1.rows(); ++y)
    for (std::size_t z = 0; z < beta2.rows(); ++z)
      for (std::size_t j = 0; j < g.rows(); ++j)
        for (std::size_t k = 0; k < g.cols(); ++k) {
          const double w = beta1(y, j) * beta2(z, k);
          if (w != 0.0) grid[y * beta2.rows() + z] += w * g(j, k);
        }
  return JointObservable::unchecked(g.dim(), beta1.rows(), beta2.rows(), std::move(grid));
}

JointObservable pre_process_joint(const JointObservable& g, const ChannelChoi& e) {
  if (e.dout() != g.dim()) throw DimensionError("pre_process_joint: channel output does not match observable");
  std::vector<CMatrix> grid;
  for (const auto& x : g.grid()) grid.push_back(apply_dual_channel(e, x).hermitian_part());
  return JointObservable::unchecked(e.din(), g.rows(), g.cols(), std::move(grid));
}

// ---- marginals -----------------------------------------------------------

std::pair<ChannelChoi, ChannelChoi> channel_marginals(const ChannelChoi& f, std::size_t k1, std::size_t k2) {
  if (k1 * k2 != f.dout()) throw DimensionError("channel_marginals: output does not factor as k1*k2");
  const std::size_t dims[3] = {k1, k2, f.din()};
  const std::size_t keep1[2] = {0, 2};
  const std::size_t keep2[2] = {1, 2};
  return {ChannelChoi::unchecked(f.din(), k1, partial_trace(f.choi(), dims, keep1)),
          ChannelChoi::unchecked(f.din(), k2, partial_trace(f.choi(), dims, keep2))};
}

std::vector<CMatrix> instrument_effects(const Instrument& g) {
  std::vector<CMatrix> effects;
  for (const auto& b : g.blocks()) effects.push_back(output_trace(b, g.din(), g.dout()).transpose());
  return effects;
}

std::pair<Povm, ChannelChoi> instrument_marginals(const Instrument& g) {
  CMatrix sum(g.din() * g.dout());
  for (const auto& b : g.blocks()) sum += b;
  return {Povm::unchecked(g.din(), instrument_effects(g)), ChannelChoi::unchecked(g.din(), g.dout(), std::move(sum))};
}

// ---- Choi conventions ----------------------------------------------------

CMatrix dual_choi(const ChannelChoi& e) { return permute_systems(e.choi().transpose(), {e.dout(), e.din()}, {1, 0}); }

ChannelChoi from_dual_choi(const CMatrix& m, std::size_t din, std::size_t dout, double tol) {
  if (m.dim() != din * dout) throw DimensionError("from_dual_choi: dimension mismatch");
  return ChannelChoi(din, dout, permute_systems(m.transpose(), {din, dout}, {1, 0}), tol);
}

// ---- convex combinations -------------------------------------------------

Povm mix(const Povm& x, const Povm& y, double t) {
  check_weight(t);
  if (x.dim() != y.dim() || x.outcomes() != y.outcomes()) throw DimensionError("mix: observables differ in shape");
  return Povm::unchecked(x.dim(), mix_lists(x.effects(), y.effects(), t));
}

ChannelChoi mix(const ChannelChoi& x, const ChannelChoi& y, double t) {
  check_weight(t);
  if (x.din() != y.din() || x.dout() != y.dout()) throw DimensionError("mix: channels differ in shape");
  return ChannelChoi::unchecked(x.din(), x.dout(), t * x.choi() + (1.0 - t) * y.choi());
}

Instrument mix(const Instrument& x, const Instrument& y, double t) {
  check_weight(t);
  if (x.din() != y.din() || x.dout() != y.dout() || x.outcomes() != y.outcomes()) {
    throw DimensionError("mix: instruments differ in shape");
  }
  return Instrument::unchecked(x.din(), x.dout(), mix_lists(x.blocks(), y.blocks(), t));
}

ObsPair mix(const ObsPair& x, const ObsPair& y, double t) {
  return {mix(x.first, y.first, t), mix(x.second, y.second, t)};
}

ChannelPair mix(const ChannelPair& x, const ChannelPair& y, double t) {
  return {mix(x.first, y.first, t), mix(x.second, y.second, t)};
}

ObsChannelPair mix(const ObsChannelPair& x, const ObsChannelPair& y, double t) {
  return {mix(x.first, y.first, t), mix(x.second, y.second, t)};
}

ChannelChoi affine_channel(std::span<const double> weights, std::span<const ChannelChoi> channels, double tol) {
  if (weights.size() != channels.size() || channels.empty()) throw DimensionError("affine_channel: size mismatch");
  const auto& first = channels.front();
  CMatrix sum(first.choi().dim());
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (channels[i].din() != first.din() || channels[i].dout() != first.dout()) {
      throw DimensionError("affine_channel: channels differ in shape");
    }
    sum += weights[i] * channels[i].choi();
  }
  return ChannelChoi(first.din(), first.dout(), std::move(sum), tol);
}

Povm affine_observable(std::span<const double> weights, std::span<const Povm> observables, double tol) {
  if (weights.size() != observables.size() || observables.empty()) {
    throw DimensionError("affine_observable: size mismatch");
  }
  const auto& first = observables.front();
  std::vector<CMatrix> effects(first.outcomes(), CMatrix(first.dim()));
  for (std::size_t i = 0; i < observables.size(); ++i) {
    if (observables[i].dim() != first.dim() || observables[i].outcomes() != first.outcomes()) {
      throw DimensionError("affine_observable: observables differ in shape");
    }
    for (std::size_t j = 0; j < first.outcomes(); ++j) effects[j] += weights[i] * observables[i][j];
  }
  return Povm(first.dim(), std::move(effects), tol);
}

double max_effect_diff(std::span<const CMatrix> a, std::span<const CMatrix> b) {
  if (a.size() != b.size()) throw DimensionError("max_effect_diff: list lengths differ");
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, max_abs_diff(a[j], b[j]));
  return m;
}

}  // namespace incompat
