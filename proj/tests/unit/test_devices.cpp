#include <gtest/gtest.h>

#include <cmath>

#include "incompat/covariance.hpp"
#include "incompat/devices.hpp"
#include "incompat/errors.hpp"
#include "incompat/random.hpp"

namespace incompat {
namespace {

constexpr double kTol = 1e-10;

CMatrix proj0() { return CMatrix::unit(2, 0, 0); }

void expect_close(const CMatrix& a, const CMatrix& b, double tol = kTol) { EXPECT_LT(max_abs_diff(a, b), tol); }

void expect_same_povm(const Povm& a, const Povm& b, double tol = kTol) {
  ASSERT_EQ(a.outcomes(), b.outcomes());
  EXPECT_LT(max_effect_diff(a.effects(), b.effects()), tol);
}

void expect_valid_channel(const ChannelChoi& e) {
  EXPECT_GE(min_eigenvalue(e.choi()), -kTol);
  expect_close(partial_trace(e.choi(), {e.dout(), e.din()}, {1}), CMatrix::identity(e.din()));
}

void expect_valid_povm(const Povm& m) {
  CMatrix sum(m.dim());
  for (const auto& x : m.effects()) {
    EXPECT_GE(min_eigenvalue(x), -kTol);
    sum += x;
  }
  expect_close(sum, CMatrix::identity(m.dim()));
}

TEST(TrivialObservable, Examples) {
  const std::vector<double> p{1.0, 0.0};
  const Povm t = trivial_observable(p, 2);
  EXPECT_EQ(t[0], CMatrix::identity(2));
  EXPECT_EQ(t[1], CMatrix(2));

  const std::vector<double> u(3, 1.0 / 3.0);
  const Povm tu = trivial_observable(u, 3);
  for (std::size_t j = 0; j < 3; ++j) expect_close(tu[j], CMatrix::identity(3) / 3.0);

  const std::vector<double> h{0.5, 0.5};
  const Povm th = trivial_observable(h, 3);
  ASSERT_EQ(th.outcomes(), 2u);
  expect_close(th[1], 0.5 * CMatrix::identity(3));
}

TEST(TrivialObservable, RejectsBadDistribution) {
  const std::vector<double> neg{1.5, -0.5};
  const std::vector<double> short_sum{0.3, 0.3};
  EXPECT_THROW(trivial_observable(neg, 2), InvalidDistribution);
  EXPECT_THROW(trivial_observable(short_sum, 2), InvalidDistribution);
}

TEST(Povm, RejectsNonPositiveOrUnnormalised) {
  EXPECT_THROW(Povm(2, {2.0 * CMatrix::identity(2), -1.0 * CMatrix::identity(2)}), InvalidPovm);
  EXPECT_THROW(Povm(2, {proj0()}), InvalidPovm);
  EXPECT_THROW(Povm(2, {CMatrix::identity(3)}), DimensionError);
}

TEST(ChannelChoi, RejectsInvalidChoi) {
  EXPECT_THROW(ChannelChoi(2, 2, CMatrix::identity(4)), InvalidChannel);
  EXPECT_THROW(ChannelChoi(2, 2, -1.0 * omega(2)), InvalidChannel);
  EXPECT_THROW(ChannelChoi(2, 3, omega(2)), DimensionError);
}

TEST(MarkovKernel, Validation) {
  EXPECT_THROW(MarkovKernel(2, 2, {0.5, 0.5, 0.6, 0.5}), InvalidDistribution);
  EXPECT_THROW(MarkovKernel(2, 1, {1.2, -0.2}), InvalidDistribution);
  const MarkovKernel k = MarkovKernel::constant(3, 2, 1);
  EXPECT_EQ(k(1, 0), 1.0);
  EXPECT_EQ(k(0, 1), 0.0);
}

TEST(ConstantChannel, Examples) {
  const ChannelChoi t = constant_channel(CMatrix::identity(3) / 3.0, 3);
  expect_close(t.choi(), kron(CMatrix::identity(3) / 3.0, CMatrix::identity(3)));
  expect_close(t.choi(), completely_depolarizing_channel(3).choi());

  const ChannelChoi c = constant_channel(proj0(), 2);
  expect_close(c.choi(), kron(proj0(), CMatrix::identity(2)));

  Rng rng(1);
  for (int i = 0; i < 10; ++i) expect_close(apply_channel(c, random_state(2, rng)), proj0());
}

TEST(ConstantChannel, RejectsNonState) {
  EXPECT_THROW(constant_channel(CMatrix::identity(2), 2), NotAState);
  EXPECT_THROW(constant_channel(CMatrix{{1.5, 0.0}, {0.0, -0.5}}, 2), NotAState);
}

TEST(LuedersChannel, VonNeumannIsDephasing) {
  const std::size_t d = 3;
  CMatrix expected(d * d);
  for (std::size_t j = 0; j < d; ++j) expected(j * d + j, j * d + j) = 1.0;
  expect_close(lueders_channel(standard_basis_observable(d)).choi(), expected);
}

TEST(LuedersChannel, SingleEffectAndUniformTrivialAreIdentity) {
  expect_close(lueders_channel(Povm(2, {CMatrix::identity(2)})).choi(), omega(2));
  const std::vector<double> u{0.5, 0.5};
  // sum_j (I/sqrt 2) rho (I/sqrt 2) = rho, assembled entry by entry.
  CMatrix brute(4);
  for (std::size_t m = 0; m < 2; ++m)
    for (std::size_t n = 0; n < 2; ++n) brute += kron(2.0 * (0.5 * CMatrix::unit(2, m, n)), CMatrix::unit(2, m, n));
  expect_close(lueders_channel(trivial_observable(u, 2)).choi(), brute);
  expect_close(brute, omega(2));
}

TEST(LuedersChannel, NonProjectiveUsesSquareRoots) {
  const CMatrix a0{{0.75, 0.0}, {0.0, 0.25}};
  const Povm a(2, {a0, CMatrix::identity(2) - a0});
  const ChannelChoi l = lueders_channel(a);
  expect_valid_channel(l);
  const CMatrix rho{{0.5, 0.5}, {0.5, 0.5}};
  const double off = std::sqrt(0.75 * 0.25) * 2.0 * 0.5;
  expect_close(apply_channel(l, rho), CMatrix{{0.5, off}, {off, 0.5}});
}

TEST(PreProcess, Examples) {
  Rng rng(2);
  const Povm m = random_povm(3, 4, rng);
  expect_same_povm(pre_process_observable(m, identity_channel(3)), m);

  const CMatrix sigma = random_state(3, rng);
  const Povm t = pre_process_observable(m, constant_channel(sigma, 3));
  for (std::size_t j = 0; j < 4; ++j) expect_close(t[j], hs_inner(sigma, m[j]).real() * CMatrix::identity(3));

  const CMatrix u = haar_unitary(3, rng);
  const Povm r = pre_process_observable(m, unitary_channel(u));
  for (std::size_t j = 0; j < 4; ++j) expect_close(r[j], u.adjoint() * m[j] * u);

  EXPECT_THROW(pre_process_observable(m, identity_channel(2)), DimensionError);
}

TEST(PreProcess, PreservesValidityOnRandomPairs) {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const std::size_t din = 2 + i % 3, dout = 2 + (i / 3) % 2;
    const Povm m = random_povm(dout, 2 + i % 3, rng);
    const ChannelChoi e = random_channel(din, dout, (din + dout - 1) / dout + i % 3, rng);
    const Povm out = pre_process_observable(m, e);
    EXPECT_EQ(out.dim(), din);
    expect_valid_povm(out);
  }
}

TEST(PostProcess, Examples) {
  Rng rng(4);
  const Povm m = random_povm(2, 3, rng);
  expect_same_povm(post_process_observable(m, MarkovKernel::identity(3)), m);

  const Povm c = post_process_observable(m, MarkovKernel::constant(3, 3, 0));
  expect_close(c[0], CMatrix::identity(2));
  expect_close(c[1], CMatrix(2));
  expect_close(c[2], CMatrix(2));

  const Povm merged = post_process_observable(m, MarkovKernel(2, 3, {1.0, 1.0, 0.0, 0.0, 0.0, 1.0}));
  ASSERT_EQ(merged.outcomes(), 2u);
  expect_close(merged[0], m[0] + m[1]);
  expect_close(merged[1], m[2]);

  EXPECT_THROW(post_process_observable(m, MarkovKernel::identity(2)), DimensionError);
}

TEST(ComposeChannels, Examples) {
  Rng rng(5);
  const ChannelChoi g = random_channel(2, 3, 2, rng);
  expect_close(compose_channels(identity_channel(3), g).choi(), g.choi());

  const CMatrix sigma = random_state(2, rng);
  const ChannelChoi t = constant_channel(sigma, 3);
  expect_close(compose_channels(t, g).choi(), constant_channel(sigma, 2).choi());

  const CMatrix u = haar_unitary(3, rng), v = haar_unitary(3, rng);
  expect_close(compose_channels(unitary_channel(u), unitary_channel(v)).choi(), unitary_channel(u * v).choi());

  EXPECT_THROW(compose_channels(g, g), DimensionError);
}

TEST(ComposeChannels, Associative) {
  Rng rng(6);
  for (int i = 0; i < 20; ++i) {
    const ChannelChoi a = random_channel(2, 3, 2, rng);
    const ChannelChoi b = random_channel(3, 2, 3, rng);
    const ChannelChoi c = random_channel(2, 2, 1, rng);
    expect_close(compose_channels(c, compose_channels(b, a)).choi(), compose_channels(compose_channels(c, b), a).choi());
  }
}

TEST(ChannelMarginals, ProductJointChannels) {
  Rng rng(7);
  const ChannelChoi e = random_channel(2, 2, 2, rng);
  const CMatrix sigma = random_state(3, rng);
  const ChannelChoi attach = tensor_channels(e, constant_channel(sigma, 1));
  // attach maps C^2 (x) C^1 = C^2 into C^2 (x) C^3.
  const auto [m1, m2] = channel_marginals(attach, 2, 3);
  expect_close(m1.choi(), e.choi());
  expect_close(m2.choi(), constant_channel(sigma, 2).choi());

  const ChannelChoi embed = tensor_channels(constant_channel(sigma, 1), e);
  const auto [n1, n2] = channel_marginals(embed, 3, 2);
  expect_close(n1.choi(), constant_channel(sigma, 2).choi());
  expect_close(n2.choi(), e.choi());

  EXPECT_THROW(channel_marginals(attach, 2, 2), DimensionError);
}

TEST(ChannelMarginals, QubitClonerMarginals) {
  const auto [a, b] = channel_marginals(optimal_cloner(2), 2, 2);
  // Shrinking factor 2/3 for the symmetric 1 -> 2 qubit cloner.
  const CMatrix expected = (2.0 / 3.0) * omega(2) + (1.0 / 3.0) * completely_depolarizing_channel(2).choi();
  expect_close(a.choi(), expected);
  expect_close(b.choi(), expected);
}

TEST(InstrumentMarginals, ProductInstrument) {
  Rng rng(8);
  const ChannelChoi e = random_channel(2, 3, 2, rng);
  const std::vector<double> p{0.2, 0.3, 0.5};
  std::vector<CMatrix> blocks;
  for (double pj : p) blocks.push_back(pj * e.choi());
  const auto [m, c] = instrument_marginals(Instrument(2, 3, blocks));
  expect_same_povm(m, trivial_observable(p, 2));
  expect_close(c.choi(), e.choi());
}

TEST(InstrumentMarginals, HalfWitnessInstrument) {
  Rng rng(9);
  const Povm m = random_povm(2, 3, rng);
  const ChannelChoi e = random_channel(2, 2, 2, rng);
  const std::vector<double> p{0.1, 0.6, 0.3};
  const CMatrix sigma = random_state(2, rng);
  const double t = 0.37;
  const auto [obs, chan] = instrument_marginals(half_witness_instrument(m, e, p, sigma, t));
  expect_same_povm(obs, mix(m, trivial_observable(p, 2), t));
  expect_close(chan.choi(), mix(constant_channel(sigma, 2), e, t).choi());
}

TEST(InstrumentMarginals, RandomInstrumentsGiveValidDevices) {
  Rng rng(10);
  for (int i = 0; i < 30; ++i) {
    const auto [m, c] = instrument_marginals(random_instrument(2 + i % 2, 2 + i % 3, rng));
    expect_valid_povm(m);
    expect_valid_channel(c);
  }
}

TEST(Mix, Examples) {
  Rng rng(11);
  const Povm x = random_povm(2, 2, rng);
  const Povm y = random_povm(2, 2, rng);
  expect_same_povm(mix(x, x, 0.3), x);
  expect_same_povm(mix(x, y, 0.0), y);

  const std::size_t d = 3;
  const std::vector<double> u(d, 1.0 / d);
  const Povm q = standard_basis_observable(d);
  const Povm half = mix(q, trivial_observable(u, d), 0.5);
  for (std::size_t j = 0; j < d; ++j) expect_close(half[j], 0.5 * q[j] + CMatrix::identity(d) / (2.0 * d));
}

TEST(Mix, Errors) {
  Rng rng(12);
  const Povm x = random_povm(2, 2, rng);
  EXPECT_THROW(mix(x, x, 1.1), WeightOutOfRange);
  EXPECT_THROW(mix(x, x, -0.1), WeightOutOfRange);
  EXPECT_THROW(mix(x, random_povm(3, 2, rng), 0.5), DimensionError);
  EXPECT_THROW(mix(x, random_povm(2, 3, rng), 0.5), DimensionError);
  EXPECT_THROW(mix(identity_channel(2), identity_channel(3), 0.5), DimensionError);
}

TEST(ChoiConvention, IdentityAndConstant) {
  expect_close(identity_channel(3).choi(), omega(3));
  Rng rng(13);
  const CMatrix sigma = random_state(2, rng);
  expect_close(constant_channel(sigma, 3).choi(), kron(sigma, CMatrix::identity(3)));
}

TEST(ChoiConvention, UnitaryChannelsInBothConventions) {
  Rng rng(14);
  for (std::size_t d : {2u, 3u}) {
    const CMatrix u = haar_unitary(d, rng);
    const ChannelChoi e = unitary_channel(u);
    const CMatrix id = CMatrix::identity(d);
    expect_close(e.choi(), kron(u, id) * omega(d) * kron(u.adjoint(), id));
    // Dual picture (E^* (x) id)(Omega) with E^*(X) = U^* X U.
    const CMatrix m = dual_choi(e);
    expect_close(m, kron(u.adjoint(), id) * omega(d) * kron(u, id));
    expect_close(partial_trace(m, {d, d}, {0}), id);
    expect_close(from_dual_choi(m, d, d).choi(), e.choi());
  }
}

TEST(ChoiConvention, DualChoiRoundTripRandom) {
  Rng rng(15);
  for (int i = 0; i < 20; ++i) {
    const ChannelChoi e = random_channel(2, 3, 2, rng);
    const CMatrix m = dual_choi(e);
    expect_close(partial_trace(m, {2, 3}, {0}), CMatrix::identity(2));
    expect_close(from_dual_choi(m, 2, 3).choi(), e.choi());
  }
}

TEST(ChoiConvention, ApplyDualMapIsAdjoint) {
  Rng rng(16);
  const ChannelChoi e = random_channel(2, 3, 2, rng);
  const CMatrix rho = random_state(2, rng);
  const CMatrix x = random_hermitian(3, rng);
  EXPECT_NEAR(std::abs(hs_inner(x, apply_channel(e, rho)) - hs_inner(apply_dual_channel(e, x), rho)), 0.0, 1e-12);
}

TEST(Bases, FourierBasisIsUnbiased) {
  for (std::size_t d = 2; d <= 6; ++d) {
    const Povm q = position_observable(d);
    const Povm p = momentum_observable(d);
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k)
        EXPECT_NEAR(hs_inner(q[j], p[k]).real(), 1.0 / d, 1e-12) << d << " " << j << " " << k;
  }
}

TEST(Constructors, OutputsPassValidation) {
  Rng rng(17);
  for (int i = 0; i < 10; ++i) {
    expect_valid_povm(random_povm(3, 4, rng));
    expect_valid_channel(random_channel(3, 2, 3, rng));
    expect_valid_channel(lueders_channel(random_povm(2, 3, rng)));
    expect_valid_channel(unitary_channel(haar_unitary(2, rng)));
  }
  expect_valid_channel(completely_depolarizing_channel(4));
  expect_valid_povm(basis_observable(fourier_operator(4)));
}

TEST(JointObservable, Marginals) {
  Rng rng(18);
  const Povm a = random_povm(2, 3, rng);
  const std::vector<double> q{0.25, 0.75};
  std::vector<CMatrix> grid;
  for (std::size_t j = 0; j < 3; ++j)
    for (double qk : q) grid.push_back(qk * a[j]);
  const JointObservable g(2, 3, 2, grid);
  EXPECT_LT(max_effect_diff(g.first_marginal(), a.effects()), kTol);
  EXPECT_LT(max_effect_diff(g.second_marginal(), trivial_observable(q, 2).effects()), kTol);
}

TEST(Processing, JointPostAndPreProcessing) {
  Rng rng(19);
  const Povm a = random_povm(2, 2, rng);
  std::vector<CMatrix> grid;
  for (std::size_t j = 0; j < 2; ++j) {
    grid.push_back(0.5 * a[j]);
    grid.push_back(0.5 * a[j]);
  }
  const JointObservable g(2, 2, 2, grid);
  const MarkovKernel b1 = random_kernel(3, 2, rng);
  const MarkovKernel b2 = random_kernel(2, 2, rng);
  const JointObservable post = post_process_joint(g, b1, b2);
  EXPECT_LT(max_effect_diff(post.first_marginal(), post_process_observable(a, b1).effects()), kTol);
  const ChannelChoi e = random_channel(3, 2, 2, rng);
  const JointObservable pre = pre_process_joint(g, e);
  EXPECT_LT(max_effect_diff(pre.first_marginal(), pre_process_observable(a, e).effects()), kTol);
}

}  // namespace
}  // namespace incompat
