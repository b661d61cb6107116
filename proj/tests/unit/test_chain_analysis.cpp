#include <gtest/gtest.h>

#include <cmath>

#include "zetagap/chain_analysis.hpp"
#include "zetagap/oracles.hpp"
#include "zetagap/random_chains.hpp"

using namespace zetagap;

namespace {

FiniteChain two_state() {
  MatrixXd P(2, 2);
  P << 0.75, 0.25, 0.25, 0.75;
  return FiniteChain(P);
}

FiniteChain identity_chain(Index d) { return FiniteChain(MatrixXd::Identity(d, d), VectorXd::Constant(d, 1.0 / d)); }

std::vector<FiniteChain> random_chains(std::uint64_t seed, int count, Index lo, Index hi) {
  Rng rng = make_rng(seed);
  std::vector<FiniteChain> out;
  for (int i = 0; i < count; ++i) out.push_back(random_chain(rng, std::uniform_int_distribution<Index>(lo, hi)(rng)));
  return out;
}

}  // namespace

TEST(FiniteChain, RejectsNonReversibleKernelNamingThePair) {
  MatrixXd P(3, 3);
  P << 0.5, 0.5, 0.0, 0.0, 0.5, 0.5, 0.5, 0.0, 0.5;
  try {
    FiniteChain c(P);
    FAIL() << "cyclic kernel accepted";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("("), std::string::npos) << e.what();
  }
}

TEST(FiniteChain, RejectsNonLazyAndNonStochastic) {
  MatrixXd P(2, 2);
  P << 0.2, 0.8, 0.8, 0.2;
  EXPECT_THROW(FiniteChain{P}, ValidationError);
  P << 0.75, 0.3, 0.25, 0.75;
  EXPECT_THROW(FiniteChain{P}, ValidationError);
}

TEST(FiniteChain, ParseFormatRoundTrip) {
  const auto c = parse_chain("2\n0.75 0.25\n0.25 0.75\n");
  EXPECT_NEAR(c.stationary()[0], 0.5, 1e-12);
  const auto again = parse_chain(format_chain(c));
  EXPECT_EQ(again.transition(), c.transition());
  EXPECT_THROW(parse_chain("2\n0.75 0.25\n"), ParseError);
}

TEST(SpectralGap, TwoStateAndIdentity) {
  EXPECT_NEAR(spectral_gap(two_state()), 0.5, 1e-12);
  EXPECT_NEAR(spectral_gap(identity_chain(4)), 0.0, 1e-12);
}

TEST(SpectralGap, MatchesNonSymmetricEigensolver) {
  for (const auto& c : random_chains(11, 30, 2, 6)) EXPECT_NEAR(spectral_gap(c), oracle::spectral_gap(c), 1e-10);
}

TEST(DirichletForm, HandValueAndConstant) {
  const auto c = two_state();
  EXPECT_NEAR(dirichlet_form(c, VectorXd::Constant(2, 3.0)), 0.0, 1e-15);
  EXPECT_NEAR(dirichlet_form(c, (VectorXd(2) << 0, 1).finished()), 0.125, 1e-15);
}

TEST(DirichletForm, EqualsVarianceMinusLagOneCovariance) {
  Rng rng = make_rng(3);
  for (const auto& c : random_chains(12, 30, 2, 9)) {
    const VectorXd f = standard_normal(rng, c.size());
    const VectorXd fbar = f.array() - expectation(c, f);
    const double lag = (c.stationary().array() * fbar.array() * (c.transition() * fbar).array()).sum();
    EXPECT_NEAR(dirichlet_form(c, f), variance(c, f) - lag, 1e-12);
  }
}

TEST(DirichletForm, OneStepVarianceContraction) {
  Rng rng = make_rng(4);
  for (const auto& c : random_chains(13, 30, 2, 9)) {
    const VectorXd f = standard_normal(rng, c.size());
    const VectorXd Kf = c.transition() * f;
    EXPECT_LE(variance(c, Kf), variance(c, f) - dirichlet_form(c, f) + 1e-12);
  }
}

TEST(Norms, VarianceAndStarNorm) {
  const auto c = two_state();
  const VectorXd f = (VectorXd(2) << 0, 1).finished();
  EXPECT_NEAR(variance(c, f), 0.25, 1e-15);
  EXPECT_NEAR(star_norm(c, f, NormSpec::infinity()), 1.0, 1e-15);
  EXPECT_NEAR(variance(c, VectorXd::Constant(2, 5.0)), 0.0, 1e-15);
}

TEST(Norms, LpMatchesPowerSum) {
  Rng rng = make_rng(5);
  for (const auto& c : random_chains(14, 20, 2, 8)) {
    const VectorXd f = standard_normal(rng, c.size());
    double acc = 0.0;
    for (Index x = 0; x < c.size(); ++x) acc += c.stationary()[x] * std::pow(std::abs(f[x]), 4.0);
    EXPECT_NEAR(star_norm(c, f, NormSpec(4.0)), std::pow(acc, 0.25), 1e-12);
  }
}

TEST(Conductance, TwoStateIdentityAndBruteForce) {
  EXPECT_NEAR(conductance(two_state()), 0.5, 1e-15);
  EXPECT_NEAR(conductance(identity_chain(5)), 0.0, 1e-15);
  for (const auto& c : random_chains(15, 20, 2, 8)) {
    const double want = oracle::conductance(c);
    EXPECT_NEAR(conductance(c), want, 1e-12 * std::max(1.0, want));
  }
}

TEST(Conductance, CapacityError) {
  EXPECT_THROW(conductance(identity_chain(kMaxConductanceStates + 1)), CapacityError);
}

TEST(ZetaConductance, ZeroEqualsConductanceAndVacuousWindow) {
  const auto c = two_state();
  ASSERT_TRUE(zeta_conductance(c, 0.0).has_value());
  EXPECT_NEAR(*zeta_conductance(c, 0.0), 0.5, 1e-15);
  for (const auto& r : random_chains(24, 10, 2, 7)) EXPECT_NEAR(*zeta_conductance(r, 0.0), conductance(r), 1e-15);
  EXPECT_FALSE(zeta_conductance(c, 0.4).has_value());
  EXPECT_THROW(zeta_conductance(c, 0.5), DomainError);
  EXPECT_THROW(zeta_conductance(c, -0.1), DomainError);
}

TEST(ZetaConductance, MatchesBruteForce) {
  for (const auto& c : random_chains(16, 20, 3, 6)) {
    const double zeta = 0.05;
    const auto& pi = c.stationary();
    std::optional<double> want;
    for (std::uint32_t mask = 1; mask + 1 < (1u << c.size()); ++mask) {
      double m = 0, flow = 0;
      for (Index x = 0; x < c.size(); ++x)
        if ((mask >> x) & 1u) {
          m += pi[x];
          for (Index y = 0; y < c.size(); ++y)
            if (!((mask >> y) & 1u)) flow += pi[x] * c.transition()(x, y);
        }
      if (m > zeta && m < 0.5) {
        const double v = flow / ((m - zeta) * (1 - m - zeta));
        want = want ? std::min(*want, v) : v;
      }
    }
    const auto got = zeta_conductance(c, zeta);
    ASSERT_EQ(got.has_value(), want.has_value());
    if (want) {
      EXPECT_NEAR(*got, *want, 1e-10 * std::max(1.0, *want));
    }
  }
}

TEST(RestrictedGap, FullSpaceIsSpectralGap) {
  EXPECT_NEAR(restricted_spectral_gap(two_state(), full_set(2)).value, 0.5, 1e-12);
  for (const auto& c : random_chains(17, 20, 2, 8))
    EXPECT_NEAR(restricted_spectral_gap(c, full_set(c.size())).value, spectral_gap(c), 1e-10);
}

TEST(RestrictedGap, MatchesPinnedOracleAndRandomRayleighQuotients) {
  Rng rng = make_rng(6);
  for (const auto& c : random_chains(18, 20, 4, 8)) {
    StateSet S(static_cast<std::size_t>(c.size()), false);
    for (Index x = 0; x < 3; ++x) S[static_cast<std::size_t>(x)] = true;
    for (Index x = 3; x < c.size(); ++x) S[static_cast<std::size_t>(x)] = uniform01(rng) < 0.5;
    const double got = restricted_spectral_gap(c, S).value;
    EXPECT_NEAR(got, oracle::restricted_gap(c, S), 1e-9);
    // no random direction beats the minimum
    for (int t = 0; t < 200; ++t) {
      const VectorXd f = standard_normal(rng, c.size());
      double e = 0, v = 0;
      for (Index x = 0; x < c.size(); ++x)
        for (Index y = 0; y < c.size(); ++y)
          if (S[static_cast<std::size_t>(x)] && S[static_cast<std::size_t>(y)]) {
            const double d2 = (f[y] - f[x]) * (f[y] - f[x]);
            e += c.stationary()[x] * c.transition()(x, y) * d2;
            v += c.stationary()[x] * c.stationary()[y] * d2;
          }
      EXPECT_GE(e / v, got - 1e-10);
    }
  }
}

TEST(RestrictedGap, SingletonRejected) {
  StateSet S{true, false};
  EXPECT_THROW(restricted_spectral_gap(two_state(), S), DomainError);
}

TEST(ZetaGap, TwoStateLowerAndUpper) {
  const auto c = two_state();
  EXPECT_NEAR(restriction_mass_threshold(0.1, NormSpec::infinity()), 0.99, 1e-15);
  EXPECT_NEAR(zeta_gap_lower(c, 0.1, NormSpec::infinity()).value, 0.5, 1e-12);
  const auto up = zeta_gap_upper(c, 0.1, NormSpec::infinity());
  ASSERT_TRUE(up.value.has_value());
  EXPECT_LE(*up.value, 0.5 / 0.95 + 1e-12);
  EXPECT_GE(*up.value, 0.5 - 1e-10);
}

TEST(ZetaGap, OneCandidateByHand) {
  const auto c = two_state();
  const auto r = zeta_ratio(c, (VectorXd(2) << -1, 1).finished(), 0.1, NormSpec::infinity());
  ASSERT_TRUE(r.has_value());
  // E(f,f) = 1/2 * 2 * 0.5 * 0.25 * 4 = 0.5, Var = 1, star-norm 1
  EXPECT_NEAR(r->ratio, 0.5 / 0.95, 1e-12);
}

TEST(ZetaGap, SandwichOnRandomChains) {
  Rng rng = make_rng(7);
  for (const auto& c : random_chains(19, 25, 2, 8)) {
    const double zeta = 0.02 + 0.4 * uniform01(rng);
    const NormSpec norm = uniform01(rng) < 0.5 ? NormSpec::infinity() : NormSpec(3.0 + 5.0 * uniform01(rng));
    const double gap = spectral_gap(c);
    const auto lo = zeta_gap_lower(c, zeta, norm);
    const auto up = zeta_gap_upper(c, zeta, norm, 300, 99);
    EXPECT_LE(gap, lo.value + 1e-10);
    EXPECT_LE(lo.value, up.value_or_one() + 1e-10);
    if (up.value) {
      EXPECT_GE(*up.value, gap - 1e-10);
    }
  }
}

TEST(ZetaGap, FixedPoolIsMonotoneInZeta) {
  for (const auto& c : random_chains(20, 15, 3, 7)) {
    const auto pool = zeta_candidate_pool(c, 200, 5);
    double prev = -1.0;
    for (double zeta : {0.01, 0.05, 0.1, 0.2, 0.3, 0.45}) {
      const double v = zeta_gap_over_pool(c, pool, zeta, NormSpec::infinity()).value_or_one();
      EXPECT_GE(v, prev - 1e-12);
      prev = v;
    }
  }
}

TEST(ZetaGap, DomainErrors) {
  EXPECT_THROW(zeta_gap_lower(two_state(), 0.6, NormSpec::infinity()), DomainError);
  EXPECT_THROW(zeta_gap_upper(two_state(), 0.0, NormSpec::infinity()), DomainError);
  EXPECT_THROW(NormSpec(2.0), DomainError);
}

TEST(TvEvolution, HandValueStationaryStartAndMonotone) {
  const auto c = two_state();
  const auto tv = tv_evolution(c, (VectorXd(2) << 1, 0).finished(), 3);
  EXPECT_NEAR(tv[0], 1.0, 1e-15);
  EXPECT_NEAR(tv[1], 0.5, 1e-15);
  for (double v : tv_evolution(c, c.stationary(), 5)) EXPECT_NEAR(v, 0.0, 1e-15);
  Rng rng = make_rng(8);
  for (const auto& r : random_chains(21, 20, 2, 9)) {
    const VectorXd f0 = random_density(rng, r);
    const auto seq = tv_evolution(r, f0.cwiseProduct(r.stationary()), 60);
    for (std::size_t n = 1; n < seq.size(); ++n) EXPECT_LE(seq[n], seq[n - 1] + 1e-12);
  }
}

TEST(MixingBound, StationaryStartAndRandomInstances) {
  const auto c = two_state();
  EXPECT_TRUE(lemma1_verify(c, VectorXd::Ones(2), 0.1, NormSpec::infinity(), 50, 0.5).holds);
  Rng rng = make_rng(9);
  for (const auto& r : random_chains(22, 25, 2, 10)) {
    const VectorXd f0 = random_density(rng, r);
    const auto rep = lemma1_verify(r, f0, 0.01 + 0.4 * uniform01(rng), NormSpec::infinity(), 200, spectral_gap(r));
    EXPECT_TRUE(rep.holds) << rep.worst_margin;
  }
  EXPECT_THROW(lemma1_verify(c, VectorXd::Constant(2, 3.0), 0.1, NormSpec::infinity(), 5, 0.5), DomainError);
}

TEST(Cheeger, TwoStateIdentityAndRandom) {
  const auto two = cheeger_verify(two_state());
  EXPECT_TRUE(two.holds);
  EXPECT_NEAR(two.conductance * two.conductance / 8.0, 0.03125, 1e-15);
  EXPECT_TRUE(cheeger_verify(identity_chain(3)).holds);
  for (const auto& c : random_chains(23, 50, 2, 10)) EXPECT_TRUE(cheeger_verify(c).holds);
}
