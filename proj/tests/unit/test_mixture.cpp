#include <gtest/gtest.h>

#include "zetagap/mixture.hpp"
#include "zetagap/oracles.hpp"
#include "zetagap/verify.hpp"

using namespace zetagap;

namespace {

MixtureComponent independence_component(double weight, VectorXd law) {
  const Index d = law.size();
  MatrixXd K = 0.5 * MatrixXd::Identity(d, d) + 0.5 * VectorXd::Ones(d) * law.transpose();
  return {weight, std::move(law), std::move(K)};
}

MixtureSpec three_state() {
  return MixtureSpec({independence_component(0.5, (VectorXd(3) << 0.5, 0.5, 0).finished()),
                      independence_component(0.5, (VectorXd(3) << 0, 0.5, 0.5).finished())});
}

std::vector<std::vector<bool>> path_graph(std::size_t n) {
  std::vector<std::vector<bool>> a(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i + 1 < n; ++i) a[i][i + 1] = a[i + 1][i] = true;
  return a;
}

}  // namespace

TEST(MixtureKernel, ThreeStateRowsAndStationaryLaw) {
  const auto K = build_mixture_kernel(three_state());
  MatrixXd want(3, 3);
  want << 0.75, 0.25, 0, 0.125, 0.75, 0.125, 0, 0.25, 0.75;
  EXPECT_LT((K.transition() - want).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((K.stationary() - (VectorXd(3) << 0.25, 0.5, 0.25).finished()).cwiseAbs().maxCoeff(), 1e-15);
  // eigenvalues 1, 0.75, 0.5
  EXPECT_NEAR(spectral_gap(K), 0.25, 1e-12);
}

TEST(MixtureKernel, SingleComponentIsTheComponent) {
  const VectorXd law = (VectorXd(3) << 0.2, 0.3, 0.5).finished();
  const MixtureSpec one({independence_component(1.0, law)});
  const auto K = build_mixture_kernel(one);
  EXPECT_LT((K.transition() - one.component(0).kernel).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((K.stationary() - law).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(MixtureKernel, RandomMixturesAreReversibleAndLazy) {
  Rng rng = make_rng(31);
  for (int t = 0; t < 30; ++t) {
    const auto spec = random_mixture(rng);
    const auto K = build_mixture_kernel(spec);  // constructor validates reversibility and laziness
    EXPECT_GE(K.transition().diagonal().minCoeff(), 0.5 - 1e-12);
  }
}

TEST(MixtureSpec, ValidationErrors) {
  auto c = independence_component(0.5, (VectorXd(3) << 0.5, 0.5, 0).finished());
  EXPECT_THROW(MixtureSpec({c}), ValidationError);  // weights sum to 0.5
  c.weight = 1.0;
  EXPECT_THROW(MixtureSpec({c}, {}, {StateSet{false, false, true}}), ValidationError);  // pi_i(B_i) = 0
  auto bad = c;
  bad.kernel(0, 0) = 0.4;
  bad.kernel(0, 1) = 0.6;
  EXPECT_THROW(MixtureSpec({bad}), ValidationError);
}

TEST(Overlap, HandSumSelfAndDisjoint) {
  const auto spec = three_state();
  EXPECT_NEAR(overlap(spec, 0, 1), 0.5, 1e-15);
  EXPECT_NEAR(overlap(spec, 1, 0), 0.5, 1e-15);
  EXPECT_NEAR(overlap(spec, 0, 0), 1.0, 1e-15);
  const MixtureSpec disjoint({independence_component(0.5, (VectorXd(4) << 0.5, 0.5, 0, 0).finished()),
                              independence_component(0.5, (VectorXd(4) << 0, 0, 0.5, 0.5).finished())});
  EXPECT_NEAR(overlap(disjoint, 0, 1), 0.0, 1e-15);
}

TEST(Overlap, SymmetricAndInUnitInterval) {
  Rng rng = make_rng(32);
  for (int t = 0; t < 30; ++t) {
    const auto spec = random_mixture(rng);
    for (std::size_t i = 0; i < spec.components(); ++i)
      for (std::size_t j = 0; j < spec.components(); ++j) {
        const double k = overlap(spec, i, j);
        EXPECT_GE(k, 0.0);
        EXPECT_LE(k, 1.0);
        EXPECT_DOUBLE_EQ(k, overlap(spec, j, i));
      }
  }
}

TEST(Diameter, CompletePathAndDisconnected) {
  std::vector<std::vector<bool>> complete(4, std::vector<bool>(4, true));
  for (std::size_t i = 0; i < 4; ++i) complete[i][i] = false;
  EXPECT_EQ(graph_diameter(complete), 1);
  EXPECT_EQ(graph_diameter(path_graph(4)), 3);
  EXPECT_EQ(graph_diameter(path_graph(1)), 0);
  auto split = path_graph(4);
  split[1][2] = split[2][1] = false;
  EXPECT_FALSE(graph_diameter(split).has_value());
}

TEST(Diameter, MatchesFloydWarshall) {
  Rng rng = make_rng(33);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + static_cast<std::size_t>(uniform01(rng) * 7);
    const double density = uniform01(rng);
    std::vector<std::vector<bool>> a(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) a[i][j] = a[j][i] = uniform01(rng) < density;
    EXPECT_EQ(graph_diameter(a), oracle::diameter(a));
  }
}

TEST(MadrasRandall, ThreeStateExample) {
  const auto b = madras_randall_bound(three_state());
  EXPECT_NEAR(b.kappa, 0.5, 1e-15);
  ASSERT_TRUE(b.diameter.has_value());
  EXPECT_EQ(*b.diameter, 1);
  EXPECT_NEAR(b.value, 0.0625, 1e-12);
  EXPECT_LE(b.value, spectral_gap(build_mixture_kernel(three_state())));
}

TEST(MadrasRandall, SingleComponentUsesWeightedGap) {
  const VectorXd law = (VectorXd(3) << 0.2, 0.3, 0.5).finished();
  const MixtureSpec one({independence_component(1.0, law)});
  EXPECT_NEAR(madras_randall_bound(one).value, component_spectral_gap(one, 0), 1e-12);
}

TEST(RestrictedRegionBound, ThreeStateExampleAndFullRegions) {
  const auto spec = three_state();
  const auto b = theorem1_bound(spec, 0.1, NormSpec::infinity());
  EXPECT_TRUE(b.mass_ok);
  EXPECT_NEAR(b.region_mass, 1.0, 1e-15);
  EXPECT_NEAR(b.value, 0.0625, 1e-12);
  EXPECT_LE(b.value, zeta_gap_lower(build_mixture_kernel(spec), 0.1, NormSpec::infinity()).value);
}

TEST(RestrictedRegionBound, MassConditionFailureGivesZero) {
  auto a = independence_component(0.5, (VectorXd(3) << 0.5, 0.5, 0).finished());
  auto b = independence_component(0.5, (VectorXd(3) << 0, 0.5, 0.5).finished());
  const MixtureSpec spec({a, b}, {}, {StateSet{true, false, false}, StateSet{false, true, true}});
  const auto r = theorem1_bound(spec, 0.1, NormSpec::infinity());
  EXPECT_FALSE(r.mass_ok);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_FALSE(r.diagnostic.empty());
}

TEST(RestrictedRegionBound, FixedKappaNeverBeatsTheSweep) {
  Rng rng = make_rng(34);
  for (int t = 0; t < 20; ++t) {
    const auto spec = random_mixture(rng);
    const auto best = theorem1_bound(spec, 0.2, NormSpec::infinity());
    for (double kappa : {0.05, 0.2, 0.5}) EXPECT_LE(theorem1_bound(spec, 0.2, NormSpec::infinity(), kappa).value, best.value + 1e-15);
  }
}

TEST(RestrictedRegionBound, RandomMixturesRespectBothInequalities) {
  Rng rng = make_rng(35);
  for (int t = 0; t < 25; ++t) {
    const auto spec = random_mixture(rng);
    const auto K = build_mixture_kernel(spec);
    const double zeta = 0.05 + 0.4 * uniform01(rng);
    EXPECT_LE(madras_randall_bound(spec).value, spectral_gap(K) + 1e-10);
    const auto upper = zeta_gap_upper(K, zeta, NormSpec::infinity(), 300, 3);
    EXPECT_LE(theorem1_bound(spec, zeta, NormSpec::infinity()).value, upper.value_or_one() + 1e-10);
  }
}

TEST(MixtureFile, ParseFormatRoundTrip) {
  const auto spec = three_state();
  const auto again = parse_mixture(format_mixture(spec));
  ASSERT_EQ(again.components(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(again.component(i).law, spec.component(i).law);
    EXPECT_EQ(again.component(i).kernel, spec.component(i).kernel);
  }
  EXPECT_THROW(parse_mixture("2 3\n0.5\n"), ParseError);
}
