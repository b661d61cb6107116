#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "zetagap/gibbs.hpp"
#include "zetagap/verify.hpp"

using namespace zetagap;

namespace {

SpikeSlabModel small_model(std::uint64_t seed, Index n, Index p, PriorParams prior = {1.0, 0.2, 0.5, 0.01}) {
  Rng rng = make_rng(seed);
  MatrixXd X = standard_normal(rng, n, p);
  VectorXd theta = VectorXd::Zero(p);
  theta[0] = 1.5;
  VectorXd z = X * theta + standard_normal(rng, n);
  return SpikeSlabModel(std::move(X), std::move(z), prior);
}

/// Max over entries of |empirical - analytic| / MC standard error, for the mean and covariance.
double moment_z_score(const SpikeSlabModel& m, const Indicator& delta, ThetaStrategy st, std::size_t draws,
                      std::uint64_t seed) {
  const auto cg = conditional_gaussian(m, delta);
  const MatrixXd S = cg.covariance();
  const Index p = m.p();
  Rng rng = make_rng(seed);
  VectorXd sum = VectorXd::Zero(p);
  MatrixXd outer = MatrixXd::Zero(p, p);
  for (std::size_t i = 0; i < draws; ++i) {
    const VectorXd c = sample_theta(m, delta, rng, st) - cg.mean;
    sum += c;
    outer.noalias() += c * c.transpose();
  }
  const double N = static_cast<double>(draws);
  double worst = 0.0;
  for (Index j = 0; j < p; ++j) {
    worst = std::max(worst, std::abs(sum[j] / N) / std::sqrt(S(j, j) / N));
    for (Index l = 0; l < p; ++l) {
      const double se = std::sqrt((S(j, j) * S(l, l) + S(j, l) * S(j, l)) / N);
      worst = std::max(worst, std::abs(outer(j, l) / N - S(j, l)) / se);
    }
  }
  return worst;
}

}  // namespace

TEST(Strategy, ResolveAndParse) {
  EXPECT_EQ(resolve(ThetaStrategy::kAuto, small_model(1, 5, 10)), ThetaStrategy::kWoodbury);
  EXPECT_EQ(resolve(ThetaStrategy::kAuto, small_model(1, 10, 5)), ThetaStrategy::kDirect);
  EXPECT_EQ(resolve(ThetaStrategy::kDirect, small_model(1, 5, 10)), ThetaStrategy::kDirect);
  EXPECT_EQ(parse_strategy("woodbury"), ThetaStrategy::kWoodbury);
  EXPECT_EQ(parse_strategy(to_string(ThetaStrategy::kDirect)), ThetaStrategy::kDirect);
  EXPECT_THROW(parse_strategy("cholesky"), ConfigError);
}

TEST(SampleTheta, ZeroDesignIsThePriorForBothStrategies) {
  const SpikeSlabModel m(MatrixXd::Zero(4, 3), VectorXd::Ones(4), {1.0, 0.5, 2.0, 0.01});
  const auto delta = Indicator::from_bits("110");
  for (auto st : {ThetaStrategy::kDirect, ThetaStrategy::kWoodbury}) EXPECT_LT(moment_z_score(m, delta, st, 20000, 2), 4.5);
}

TEST(SampleTheta, WoodburyMomentsWideDesign) {
  const auto m = small_model(3, 10, 15);
  const auto delta = Indicator::from_bits("110000100000000");
  EXPECT_LT(moment_z_score(m, delta, ThetaStrategy::kWoodbury, 100000, 4), 4.0);
}

TEST(SampleTheta, DirectMomentsTallDesign) {
  const auto m = small_model(5, 20, 6);
  const auto delta = Indicator::from_bits("101000");
  EXPECT_LT(moment_z_score(m, delta, ThetaStrategy::kDirect, 50000, 6), 4.0);
}

TEST(SampleTheta, WoodburyCostScalesLinearlyInP) {
  auto time_draws = [](Index p) {
    const auto m = small_model(7, 40, p);
    Indicator delta(static_cast<std::size_t>(p));
    delta.set(0);
    Rng rng = make_rng(8);
    double best = 1e300;
    for (int rep = 0; rep < 3; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      for (int i = 0; i < 20; ++i) (void)sample_theta(m, delta, rng, ThetaStrategy::kWoodbury);
      best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
  };
  const double small = time_draws(400);
  const double large = time_draws(800);
  // O(n^2 p + n^3): doubling p at fixed n should not quadruple the time; 8 is a loose guard
  EXPECT_LT(large, 8.0 * small) << small << " s vs " << large << " s";
}

TEST(SampleDelta, IidBernoulliWhenSpikeEqualsSlab) {
  const SpikeSlabModel m(MatrixXd::Ones(3, 4), VectorXd::Ones(3), {1.0, 0.3, 2.0, 0.5});
  Rng rng = make_rng(9);
  const VectorXd theta = (VectorXd(4) << 0.0, 5.0, -3.0, 0.1).finished();
  std::vector<double> freq(4, 0.0);
  const int N = 40000;
  for (int i = 0; i < N; ++i) {
    const auto d = sample_delta(m, theta, rng);
    for (std::size_t j = 0; j < 4; ++j) freq[j] += d[j];
  }
  const double se = std::sqrt(0.3 * 0.7 / N);
  for (double f : freq) EXPECT_NEAR(f / N, 0.3, 4.0 * se);
}

TEST(Step, LazyStepLeavesStateUnchanged) {
  const auto m = small_model(10, 12, 6);
  GibbsState s = init_from_model(m, Indicator::from_bits("100000"), 11);
  int lazy_seen = 0;
  for (int i = 0; i < 50; ++i) {
    const VectorXd theta = s.theta;
    const Indicator delta = s.last_delta;
    if (step(m, s)) {
      ++lazy_seen;
      EXPECT_EQ(s.theta, theta);
      EXPECT_EQ(s.last_delta, delta);
    }
  }
  EXPECT_GT(lazy_seen, 0);
}

TEST(Run, ZeroIterationsAndDeterminism) {
  const auto m = small_model(12, 15, 8);
  const auto init = Indicator::from_bits("10000000");
  const auto t0 = run(m, init, 0, 13);
  EXPECT_TRUE(t0.records.empty());
  EXPECT_EQ(t0.initial_delta, init);
  const auto a = run(m, init, 500, 14, {true});
  const auto b = run(m, init, 500, 14, {true});
  ASSERT_EQ(a.records.size(), 500u);
  EXPECT_EQ(a.initial_theta, b.initial_theta);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].delta, b.records[i].delta);
    EXPECT_EQ(*a.records[i].theta, *b.records[i].theta);
  }
  EXPECT_EQ(trajectory_csv(a), trajectory_csv(b));
  const auto c = run(m, init, 500, 15);
  EXPECT_NE(trajectory_csv(a).size(), 0u);
  bool differs = false;
  for (std::size_t i = 0; i < c.records.size(); ++i) differs |= c.records[i].delta != a.records[i].delta;
  EXPECT_TRUE(differs);
}

TEST(Run, InitialThetaIsSeedDeterministic) {
  const auto m = small_model(16, 9, 5);
  const auto d = Indicator::from_bits("01000");
  EXPECT_EQ(init_from_model(m, d, 17).theta, init_from_model(m, d, 17).theta);
  EXPECT_NE(init_from_model(m, d, 17).theta, init_from_model(m, d, 18).theta);
}

TEST(Run, LazyFractionWithinBinomialBand) {
  const auto m = small_model(19, 15, 8);
  const auto t = run(m, Indicator(8), 10000, 20);
  std::size_t lazy = 0;
  for (const auto& r : t.records) lazy += r.lazy;
  EXPECT_LE(std::abs(static_cast<double>(lazy) - 5000.0), 4.0 * 50.0);
}

TEST(Run, CsvAndManifest) {
  const auto m = small_model(21, 6, 4);
  const auto t = run(m, Indicator::from_bits("1000"), 3, 22, {true});
  const auto csv = trajectory_csv(t);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "iteration,lazy,delta_hex,theta_0,theta_1,theta_2,theta_3");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  const auto man = trajectory_manifest(t);
  EXPECT_NE(man.find("seed=22"), std::string::npos);
  EXPECT_NE(man.find("fingerprint=" + m.fingerprint()), std::string::npos);
  EXPECT_NE(man.find(std::string("generator=") + kGeneratorName), std::string::npos);
}

TEST(Run, StationaryDeltaMarginalOnSmallInstance) {
  // shorter than the acceptance run; tolerance loosened accordingly
  const auto m = verify::sampler_instance(7);
  const auto post = exact_model_posterior(m);
  std::vector<double> freq(post.prob.size(), 0.0);
  GibbsState s = init_from_model(m, Indicator(8), 23);
  const std::size_t burn = 1000, N = 60000;
  run_observed(m, s, burn + N, [&](std::size_t it, bool, const GibbsState& st) {
    if (it > burn) freq[static_cast<std::size_t>(st.last_delta.mask())] += 1.0;
    return true;
  });
  double l1 = 0.0;
  for (std::size_t k = 0; k < freq.size(); ++k) l1 += std::abs(freq[k] / N - post.prob[k]);
  EXPECT_LT(l1, 0.08);
}
