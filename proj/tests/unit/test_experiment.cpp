#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "zetagap/experiment.hpp"

using namespace zetagap;
namespace fs = std::filesystem;

namespace {

GroundTruth truth_with_support(std::size_t p, std::size_t s) {
  VectorXd theta = VectorXd::Zero(static_cast<Index>(p));
  for (std::size_t j = 0; j < s; ++j) theta[static_cast<Index>(3 * j)] = 2.0;
  return GroundTruth::from_theta(theta, 1.0, 50);
}

ExperimentConfig tiny_config() {
  return ExperimentConfig::parse("p = 40\nn = 20\ns_star = 3\nfp_percent = 5, 10\nfn_counts = 1\n"
                                 "truncation = 300\nreplications = 3\nseed = 5\n");
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("zetagap_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Config, DefaultsAndDerivedParameters) {
  ExperimentConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.n_for(500), 50);
  EXPECT_NEAR(c.amplitude_for(500), 4.0 * std::sqrt(std::log(500.0) / 50.0), 1e-15);
  // sqrt(log 500 / 50) = 0.352551, so a = 1.410204
  EXPECT_NEAR(c.amplitude_for(500), 1.410204, 5e-7);
  EXPECT_NEAR(c.rho_for(50), 1.0 / std::sqrt(50.0), 1e-15);
  EXPECT_NEAR(c.q_for(500), 1.0 / (1.0 + 500.0 * 500.0), 1e-18);
  EXPECT_EQ(ExperimentConfig::fp_count(500, 1.0), 5u);
  EXPECT_EQ(ExperimentConfig::fp_count(200, 5.0), 10u);
}

TEST(Config, TextRoundTrip) {
  auto c = tiny_config();
  c.fixed_design = true;
  c.strategy = ThetaStrategy::kDirect;
  const auto again = ExperimentConfig::parse(c.to_text());
  EXPECT_EQ(again.to_text(), c.to_text());
}

TEST(Config, ParseErrors) {
  EXPECT_THROW(ExperimentConfig::parse("p = 100\nbogus = 1\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("p = 100\np = 200\n"), ParseError);
  EXPECT_THROW(ExperimentConfig::parse("p 100\n"), ParseError);
  EXPECT_THROW(ExperimentConfig::parse("p = abc\n"), ParseError);
  EXPECT_THROW(ExperimentConfig::parse("fixed_design = maybe\n"), ParseError);
  EXPECT_THROW(ExperimentConfig::parse("strategy = qr\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("p = 1\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("p = 20\ns_star = 10\nfp_percent = 60\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("replications = 0\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("sigma2 = -1\n"), ConfigError);
}

TEST(Instance, SupportAmplitudesAndDeterminism) {
  const auto c = tiny_config();
  const auto a = generate_instance(c, 40, 99);
  const auto b = generate_instance(c, 40, 99);
  EXPECT_EQ(a.model.X(), b.model.X());
  EXPECT_EQ(a.model.z(), b.model.z());
  EXPECT_EQ(a.truth.s_star(), 3u);
  const double amp = c.amplitude_for(40);
  for (auto j : a.truth.delta_star.ones()) {
    const double t = std::abs(a.truth.theta_star[static_cast<Index>(j)]);
    EXPECT_GT(t, amp);
    EXPECT_LT(t, amp + 1.0);
  }
  EXPECT_NEAR(a.model.gamma(), 0.1 / a.lambda_max, 1e-15);
  EXPECT_NE(generate_instance(c, 40, 100).model.z(), a.model.z());
}

TEST(Instance, PowerIterationMatchesEigensolver) {
  Rng rng = make_rng(3);
  const MatrixXd X = standard_normal(rng, 15, 40);
  const double want = Eigen::SelfAdjointEigenSolver<MatrixXd>(X.transpose() * X).eigenvalues().maxCoeff();
  EXPECT_NEAR(lambda_max_XtX(X), want, 1e-9 * want);
}

TEST(InitialIndicator, FalsePositivesAndNegatives) {
  const auto truth = truth_with_support(30, 5);
  EXPECT_EQ(build_initial_indicator(truth, 0, 0, 1), truth.delta_star);
  const auto fp = build_initial_indicator(truth, 5, 0, 2);
  EXPECT_EQ(fp.count(), 10u);
  EXPECT_TRUE(fp.contains(truth.delta_star));
  const auto fn = build_initial_indicator(truth, 0, 2, 3);
  EXPECT_EQ(fn.count(), 3u);
  EXPECT_EQ(fn.intersection_count(truth.delta_star), 3u);
  EXPECT_THROW(build_initial_indicator(truth, 26, 0, 4), DomainError);
}

TEST(SenPrec, Cases) {
  const auto star = Indicator::from_bits("1100100000");
  auto sp = sen_prec(star, star);
  EXPECT_EQ(sp.sen, 1.0);
  EXPECT_EQ(sp.prec, 1.0);
  sp = sen_prec(Indicator::from_bits("1111111111"), star);
  EXPECT_EQ(sp.sen, 1.0);
  EXPECT_NEAR(sp.prec, 0.3, 1e-15);
  sp = sen_prec(Indicator(10), star);
  EXPECT_EQ(sp.sen, 0.0);
  EXPECT_EQ(sp.prec, 0.0);
}

TEST(SenPrec, BothOneExactlyOnMatch) {
  Rng rng = make_rng(5);
  const auto star = Indicator::from_bits("10100001");
  for (int t = 0; t < 300; ++t) {
    const auto d = Indicator::from_mask(rng() & 0xff, 8);
    const auto sp = sen_prec(d, star);
    EXPECT_GE(sp.sen, 0.0);
    EXPECT_LE(sp.sen, 1.0);
    EXPECT_GE(sp.prec, 0.0);
    EXPECT_LE(sp.prec, 1.0);
    EXPECT_EQ(sp.sen == 1.0 && sp.prec == 1.0, d == star);
  }
}

TEST(MixingTime, FixtureStartAndTruncation) {
  const auto star = Indicator::from_bits("1100");
  const auto miss = Indicator::from_bits("1110");
  Trajectory t;
  t.initial_delta = miss;
  for (std::size_t k = 1; k <= 30; ++k) t.records.push_back({k, false, k == 17 || k == 25 ? star : miss, std::nullopt});
  auto r = empirical_mixing_time(t, star, 100);
  EXPECT_EQ(r.mixing_time, 17u);
  EXPECT_FALSE(r.truncated);
  r = empirical_mixing_time(t, star, 10);
  EXPECT_EQ(r.mixing_time, 10u);
  EXPECT_TRUE(r.truncated);
  t.initial_delta = star;
  EXPECT_EQ(empirical_mixing_time(t, star, 100).mixing_time, 0u);
}

TEST(Study, CellsAndWarmStartAtTruth) {
  auto c = tiny_config();
  const auto cells = study_cells(c);
  ASSERT_EQ(cells.size(), 3u);
  EXPECT_EQ(cells[0].fp, 2u);
  EXPECT_EQ(cells[1].fp, 4u);
  EXPECT_EQ(cells[2].fn, 1u);
  EXPECT_EQ(cells[2].fp, 0u);

  c.fp_percent = {0.0};
  c.fn_counts = {};
  c.replications = 1;
  c.truncation = 1;
  const auto s = run_study(c);
  ASSERT_EQ(s.records.size(), 1u);
  EXPECT_EQ(s.records[0].mixing_time, 0u);
}

TEST(Study, DeterministicAcrossThreadCounts) {
  auto c = tiny_config();
  c.threads = 1;
  const auto a = run_study(c);
  c.threads = 3;
  const auto b = run_study(c);
  ASSERT_EQ(a.records.size(), 9u);
  ASSERT_EQ(b.records.size(), a.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].seed, b.records[i].seed);
    EXPECT_EQ(a.records[i].mixing_time, b.records[i].mixing_time);
    EXPECT_EQ(a.records[i].truncated, b.records[i].truncated);
  }
}

TEST(Results, CsvRoundTripAndAggregate) {
  std::vector<MixingRecord> recs;
  for (std::size_t r = 0; r < 4; ++r) {
    MixingRecord m;
    m.p = 100, m.n = 10, m.s_star = 3, m.fp = 5, m.fn = 0, m.replicate = r, m.seed = 1000 + r;
    m.mixing_time = 10 * (r + 1);
    m.wall_s = 0.25;
    recs.push_back(m);
  }
  recs.back().truncated = true;
  const auto back = parse_results_csv(results_csv(recs));
  ASSERT_EQ(back.size(), recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    EXPECT_EQ(back[i].mixing_time, recs[i].mixing_time);
    EXPECT_EQ(back[i].seed, recs[i].seed);
    EXPECT_EQ(back[i].truncated, recs[i].truncated);
    EXPECT_EQ(back[i].wall_s, recs[i].wall_s);
  }
  const auto cells = aggregate(back);
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_DOUBLE_EQ(cells[0].mean, 25.0);
  EXPECT_NEAR(cells[0].sd, std::sqrt(500.0 / 3.0), 1e-12);
  EXPECT_EQ(cells[0].truncated, 1u);
  EXPECT_EQ(cell_label(cells[0]), "FP=5%");
  EXPECT_NE(report_table(cells).find(">25.0 (12.9)"), std::string::npos) << report_table(cells);
  EXPECT_THROW(parse_results_csv("p,n\n1,2\n"), ParseError);
}

TEST(Results, WriteStudyAndIdempotentReport) {
  const auto c = tiny_config();
  const auto s = run_study(c);
  const auto dir = fresh_dir("report");
  write_study(dir, c, s);
  const auto csv = io::read_file(dir / "results.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 9);
  EXPECT_NE(io::read_file(dir / "manifest.txt").find(c.to_text()), std::string::npos);
  const auto first = write_report(dir);
  const auto report = io::read_file(dir / "report.txt");
  EXPECT_EQ(first, report);
  EXPECT_EQ(write_report(dir), first);
  EXPECT_EQ(io::read_file(dir / "results.csv"), csv);
  for (const auto& cell : aggregate(s.records)) EXPECT_TRUE(fs::exists(dir / plot_file_name(cell)));
  fs::remove_all(dir);
}
