#include "pubshare/simulate.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "oracle.hpp"
#include "pubshare/errors.hpp"

namespace {

using namespace pubshare::simulate;

Scenario parse(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in);
}

std::size_t parse_error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const pubshare::ParseError& e) {
    return e.line();
  }
  ADD_FAILURE() << "expected ParseError for:\n" << text;
  return 999;
}

TEST(Sampler, DegenerateProbabilities) {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(draw_binomial(rng, 500, 0.0), 0);
    EXPECT_EQ(draw_binomial(rng, 500, 1.0), 500);
    EXPECT_EQ(draw_binomial(rng, 0, 0.4), 0);
  }
  EXPECT_THROW(draw_binomial(rng, -1, 0.5), pubshare::InvalidInput);
  EXPECT_THROW(draw_binomial(rng, 5, 1.5), pubshare::InvalidInput);
}

TEST(Sampler, MeanAtJacsScale) {
  // n = 2201, p = 8/2201: mean 8, sd about 2.82; 10000 draws give SE 0.028.
  Rng rng(substream_seed(42, 0));
  const int draws = 10000;
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) sum += static_cast<double>(draw_binomial(rng, 2201, 8.0 / 2201.0));
  const double se = std::sqrt(8.0 * (1.0 - 8.0 / 2201.0) / draws);
  EXPECT_NEAR(sum / draws, 8.0, 3.0 * se);
}

TEST(Sampler, MomentsMatchBinomial) {
  Rng rng(7);
  const int draws = 20000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double v = static_cast<double>(draw_binomial(rng, 1000, 0.3));
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / draws;
  const double variance = sum_sq / draws - mean * mean;
  EXPECT_NEAR(mean, 300.0, 0.6);
  EXPECT_NEAR(variance, 210.0, 21.0);
}

TEST(Seeds, SubstreamsAreDistinctAndStable) {
  EXPECT_EQ(substream_seed(42, 7), substream_seed(42, 7));
  EXPECT_NE(substream_seed(42, 7), substream_seed(42, 8));
  EXPECT_NE(substream_seed(42, 7), substream_seed(43, 7));
}

TEST(Scenario, ProbabilityPath) {
  Scenario s;
  s.years = 20;
  s.shape = ProbabilityShape::Linear;
  s.p_start = 0.004;
  s.p_end = 0.012;
  EXPECT_DOUBLE_EQ(s.probability_at(0), 0.004);
  EXPECT_DOUBLE_EQ(s.probability_at(19), 0.012);
  EXPECT_NEAR(s.probability_at(10) - s.probability_at(9), 0.008 / 19, 1e-15);
  s.totals = {100, 200};
  EXPECT_THROW(s.validate(), pubshare::InvalidInput);
}

TEST(Scenario, ParsesDataFiles) {
  std::ifstream in(std::string(PUBSHARE_TEST_DATA_DIR) + "/drift.scenario");
  ASSERT_TRUE(in);
  const auto s = parse_scenario(in);
  EXPECT_EQ(s.years, 20);
  EXPECT_EQ(s.shape, ProbabilityShape::Linear);
  EXPECT_DOUBLE_EQ(s.p_start, 0.004);
  EXPECT_DOUBLE_EQ(s.p_end, 0.012);
  EXPECT_EQ(s.total_at(5), 2000);
  EXPECT_EQ(s.seed, 42u);
}

TEST(Scenario, PerYearTotals) {
  const auto s = parse("years = 3\ntotals = 2201, 1957, 1396\np = 0.004\n");
  EXPECT_EQ(s.total_at(0), 2201);
  EXPECT_EQ(s.total_at(2), 1396);
  EXPECT_EQ(s.shape, ProbabilityShape::Constant);
}

TEST(Scenario, ErrorsCarryLineNumbers) {
  EXPECT_EQ(parse_error_line("years = 3\ntotal = 10\nbogus = 1\n"), 3u);
  EXPECT_EQ(parse_error_line("years = 3\ntotal = 10\np = 1.5\n"), 3u);
  EXPECT_EQ(parse_error_line("years = 3\n\ntotal = 10\np = 0.1\nreplications = 0\n"), 5u);
  EXPECT_EQ(parse_error_line("total = 10\np = 0.1\n"), 0u);
  EXPECT_EQ(parse_error_line("years = 3\ntotal = 10\n"), 0u);
  EXPECT_EQ(parse_error_line("years = 3\ntotal = 10\np = 0.1\nyears = 4\n"), 4u);
  EXPECT_EQ(parse_error_line("years = 3\ntotals = 1, 2\np = 0.1\n"), 2u);
  EXPECT_EQ(parse_error_line("years three\n"), 1u);
  EXPECT_EQ(parse_error_line("years = 3\ntotal = 10\np = 0.1\np_end = 0.2\n"), 3u);
}

TEST(Simulation, ReplicationsAreDeterministicAndThreadInvariant) {
  Scenario s;
  s.years = 6;
  s.replications = 40;
  const auto serial = simulate_series(s, 1);
  const auto parallel = simulate_series(s, 4);
  ASSERT_EQ(serial.size(), 40u);
  EXPECT_EQ(serial, parallel);
  EXPECT_EQ(serial[17], simulate_replication(s, 17));
  EXPECT_NE(serial[0], serial[1]);
  for (const auto& rep : serial) {
    ASSERT_EQ(rep.size(), 6u);
    EXPECT_EQ(rep.begin()->first, 1996);
    for (const auto& [year, sample] : rep) EXPECT_EQ(sample.total, 2000);
  }
  s.seed = 43;
  EXPECT_NE(simulate_replication(s, 0), serial[0]);
}

TEST(JointCoverage, AgreesWithExactComputation) {
  struct Case {
    std::int64_t n, m;
    double p;
  };
  for (const auto& c : {Case{2201, 2201, 8.0 / 2201.0}, Case{2000, 2000, 0.05}, Case{500, 900, 0.1},
                        Case{50, 50, 0.02}}) {
    JointCoverageConfig config{c.n, c.m, c.p, 1.96, 20000, 42};
    const auto est = joint_coverage(config, 2);
    const double exact = oracle::exact_joint_coverage(c.n, c.m, c.p, 1.96);
    const double se = std::sqrt(exact * (1.0 - exact) / 20000.0);
    EXPECT_NEAR(est.empirical, exact, 4.0 * se) << c.n << " " << c.m << " " << c.p;
    EXPECT_NEAR(est.nominal, 0.95, 1e-4);
    EXPECT_EQ(est.replications, 20000);
  }
}

TEST(JointCoverage, ExactCoverageNearNominalForLargeSamples) {
  EXPECT_NEAR(oracle::exact_joint_coverage(2000, 2000, 0.05, 1.96), 0.95, 0.003);
  EXPECT_NEAR(oracle::exact_joint_coverage(2000, 2000, 0.3, 1.96), 0.95, 0.003);
}

TEST(JointCoverage, ZeroCriticalValueFarBelowNominal) {
  const auto est = joint_coverage({2000, 2000, 0.05, 0.0, 5000, 42});
  EXPECT_LT(est.empirical, 0.2);
}

TEST(JointCoverage, ThreadInvariant) {
  const JointCoverageConfig config{300, 400, 0.1, 1.96, 3000, 9};
  EXPECT_EQ(joint_coverage(config, 1).empirical, joint_coverage(config, 3).empirical);
  EXPECT_THROW(joint_coverage({300, 400, 0.1, 1.96, 0, 9}), pubshare::InvalidInput);
}

TEST(DriftProfile, ConstantStaysNearNominalAndDriftDecays) {
  pubshare::analysis::GapTestOptions opts;
  Scenario constant;
  constant.years = 10;
  constant.replications = 200;
  const auto flat = drift_coverage_profile(constant, opts, 2);
  ASSERT_EQ(flat.size(), 9u);
  for (const auto& g : flat) {
    EXPECT_EQ(g.tests_run, 200 * (10 - g.gap));
    EXPECT_GT(g.percent_inside, 90.0);
  }

  Scenario drift = constant;
  drift.years = 20;
  drift.shape = ProbabilityShape::Linear;
  drift.p_start = 0.004;
  drift.p_end = 0.012;
  const auto profile = drift_coverage_profile(drift, opts, 2);
  ASSERT_EQ(profile.size(), 19u);
  EXPECT_LT(profile[14].percent_inside + 3.0 * (profile[0].standard_error + profile[14].standard_error),
            profile[0].percent_inside);

  EXPECT_EQ(drift_coverage_profile(drift, opts, 1).back().tests_inside, profile.back().tests_inside);
  drift.years = 2;
  EXPECT_THROW(drift_coverage_profile(drift, opts), pubshare::InvalidInput);
}

}  // namespace
