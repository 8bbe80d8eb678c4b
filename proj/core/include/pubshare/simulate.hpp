#pragma once

// Monte Carlo oracle for the interval formulas: synthetic venues whose
// per-article group probability is known, constant or drifting.

#include <cstdint>
#include <istream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "pubshare/analysis.hpp"
#include "pubshare/stats.hpp"

namespace pubshare::simulate {

using Rng = std::mt19937_64;

// Seed for replication `index`, derived from the master seed with SplitMix64
// so that any replication can be regenerated independently of the others.
std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t index) noexcept;

// Exact Binomial(trials, p) draw. Throws InvalidInput on trials < 0 or p
// outside [0, 1].
std::int64_t draw_binomial(Rng& rng, std::int64_t trials, double p);

enum class ProbabilityShape { Constant, Linear };

struct Scenario {
  std::string name = "scenario";
  int years = 21;
  int first_year = 1996;
  // One entry (constant total) or one per year.
  std::vector<std::int64_t> totals{2000};
  ProbabilityShape shape = ProbabilityShape::Constant;
  double p_start = 0.05;
  double p_end = 0.05;  // ignored for Constant
  std::int64_t replications = 1000;
  std::uint64_t seed = 42;

  std::int64_t total_at(int index) const;
  // Linear paths run from p_start at index 0 to p_end at index years - 1.
  double probability_at(int index) const;

  // Throws InvalidInput.
  void validate() const;
};

// Key-value text, one `key = value` per line, '#' starts a comment:
//
//   name = drift
//   years = 20
//   first_year = 1996
//   total = 2000              (or: totals = 2201, 1957, ...)
//   p = 0.05                  (or: p_start = 0.004 / p_end = 0.012)
//   replications = 1000
//   seed = 42
//
// Throws ParseError carrying the line of the offending key (0 for a key
// that is missing altogether).
Scenario parse_scenario(std::istream& in);

using SyntheticSeries = std::map<int, stats::BinomialSample>;

SyntheticSeries simulate_replication(const Scenario& scenario, std::int64_t replication);

// All replications; element r equals simulate_replication(scenario, r).
std::vector<SyntheticSeries> simulate_series(const Scenario& scenario, unsigned threads = 1);

struct CoverageEstimate {
  double nominal = 0.0;
  double empirical = 0.0;
  std::int64_t replications = 0;
  double standard_error = 0.0;  // sqrt(empirical * (1 - empirical) / replications)
};

struct JointCoverageConfig {
  std::int64_t n = 0;  // base-year total
  std::int64_t m = 0;  // future-year total
  double p = 0.0;
  double z = stats::kDefaultZ;
  std::int64_t replications = 10000;
  std::uint64_t seed = 42;
};

// Per replication: X ~ Bin(n, p), integer prediction interval from (X, n)
// for m articles, Y ~ Bin(m, p); reports how often Y lands inside.
CoverageEstimate joint_coverage(const JointCoverageConfig& config, unsigned threads = 1);

struct GapCoverage {
  int gap = 0;
  std::int64_t tests_run = 0;
  std::int64_t tests_inside = 0;
  double percent_inside = 0.0;
  // Standard error of percent_inside estimated from the spread of
  // per-replication coverage; 0 with fewer than two contributing replications.
  double standard_error = 0.0;
};

// Runs the gap-test experiment on every replication of `scenario` and pools
// the results per gap.
std::vector<GapCoverage> drift_coverage_profile(const Scenario& scenario,
                                                const analysis::GapTestOptions& options,
                                                unsigned threads = 1);

}  // namespace pubshare::simulate
