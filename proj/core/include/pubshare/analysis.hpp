#pragma once

// Share time series and the year-gap coverage experiment: for every ordered
// pair of years in a (group, venue) series, does the later year's share fall
// inside the interval built from the earlier year?

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pubshare/records.hpp"
#include "pubshare/stats.hpp"

namespace pubshare::analysis {

// Future total m used when building an interval from a base year.
enum class MPolicy {
  ActualFutureTotal,  // m = total of the year being tested
  SameAsBase,         // m = total of the base year
};

enum class IntervalKind {
  Prediction,  // joint-distribution prediction interval for the share
  Wilson,      // Wilson confidence interval of the base year
};

enum class Containment {
  RealBounds,     // observed share within (L/m, U/m) using real-valued L, U
  IntegerBounds,  // observed share within (ceil(L)/m, floor(U)/m)
};

struct SeriesPoint {
  int year = 0;
  stats::BinomialSample sample;
  double proportion = 0.0;
  stats::ProportionInterval wilson;
};

struct ShareSeries {
  std::string group;
  std::string venue_id;
  std::vector<SeriesPoint> points;  // strictly increasing years
};

// Throws InvalidInput when `counts` is empty or holds an invalid sample.
ShareSeries build_share_series(const std::map<int, stats::BinomialSample>& counts,
                               std::string group, std::string venue_id,
                               double z = stats::kDefaultZ);

struct GapTestOptions {
  double z = stats::kDefaultZ;
  MPolicy policy = MPolicy::ActualFutureTotal;
  std::optional<int> max_gap;
  // Used by run_gap_tests only: the largest gap is dropped when no group has
  // at least this many venue/year pairs at it.
  int min_tests_per_gap = 72;
  IntervalKind interval = IntervalKind::Prediction;
  Containment containment = Containment::RealBounds;
};

enum class SkipReason { None, ZeroInBaseYear };

struct GapTestResult {
  std::string group;
  std::string venue_id;
  int base_year = 0;
  int test_year = 0;
  int gap = 0;
  stats::BinomialSample base;
  stats::BinomialSample test;
  std::optional<stats::ProportionInterval> interval;  // absent when skipped
  double observed = 0.0;
  bool inside = false;
  SkipReason skip = SkipReason::None;

  bool skipped() const noexcept { return skip != SkipReason::None; }
};

// One result per ordered pair of series years (base < test) with
// gap <= options.max_gap. Base years with a zero count are reported as skipped.
std::vector<GapTestResult> gap_tests(const ShareSeries& series, const GapTestOptions& options);

// The max gap actually applied to a set of series: options.max_gap if set,
// otherwise one less than the largest gap when that gap is too thin to keep
// (see GapTestOptions::min_tests_per_gap), otherwise unlimited.
std::optional<int> effective_max_gap(std::span<const ShareSeries> series,
                                     const GapTestOptions& options);

struct GapExperiment {
  std::optional<int> max_gap;
  std::vector<GapTestResult> results;  // in series order, then base/test year
};

GapExperiment run_gap_tests(std::span<const ShareSeries> series, const GapTestOptions& options,
                            unsigned threads = 1);

enum class GroupBy {
  Gap,          // pool every group; cells are labelled kPooledGroup
  GroupAndGap,  // one cell per (group, gap)
};

inline constexpr std::string_view kPooledGroup = "all";

struct CoverageCell {
  std::string group;
  int gap = 0;
  std::int64_t tests_run = 0;
  std::int64_t tests_inside = 0;

  double percent_inside() const noexcept {
    return tests_run == 0 ? 0.0 : 100.0 * static_cast<double>(tests_inside) /
                                      static_cast<double>(tests_run);
  }
};

struct CoverageSummary {
  std::vector<CoverageCell> cells;  // sorted by (group, gap)

  const CoverageCell* find(std::string_view group, int gap) const;
  std::vector<std::string> groups() const;
  bool empty() const noexcept { return cells.empty(); }
};

// Skipped results count toward neither tests_run nor tests_inside.
CoverageSummary aggregate_coverage(std::span<const GapTestResult> results,
                                   GroupBy group_by = GroupBy::GroupAndGap);

struct CoverageDifference {
  std::string group;
  int gap = 0;
  std::optional<double> percent_points;  // a - b; absent when either side lacks the cell
};

// Per (group, gap) difference of percent_inside over the union of gaps.
// Throws InvalidInput naming the groups present in only one summary.
std::vector<CoverageDifference> coverage_difference(const CoverageSummary& a,
                                                    const CoverageSummary& b);

struct TimeseriesRow {
  int year = 0;
  std::int64_t count = 0;
  std::int64_t total = 0;
  std::int64_t future_total = 0;
  double p_percent = 0.0;
  double lower_percent = 0.0;
  double upper_percent = 0.0;
};

// Each year's share with the prediction interval for the next observation.
// ActualFutureTotal uses the following year's total (the final year falls
// back to its own total).
std::vector<TimeseriesRow> timeseries_report(const ShareSeries& series,
                                             double z = stats::kDefaultZ,
                                             MPolicy policy = MPolicy::SameAsBase,
                                             stats::BoundRounding rounding = stats::BoundRounding::Real);

std::string_view to_string(MPolicy policy);
std::string_view to_string(IntervalKind kind);
std::string_view to_string(Containment containment);
std::string_view to_string(SkipReason reason);
std::optional<MPolicy> parse_m_policy(std::string_view text);
std::optional<IntervalKind> parse_interval_kind(std::string_view text);
std::optional<Containment> parse_containment(std::string_view text);

}  // namespace pubshare::analysis
