#include "pubshare/analysis.hpp"

#include <algorithm>
#include <set>
#include <tuple>
#include <utility>

#include "pubshare/errors.hpp"
#include "pubshare/parallel.hpp"

namespace pubshare::analysis {
namespace {

stats::ProportionInterval interval_for(const SeriesPoint& base, const SeriesPoint& test,
                                       const GapTestOptions& options) {
  if (options.interval == IntervalKind::Wilson) {
    return stats::wilson_interval(base.sample, options.z);
  }
  const std::int64_t m = options.policy == MPolicy::ActualFutureTotal ? test.sample.total
                                                                       : base.sample.total;
  const auto rounding = options.containment == Containment::IntegerBounds
                            ? stats::BoundRounding::Integer
                            : stats::BoundRounding::Real;
  return stats::proportion_prediction_interval(base.sample, {m, options.z}, rounding);
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& item : items) {
    if (!out.empty()) out += ", ";
    out += item;
  }
  return out.empty() ? "(none)" : out;
}

}  // namespace

ShareSeries build_share_series(const std::map<int, stats::BinomialSample>& counts,
                               std::string group, std::string venue_id, double z) {
  if (counts.empty()) throw InvalidInput("cannot build a share series from no years");
  ShareSeries series{std::move(group), std::move(venue_id), {}};
  series.points.reserve(counts.size());
  for (const auto& [year, sample] : counts) {
    series.points.push_back({year, sample, 0.0, stats::wilson_interval(sample, z)});
    series.points.back().proportion = sample.proportion();
  }
  return series;
}

std::vector<GapTestResult> gap_tests(const ShareSeries& series, const GapTestOptions& options) {
  std::vector<GapTestResult> out;
  const auto& points = series.points;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const int gap = points[j].year - points[i].year;
      if (options.max_gap && gap > *options.max_gap) break;

      GapTestResult r;
      r.group = series.group;
      r.venue_id = series.venue_id;
      r.base_year = points[i].year;
      r.test_year = points[j].year;
      r.gap = gap;
      r.base = points[i].sample;
      r.test = points[j].sample;
      r.observed = points[j].proportion;
      if (r.base.count == 0) {
        r.skip = SkipReason::ZeroInBaseYear;
      } else {
        r.interval = interval_for(points[i], points[j], options);
        r.inside = stats::contains(*r.interval, r.observed);
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::optional<int> effective_max_gap(std::span<const ShareSeries> series,
                                     const GapTestOptions& options) {
  if (options.max_gap) return options.max_gap;
  if (options.min_tests_per_gap <= 0) return std::nullopt;

  int largest = 0;
  for (const auto& s : series) {
    if (s.points.size() >= 2) largest = std::max(largest, s.points.back().year - s.points.front().year);
  }
  if (largest < 1) return std::nullopt;

  std::map<std::string, int> pairs_at_largest;
  for (const auto& s : series) {
    int& pairs = pairs_at_largest[s.group];
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      for (std::size_t j = i + 1; j < s.points.size(); ++j) {
        if (s.points[j].year - s.points[i].year == largest) ++pairs;
      }
    }
  }
  const bool thin = std::all_of(pairs_at_largest.begin(), pairs_at_largest.end(),
                                [&](const auto& kv) { return kv.second < options.min_tests_per_gap; });
  return thin ? std::optional<int>(largest - 1) : std::nullopt;
}

GapExperiment run_gap_tests(std::span<const ShareSeries> series, const GapTestOptions& options,
                            unsigned threads) {
  GapExperiment experiment;
  experiment.max_gap = effective_max_gap(series, options);
  GapTestOptions effective = options;
  effective.max_gap = experiment.max_gap;

  std::vector<std::vector<GapTestResult>> per_series(series.size());
  parallel_for(series.size(), threads,
               [&](std::size_t i) { per_series[i] = gap_tests(series[i], effective); });
  for (auto& chunk : per_series) {
    std::move(chunk.begin(), chunk.end(), std::back_inserter(experiment.results));
  }
  return experiment;
}

const CoverageCell* CoverageSummary::find(std::string_view group, int gap) const {
  const auto it = std::find_if(cells.begin(), cells.end(), [&](const CoverageCell& c) {
    return c.group == group && c.gap == gap;
  });
  return it == cells.end() ? nullptr : &*it;
}

std::vector<std::string> CoverageSummary::groups() const {
  std::vector<std::string> out;
  for (const auto& cell : cells) {
    if (out.empty() || out.back() != cell.group) out.push_back(cell.group);
  }
  return out;
}

CoverageSummary aggregate_coverage(std::span<const GapTestResult> results, GroupBy group_by) {
  std::map<std::pair<std::string, int>, CoverageCell> cells;
  for (const auto& r : results) {
    if (r.skipped()) continue;
    std::string group = group_by == GroupBy::Gap ? std::string(kPooledGroup) : r.group;
    auto& cell = cells[{group, r.gap}];
    if (cell.tests_run == 0) {
      cell.group = std::move(group);
      cell.gap = r.gap;
    }
    ++cell.tests_run;
    if (r.inside) ++cell.tests_inside;
  }
  CoverageSummary summary;
  summary.cells.reserve(cells.size());
  for (auto& [key, cell] : cells) summary.cells.push_back(std::move(cell));
  return summary;
}

std::vector<CoverageDifference> coverage_difference(const CoverageSummary& a,
                                                    const CoverageSummary& b) {
  const auto groups_a = a.groups();
  const auto groups_b = b.groups();
  if (groups_a != groups_b) {
    std::vector<std::string> only_a, only_b;
    std::set_difference(groups_a.begin(), groups_a.end(), groups_b.begin(), groups_b.end(),
                        std::back_inserter(only_a));
    std::set_difference(groups_b.begin(), groups_b.end(), groups_a.begin(), groups_a.end(),
                        std::back_inserter(only_b));
    throw InvalidInput("coverage summaries cover different groups; only in first: " +
                       join(only_a) + "; only in second: " + join(only_b));
  }

  std::set<std::pair<std::string, int>> keys;
  for (const auto& c : a.cells) keys.emplace(c.group, c.gap);
  for (const auto& c : b.cells) keys.emplace(c.group, c.gap);

  std::vector<CoverageDifference> out;
  out.reserve(keys.size());
  for (const auto& [group, gap] : keys) {
    CoverageDifference d{group, gap, std::nullopt};
    const auto* ca = a.find(group, gap);
    const auto* cb = b.find(group, gap);
    if (ca && cb) d.percent_points = ca->percent_inside() - cb->percent_inside();
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<TimeseriesRow> timeseries_report(const ShareSeries& series, double z, MPolicy policy,
                                             stats::BoundRounding rounding) {
  std::vector<TimeseriesRow> rows;
  rows.reserve(series.points.size());
  for (std::size_t i = 0; i < series.points.size(); ++i) {
    const auto& point = series.points[i];
    const bool has_next = i + 1 < series.points.size();
    const std::int64_t m = policy == MPolicy::ActualFutureTotal && has_next
                               ? series.points[i + 1].sample.total
                               : point.sample.total;
    const auto interval = stats::proportion_prediction_interval(point.sample, {m, z}, rounding);
    rows.push_back({point.year, point.sample.count, point.sample.total, m,
                    100.0 * point.proportion, 100.0 * interval.lower, 100.0 * interval.upper});
  }
  return rows;
}

std::string_view to_string(MPolicy policy) {
  return policy == MPolicy::ActualFutureTotal ? "actual" : "same-as-base";
}

std::string_view to_string(IntervalKind kind) {
  return kind == IntervalKind::Prediction ? "prediction" : "wilson";
}

std::string_view to_string(Containment containment) {
  return containment == Containment::RealBounds ? "real" : "integer";
}

std::string_view to_string(SkipReason reason) {
  return reason == SkipReason::None ? "" : "zero-in-base-year";
}

std::optional<MPolicy> parse_m_policy(std::string_view text) {
  if (text == "actual") return MPolicy::ActualFutureTotal;
  if (text == "same-as-base") return MPolicy::SameAsBase;
  return std::nullopt;
}

std::optional<IntervalKind> parse_interval_kind(std::string_view text) {
  if (text == "prediction") return IntervalKind::Prediction;
  if (text == "wilson") return IntervalKind::Wilson;
  return std::nullopt;
}

std::optional<Containment> parse_containment(std::string_view text) {
  if (text == "real") return Containment::RealBounds;
  if (text == "integer") return Containment::IntegerBounds;
  return std::nullopt;
}

}  // namespace pubshare::analysis
