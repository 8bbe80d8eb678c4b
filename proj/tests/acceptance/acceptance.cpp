// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "../test_util.hpp"
#include "pubshare/analysis.hpp"
#include "pubshare/records.hpp"
#include "pubshare/simulate.hpp"
#include "pubshare/stats.hpp"

namespace {

using namespace pubshare;
using testutil::TempDir;

struct Outcome {
  bool pass = false;
  std::string detail;
};

unsigned worker_threads() { return std::max(2u, std::thread::hardware_concurrency()); }

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::vector<std::vector<std::string>> tsv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  bool header = true;
  for (std::string line; std::getline(in, line);) {
    if (line.starts_with("# ")) continue;
    if (std::exchange(header, false)) continue;
    std::vector<std::string> fields;
    std::stringstream s(line);
    for (std::string f; std::getline(s, f, '\t');) fields.push_back(f);
    rows.push_back(std::move(fields));
  }
  return rows;
}

Outcome wilson_regression() {
  const auto ci = stats::wilson_interval({8, 2201}, 1.96);
  const double lo = std::round(ci.lower * 1e4) / 1e4;
  const double hi = std::round(ci.upper * 1e4) / 1e4;
  return {lo == 0.0018 && hi == 0.0072, "(" + fixed(lo, 4) + ", " + fixed(hi, 4) + ")"};
}

Outcome worked_example() {
  // The published base-year interval.
  const stats::ProportionInterval published{0.0018, 0.0072};
  const bool published_ok = stats::contains(published, 11.0 / 1957.0) && !stats::contains(published, 14.0 / 1396.0);

  TempDir dir("ac2");
  const auto run = testutil::run_cli({"analyze", "--counts", testutil::data_path("jacs_china_counts.tsv"),
                                      "--out", dir.str(), "--min-tests-per-gap", "1"});
  if (run.code != 0) return {false, "analyze exited " + std::to_string(run.code) + ": " + run.err};
  std::map<std::string, std::string> inside;
  for (const auto& row : tsv_rows(testutil::slurp(dir.path() / "gap-tests-any.tsv"))) {
    inside[row[2] + "->" + row[3]] = row[12];
  }
  const bool pipeline_ok = inside["1996->1997"] == "1" && inside["1996->2000"] == "0";
  return {published_ok && pipeline_ok, "1996->1997 inside=" + inside["1996->1997"] +
                                           ", 1996->2000 inside=" + inside["1996->2000"] +
                                           ", published interval " + (published_ok ? "agrees" : "disagrees")};
}

Outcome enumeration() {
  TempDir dir("ac3");
  std::ostringstream counts;
  counts << "venue\tgroup\tyear\tx\tn\n";
  for (int v = 0; v < 36; ++v) {
    for (int g = 0; g < 10; ++g) {
      for (int y = 0; y < 21; ++y) {
        counts << "V" << v << "\tG" << g << '\t' << 1996 + y << '\t' << 1 + (v * 7 + g * 3 + y) % 40 << '\t'
               << 1500 + 10 * v + y << '\n';
      }
    }
  }
  testutil::write_text(dir.path() / "grid.tsv", counts.str());
  const auto run = testutil::run_cli({"analyze", "--counts", dir.str("grid.tsv"), "--out", dir.str("out"),
                                      "--threads", std::to_string(worker_threads())});
  if (run.code != 0) return {false, "analyze exited " + std::to_string(run.code) + ": " + run.err};

  std::int64_t total = 0, gap1 = 0, gap19 = 0, gap20 = 0;
  for (const auto& row : tsv_rows(testutil::slurp(dir.path() / "out" / "coverage-any.tsv"))) {
    if (row[0] != analysis::kPooledGroup) continue;
    const int gap = std::stoi(row[1]);
    const std::int64_t tests = std::stoll(row[2]);
    total += tests;
    if (gap == 1) gap1 = tests;
    if (gap == 19) gap19 = tests;
    if (gap == 20) gap20 = tests;
  }
  std::int64_t skipped = 0;
  for (const auto& row : tsv_rows(testutil::slurp(dir.path() / "out" / "gap-tests-any.tsv"))) {
    if (row[13] == "1") ++skipped;
  }
  return {total == 75240 && gap1 == 7200 && gap19 == 720 && gap20 == 0 && skipped == 0,
          "tests=" + std::to_string(total) + " gap1=" + std::to_string(gap1) + " gap19=" +
              std::to_string(gap19) + " gap20=" + std::to_string(gap20) + " skipped=" + std::to_string(skipped)};
}

Outcome conservative_coverage() {
  struct Case {
    std::int64_t n;
    double p;
    bool strict;  // must exceed nominal outright
  };
  bool pass = true;
  std::string detail;
  for (const auto& c : {Case{2201, 8.0 / 2201.0, false}, Case{2000, 0.05, false}, Case{2000, 0.3, false},
                        Case{50, 0.02, true}}) {
    const auto est = simulate::joint_coverage({c.n, c.n, c.p, 1.96, 10000, 42}, worker_threads());
    const bool ok = c.strict ? est.empirical > 0.95 : est.empirical >= 0.95 - 3.0 * est.standard_error;
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += "n=" + std::to_string(c.n) + " p=" + fixed(c.p, 4) + ": " + fixed(est.empirical, 4) + " (se " +
              fixed(est.standard_error, 4) + ")";
  }
  return {pass, detail};
}

simulate::Scenario load_scenario(const std::string& name) {
  std::ifstream in(testutil::data_path(name));
  return simulate::parse_scenario(in);
}

Outcome profile_shape() {
  const analysis::GapTestOptions options;
  const auto flat = simulate::drift_coverage_profile(load_scenario("constant.scenario"), options, worker_threads());
  double lo = 100.0, hi = 0.0;
  for (const auto& g : flat) {
    lo = std::min(lo, g.percent_inside);
    hi = std::max(hi, g.percent_inside);
  }
  const bool flat_ok = !flat.empty() && hi - lo < 5.0;

  const auto drift = simulate::drift_coverage_profile(load_scenario("drift.scenario"), options, worker_threads());
  const auto at = [&](int gap) {
    for (const auto& g : drift) {
      if (g.gap == gap) return g;
    }
    return simulate::GapCoverage{};
  };
  const auto g1 = at(1), g15 = at(15);
  const double se = std::hypot(g1.standard_error, g15.standard_error);
  const bool drift_ok = g15.tests_run > 0 && g1.percent_inside - g15.percent_inside > 3.0 * se;
  return {flat_ok && drift_ok, "constant range " + fixed(hi - lo, 2) + " points; drift gap1 " +
                                   fixed(g1.percent_inside, 1) + "% vs gap15 " + fixed(g15.percent_inside, 1) +
                                   "% (3*se " + fixed(3.0 * se, 2) + ")"};
}

Outcome mode_ordering() {
  const std::vector<std::string> countries = {"China", "USA", "Germany", "India", "Brazil"};
  std::int64_t checked = 0;
  bool pass = true;
  for (std::uint32_t seed = 1; seed <= 5; ++seed) {
    std::istringstream in(testutil::synthetic_records(seed, 1996, 21, 120, countries, {0.3, 0.3, 0.2, 0.1, 0.1}));
    records::IngestConfig config;
    config.year_column = 2;
    config.affiliation_column = 3;
    const auto parsed = records::parse_records(in, config);
    for (const auto& country : countries) {
      records::GroupFilter any{country, records::MatchMode::Any};
      records::GroupFilter all{country, records::MatchMode::All};
      const auto a = records::count_by_year(parsed.records, any);
      const auto b = records::count_by_year(parsed.records, all);
      pass = pass && a.size() == b.size();
      for (const auto& [year, s] : a) {
        const auto it = b.find(year);
        pass = pass && it != b.end() && it->second.count <= s.count && it->second.total == s.total;
        ++checked;
      }
    }
  }
  return {pass, std::to_string(checked) + " group-years checked"};
}

Outcome scaling_identity() {
  double worst = 0.0;
  std::int64_t cases = 0;
  for (std::int64_t base = 1; base <= 200000; base = base * 3 + 1) {
    for (std::int64_t group = 0; group <= base; group += std::max<std::int64_t>(1, base / 13)) {
      for (std::int64_t target = 1; target <= 500000; target = target * 5 + 2) {
        const double share = stats::scaled_expectation({group, base, target}) / static_cast<double>(target);
        worst = std::max(worst, std::abs(share - static_cast<double>(group) / static_cast<double>(base)));
        ++cases;
      }
    }
  }
  std::ostringstream s;
  s << cases << " cases, max error " << worst;
  return {worst <= 1e-12, s.str()};
}

Outcome determinism() {
  TempDir dir("ac8");
  const std::vector<std::string> countries = {"China", "USA", "Japan"};
  std::vector<std::string> inputs;
  for (int v = 0; v < 3; ++v) {
    const auto path = dir.str("Venue" + std::to_string(v) + ".tsv");
    testutil::write_text(path, testutil::synthetic_records(100 + v, 2000, 12, 200, countries, {0.3, 0.5, 0.2}));
    inputs.push_back(path);
  }
  const auto scenario = testutil::data_path("drift.scenario");

  std::vector<std::vector<std::pair<std::string, std::string>>> snapshots;
  for (const std::string threads : {"1", "1", "4", "8"}) {
    const auto out = dir.str("run-" + std::to_string(snapshots.size()));
    std::vector<std::string> analyze = {"analyze"};
    analyze.insert(analyze.end(), inputs.begin(), inputs.end());
    for (const std::string arg : {"--year-col", "2", "--affil-col", "3", "--group", "China", "--group", "USA",
                                  "--mode", "both", "--min-tests-per-gap", "0", "--threads"}) {
      analyze.push_back(arg);
    }
    analyze.insert(analyze.end(), {threads, "--out", out});
    const auto a = testutil::run_cli(analyze);
    const auto s = testutil::run_cli({"simulate", scenario, "--threads", threads, "--out", out});
    if (a.code != 0 || s.code != 0) return {false, "run failed: " + a.err + s.err};
    snapshots.push_back(testutil::snapshot(out));
  }
  bool pass = snapshots.front().size() == 8;  // 3 per mode, difference, profile
  for (const auto& s : snapshots) pass = pass && s == snapshots.front();
  return {pass, std::to_string(snapshots.size()) + " runs (threads 1,1,4,8), " +
                    std::to_string(snapshots.front().size()) + " files each"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC1 Wilson regression for 8/2201", wilson_regression},
      {"AC2 worked-example gap tests", worked_example},
      {"AC3 enumeration arithmetic", enumeration},
      {"AC4 conservative joint coverage", conservative_coverage},
      {"AC5 coverage profile shape", profile_shape},
      {"AC6 all-mode counts bounded by any-mode", mode_ordering},
      {"AC7 scaling identity", scaling_identity},
      {"AC8 deterministic outputs", determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!outcome.pass) ++failures;
    std::cout << (outcome.pass ? "PASS " : "FAIL ") << name << " [" << fixed(seconds, 2) << " s] "
              << outcome.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << '\n';
  return failures == 0 ? 0 : 1;
}
