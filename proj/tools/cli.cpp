#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "pubshare/errors.hpp"
#include "pubshare/simulate.hpp"

namespace pubshare::cli {
namespace {

namespace fs = std::filesystem;
using records::MatchMode;

constexpr const char* kVersion = "0.1.0";
constexpr std::size_t kMaxPrintedDiagnostics = 20;

class DataError : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError(path, "read failure");
  return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << content;
  out.flush();
  if (!out) throw IoError(path.string(), "write failure");
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError(dir, "cannot create output directory");
}

// "0003-6951 2000-world" -> "0003-6951"; other stems are used unchanged.
std::string venue_from_path(const std::string& path) {
  std::string stem = fs::path(path).stem().string();
  const auto space = stem.rfind(' ');
  if (space != std::string::npos && stem.ends_with("-world")) {
    const std::string year = stem.substr(space + 1, stem.size() - space - 1 - 6);
    if (!year.empty() && std::all_of(year.begin(), year.end(), ::isdigit)) {
      return stem.substr(0, space);
    }
  }
  return stem;
}

std::string strip_whitespace(const std::string& text) {
  std::string out;
  for (const char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  }
  return out;
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (const auto& item : items) {
    if (!out.empty()) out += sep;
    out += item;
  }
  return out;
}

std::string percent_1dp(double value) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(1) << value << '%';
  return s.str();
}

std::string render_table(const report::Table& table, const report::Metadata& metadata,
                         report::Format format) {
  std::ostringstream s;
  report::write_table(s, table, metadata, format);
  return s.str();
}

struct LoadedInputs {
  std::vector<std::string> paths;
  // Records grouped by venue, venues in name order.
  std::map<std::string, std::vector<records::PublicationRecord>> venues;
  std::optional<std::string> header;
  std::size_t record_count = 0;
  std::size_t diagnostic_count = 0;
};

LoadedInputs load_records(const std::vector<std::string>& paths, const RunConfig& config,
                          report::Fingerprint& fingerprint, std::ostream& err) {
  LoadedInputs loaded;
  loaded.paths = paths;
  std::size_t printed = 0;
  for (const auto& path : paths) {
    const std::string content = read_file(path);
    fingerprint.add(content);
    records::IngestConfig ingest = config.ingest;
    ingest.venue_id = venue_from_path(path);
    std::istringstream in(content);
    auto parsed = records::parse_records(in, ingest);
    for (const auto& d : parsed.diagnostics) {
      if (printed++ < kMaxPrintedDiagnostics) err << path << ':' << d.line << ": " << d.reason << '\n';
    }
    loaded.diagnostic_count += parsed.diagnostics.size();
    if (!loaded.header && parsed.header) loaded.header = parsed.header;
    loaded.record_count += parsed.records.size();
    auto& bucket = loaded.venues[ingest.venue_id];
    std::move(parsed.records.begin(), parsed.records.end(), std::back_inserter(bucket));
  }
  if (loaded.diagnostic_count > printed) {
    err << "... " << loaded.diagnostic_count - kMaxPrintedDiagnostics << " more rejected lines\n";
  }
  return loaded;
}

std::shared_ptr<const records::AliasTable> load_aliases(const RunConfig& config,
                                                       report::Fingerprint& fingerprint) {
  if (config.alias_table.empty()) return nullptr;
  const std::string content = read_file(config.alias_table);
  fingerprint.add(content);
  std::istringstream in(content);
  try {
    return std::make_shared<const records::AliasTable>(records::load_alias_table(in));
  } catch (const ParseError& e) {
    throw ParseError(e.line(), config.alias_table + ": " + e.what());
  }
}

// (venue, group) -> year -> sample, from a count table with header
// venue<TAB>group<TAB>year<TAB>x<TAB>n.
struct CountTable {
  std::vector<std::string> groups;  // first-appearance order
  std::map<std::pair<std::string, std::string>, std::map<int, stats::BinomialSample>> cells;
};

CountTable load_counts(const std::string& path, report::Fingerprint& fingerprint) {
  const std::string content = read_file(path);
  fingerprint.add(content);
  std::istringstream in(content);
  CountTable table;
  std::map<std::pair<std::string, int>, std::int64_t> totals;
  std::string line;
  std::size_t line_no = 0;
  const auto fail = [&](const std::string& why) { throw ParseError(line_no, path + ": " + why); };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::stringstream row(line);
    for (std::string f; std::getline(row, f, '\t');) fields.push_back(f);
    if (fields.size() != 5) fail("expected 5 tab-separated columns: venue, group, year, x, n");
    if (fields[0] == "venue") continue;
    int year = 0;
    std::int64_t x = 0, n = 0;
    try {
      std::size_t used = 0;
      year = std::stoi(fields[2], &used);
      if (used != fields[2].size()) fail("invalid year");
      x = std::stoll(fields[3], &used);
      if (used != fields[3].size()) fail("invalid x");
      n = std::stoll(fields[4], &used);
      if (used != fields[4].size()) fail("invalid n");
    } catch (const std::logic_error&) {
      fail("non-numeric year, x or n");
    }
    const stats::BinomialSample sample{x, n};
    if (!sample.valid()) fail("need 0 <= x <= n and n >= 1");
    const auto [it, fresh] = totals.try_emplace({fields[0], year}, n);
    if (!fresh && it->second != n) {
      fail("venue " + fields[0] + " year " + std::to_string(year) +
           " has conflicting totals across groups");
    }
    if (std::find(table.groups.begin(), table.groups.end(), fields[1]) == table.groups.end()) {
      table.groups.push_back(fields[1]);
    }
    auto& years = table.cells[{fields[0], fields[1]}];
    if (!years.emplace(year, sample).second) fail("duplicate row");
  }
  if (table.cells.empty()) throw DataError(path + ": no count rows");
  return table;
}

struct SeriesSet {
  std::string mode;
  std::vector<analysis::ShareSeries> series;  // group order, then venue order
};

std::vector<std::string> resolve_groups(const RunConfig& config, const CountTable* counts) {
  if (!counts) {
    if (config.groups.empty()) throw UsageError("at least one --group is required");
    return config.groups;
  }
  if (config.groups.empty()) return counts->groups;
  std::vector<std::string> missing;
  for (const auto& g : config.groups) {
    if (std::find(counts->groups.begin(), counts->groups.end(), g) == counts->groups.end()) {
      missing.push_back(g);
    }
  }
  if (!missing.empty()) throw DataError("unmatched group names: " + join(missing, ", "));
  return config.groups;
}

void check_groups_match(const LoadedInputs& inputs, const std::vector<std::string>& groups,
                        const RunConfig& config,
                        const std::shared_ptr<const records::AliasTable>& aliases) {
  std::vector<std::string> unmatched;
  for (const auto& group : groups) {
    const auto filter = config.filter_for(group, MatchMode::Any, aliases);
    bool any = false;
    for (const auto& [venue, recs] : inputs.venues) {
      any = std::any_of(recs.begin(), recs.end(),
                        [&](const auto& r) { return records::matches_group(r, filter); });
      if (any) break;
    }
    if (!any) unmatched.push_back(group);
  }
  if (!unmatched.empty()) {
    throw DataError("unmatched group names (no author affiliation matches): " + join(unmatched, ", "));
  }
}

std::vector<SeriesSet> build_series(const RunConfig& config, const LoadedInputs* inputs,
                                    const CountTable* counts, const std::vector<std::string>& groups,
                                    const std::shared_ptr<const records::AliasTable>& aliases) {
  std::vector<SeriesSet> sets;
  if (counts) {
    if (config.mode == "both") throw UsageError("--mode both needs record inputs, not --counts");
    SeriesSet set{config.mode, {}};
    for (const auto& group : groups) {
      for (const auto& [key, years] : counts->cells) {
        if (key.second == group) {
          set.series.push_back(analysis::build_share_series(years, group, key.first, config.z));
        }
      }
    }
    sets.push_back(std::move(set));
    return sets;
  }
  for (const auto mode : config.modes()) {
    SeriesSet set{std::string(records::to_string(mode)), {}};
    for (const auto& group : groups) {
      const auto filter = config.filter_for(group, mode, aliases);
      for (const auto& [venue, recs] : inputs->venues) {
        if (recs.empty()) continue;
        set.series.push_back(
            analysis::build_share_series(records::count_by_year(recs, filter), group, venue, config.z));
      }
    }
    sets.push_back(std::move(set));
  }
  return sets;
}

report::Metadata base_metadata(const std::string& command, const RunConfig& config) {
  report::Metadata md;
  md.set("tool", std::string("pubshare ") + kVersion);
  md.set("command", command);
  config.describe(md);
  return md;
}

// Shared loading for analyze/report.
struct Prepared {
  std::vector<SeriesSet> sets;
  report::Metadata metadata;
};

Prepared prepare(const std::string& command, const RunConfig& config,
                 const std::vector<std::string>& paths, const std::string& counts_path,
                 std::ostream& err) {
  if (!paths.empty() && !counts_path.empty()) {
    throw UsageError("give record inputs or --counts, not both");
  }
  if (paths.empty() && counts_path.empty()) throw UsageError("no inputs given");

  report::Fingerprint fingerprint;
  const auto aliases = load_aliases(config, fingerprint);
  Prepared prepared;
  if (!counts_path.empty()) {
    const CountTable counts = load_counts(counts_path, fingerprint);
    const auto groups = resolve_groups(config, &counts);
    prepared.sets = build_series(config, nullptr, &counts, groups, aliases);
    prepared.metadata = base_metadata(command, config);
    prepared.metadata.set("groups", join(groups, ","));
    prepared.metadata.set("inputs", "counts:" + counts_path);
  } else {
    const LoadedInputs inputs = load_records(paths, config, fingerprint, err);
    if (inputs.record_count == 0) throw DataError("no records in input");
    const auto groups = resolve_groups(config, nullptr);
    check_groups_match(inputs, groups, config, aliases);
    prepared.sets = build_series(config, &inputs, nullptr, groups, aliases);
    prepared.metadata = base_metadata(command, config);
    prepared.metadata.set("inputs", join(paths, ";"));
    prepared.metadata.set("rejected_lines", std::to_string(inputs.diagnostic_count));
  }
  prepared.metadata.set("input_fingerprint", fingerprint.hex());
  return prepared;
}

std::string file_name(const std::string& stem, const RunConfig& config) {
  return stem + "." + std::string(report::extension(config.format));
}

using TimeseriesBlock = std::pair<const analysis::ShareSeries*, std::vector<analysis::TimeseriesRow>>;

std::vector<TimeseriesBlock> timeseries_blocks(const SeriesSet& set, const RunConfig& config,
                                               analysis::MPolicy policy) {
  std::vector<TimeseriesBlock> blocks;
  const auto rounding = config.containment == analysis::Containment::IntegerBounds
                            ? stats::BoundRounding::Integer
                            : stats::BoundRounding::Real;
  for (const auto& s : set.series) {
    blocks.emplace_back(&s, analysis::timeseries_report(s, config.z, policy, rounding));
  }
  return blocks;
}

analysis::CoverageSummary combined_coverage(std::span<const analysis::GapTestResult> results) {
  auto summary = analysis::aggregate_coverage(results, analysis::GroupBy::GroupAndGap);
  const auto pooled = analysis::aggregate_coverage(results, analysis::GroupBy::Gap);
  summary.cells.insert(summary.cells.end(), pooled.cells.begin(), pooled.cells.end());
  return summary;
}

int cmd_analyze(const RunConfig& config, const std::vector<std::string>& paths,
                const std::string& counts_path, std::ostream& out, std::ostream& err) {
  Prepared prepared = prepare("analyze", config, paths, counts_path, err);
  ensure_directory(config.out_dir);

  std::map<std::string, analysis::CoverageSummary> by_mode;
  for (const auto& set : prepared.sets) {
    const auto experiment = analysis::run_gap_tests(set.series, config.gap_options(), config.threads);
    auto metadata = prepared.metadata;
    metadata.set("mode", set.mode);
    metadata.set("effective_max_gap",
                 experiment.max_gap ? std::to_string(*experiment.max_gap) : "none");

    const auto coverage = combined_coverage(experiment.results);
    by_mode[set.mode] = analysis::aggregate_coverage(experiment.results);
    const fs::path dir(config.out_dir);
    write_file(dir / file_name("coverage-" + set.mode, config),
               render_table(report::coverage_table(coverage), metadata, config.format));
    write_file(dir / file_name("gap-tests-" + set.mode, config),
               render_table(report::gap_detail_table(experiment.results), metadata, config.format));
    metadata.set("timeseries_m_policy", std::string(analysis::to_string(config.report_m_policy)));
    const auto blocks = timeseries_blocks(set, config, config.report_m_policy);
    write_file(dir / file_name("timeseries-" + set.mode, config),
               render_table(report::timeseries_table(blocks), metadata, config.format));

    const std::size_t skipped = static_cast<std::size_t>(std::count_if(
        experiment.results.begin(), experiment.results.end(), [](const auto& r) { return r.skipped(); }));
    out << "mode " << set.mode << ": " << set.series.size() << " series, "
        << experiment.results.size() - skipped << " tests (" << skipped << " skipped)\n";
    for (const auto& cell : coverage.cells) {
      if (cell.group != analysis::kPooledGroup) continue;
      out << "  gap " << std::setw(2) << cell.gap << ": " << std::setw(7) << cell.tests_run
          << " tests, " << percent_1dp(cell.percent_inside()) << " inside\n";
    }
  }

  if (by_mode.size() == 2) {
    auto metadata = prepared.metadata;
    metadata.set("difference", "any minus all, percentage points");
    const auto diff = analysis::coverage_difference(by_mode.at("any"), by_mode.at("all"));
    write_file(fs::path(config.out_dir) / file_name("coverage-difference", config),
               render_table(report::difference_table(diff), metadata, config.format));
  }
  return kExitOk;
}

int cmd_report(const RunConfig& config, const std::vector<std::string>& paths,
               const std::string& counts_path, std::ostream& out, std::ostream& err) {
  Prepared prepared = prepare("report", config, paths, counts_path, err);
  ensure_directory(config.out_dir);
  for (const auto& set : prepared.sets) {
    auto metadata = prepared.metadata;
    metadata.set("mode", set.mode);
    const auto blocks = timeseries_blocks(set, config, config.report_m_policy);
    write_file(fs::path(config.out_dir) / file_name("timeseries-" + set.mode, config),
               render_table(report::timeseries_table(blocks), metadata, config.format));
    for (const auto& [series, rows] : blocks) {
      out << series->group << " in " << series->venue_id << " (" << set.mode << ")\n";
      for (const auto& row : rows) {
        out << "  " << row.year << "  " << std::setw(8) << percent_1dp(row.p_percent) << "  ["
            << percent_1dp(row.lower_percent) << ", " << percent_1dp(row.upper_percent) << "]\n";
      }
    }
  }
  return kExitOk;
}

int cmd_split(const RunConfig& config, const std::string& path, std::ostream& out,
              std::ostream& err) {
  report::Fingerprint fingerprint;
  const LoadedInputs inputs = load_records({path}, config, fingerprint, err);
  const std::string venue = venue_from_path(path);
  const auto& recs = inputs.venues.begin()->second;
  if (recs.empty()) {
    err << "warning: " << path << " holds no records; no files written\n";
    return kExitOk;
  }
  ensure_directory(config.out_dir);

  report::Table manifest{"split", {"year", "file", "records"}, {}};
  for (const auto& [year, bucket] : records::split_by_year(recs)) {
    const std::string name = config.compat_names
                                 ? records::world_file_name(venue, year)
                                 : venue + "_" + std::to_string(year) + ".tsv";
    std::string content;
    if (inputs.header) content += *inputs.header + "\n";
    for (const auto& r : bucket) content += records::to_line(r) + "\n";
    write_file(fs::path(config.out_dir) / name, content);
    manifest.rows.push_back({std::int64_t{year}, name, static_cast<std::int64_t>(bucket.size())});
  }
  auto metadata = base_metadata("split", config);
  metadata.set("inputs", path);
  metadata.set("input_fingerprint", fingerprint.hex());
  write_file(fs::path(config.out_dir) / file_name("split-manifest", config),
             render_table(manifest, metadata, config.format));
  out << "split " << recs.size() << " records into " << manifest.rows.size() << " year files\n";
  return kExitOk;
}

int cmd_filter(const RunConfig& config, const std::vector<std::string>& paths, std::ostream& out,
               std::ostream& err) {
  if (config.groups.empty()) throw UsageError("at least one --group is required");
  report::Fingerprint fingerprint;
  const auto aliases = load_aliases(config, fingerprint);
  const LoadedInputs inputs = load_records(paths, config, fingerprint, err);
  if (inputs.record_count == 0) {
    err << "warning: no records in input; no files written\n";
    return kExitOk;
  }
  ensure_directory(config.out_dir);

  report::Table manifest{"filter", {"venue", "year", "group", "mode", "file", "matched", "total"}, {}};
  for (const auto& [venue, recs] : inputs.venues) {
    for (const auto& [year, bucket] : records::split_by_year(recs)) {
      for (const auto& group : config.groups) {
        for (const auto mode : config.modes()) {
          const auto filter = config.filter_for(group, mode, aliases);
          const std::string name =
              config.compat_names
                  ? records::filtered_file_name(venue, year, mode, group)
                  : venue + "_" + std::to_string(year) + "_" + std::string(records::to_string(mode)) +
                        "_" + strip_whitespace(group) + ".tsv";
          std::string content;
          if (inputs.header) content += *inputs.header + "\n";
          std::int64_t matched = 0;
          for (const auto& r : bucket) {
            if (!records::matches_group(r, filter)) continue;
            content += records::to_line(r) + "\n";
            ++matched;
          }
          write_file(fs::path(config.out_dir) / name, content);
          manifest.rows.push_back({venue, std::int64_t{year}, group,
                                   std::string(records::to_string(mode)), name, matched,
                                   static_cast<std::int64_t>(bucket.size())});
        }
      }
    }
  }
  auto metadata = base_metadata("filter", config);
  metadata.set("inputs", join(paths, ";"));
  metadata.set("input_fingerprint", fingerprint.hex());
  write_file(fs::path(config.out_dir) / file_name("filter-manifest", config),
             render_table(manifest, metadata, config.format));
  out << "wrote " << manifest.rows.size() << " filtered files\n";
  return kExitOk;
}

int cmd_simulate(const RunConfig& config, const std::string& scenario_path, std::ostream& out) {
  const std::string content = read_file(scenario_path);
  report::Fingerprint fingerprint;
  fingerprint.add(content);
  std::istringstream in(content);
  simulate::Scenario scenario;
  try {
    scenario = simulate::parse_scenario(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), scenario_path + ": " + e.what());
  }
  if (config.seed) scenario.seed = *config.seed;
  if (scenario.years < 3) throw ParseError(0, scenario_path + ": a coverage profile needs years >= 3");

  const auto profile = simulate::drift_coverage_profile(scenario, config.gap_options(), config.threads);

  ensure_directory(config.out_dir);
  auto metadata = base_metadata("simulate", config);
  metadata.set("scenario", scenario_path);
  metadata.set("scenario_name", scenario.name);
  metadata.set("years", std::to_string(scenario.years));
  metadata.set("first_year", std::to_string(scenario.first_year));
  metadata.set("replications", std::to_string(scenario.replications));
  metadata.set("seed", std::to_string(scenario.seed));
  metadata.set("input_fingerprint", fingerprint.hex());
  write_file(fs::path(config.out_dir) / file_name("coverage-profile", config),
             render_table(report::profile_table(scenario.name, profile), metadata, config.format));

  out << "scenario " << scenario.name << ": " << scenario.replications << " replications\n";
  for (const auto& cell : profile) {
    out << "  gap " << std::setw(2) << cell.gap << ": " << percent_1dp(cell.percent_inside)
        << " inside (se " << std::fixed << std::setprecision(1) << cell.standard_error << ")\n";
  }
  return kExitOk;
}

std::string yes_no(bool value) { return value ? "yes" : "no"; }

}  // namespace

std::vector<MatchMode> RunConfig::modes() const {
  if (mode == "both") return {MatchMode::Any, MatchMode::All};
  return {mode == "all" ? MatchMode::All : MatchMode::Any};
}

analysis::GapTestOptions RunConfig::gap_options() const {
  analysis::GapTestOptions options;
  options.z = z;
  options.policy = m_policy;
  options.max_gap = max_gap;
  options.min_tests_per_gap = min_tests_per_gap;
  options.interval = interval;
  options.containment = containment;
  return options;
}

records::GroupFilter RunConfig::filter_for(const std::string& group, MatchMode match_mode,
                                           std::shared_ptr<const records::AliasTable> aliases) const {
  records::GroupFilter filter;
  filter.group_name = group;
  filter.mode = match_mode;
  filter.kind = group_kind;
  filter.extraction = extraction;
  filter.affiliation_delimiter = affiliation_delimiter;
  filter.aliases = std::move(aliases);
  return filter;
}

void RunConfig::describe(report::Metadata& md) const {
  md.set("z", report::format_double(z));
  md.set("mode", mode);
  md.set("m_policy", std::string(analysis::to_string(m_policy)));
  md.set("report_m_policy", std::string(analysis::to_string(report_m_policy)));
  md.set("interval", std::string(analysis::to_string(interval)));
  md.set("containment", std::string(analysis::to_string(containment)));
  md.set("max_gap", max_gap ? std::to_string(*max_gap) : "none");
  md.set("min_tests_per_gap", std::to_string(min_tests_per_gap));
  md.set("skip_rule", "zero-in-base-year");
  md.set("groups", join(groups, ","));
  md.set("group_kind", group_kind == records::GroupKind::Country ? "country" : "institution");
  md.set("extraction",
         extraction == records::CountryExtraction::LastCommaToken ? "last-token" : "whole-field");
  md.set("alias_table", alias_table.empty() ? "none" : alias_table);
  md.set("year_col", std::to_string(ingest.year_column));
  md.set("affil_col", std::to_string(ingest.affiliation_column));
  md.set("author_delim", ingest.author_delimiter);
  md.set("affil_delim", affiliation_delimiter);
  md.set("skip_header", yes_no(ingest.skip_header));
  md.set("date_truncation", yes_no(ingest.truncate_date_at_hyphen));
  md.set("year_range", std::to_string(ingest.min_year) + "-" + std::to_string(ingest.max_year));
  md.set("format", std::string(report::to_string(format)));
  md.set("compat_names", yes_no(compat_names));
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Publication-share intervals and year-gap coverage", "pubshare"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RunConfig config;
  std::string mode = "any", report_m_policy = "same-as-base", interval = "prediction";
  std::string analyze_policy = "actual", report_policy = "same-as-base", simulate_policy = "actual";
  std::string containment = "real", format = "tsv", kind = "country", extraction = "last-token";
  int max_gap = 0;
  std::uint64_t seed = 0;
  bool no_date_truncate = false;
  std::vector<std::string> inputs;
  std::string counts_path, scenario_path;

  const auto add_ingest = [&](CLI::App* sub) {
    sub->add_option("--year-col", config.ingest.year_column, "1-based column holding the year")
        ->capture_default_str();
    sub->add_option("--affil-col", config.ingest.affiliation_column,
                    "1-based column holding author affiliations")
        ->capture_default_str();
    sub->add_option("--author-delim", config.ingest.author_delimiter,
                    "separator between authors in the affiliation column")
        ->capture_default_str();
    sub->add_flag("--skip-header", config.ingest.skip_header, "first line is a header row");
    sub->add_flag("--no-date-truncate", no_date_truncate,
                  "do not cut 'YYYY-MM-DD' year values at the first hyphen");
  };
  const auto add_output = [&](CLI::App* sub) {
    sub->add_option("--out", config.out_dir, "output directory")->capture_default_str();
    sub->add_option("--format", format, "output table format")
        ->check(CLI::IsMember({"tsv", "csv", "json"}))
        ->capture_default_str();
  };
  const auto add_groups = [&](CLI::App* sub) {
    sub->add_option("--group", config.groups, "country or institution name (repeatable)");
    sub->add_option("--mode", mode, "author matching: any, all, or both")
        ->check(CLI::IsMember({"any", "all", "both"}))
        ->capture_default_str();
    sub->add_option("--kind", kind, "group kind")
        ->check(CLI::IsMember({"country", "institution"}))
        ->capture_default_str();
    sub->add_option("--extraction", extraction, "country extraction from an affiliation")
        ->check(CLI::IsMember({"last-token", "whole-field"}))
        ->capture_default_str();
    sub->add_option("--affil-delim", config.affiliation_delimiter,
                    "separator between one author's several affiliations")
        ->capture_default_str();
    sub->add_option("--alias-table", config.alias_table, "TSV of name variant -> canonical name");
  };
  const auto add_intervals = [&](CLI::App* sub, std::string& m_policy) {
    sub->add_option("--z", config.z, "normal critical value")->capture_default_str();
    sub->add_option("--m-policy", m_policy, "future total m used for intervals")
        ->check(CLI::IsMember({"actual", "same-as-base"}))
        ->capture_default_str();
    sub->add_option("--interval", interval, "interval built from the base year")
        ->check(CLI::IsMember({"prediction", "wilson"}))
        ->capture_default_str();
    sub->add_option("--containment", containment, "real-valued or integer-rounded bounds")
        ->check(CLI::IsMember({"real", "integer"}))
        ->capture_default_str();
    sub->add_option("--max-gap", max_gap, "largest year gap to test")->check(CLI::PositiveNumber);
    sub->add_option("--min-tests-per-gap", config.min_tests_per_gap,
                    "drop the largest gap when no group reaches this many pairs there")
        ->capture_default_str();
    sub->add_option("--threads", config.threads, "worker threads (output is unaffected)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  };

  auto* split = app.add_subcommand("split", "split a record file into one file per year");
  split->add_option("input", inputs, "tab-delimited record file")->required()->expected(1);
  add_ingest(split);
  add_output(split);
  split->add_flag("--compat-names", config.compat_names, "name files '<base> <year>-world.txt'");

  auto* filter = app.add_subcommand("filter", "write per-year files of records matching a group");
  filter->add_option("inputs", inputs, "tab-delimited record files")->required();
  add_ingest(filter);
  add_output(filter);
  add_groups(filter);
  filter->add_flag("--compat-names", config.compat_names,
                   "name files '<base> <year>-world-Any<Group>.txt' / '-Only<Group>.txt'");

  auto* analyze = app.add_subcommand("analyze", "run the year-gap coverage experiment");
  analyze->add_option("inputs", inputs, "record files, one venue per file");
  analyze->add_option("--counts", counts_path, "count table: venue, group, year, x, n");
  add_ingest(analyze);
  add_output(analyze);
  add_groups(analyze);
  add_intervals(analyze, analyze_policy);
  analyze->add_option("--report-m-policy", report_m_policy, "future total for the time-series table")
      ->check(CLI::IsMember({"actual", "same-as-base"}))
      ->capture_default_str();

  auto* report_cmd = app.add_subcommand("report", "per-year shares with next-year prediction intervals");
  report_cmd->add_option("inputs", inputs, "record files, one venue per file");
  report_cmd->add_option("--counts", counts_path, "count table: venue, group, year, x, n");
  add_ingest(report_cmd);
  add_output(report_cmd);
  add_groups(report_cmd);
  add_intervals(report_cmd, report_policy);

  auto* simulate_cmd = app.add_subcommand("simulate", "coverage-by-gap profile of a synthetic scenario");
  simulate_cmd->add_option("scenario", scenario_path, "scenario file")->required();
  add_output(simulate_cmd);
  add_intervals(simulate_cmd, simulate_policy);
  simulate_cmd->add_option("--seed", seed, "override the scenario seed");

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("pubshare");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  config.mode = mode;
  config.m_policy = *analysis::parse_m_policy(
      report_cmd->parsed() ? report_policy : simulate_cmd->parsed() ? simulate_policy : analyze_policy);
  config.interval = *analysis::parse_interval_kind(interval);
  config.containment = *analysis::parse_containment(containment);
  config.format = *report::parse_format(format);
  config.group_kind = kind == "country" ? records::GroupKind::Country : records::GroupKind::Institution;
  config.extraction = extraction == "last-token" ? records::CountryExtraction::LastCommaToken
                                                 : records::CountryExtraction::WholeField;
  config.ingest.truncate_date_at_hyphen = !no_date_truncate;

  try {
    config.ingest.validate();
    if (!std::isfinite(config.z) || config.z < 0.0) throw UsageError("--z must be finite and >= 0");
    if (report_cmd->parsed()) {
      config.report_m_policy = config.m_policy;
    } else {
      config.report_m_policy = *analysis::parse_m_policy(report_m_policy);
    }
    for (auto* sub : {analyze, report_cmd, simulate_cmd}) {
      if (sub->parsed() && sub->count("--max-gap") > 0) config.max_gap = max_gap;
    }
    if (simulate_cmd->parsed() && simulate_cmd->count("--seed") > 0) config.seed = seed;

    if (split->parsed()) return cmd_split(config, inputs.front(), out, err);
    if (filter->parsed()) return cmd_filter(config, inputs, out, err);
    if (analyze->parsed()) return cmd_analyze(config, inputs, counts_path, out, err);
    if (report_cmd->parsed()) return cmd_report(config, inputs, counts_path, out, err);
    if (simulate_cmd->parsed()) return cmd_simulate(config, scenario_path, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace pubshare::cli
