#pragma once

// Tabular outputs (TSV / CSV / JSON) with a metadata header block.

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "pubshare/analysis.hpp"
#include "pubshare/simulate.hpp"

namespace pubshare::report {

enum class Format { Tsv, Csv, Json };

std::string_view to_string(Format format);
std::string_view extension(Format format);
std::optional<Format> parse_format(std::string_view text);

// monostate renders as an empty cell (TSV/CSV) or null (JSON).
using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

// Ordered key/value pairs written ahead of the table.
class Metadata {
 public:
  void set(std::string key, std::string value);
  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept {
    return entries_;
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// TSV and CSV start with "# key: value" lines; JSON carries a "metadata"
// object. Doubles use the shortest representation that round-trips.
void write_table(std::ostream& out, const Table& table, const Metadata& metadata, Format format);

std::string format_double(double value);

// 64-bit FNV-1a over a sequence of byte strings.
class Fingerprint {
 public:
  void add(std::string_view bytes) noexcept;
  std::uint64_t value() const noexcept { return hash_; }
  std::string hex() const;

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

// Columns: group, gap, tests, inside, percent.
Table coverage_table(const analysis::CoverageSummary& summary);

// Columns: group, venue, base_year, test_year, gap, base_x, base_n, test_x,
// test_n, observed, lower, upper, inside, skipped, skip_reason.
Table gap_detail_table(std::span<const analysis::GapTestResult> results);

// Columns: group, venue, year, x, n, p_percent, lower_percent, upper_percent.
Table timeseries_table(
    std::span<const std::pair<const analysis::ShareSeries*, std::vector<analysis::TimeseriesRow>>> series);

// Columns: group, gap, difference.
Table difference_table(std::span<const analysis::CoverageDifference> differences);

// Same columns as coverage_table; `group` holds the scenario name.
Table profile_table(std::string_view scenario_name, std::span<const simulate::GapCoverage> profile);

}  // namespace pubshare::report
