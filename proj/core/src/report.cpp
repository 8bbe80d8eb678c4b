#include "pubshare/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "json.hpp"

namespace pubshare::report {
namespace {

std::string sanitize(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

std::string csv_quote(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string out = "\"";
  for (const char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string render(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return {};
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else {
          return sanitize(v);
        }
      },
      cell);
}

nlohmann::ordered_json to_json(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return nullptr;
          return v;
        } else {
          return v;
        }
      },
      cell);
}

void write_delimited(std::ostream& out, const Table& table, const Metadata& metadata, char sep) {
  const auto field = [&](const std::string& text) { return sep == ',' ? csv_quote(text) : text; };
  for (const auto& [key, value] : metadata.entries()) {
    out << "# " << sanitize(key) << ": " << sanitize(value) << '\n';
  }
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i > 0) out << sep;
    out << field(sanitize(table.columns[i]));
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << sep;
      out << field(render(row[i]));
    }
    out << '\n';
  }
}

Cell optional_cell(const std::optional<double>& value) {
  return value ? Cell{*value} : Cell{};
}

}  // namespace

std::string_view to_string(Format format) {
  switch (format) {
    case Format::Tsv: return "tsv";
    case Format::Csv: return "csv";
    case Format::Json: return "json";
  }
  return "tsv";
}

std::string_view extension(Format format) { return to_string(format); }

std::optional<Format> parse_format(std::string_view text) {
  if (text == "tsv") return Format::Tsv;
  if (text == "csv") return Format::Csv;
  if (text == "json") return Format::Json;
  return std::nullopt;
}

void Metadata::set(std::string key, std::string value) {
  for (auto& entry : entries_) {
    if (entry.first == key) {
      entry.second = std::move(value);
      return;
    }
  }
  entries_.emplace_back(std::move(key), std::move(value));
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return ec == std::errc{} ? std::string(buffer, end) : std::string("nan");
}

void write_table(std::ostream& out, const Table& table, const Metadata& metadata, Format format) {
  if (format == Format::Json) {
    nlohmann::ordered_json doc;
    doc["metadata"] = nlohmann::ordered_json::object();
    for (const auto& [key, value] : metadata.entries()) doc["metadata"][key] = value;
    doc["table"] = table.name;
    doc["columns"] = table.columns;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
      auto cells = nlohmann::ordered_json::array();
      for (const auto& cell : row) cells.push_back(to_json(cell));
      rows.push_back(std::move(cells));
    }
    doc["rows"] = std::move(rows);
    out << doc.dump(2) << '\n';
    return;
  }
  write_delimited(out, table, metadata, format == Format::Csv ? ',' : '\t');
}

void Fingerprint::add(std::string_view bytes) noexcept {
  for (const char c : bytes) {
    hash_ ^= static_cast<unsigned char>(c);
    hash_ *= 0x100000001b3ULL;
  }
}

std::string Fingerprint::hex() const {
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash_));
  return buffer;
}

Table coverage_table(const analysis::CoverageSummary& summary) {
  Table table{"coverage", {"group", "gap", "tests", "inside", "percent"}, {}};
  for (const auto& cell : summary.cells) {
    table.rows.push_back({cell.group, std::int64_t{cell.gap}, cell.tests_run, cell.tests_inside,
                          cell.percent_inside()});
  }
  return table;
}

Table gap_detail_table(std::span<const analysis::GapTestResult> results) {
  Table table{"gap-tests",
              {"group", "venue", "base_year", "test_year", "gap", "base_x", "base_n", "test_x",
               "test_n", "observed", "lower", "upper", "inside", "skipped", "skip_reason"},
              {}};
  for (const auto& r : results) {
    table.rows.push_back({r.group, r.venue_id, std::int64_t{r.base_year}, std::int64_t{r.test_year},
                          std::int64_t{r.gap}, r.base.count, r.base.total, r.test.count, r.test.total,
                          r.observed,
                          optional_cell(r.interval ? std::optional(r.interval->lower) : std::nullopt),
                          optional_cell(r.interval ? std::optional(r.interval->upper) : std::nullopt),
                          std::int64_t{r.inside ? 1 : 0}, std::int64_t{r.skipped() ? 1 : 0},
                          std::string(analysis::to_string(r.skip))});
  }
  return table;
}

Table timeseries_table(
    std::span<const std::pair<const analysis::ShareSeries*, std::vector<analysis::TimeseriesRow>>> series) {
  Table table{"timeseries",
              {"group", "venue", "year", "x", "n", "p_percent", "lower_percent", "upper_percent"},
              {}};
  for (const auto& [s, rows] : series) {
    for (const auto& row : rows) {
      table.rows.push_back({s->group, s->venue_id, std::int64_t{row.year}, row.count, row.total,
                            row.p_percent, row.lower_percent, row.upper_percent});
    }
  }
  return table;
}

Table difference_table(std::span<const analysis::CoverageDifference> differences) {
  Table table{"coverage-difference", {"group", "gap", "difference"}, {}};
  for (const auto& d : differences) {
    table.rows.push_back({d.group, std::int64_t{d.gap}, optional_cell(d.percent_points)});
  }
  return table;
}

Table profile_table(std::string_view scenario_name, std::span<const simulate::GapCoverage> profile) {
  Table table{"coverage", {"group", "gap", "tests", "inside", "percent"}, {}};
  for (const auto& cell : profile) {
    table.rows.push_back({std::string(scenario_name), std::int64_t{cell.gap}, cell.tests_run,
                          cell.tests_inside, cell.percent_inside});
  }
  return table;
}

}  // namespace pubshare::report
