#pragma once

// Ingestion of tab-delimited bibliographic exports and group filtering.

#include <cstddef>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pubshare/stats.hpp"

namespace pubshare::records {

struct PublicationRecord {
  std::string venue_id;
  int year = 0;
  // One entry per author, in export order. Empty when the export carries no
  // affiliation data; the article still counts toward venue totals.
  std::vector<std::string> affiliations;
  // The original line split on tabs, untouched (including any trailing '\r').
  std::vector<std::string> raw_fields;
};

enum class MatchMode { Any, All };
enum class GroupKind { Country, Institution };

// How an author's affiliation string is compared against a country name.
enum class CountryExtraction {
  LastCommaToken,  // "Dept X, Univ Y, Beijing, China" -> "china"
  WholeField,      // case-insensitive substring of the whole affiliation
};

struct IngestConfig {
  std::string venue_id;
  std::size_t year_column = 1;         // 1-based
  std::size_t affiliation_column = 2;  // 1-based
  std::string author_delimiter = ";";
  bool truncate_date_at_hyphen = true;  // "2000-03-15" -> 2000
  bool skip_header = false;
  int min_year = 1900;
  int max_year = 2100;

  // Throws InvalidInput on zero or equal column indices, an empty author
  // delimiter, or an inverted year range.
  void validate() const;
};

struct Diagnostic {
  std::size_t line = 0;
  std::string reason;
};

struct ParseResult {
  std::vector<PublicationRecord> records;
  std::vector<Diagnostic> diagnostics;
  std::optional<std::string> header;
  std::size_t lines_read = 0;
};

// Variant -> canonical name map. Keys and values are stored normalised.
class AliasTable {
 public:
  AliasTable() = default;

  void add(std::string_view variant, std::string_view canonical);
  // Canonical form of `name`, or the normalised name itself when unknown.
  std::string resolve(std::string_view name) const;
  bool known(std::string_view name) const;
  // Every normalised name (canonical included) that resolves to `name`'s
  // canonical form, sorted.
  std::vector<std::string> spellings(std::string_view name) const;
  std::size_t size() const noexcept { return canonical_.size(); }

 private:
  std::unordered_map<std::string, std::string> canonical_;
};

// Two-column TSV: variant<TAB>canonical. Blank lines and '#' comments are
// ignored. Throws ParseError with the offending line number.
AliasTable load_alias_table(std::istream& in);

struct GroupFilter {
  std::string group_name;
  MatchMode mode = MatchMode::Any;
  GroupKind kind = GroupKind::Country;
  CountryExtraction extraction = CountryExtraction::LastCommaToken;
  // Separates several affiliations held by one author; the author counts
  // toward every group named in any of them.
  std::string affiliation_delimiter = "|";
  std::shared_ptr<const AliasTable> aliases;

  void validate() const;
};

// Lower-case ASCII, trim, and collapse internal whitespace runs to one space.
std::string normalize_name(std::string_view text);

// Every line of `in` yields a record or a diagnostic (the optional header row
// excepted). Throws IoError if the stream fails for a reason other than EOF.
ParseResult parse_records(std::istream& in, const IngestConfig& config);

// Joins raw_fields with tabs; reproduces the accepted input line.
std::string to_line(const PublicationRecord& record);

std::map<int, std::vector<PublicationRecord>> split_by_year(
    const std::vector<PublicationRecord>& records);

// True when one of the author's affiliations names the group.
bool author_matches(std::string_view author_entry, const GroupFilter& filter);

// Any: at least one author matches. All: at least one author and every
// author matches.
bool matches_group(const PublicationRecord& record, const GroupFilter& filter);

// Per year: total = all records that year, count = records matching the
// filter. Years without records are absent.
std::map<int, stats::BinomialSample> count_by_year(const std::vector<PublicationRecord>& records,
                                                   const GroupFilter& filter);

// File names understood by Webometric Analyst style workflows:
// "<base> <year>-world.txt" and "<base> <year>-world-Any<Group>.txt" /
// "<base> <year>-world-Only<Group>.txt". Whitespace is stripped from the group
// part. Throws InvalidInput if `base` contains whitespace.
std::string world_file_name(std::string_view base, int year);
std::string filtered_file_name(std::string_view base, int year, MatchMode mode,
                               std::string_view group);

std::string_view to_string(MatchMode mode);
std::optional<MatchMode> parse_match_mode(std::string_view text);

}  // namespace pubshare::records
