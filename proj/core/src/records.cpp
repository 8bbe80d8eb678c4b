#include "pubshare/records.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <string>

#include "pubshare/errors.hpp"

namespace pubshare::records {
namespace {

constexpr std::string_view kWhitespace = " \t\r\n\v\f";
constexpr std::string_view kUtf8Bom = "\xEF\xBB\xBF";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(kWhitespace);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(kWhitespace);
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, std::string_view delim) {
  std::vector<std::string_view> out;
  if (delim.empty()) {
    out.push_back(s);
    return out;
  }
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + delim.size();
  }
  return out;
}

std::string country_token(std::string_view affiliation) {
  const auto comma = affiliation.rfind(',');
  if (comma == std::string_view::npos) return normalize_name(affiliation);
  return normalize_name(affiliation.substr(comma + 1));
}

bool has_whitespace(std::string_view s) {
  return s.find_first_of(kWhitespace) != std::string_view::npos;
}

bool affiliation_matches(std::string_view affiliation, const GroupFilter& filter) {
  const bool substring =
      filter.kind == GroupKind::Institution || filter.extraction == CountryExtraction::WholeField;
  if (substring) {
    const std::string haystack = normalize_name(affiliation);
    const std::vector<std::string> needles =
        filter.aliases ? filter.aliases->spellings(filter.group_name)
                       : std::vector<std::string>{normalize_name(filter.group_name)};
    return std::any_of(needles.begin(), needles.end(), [&](const std::string& needle) {
      return !needle.empty() && haystack.find(needle) != std::string::npos;
    });
  }
  const std::string token = country_token(affiliation);
  if (token.empty()) return false;
  if (filter.aliases) {
    return filter.aliases->resolve(token) == filter.aliases->resolve(filter.group_name);
  }
  return token == normalize_name(filter.group_name);
}

}  // namespace

void IngestConfig::validate() const {
  if (year_column == 0 || affiliation_column == 0) {
    throw InvalidInput("column indices are 1-based");
  }
  if (year_column == affiliation_column) {
    throw InvalidInput("year and affiliation columns must differ");
  }
  if (author_delimiter.empty()) throw InvalidInput("author delimiter must not be empty");
  if (min_year > max_year) throw InvalidInput("year range is inverted");
}

void GroupFilter::validate() const {
  if (trim(group_name).empty()) throw InvalidInput("group name must not be empty");
}

std::string normalize_name(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (const char c : trim(text)) {
    if (kWhitespace.find(c) != std::string_view::npos) {
      pending_space = true;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

void AliasTable::add(std::string_view variant, std::string_view canonical) {
  const std::string canon = normalize_name(canonical);
  canonical_[normalize_name(variant)] = canon;
  canonical_.try_emplace(canon, canon);
}

std::string AliasTable::resolve(std::string_view name) const {
  std::string key = normalize_name(name);
  const auto it = canonical_.find(key);
  return it == canonical_.end() ? key : it->second;
}

bool AliasTable::known(std::string_view name) const {
  return canonical_.contains(normalize_name(name));
}

std::vector<std::string> AliasTable::spellings(std::string_view name) const {
  const std::string canon = resolve(name);
  std::vector<std::string> out{canon};
  for (const auto& [variant, target] : canonical_) {
    if (target == canon && variant != canon) out.push_back(variant);
  }
  std::sort(out.begin(), out.end());
  return out;
}

AliasTable load_alias_table(std::istream& in) {
  AliasTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view content = trim(line);
    if (content.empty() || content.front() == '#') continue;
    const auto fields = split(line, "\t");
    if (fields.size() != 2) {
      throw ParseError(line_no, "alias table rows need exactly two tab-separated columns");
    }
    if (trim(fields[0]).empty() || trim(fields[1]).empty()) {
      throw ParseError(line_no, "alias table row has an empty column");
    }
    table.add(fields[0], fields[1]);
  }
  if (in.bad()) throw IoError("<alias table>", "read failure");
  return table;
}

ParseResult parse_records(std::istream& in, const IngestConfig& config) {
  config.validate();
  ParseResult result;
  const std::size_t needed = std::max(config.year_column, config.affiliation_column);

  std::string line;
  while (std::getline(in, line)) {
    const std::size_t line_no = ++result.lines_read;
    if (line_no == 1 && config.skip_header) {
      result.header = line;
      continue;
    }
    if (trim(line).empty()) {
      result.diagnostics.push_back({line_no, "empty line"});
      continue;
    }

    PublicationRecord record;
    record.venue_id = config.venue_id;
    for (const auto field : split(line, "\t")) record.raw_fields.emplace_back(field);
    if (record.raw_fields.size() < needed) {
      result.diagnostics.push_back(
          {line_no, "missing column: need " + std::to_string(needed) + ", found " +
                        std::to_string(record.raw_fields.size())});
      continue;
    }

    std::string_view year_text = record.raw_fields[config.year_column - 1];
    if (line_no == 1 && year_text.starts_with(kUtf8Bom)) year_text.remove_prefix(kUtf8Bom.size());
    year_text = trim(year_text);
    if (config.truncate_date_at_hyphen) {
      const auto hyphen = year_text.find('-');
      if (hyphen != std::string_view::npos && hyphen > 0) year_text = year_text.substr(0, hyphen);
    }
    int year = 0;
    const auto [end, ec] = std::from_chars(year_text.data(), year_text.data() + year_text.size(), year);
    if (year_text.empty() || ec != std::errc{} || end != year_text.data() + year_text.size()) {
      result.diagnostics.push_back({line_no, "invalid year '" + std::string(year_text) + "'"});
      continue;
    }
    if (year < config.min_year || year > config.max_year) {
      result.diagnostics.push_back({line_no, "year out of range: " + std::to_string(year)});
      continue;
    }
    record.year = year;

    const std::string_view affiliation_text = trim(record.raw_fields[config.affiliation_column - 1]);
    if (!affiliation_text.empty()) {
      for (const auto author : split(affiliation_text, config.author_delimiter)) {
        const auto entry = trim(author);
        if (!entry.empty()) record.affiliations.emplace_back(entry);
      }
    }
    result.records.push_back(std::move(record));
  }
  if (in.bad()) throw IoError("<input>", "read failure");
  return result;
}

std::string to_line(const PublicationRecord& record) {
  std::string out;
  for (std::size_t i = 0; i < record.raw_fields.size(); ++i) {
    if (i > 0) out.push_back('\t');
    out += record.raw_fields[i];
  }
  return out;
}

std::map<int, std::vector<PublicationRecord>> split_by_year(
    const std::vector<PublicationRecord>& records) {
  std::map<int, std::vector<PublicationRecord>> buckets;
  for (const auto& record : records) buckets[record.year].push_back(record);
  return buckets;
}

bool author_matches(std::string_view author_entry, const GroupFilter& filter) {
  for (const auto affiliation : split(author_entry, filter.affiliation_delimiter)) {
    if (affiliation_matches(affiliation, filter)) return true;
  }
  return false;
}

bool matches_group(const PublicationRecord& record, const GroupFilter& filter) {
  const auto match = [&](const std::string& entry) { return author_matches(entry, filter); };
  if (filter.mode == MatchMode::Any) {
    return std::any_of(record.affiliations.begin(), record.affiliations.end(), match);
  }
  return !record.affiliations.empty() &&
         std::all_of(record.affiliations.begin(), record.affiliations.end(), match);
}

std::map<int, stats::BinomialSample> count_by_year(const std::vector<PublicationRecord>& records,
                                                   const GroupFilter& filter) {
  filter.validate();
  std::map<int, stats::BinomialSample> counts;
  for (const auto& record : records) {
    auto& sample = counts[record.year];
    ++sample.total;
    if (matches_group(record, filter)) ++sample.count;
  }
  return counts;
}

std::string world_file_name(std::string_view base, int year) {
  if (base.empty() || has_whitespace(base)) {
    throw InvalidInput("compatible file names need a non-empty base without spaces: '" +
                       std::string(base) + "'");
  }
  return std::string(base) + " " + std::to_string(year) + "-world.txt";
}

std::string filtered_file_name(std::string_view base, int year, MatchMode mode,
                               std::string_view group) {
  std::string name = world_file_name(base, year);
  name.resize(name.size() - 4);  // ".txt"
  name += mode == MatchMode::Any ? "-Any" : "-Only";
  for (const char c : group) {
    if (kWhitespace.find(c) == std::string_view::npos) name.push_back(c);
  }
  return name + ".txt";
}

std::string_view to_string(MatchMode mode) { return mode == MatchMode::Any ? "any" : "all"; }

std::optional<MatchMode> parse_match_mode(std::string_view text) {
  if (text == "any") return MatchMode::Any;
  if (text == "all") return MatchMode::All;
  return std::nullopt;
}

}  // namespace pubshare::records
