#pragma once

// The `pubshare` command line: split, filter, analyze, report, simulate.

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "pubshare/analysis.hpp"
#include "pubshare/records.hpp"
#include "pubshare/report.hpp"

namespace pubshare::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitParse = 3,
  kExitIo = 4,
  kExitData = 5,  // empty input, unmatched groups
};

// Everything that shapes an output. Serialised into each output's metadata
// header, so two runs with equal configs and inputs write equal bytes.
// `threads` is deliberately not part of the header.
struct RunConfig {
  double z = stats::kDefaultZ;
  std::string mode = "any";  // any | all | both
  analysis::MPolicy m_policy = analysis::MPolicy::ActualFutureTotal;
  analysis::MPolicy report_m_policy = analysis::MPolicy::SameAsBase;
  std::optional<int> max_gap;
  int min_tests_per_gap = 72;
  analysis::IntervalKind interval = analysis::IntervalKind::Prediction;
  analysis::Containment containment = analysis::Containment::RealBounds;
  std::vector<std::string> groups;
  records::GroupKind group_kind = records::GroupKind::Country;
  records::CountryExtraction extraction = records::CountryExtraction::LastCommaToken;
  std::string alias_table;
  records::IngestConfig ingest;
  std::string affiliation_delimiter = "|";
  report::Format format = report::Format::Tsv;
  std::string out_dir = ".";
  bool compat_names = false;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;

  std::vector<records::MatchMode> modes() const;
  analysis::GapTestOptions gap_options() const;
  records::GroupFilter filter_for(const std::string& group, records::MatchMode mode,
                                  std::shared_ptr<const records::AliasTable> aliases) const;
  void describe(report::Metadata& metadata) const;
};

// `args` excludes the program name. Output files go under --out; progress
// and human-readable summaries go to `out`, diagnostics to `err`.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace pubshare::cli
