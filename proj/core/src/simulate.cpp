#include "pubshare/simulate.hpp"

#include <boost/random/binomial_distribution.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string_view>
#include <unordered_map>

#include "pubshare/errors.hpp"
#include "pubshare/parallel.hpp"

namespace pubshare::simulate {
namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\v\f";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(ws) - first + 1);
}

template <typename T>
T parse_number(std::string_view text, std::size_t line, std::string_view key) {
  text = trim(text);
  T value{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || end != text.data() + text.size()) {
    throw ParseError(line, "invalid value for '" + std::string(key) + "': '" + std::string(text) + "'");
  }
  return value;
}

struct Entry {
  std::string value;
  std::size_t line = 0;
};

}  // namespace

std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
  std::uint64_t z = master_seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::int64_t draw_binomial(Rng& rng, std::int64_t trials, double p) {
  if (trials < 0) throw InvalidInput("binomial trials must be >= 0");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("binomial probability must lie in [0, 1]");
  if (trials == 0 || p == 0.0) return 0;
  if (p == 1.0) return trials;
  boost::random::binomial_distribution<std::int64_t, double> dist(trials, p);
  return dist(rng);
}

std::int64_t Scenario::total_at(int index) const {
  return totals.size() == 1 ? totals.front() : totals.at(static_cast<std::size_t>(index));
}

double Scenario::probability_at(int index) const {
  if (shape == ProbabilityShape::Constant || years == 1) return p_start;
  const double t = static_cast<double>(index) / static_cast<double>(years - 1);
  return p_start + (p_end - p_start) * t;
}

void Scenario::validate() const {
  if (years < 1) throw InvalidInput("scenario needs at least one year");
  if (totals.size() != 1 && totals.size() != static_cast<std::size_t>(years)) {
    throw InvalidInput("scenario totals must have 1 or `years` entries");
  }
  for (const auto t : totals) {
    if (t < 1) throw InvalidInput("scenario totals must be >= 1");
  }
  const auto bad_p = [](double p) { return !(p >= 0.0 && p <= 1.0); };
  if (bad_p(p_start) || (shape == ProbabilityShape::Linear && bad_p(p_end))) {
    throw InvalidInput("scenario probabilities must lie in [0, 1]");
  }
  if (replications < 1) throw InvalidInput("scenario replications must be >= 1");
}

Scenario parse_scenario(std::istream& in) {
  static const std::vector<std::string_view> known = {
      "name", "years", "first_year", "total", "totals", "p", "p_start", "p_end", "replications", "seed"};

  std::unordered_map<std::string, Entry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view content = line;
    if (const auto hash = content.find('#'); hash != std::string_view::npos) {
      content = content.substr(0, hash);
    }
    content = trim(content);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
    const std::string key(trim(content.substr(0, eq)));
    const std::string_view value = trim(content.substr(eq + 1));
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ParseError(line_no, "unknown key '" + key + "'");
    }
    if (value.empty()) throw ParseError(line_no, "empty value for '" + key + "'");
    if (!entries.try_emplace(key, Entry{std::string(value), line_no}).second) {
      throw ParseError(line_no, "duplicate key '" + key + "'");
    }
  }
  if (in.bad()) throw IoError("<scenario>", "read failure");

  const auto has = [&](const char* key) { return entries.contains(key); };
  const auto at = [&](const char* key) -> const Entry& { return entries.at(key); };

  Scenario s;
  if (has("name")) s.name = at("name").value;
  if (!has("years")) throw ParseError(0, "missing key 'years'");
  s.years = parse_number<int>(at("years").value, at("years").line, "years");
  if (s.years < 1) throw ParseError(at("years").line, "years must be >= 1");
  if (has("first_year")) {
    s.first_year = parse_number<int>(at("first_year").value, at("first_year").line, "first_year");
  }

  if (has("total") == has("totals")) {
    throw ParseError(has("total") ? at("totals").line : 0, "give exactly one of 'total' or 'totals'");
  }
  s.totals.clear();
  if (has("total")) {
    s.totals.push_back(parse_number<std::int64_t>(at("total").value, at("total").line, "total"));
  } else {
    std::string_view list = at("totals").value;
    while (true) {
      const auto comma = list.find(',');
      s.totals.push_back(parse_number<std::int64_t>(list.substr(0, comma), at("totals").line, "totals"));
      if (comma == std::string_view::npos) break;
      list.remove_prefix(comma + 1);
    }
    if (s.totals.size() != static_cast<std::size_t>(s.years)) {
      throw ParseError(at("totals").line, "totals lists " + std::to_string(s.totals.size()) +
                                              " values for " + std::to_string(s.years) + " years");
    }
  }
  const std::size_t totals_line = has("total") ? at("total").line : at("totals").line;
  for (const auto t : s.totals) {
    if (t < 1) throw ParseError(totals_line, "totals must be >= 1");
  }

  const auto probability = [&](const char* key) {
    const double p = parse_number<double>(at(key).value, at(key).line, key);
    if (!(p >= 0.0 && p <= 1.0)) throw ParseError(at(key).line, std::string(key) + " must lie in [0, 1]");
    return p;
  };
  if (has("p")) {
    if (has("p_start") || has("p_end")) {
      throw ParseError(at("p").line, "'p' cannot be combined with 'p_start'/'p_end'");
    }
    s.shape = ProbabilityShape::Constant;
    s.p_start = s.p_end = probability("p");
  } else if (has("p_start") && has("p_end")) {
    s.shape = ProbabilityShape::Linear;
    s.p_start = probability("p_start");
    s.p_end = probability("p_end");
  } else {
    throw ParseError(has("p_start") ? at("p_start").line : has("p_end") ? at("p_end").line : 0,
                     "give 'p', or both 'p_start' and 'p_end'");
  }

  if (has("replications")) {
    s.replications =
        parse_number<std::int64_t>(at("replications").value, at("replications").line, "replications");
    if (s.replications < 1) throw ParseError(at("replications").line, "replications must be >= 1");
  }
  if (has("seed")) s.seed = parse_number<std::uint64_t>(at("seed").value, at("seed").line, "seed");
  return s;
}

SyntheticSeries simulate_replication(const Scenario& scenario, std::int64_t replication) {
  Rng rng(substream_seed(scenario.seed, static_cast<std::uint64_t>(replication)));
  SyntheticSeries series;
  for (int i = 0; i < scenario.years; ++i) {
    const std::int64_t total = scenario.total_at(i);
    series[scenario.first_year + i] = {draw_binomial(rng, total, scenario.probability_at(i)), total};
  }
  return series;
}

std::vector<SyntheticSeries> simulate_series(const Scenario& scenario, unsigned threads) {
  scenario.validate();
  std::vector<SyntheticSeries> out(static_cast<std::size_t>(scenario.replications));
  parallel_for(out.size(), threads, [&](std::size_t r) {
    out[r] = simulate_replication(scenario, static_cast<std::int64_t>(r));
  });
  return out;
}

CoverageEstimate joint_coverage(const JointCoverageConfig& config, unsigned threads) {
  if (config.n < 1 || config.m < 1) throw InvalidInput("joint coverage needs n, m >= 1");
  if (!(config.p >= 0.0 && config.p <= 1.0)) throw InvalidInput("p must lie in [0, 1]");
  if (config.replications < 1) throw InvalidInput("replications must be >= 1");

  std::vector<char> inside(static_cast<std::size_t>(config.replications), 0);
  parallel_for(inside.size(), threads, [&](std::size_t r) {
    Rng rng(substream_seed(config.seed, r));
    const std::int64_t x = draw_binomial(rng, config.n, config.p);
    const auto interval = stats::count_prediction_interval({x, config.n}, {config.m, config.z});
    const std::int64_t y = draw_binomial(rng, config.m, config.p);
    inside[r] = interval.contains(y) ? 1 : 0;
  });

  std::int64_t hits = 0;
  for (const char c : inside) hits += c;
  CoverageEstimate est;
  est.nominal = stats::nominal_level(config.z);
  est.replications = config.replications;
  est.empirical = static_cast<double>(hits) / static_cast<double>(config.replications);
  est.standard_error =
      std::sqrt(est.empirical * (1.0 - est.empirical) / static_cast<double>(config.replications));
  return est;
}

std::vector<GapCoverage> drift_coverage_profile(const Scenario& scenario,
                                                const analysis::GapTestOptions& options,
                                                unsigned threads) {
  scenario.validate();
  if (scenario.years < 3) throw InvalidInput("a coverage profile needs at least 3 years");

  const std::size_t gaps = static_cast<std::size_t>(scenario.years);  // index = gap
  struct PerRep {
    std::vector<std::int64_t> run, inside;
  };
  std::vector<PerRep> reps(static_cast<std::size_t>(scenario.replications));

  parallel_for(reps.size(), threads, [&](std::size_t r) {
    const auto counts = simulate_replication(scenario, static_cast<std::int64_t>(r));
    const auto series = analysis::build_share_series(counts, scenario.name, "synthetic", options.z);
    PerRep tally{std::vector<std::int64_t>(gaps, 0), std::vector<std::int64_t>(gaps, 0)};
    for (const auto& result : analysis::gap_tests(series, options)) {
      if (result.skipped()) continue;
      ++tally.run[static_cast<std::size_t>(result.gap)];
      if (result.inside) ++tally.inside[static_cast<std::size_t>(result.gap)];
    }
    reps[r] = std::move(tally);
  });

  std::vector<GapCoverage> profile;
  for (std::size_t gap = 1; gap < gaps; ++gap) {
    GapCoverage cell;
    cell.gap = static_cast<int>(gap);
    double sum = 0.0, sum_sq = 0.0;
    std::int64_t contributing = 0;
    for (const auto& rep : reps) {
      if (rep.run[gap] == 0) continue;
      cell.tests_run += rep.run[gap];
      cell.tests_inside += rep.inside[gap];
      const double f = 100.0 * static_cast<double>(rep.inside[gap]) / static_cast<double>(rep.run[gap]);
      sum += f;
      sum_sq += f * f;
      ++contributing;
    }
    if (cell.tests_run == 0) continue;
    cell.percent_inside =
        100.0 * static_cast<double>(cell.tests_inside) / static_cast<double>(cell.tests_run);
    if (contributing >= 2) {
      const double k = static_cast<double>(contributing);
      const double variance = std::max(0.0, (sum_sq - sum * sum / k) / (k - 1.0));
      cell.standard_error = std::sqrt(variance / k);
    }
    profile.push_back(cell);
  }
  return profile;
}

}  // namespace pubshare::simulate
