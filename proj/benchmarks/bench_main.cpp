#include <benchmark/benchmark.h>

#include <sstream>
#include <string>

#include "pubshare/analysis.hpp"
#include "pubshare/records.hpp"
#include "pubshare/simulate.hpp"
#include "pubshare/stats.hpp"

namespace {

using namespace pubshare;

void BM_Wilson(benchmark::State& state) {
  std::int64_t x = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(stats::wilson_interval({x, 2201}));
    x = (x + 1) % 2202;
  }
}
BENCHMARK(BM_Wilson);

void BM_CountPrediction(benchmark::State& state) {
  std::int64_t x = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(stats::count_prediction_interval({x, 2201}, {1957, 1.96}));
    x = (x + 1) % 2202;
  }
}
BENCHMARK(BM_CountPrediction);

void BM_GapTests(benchmark::State& state) {
  std::map<int, stats::BinomialSample> counts;
  for (int y = 0; y < state.range(0); ++y) counts[1996 + y] = {10 + y, 2000 + 13 * y};
  const auto series = analysis::build_share_series(counts, "G", "V");
  for (auto _ : state) benchmark::DoNotOptimize(analysis::gap_tests(series, {}));
  state.SetItemsProcessed(state.iterations() * state.range(0) * (state.range(0) - 1) / 2);
}
BENCHMARK(BM_GapTests)->Arg(21)->Arg(60);

void BM_JointCoverage(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate::joint_coverage({2000, 2000, 0.05, 1.96, 1000, 42}));
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_JointCoverage)->Unit(benchmark::kMillisecond);

void BM_ParseRecords(benchmark::State& state) {
  std::string text;
  for (int i = 0; i < 5000; ++i) {
    text += "Title " + std::to_string(i) + "\t" + std::to_string(1996 + i % 21) +
            "-05-01\tDept A, Univ B, Beijing, China; Dept C, Univ D, Boston, USA\n";
  }
  records::IngestConfig config;
  config.year_column = 2;
  config.affiliation_column = 3;
  for (auto _ : state) {
    std::istringstream in(text);
    benchmark::DoNotOptimize(records::parse_records(in, config));
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_ParseRecords)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
