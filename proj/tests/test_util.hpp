#pragma once

// Helpers shared by the CLI tests and the acceptance binary.

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace testutil {

namespace fs = std::filesystem;

inline std::string data_path(const std::string& name) {
  return std::string(PUBSHARE_TEST_DATA_DIR) + "/" + name;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("pubshare-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const noexcept { return path_; }
  std::string str(const std::string& child = {}) const {
    return child.empty() ? path_.string() : (path_ / child).string();
  }

 private:
  fs::path path_;
};

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

inline CliRun run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = pubshare::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

inline std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

// Sorted (relative name, contents) of every regular file under `dir`.
inline std::vector<std::pair<std::string, std::string>> snapshot(const fs::path& dir) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) {
      files.emplace_back(fs::relative(entry.path(), dir).string(), slurp(entry.path()));
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

// Synthetic Scopus-like export: title<TAB>date<TAB>affiliations, authors
// separated by ';', each author's country drawn from `countries` with the
// given weights. Some articles carry no affiliation data at all.
inline std::string synthetic_records(std::uint32_t seed, int first_year, int years, int per_year,
                                     const std::vector<std::string>& countries,
                                     const std::vector<double>& weights) {
  std::mt19937 rng(seed);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::uniform_int_distribution<int> authors(0, 5);
  std::ostringstream out;
  for (int y = 0; y < years; ++y) {
    for (int i = 0; i < per_year; ++i) {
      out << "Article " << y << '-' << i << '\t' << first_year + y << "-0" << 1 + i % 9 << "-15\t";
      const int count = authors(rng);
      for (int a = 0; a < count; ++a) {
        if (a > 0) out << "; ";
        out << "Dept " << a << ", Univ " << rng() % 50 << ", City, " << countries[pick(rng)];
      }
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace testutil
