#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "floodguard/metrics.hpp"
#include "floodguard/model.hpp"

namespace floodguard {

/// Seed of one run: splitmix64(base_seed ^ splitmix64(seed_value)).
/// Ratio and defense mode are deliberately not mixed in, so every cell of a
/// sweep sees the same placement, mobility, loss and traffic draws for a
/// given seed value (paired comparison).
std::uint64_t derive_run_seed(std::uint64_t base_seed, std::uint64_t seed_value);

/// The attacker ratio sweep used for the rate tables, 0 to 0.30 by 0.05.
std::vector<double> standard_ratios();

struct SweepSpec {
  ScenarioConfig base;
  std::vector<double> ratios;
  std::vector<std::uint64_t> seeds;  // seed values, mixed with base.seed
  std::vector<bool> defense_modes{true};
  std::filesystem::path out_dir;
  bool trace = false;
  bool detect_log = false;
  bool combined_csv = false;
  unsigned jobs = 1;
};

class UsageError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  IoError(const std::filesystem::path& path, const std::string& what)
      : std::runtime_error(what + ": " + path.string()), path_(path) {}
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

struct SweepRun {
  double ratio;
  std::uint64_t seed_value;
  bool defense;
  RunReport report;
};

struct SweepResult {
  std::vector<SweepRun> runs;  // ratio-major, then defense mode, then seed
  std::map<bool, std::vector<SweepRow>> rows;  // keyed by defense mode
  std::vector<std::filesystem::path> files;    // every file written
};

/// File stem of one run, e.g. `r0.100_s3_defense-on`.
std::string run_tag(double ratio, std::uint64_t seed_value, bool defense);

/// Runs the ratio x seed x mode cross product on up to `jobs` threads and
/// writes per-run reports plus aggregate CSVs. Output bytes do not depend on
/// `jobs`. Throws UsageError, ConfigError or IoError.
SweepResult run_sweep(const SweepSpec& spec);

/// Parses `5` (seed values 0..4) or `1,2,3` (explicit values).
std::vector<std::uint64_t> parse_seed_list(const std::string& text);
/// Parses `0,0.1,0.2`.
std::vector<double> parse_ratio_list(const std::string& text);

}  // namespace floodguard
