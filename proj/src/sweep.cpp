#include "floodguard/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <thread>

#include "floodguard/engine.hpp"
#include "floodguard/simulation.hpp"

namespace floodguard {

std::uint64_t derive_run_seed(std::uint64_t base_seed, std::uint64_t seed_value) {
  return splitmix64(base_seed ^ splitmix64(seed_value));
}

std::vector<double> standard_ratios() { return {0.0, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30}; }

std::string run_tag(double ratio, std::uint64_t seed_value, bool defense) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "r%.3f_s%llu_defense-%s", ratio,
                static_cast<unsigned long long>(seed_value), defense ? "on" : "off");
  return buf;
}

namespace {

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content,
                std::vector<std::filesystem::path>& written) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(path, "cannot open for writing");
  f << content;
  if (!f) throw IoError(path, "write failed");
  written.push_back(path);
}

struct Job {
  double ratio;
  std::uint64_t seed_value;
  bool defense;
};

}  // namespace

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  auto parts = split(text);
  std::vector<std::uint64_t> out;
  for (const auto& p : parts) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), v);
    if (p.empty() || ec != std::errc{} || ptr != p.data() + p.size())
      throw UsageError("bad seed `" + p + "`");
    out.push_back(v);
  }
  if (out.size() == 1 && text.find(',') == std::string::npos) {
    const auto n = out.front();
    out.clear();
    for (std::uint64_t i = 0; i < n; ++i) out.push_back(i);
  }
  return out;
}

std::vector<double> parse_ratio_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& p : split(text)) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), v);
    if (p.empty() || ec != std::errc{} || ptr != p.data() + p.size())
      throw UsageError("bad ratio `" + p + "`");
    out.push_back(v);
  }
  return out;
}

SweepResult run_sweep(const SweepSpec& spec) {
  if (spec.seeds.empty()) throw UsageError("seed list is empty");
  if (spec.ratios.empty()) throw UsageError("ratio list is empty");
  if (spec.defense_modes.empty()) throw UsageError("no defense mode selected");

  auto ratios = spec.ratios;
  std::sort(ratios.begin(), ratios.end());
  ratios.erase(std::unique(ratios.begin(), ratios.end()), ratios.end());

  std::vector<Job> jobs;
  for (double ratio : ratios) {
    auto cfg = spec.base;
    cfg.attacker_ratio = ratio;
    if (auto v = validate_config(cfg); !v.empty()) throw ConfigError(std::move(v));
    for (bool mode : spec.defense_modes)
      for (auto s : spec.seeds) jobs.push_back({ratio, s, mode});
  }

  namespace fs = std::filesystem;
  std::error_code ec;
  const fs::path runs_dir = spec.out_dir / "runs";
  fs::create_directories(runs_dir, ec);
  if (ec) throw IoError(runs_dir, "cannot create directory");

  std::vector<std::optional<RunReport>> reports(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const auto& job = jobs[i];
        auto cfg = spec.base;
        cfg.attacker_ratio = job.ratio;
        cfg.defense = job.defense;
        const auto tag = run_tag(job.ratio, job.seed_value, job.defense);
        std::ofstream trace, detect;
        RunOptions opts;
        if (spec.trace) {
          trace.open(runs_dir / (tag + ".trace.tsv"), std::ios::binary | std::ios::trunc);
          if (!trace) throw IoError(runs_dir / (tag + ".trace.tsv"), "cannot open for writing");
          opts.trace = &trace;
        }
        if (spec.detect_log) {
          detect.open(runs_dir / (tag + ".detect.tsv"), std::ios::binary | std::ios::trunc);
          if (!detect) throw IoError(runs_dir / (tag + ".detect.tsv"), "cannot open for writing");
          opts.detect_log = &detect;
        }
        reports[i] = run_scenario(cfg, derive_run_seed(spec.base.seed, job.seed_value), opts);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };

  const unsigned n_threads = std::max(1u, std::min<unsigned>(spec.jobs, jobs.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  SweepResult result;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& job = jobs[i];
    const auto tag = run_tag(job.ratio, job.seed_value, job.defense);
    if (spec.trace) result.files.push_back(runs_dir / (tag + ".trace.tsv"));
    if (spec.detect_log) result.files.push_back(runs_dir / (tag + ".detect.tsv"));
    write_file(runs_dir / (tag + ".json"), serialize_report(*reports[i]), result.files);
    result.runs.push_back({job.ratio, job.seed_value, job.defense, std::move(*reports[i])});
  }

  const bool both = spec.defense_modes.size() > 1;
  for (bool mode : spec.defense_modes) {
    std::map<double, std::vector<RunReport>> by_ratio;
    for (const auto& run : result.runs)
      if (run.defense == mode) by_ratio[run.ratio].push_back(run.report);
    auto rows = aggregate_sweep(by_ratio);

    fs::path dir = both ? spec.out_dir / (mode ? "defense-on" : "defense-off") : spec.out_dir;
    fs::create_directories(dir, ec);
    if (ec) throw IoError(dir, "cannot create directory");
    if (spec.combined_csv) {
      write_file(dir / "metrics.csv", sweep_csv(rows), result.files);
    } else {
      for (Metric m : kAllMetrics)
        write_file(dir / (std::string(to_string(m)) + ".csv"), sweep_csv(rows, m), result.files);
    }
    result.rows[mode] = std::move(rows);
  }
  return result;
}

}  // namespace floodguard
