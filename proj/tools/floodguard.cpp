// Command-line front end: single runs, seeded sweeps and preset inspection.
//
// Exit codes: 0 success, 2 usage error, 3 invalid scenario, 4 IO failure.

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "floodguard/scenario_io.hpp"
#include "floodguard/simulation.hpp"
#include "floodguard/sweep.hpp"

namespace fg = floodguard;

namespace {

constexpr int kUsage = 2;
constexpr int kConfig = 3;
constexpr int kIo = 4;

std::string help_footer() {
  std::string s = "\nScenario file keys (`key = value`, `#` comments, unknown keys rejected):\n";
  const auto defaults = fg::format_scenario(fg::ScenarioConfig{});
  for (const auto& k : fg::config_keys()) {
    s += "  ";
    s += k.name;
    s += std::string(28 - std::min<std::size_t>(27, k.name.size()), ' ');
    s += k.help;
    s += '\n';
  }
  s += "\nPresets:\n";
  for (const auto& p : fg::preset_names()) s += "  " + p + "\n";
  s += "\nExit codes: 0 ok, 2 usage error, 3 invalid scenario, 4 IO failure.\n";
  return s;
}

std::vector<bool> parse_modes(const std::string& mode) {
  if (mode == "on") return {true};
  if (mode == "off") return {false};
  if (mode == "both") return {true, false};
  throw fg::UsageError("--defense expects on, off or both");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flooding-attack defense simulator for mobile ad-hoc IoT networks"};
  app.footer(help_footer());
  app.require_subcommand(1);

  std::string scenario = "default";
  std::string seeds_text = "5";
  std::string ratios_text;
  std::string defense = "on";
  std::string out_dir = "results";
  bool trace = false, detect_log = false, combined = false;
  unsigned jobs = 1;

  auto* sweep = app.add_subcommand("sweep", "run ratio x seed x defense-mode cross product");
  sweep->add_option("--scenario", scenario, "scenario file or preset name")->capture_default_str();
  sweep->add_option("--seeds", seeds_text, "seed count n (values 0..n-1) or list a,b,c")
      ->capture_default_str();
  sweep->add_option("--ratios", ratios_text,
                    "attacker ratios, comma separated (default 0,0.05,...,0.30)");
  sweep->add_option("--defense", defense, "on, off or both")->capture_default_str();
  sweep->add_option("--out", out_dir, "output directory")->capture_default_str();
  sweep->add_flag("--trace", trace, "write a per-run event trace");
  sweep->add_flag("--detect-log", detect_log, "write a per-run detection log");
  sweep->add_flag("--combined", combined, "one metrics.csv instead of one file per metric");
  sweep->add_option("--jobs", jobs, "parallel runs")->capture_default_str();

  std::uint64_t seed_value = 0;
  std::string report_path, trace_path, detect_path;
  auto* run = app.add_subcommand("run", "single run; prints the JSON report");
  run->add_option("--scenario", scenario, "scenario file or preset name")->capture_default_str();
  run->add_option("--seed", seed_value, "seed value, mixed with the scenario seed")
      ->capture_default_str();
  run->add_option("--defense", defense, "on or off")->capture_default_str();
  run->add_option("--out", report_path, "write the report here instead of stdout");
  run->add_option("--trace", trace_path, "event trace file");
  run->add_option("--detect-log", detect_path, "detection log file");

  auto* show = app.add_subcommand("show", "print the resolved scenario in file format");
  show->add_option("--scenario", scenario, "scenario file or preset name")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    const auto cfg = fg::load_scenario(scenario);

    if (*show) {
      std::cout << fg::format_scenario(cfg);
      return 0;
    }

    if (*run) {
      auto c = cfg;
      const auto modes = parse_modes(defense);
      if (modes.size() != 1) throw fg::UsageError("run takes --defense on or off");
      c.defense = modes.front();
      std::ofstream tf, df;
      fg::RunOptions opts;
      if (!trace_path.empty()) {
        tf.open(trace_path, std::ios::binary);
        if (!tf) throw fg::IoError(trace_path, "cannot open for writing");
        opts.trace = &tf;
      }
      if (!detect_path.empty()) {
        df.open(detect_path, std::ios::binary);
        if (!df) throw fg::IoError(detect_path, "cannot open for writing");
        opts.detect_log = &df;
      }
      const auto report = fg::run_scenario(c, fg::derive_run_seed(c.seed, seed_value), opts);
      const auto text = fg::serialize_report(report);
      if (report_path.empty()) {
        std::cout << text;
      } else {
        std::ofstream f(report_path, std::ios::binary);
        if (!(f << text)) throw fg::IoError(report_path, "cannot write report");
      }
      return 0;
    }

    fg::SweepSpec spec;
    spec.base = cfg;
    spec.seeds = fg::parse_seed_list(seeds_text);
    spec.ratios = ratios_text.empty() ? fg::standard_ratios() : fg::parse_ratio_list(ratios_text);
    spec.defense_modes = parse_modes(defense);
    spec.out_dir = out_dir;
    spec.trace = trace;
    spec.detect_log = detect_log;
    spec.combined_csv = combined;
    spec.jobs = jobs;
    const auto result = fg::run_sweep(spec);
    std::cerr << "completed " << result.runs.size() << " runs, wrote " << result.files.size()
              << " files under " << out_dir << "\n";
    return 0;
  } catch (const fg::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const fg::ScenarioParseError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return kConfig;
  } catch (const fg::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kConfig;
  } catch (const fg::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::runtime_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIo;
  }
}
