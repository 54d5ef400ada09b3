#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "floodguard/defense.hpp"
#include "floodguard/scenario_io.hpp"
#include "floodguard/simulation.hpp"
#include "floodguard/sweep.hpp"

namespace py = pybind11;
namespace fg = floodguard;

namespace {

fg::ScenarioConfig resolve(const std::string& scenario, const std::string& overrides) {
  auto cfg = fg::load_scenario(scenario);
  return overrides.empty() ? cfg : fg::parse_scenario(overrides, cfg);
}

py::dict run(const std::string& scenario, std::uint64_t seed, std::optional<bool> defense,
             const std::string& overrides, bool logs) {
  auto cfg = resolve(scenario, overrides);
  if (defense) cfg.defense = *defense;
  std::ostringstream trace, detect;
  fg::RunReport report;
  {
    py::gil_scoped_release nogil;
    report = fg::run_scenario(cfg, fg::derive_run_seed(cfg.seed, seed),
                              logs ? fg::RunOptions{&trace, &detect} : fg::RunOptions{});
  }
  py::dict out;
  out["report"] = fg::serialize_report(report);
  if (logs) {
    out["trace"] = trace.str();
    out["detect_log"] = detect.str();
  }
  return out;
}

std::vector<std::string> sweep(const std::string& scenario, const std::string& seeds,
                               std::optional<std::vector<double>> ratios, const std::string& defense,
                               const std::filesystem::path& out, const std::string& overrides,
                               bool trace, bool detect_log, bool combined, unsigned jobs) {
  fg::SweepSpec spec;
  spec.base = resolve(scenario, overrides);
  spec.seeds = fg::parse_seed_list(seeds);
  spec.ratios = ratios ? *ratios : fg::standard_ratios();
  if (defense == "on") spec.defense_modes = {true};
  else if (defense == "off") spec.defense_modes = {false};
  else if (defense == "both") spec.defense_modes = {true, false};
  else throw fg::UsageError("defense expects on, off or both");
  spec.out_dir = out;
  spec.trace = trace;
  spec.detect_log = detect_log;
  spec.combined_csv = combined;
  spec.jobs = jobs;
  fg::SweepResult result;
  {
    py::gil_scoped_release nogil;
    result = fg::run_sweep(spec);
  }
  std::vector<std::string> files;
  for (const auto& f : result.files) files.push_back(f.string());
  return files;
}

}  // namespace

PYBIND11_MODULE(_floodguard, m) {
  m.doc() = "Flooding-attack defense simulator core";

  py::register_exception<fg::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<fg::ScenarioParseError>(m, "ScenarioParseError", PyExc_ValueError);
  py::register_exception<fg::UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<fg::IoError>(m, "IoError", PyExc_OSError);

  m.def("preset_names", &fg::preset_names);
  m.def("show", [](const std::string& scenario, const std::string& overrides) {
    return fg::format_scenario(resolve(scenario, overrides));
  }, py::arg("scenario") = "default", py::arg("overrides") = "");
  m.def("validate", [](const std::string& scenario, const std::string& overrides) {
    return fg::validate_config(resolve(scenario, overrides));
  }, py::arg("scenario") = "default", py::arg("overrides") = "");
  m.def("derive_run_seed", &fg::derive_run_seed, py::arg("base_seed"), py::arg("seed_value"));
  m.def("run", &run, py::arg("scenario") = "default", py::arg("seed") = 0,
        py::arg("defense") = py::none(), py::arg("overrides") = "", py::arg("logs") = false);
  m.def("sweep", &sweep, py::arg("scenario") = "default", py::arg("seeds") = "5",
        py::arg("ratios") = py::none(), py::arg("defense") = "on", py::arg("out") = "results",
        py::arg("overrides") = "", py::arg("trace") = false, py::arg("detect_log") = false,
        py::arg("combined") = false, py::arg("jobs") = 1);
  m.def("ewma", [](const std::vector<double>& values, double alpha) {
    fg::Ewma e;
    std::vector<double> out;
    for (double v : values) out.push_back(fg::ewma_update(e, v, alpha));
    return out;
  }, py::arg("values"), py::arg("alpha"));
}
