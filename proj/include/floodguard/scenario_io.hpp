#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "floodguard/model.hpp"

namespace floodguard {

class ScenarioParseError : public std::runtime_error {
 public:
  ScenarioParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct ConfigKey {
  std::string_view name;
  std::string_view help;
};

/// All keys accepted in a scenario file, in canonical order.
const std::vector<ConfigKey>& config_keys();

/// Parses `key = value` lines over `base`. `#` starts a comment. Unknown keys,
/// duplicate keys and malformed values throw ScenarioParseError.
ScenarioConfig parse_scenario(std::string_view text, ScenarioConfig base = {});

/// Canonical text form; parse_scenario(format_scenario(c)) == c.
std::string format_scenario(const ScenarioConfig& cfg);

/// 64-bit FNV-1a of the canonical text form.
std::uint64_t config_digest(const ScenarioConfig& cfg);

std::vector<std::string> preset_names();
bool is_preset(std::string_view name);
/// Throws std::invalid_argument for unknown names.
ScenarioConfig preset(std::string_view name);

/// Preset name or path to a scenario file. Throws std::runtime_error on IO
/// failure and ScenarioParseError on bad content.
ScenarioConfig load_scenario(const std::string& preset_or_path);

}  // namespace floodguard
