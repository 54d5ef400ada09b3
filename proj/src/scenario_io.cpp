#include "floodguard/scenario_io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <variant>

namespace floodguard {
namespace {

using Field = std::variant<std::uint32_t ScenarioConfig::*, std::uint64_t ScenarioConfig::*,
                           double ScenarioConfig::*, bool ScenarioConfig::*>;

struct KeyBinding {
  ConfigKey key;
  Field field;
};

const std::vector<KeyBinding>& bindings() {
  using C = ScenarioConfig;
  static const std::vector<KeyBinding> table = {
      {{"node_count", "number of nodes (ids 0..N-1)"}, &C::node_count},
      {{"attacker_ratio", "fraction of flooding attackers, [0, 0.3]"}, &C::attacker_ratio},
      {{"field_width", "field width in meters"}, &C::field_width},
      {{"field_height", "field height in meters"}, &C::field_height},
      {{"radio_range", "unit-disk radio range in meters"}, &C::radio_range},
      {{"link_success_prob", "per-transmission delivery probability"}, &C::link_success_prob},
      {{"bandwidth", "channel bit rate in bits/s"}, &C::bandwidth},
      {{"cbr_rate", "CBR packets/s per flow"}, &C::cbr_rate},
      {{"cbr_flow_count", "number of CBR flows between benign nodes"}, &C::cbr_flow_count},
      {{"cbr_packet_size", "CBR payload bytes"}, &C::cbr_packet_size},
      {{"v_min", "random waypoint minimum speed, m/s"}, &C::v_min},
      {{"v_max", "random waypoint maximum speed, m/s (0 = static)"}, &C::v_max},
      {{"pause_time", "random waypoint pause, s"}, &C::pause_time},
      {{"hello_interval", "Hello beacon period, s"}, &C::hello_interval},
      {{"measurement_interval", "APT-RREQ measurement period, s"}, &C::measurement_interval},
      {{"alpha_low", "EWMA weight of the slow average"}, &C::alpha_low},
      {{"alpha_high", "EWMA weight of the fast average"}, &C::alpha_high},
      {{"apt_threshold", "RREQs per interval above which a neighbor is convicted"},
       &C::apt_threshold},
      {{"net_alarm_threshold", "distinct RREQs per window that raise the alarm"},
       &C::net_alarm_threshold},
      {{"net_alarm_window", "alarm sliding window, s"}, &C::net_alarm_window},
      {{"attacker_rreq_rate", "fake RREQs/s per attacker"}, &C::attacker_rreq_rate},
      {{"attacker_start", "time the attackers start flooding, s"}, &C::attacker_start},
      {{"attacker_duty_cycle", "active fraction of each 10 s attack period"},
       &C::attacker_duty_cycle},
      {{"lying_counters", "attackers advertise sent = 0 in Hello"}, &C::lying_counters},
      {{"require_local_confirmation", "ISOLATE honored only if locally suspected"},
       &C::require_local_confirmation},
      {{"defense", "run the flooding detector on benign nodes"}, &C::defense},
      {{"default_rtt", "RTT estimate before any RREQ->RREP sample, s"}, &C::default_rtt},
      {{"route_lifetime", "route entry lifetime, s"}, &C::route_lifetime},
      {{"mac_retries", "link-layer retransmissions for unicast frames"}, &C::mac_retries},
      {{"tx_queue_limit", "per-node transmit queue capacity, frames"}, &C::tx_queue_limit},
      {{"sim_duration", "simulated seconds"}, &C::sim_duration},
      {{"experiments", "default number of seeds per sweep cell"}, &C::experiments},
      {{"seed", "base seed; all randomness derives from it"}, &C::seed},
  };
  return table;
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

template <typename T>
std::string number_text(T v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    for (const auto& b : bindings()) k.push_back(b.key);
    return k;
  }();
  return keys;
}

ScenarioConfig parse_scenario(std::string_view text, ScenarioConfig base) {
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ScenarioParseError(line_no, "expected `key = value`");
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));

    const KeyBinding* binding = nullptr;
    for (const auto& b : bindings()) {
      if (b.key.name == key) binding = &b;
    }
    if (!binding) throw ScenarioParseError(line_no, "unknown key `" + std::string(key) + "`");
    if (!seen.emplace(key).second)
      throw ScenarioParseError(line_no, "duplicate key `" + std::string(key) + "`");

    bool ok = std::visit(
        [&](auto member) {
          auto& slot = base.*member;
          using T = std::remove_reference_t<decltype(slot)>;
          if constexpr (std::is_same_v<T, bool>) {
            if (value == "true" || value == "1" || value == "on") return slot = true, true;
            if (value == "false" || value == "0" || value == "off") return slot = false, true;
            return false;
          } else {
            return parse_number(value, slot);
          }
        },
        binding->field);
    if (!ok)
      throw ScenarioParseError(line_no, "bad value `" + std::string(value) + "` for `" +
                                            std::string(key) + "`");
  }
  return base;
}

std::string format_scenario(const ScenarioConfig& cfg) {
  std::string out;
  for (const auto& b : bindings()) {
    out += b.key.name;
    out += " = ";
    std::visit(
        [&](auto member) {
          const auto& v = cfg.*member;
          if constexpr (std::is_same_v<std::remove_cvref_t<decltype(v)>, bool>)
            out += v ? "true" : "false";
          else
            out += number_text(v);
        },
        b.field);
    out += '\n';
  }
  return out;
}

std::uint64_t config_digest(const ScenarioConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : format_scenario(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::string> preset_names() {
  return {"default", "paper-scenario-1", "paper-scenario-2", "paper-scenario-3",
          "static-lossless"};
}

bool is_preset(std::string_view name) {
  for (const auto& p : preset_names())
    if (p == name) return true;
  return false;
}

ScenarioConfig preset(std::string_view name) {
  ScenarioConfig cfg;
  if (name == "default") return cfg;
  if (name == "paper-scenario-1") return cfg.attacker_ratio = 0.10, cfg;
  if (name == "paper-scenario-2") return cfg.attacker_ratio = 0.20, cfg;
  if (name == "paper-scenario-3") return cfg.attacker_ratio = 0.30, cfg;
  if (name == "static-lossless") {
    cfg.node_count = 20;
    cfg.attacker_ratio = 0.0;
    cfg.field_width = 600.0;
    cfg.field_height = 600.0;
    cfg.link_success_prob = 1.0;
    cfg.cbr_flow_count = 5;
    cfg.v_min = 0.0;
    cfg.v_max = 0.0;
    cfg.sim_duration = 200.0;
    return cfg;
  }
  throw std::invalid_argument("unknown preset `" + std::string(name) + "`");
}

ScenarioConfig load_scenario(const std::string& preset_or_path) {
  if (is_preset(preset_or_path)) return preset(preset_or_path);
  std::ifstream in(preset_or_path);
  if (!in) throw std::runtime_error("cannot open scenario file " + preset_or_path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace floodguard
