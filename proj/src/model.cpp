#include "floodguard/model.hpp"

#include <cmath>

namespace floodguard {

double distance(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

std::uint32_t ScenarioConfig::attacker_count() const {
  return static_cast<std::uint32_t>(std::llround(node_count * attacker_ratio));
}

std::vector<std::string> validate_config(const ScenarioConfig& cfg) {
  std::vector<std::string> out;
  auto check = [&out](bool ok, const char* msg) {
    if (!ok) out.emplace_back(msg);
  };
  auto is_fraction = [](double v) { return v > 0.0 && v <= 1.0; };

  check(cfg.node_count >= 2, "node_count >= 2");
  check(cfg.attacker_ratio >= 0.0 && cfg.attacker_ratio <= 0.3,
        "attacker_ratio in [0, 0.3]");
  check(cfg.field_width > 0.0 && cfg.field_height > 0.0, "field dimensions > 0");
  check(cfg.radio_range > 0.0, "radio_range > 0");
  check(cfg.link_success_prob >= 0.0 && cfg.link_success_prob <= 1.0,
        "link_success_prob in [0, 1]");
  check(cfg.bandwidth > 0.0, "bandwidth > 0");
  check(cfg.cbr_rate > 0.0, "cbr_rate > 0");
  check(cfg.cbr_packet_size > 0, "cbr_packet_size > 0");
  check(cfg.v_min >= 0.0 && cfg.v_min <= cfg.v_max, "0 <= v_min <= v_max");
  check(cfg.v_max == 0.0 || cfg.v_min > 0.0, "v_min > 0 for a mobile network");
  check(cfg.pause_time >= 0.0, "pause_time >= 0");
  check(cfg.hello_interval > 0.0, "hello_interval > 0");
  check(cfg.measurement_interval > 0.0, "measurement_interval > 0");
  check(is_fraction(cfg.alpha_low) && is_fraction(cfg.alpha_high),
        "alpha out of (0,1]");
  check(cfg.alpha_low < cfg.alpha_high, "alpha_low < alpha_high");
  check(cfg.apt_threshold > 0.0, "apt_threshold > 0");
  check(cfg.net_alarm_threshold >= 0.0, "net_alarm_threshold >= 0");
  check(cfg.net_alarm_window > 0.0, "net_alarm_window > 0");
  check(cfg.attacker_rreq_rate > 0.0, "attacker_rreq_rate > 0");
  check(cfg.attacker_start >= 0.0, "attacker_start >= 0");
  check(cfg.attacker_duty_cycle >= 0.0 && cfg.attacker_duty_cycle <= 1.0,
        "attacker_duty_cycle in [0, 1]");
  check(cfg.default_rtt > 0.0, "default_rtt > 0");
  check(cfg.route_lifetime > 0.0, "route_lifetime > 0");
  check(cfg.tx_queue_limit >= 1, "tx_queue_limit >= 1");
  check(cfg.sim_duration > 0.0, "sim_duration > 0");
  check(cfg.experiments >= 1, "experiments >= 1");
  // Flows need two distinct benign endpoints.
  if (cfg.node_count >= 2 && cfg.cbr_flow_count > 0 &&
      cfg.attacker_ratio >= 0.0 && cfg.attacker_ratio <= 0.3) {
    check(cfg.node_count - cfg.attacker_count() >= 2,
          "at least two benign nodes for CBR flows");
  }
  return out;
}

}  // namespace floodguard
