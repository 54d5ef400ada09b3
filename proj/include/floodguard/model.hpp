#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace floodguard {

/// Dense node index, 0..node_count-1. Ids >= node_count are never routable.
using NodeId = std::uint32_t;

/// Simulated time in seconds.
using SimTime = double;

/// Reserved unroutable address `node_count + k`, k >= 1. Flooding attackers
/// target these.
constexpr NodeId invalid_address(std::uint32_t node_count, std::uint32_t k = 1) {
  return node_count + k;
}

struct Position {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Position& a, const Position& b);

struct ScenarioConfig {
  std::uint32_t node_count = 100;
  double attacker_ratio = 0.10;
  double field_width = 1000.0;
  double field_height = 1000.0;
  double radio_range = 300.0;
  double link_success_prob = 0.9;
  double bandwidth = 3e6;  // bits/s
  double cbr_rate = 10.0;  // packets/s per flow
  std::uint32_t cbr_flow_count = 10;
  std::uint32_t cbr_packet_size = 512;  // payload bytes
  double v_min = 1.0;
  double v_max = 10.0;
  double pause_time = 2.0;
  double hello_interval = 1.0;
  double measurement_interval = 1.0;
  double alpha_low = 0.3;
  double alpha_high = 0.7;
  double apt_threshold = 5.0;
  double net_alarm_threshold = 20.0;
  double net_alarm_window = 10.0;
  double attacker_rreq_rate = 20.0;
  double attacker_start = 5.0;
  double attacker_duty_cycle = 1.0;
  bool lying_counters = false;
  bool require_local_confirmation = false;
  bool defense = true;
  double default_rtt = 0.5;
  double route_lifetime = 10.0;
  std::uint32_t mac_retries = 3;
  std::uint32_t tx_queue_limit = 64;
  double sim_duration = 2000.0;
  std::uint32_t experiments = 5;
  std::uint64_t seed = 1;

  std::uint32_t attacker_count() const;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Every violated invariant, as a human readable message. Empty means valid.
std::vector<std::string> validate_config(const ScenarioConfig& cfg);

}  // namespace floodguard
