#pragma once

#include <vector>

#include "floodguard/model.hpp"

namespace floodguard {

/// A flooding attacker emits fake RREQs toward an unroutable address at a
/// fixed rate. Apart from that it runs the ordinary routing stack.
struct AttackerProfile {
  static constexpr double kDutyPeriod = 10.0;

  double rreq_rate = 20.0;
  SimTime start_time = 5.0;
  double duty_cycle = 1.0;

  static AttackerProfile from(const ScenarioConfig& cfg);

  /// Whether the attacker floods at `now`: after start, during the first
  /// duty_cycle fraction of every kDutyPeriod.
  bool active_at(SimTime now) const;
  double tick_interval() const { return 1.0 / rreq_rate; }
};

/// round(node_count * attacker_ratio) distinct nodes drawn uniformly from the
/// attacker stream of `seed`, ascending. Sets for growing ratios are nested.
std::vector<NodeId> select_attackers(const ScenarioConfig& cfg, std::uint64_t seed);

}  // namespace floodguard
