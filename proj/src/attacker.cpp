#include "floodguard/attacker.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "floodguard/engine.hpp"

namespace floodguard {

AttackerProfile AttackerProfile::from(const ScenarioConfig& cfg) {
  return AttackerProfile{cfg.attacker_rreq_rate, cfg.attacker_start, cfg.attacker_duty_cycle};
}

bool AttackerProfile::active_at(SimTime now) const {
  if (duty_cycle <= 0.0 || now < start_time) return false;
  if (duty_cycle >= 1.0) return true;
  const double phase = std::fmod(now - start_time, kDutyPeriod);
  return phase < duty_cycle * kDutyPeriod;
}

std::vector<NodeId> select_attackers(const ScenarioConfig& cfg, std::uint64_t seed) {
  // Fisher-Yates over the full population; a prefix of the permutation is the
  // attacker set, so a larger ratio always contains a smaller one.
  std::vector<NodeId> order(cfg.node_count);
  std::iota(order.begin(), order.end(), NodeId{0});
  Rng rng(seed, Stream::Attacker);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.index(i)]);
  }
  const auto k = std::min<std::size_t>(cfg.attacker_count(), order.size());
  std::vector<NodeId> out(order.begin(), order.begin() + k);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace floodguard
