#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "floodguard/aodv.hpp"
#include "floodguard/attacker.hpp"
#include "floodguard/defense.hpp"
#include "floodguard/engine.hpp"
#include "floodguard/metrics.hpp"
#include "floodguard/model.hpp"

namespace floodguard {

class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Overrides for scripted harnesses; defaults reproduce a normal run.
struct NetworkOptions {
  std::optional<std::vector<Position>> positions;  // fixed, static nodes
  std::optional<std::vector<NodeId>> attackers;
  std::optional<std::vector<std::pair<NodeId, NodeId>>> flows;
  bool hello = true;
  bool measure = true;
  bool attack = true;
  bool traffic = true;
  bool record_forwards = false;  // enables forwards_of()
  std::ostream* trace = nullptr;       // time kind node detail
  std::ostream* detect_log = nullptr;  // time observer suspect d_low d_high action
};

/// Per-node transmit bookkeeping kept by the engine.
struct TxLog {
  std::uint64_t rreq_requested = 0;  // RREQ frames handed to the radio
  std::uint64_t rreq_on_air = 0;
  std::uint64_t rreq_queue_drops = 0;
  std::uint64_t hello_on_air = 0;
  std::uint64_t rrep_on_air = 0;
  std::uint64_t isolate_on_air = 0;
};

/// One complete simulated network. Single-threaded; independent instances
/// share nothing.
class Network final : private RouterPort {
 public:
  Network(ScenarioConfig cfg, std::uint64_t seed, NetworkOptions opts = {});
  ~Network() override;
  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  /// Arms Hello, measurement, attack and traffic timers. Call once.
  void start();
  std::uint64_t run_until(SimTime t_end);
  RunReport report() const;

  const ScenarioConfig& config() const { return cfg_; }
  SimTime now() const override { return queue_.now(); }
  std::uint32_t size() const { return cfg_.node_count; }
  bool is_attacker(NodeId n) const { return attacker_[n]; }
  const std::vector<NodeId>& attackers() const { return attacker_list_; }

  Router& router(NodeId n) { return *routers_[n]; }
  Detector& detector(NodeId n) { return detectors_[n]; }
  RandomWaypoint& mobility() { return mobility_; }
  Channel& channel() { return channel_; }
  EventQueue& events() { return queue_; }
  const TxLog& tx_log(NodeId n) const { return tx_log_[n]; }
  const std::vector<FlowStats>& flows() const { return flows_; }
  const DropCounts& drops() const { return drops_; }
  std::uint64_t rrep_for_invalid() const { return rrep_for_invalid_; }
  std::uint64_t attack_rreqs() const { return attack_rreqs_; }
  /// Number of times `node` forwarded (origin, rreq_id), from the air log.
  std::uint32_t forwards_of(NodeId node, NodeId origin, std::uint32_t rreq_id) const;

  /// Schedules `p` to arrive at `receiver` at `at` as if heard on the air.
  void inject(NodeId receiver, Packet p, SimTime at);
  /// Sends one DATA packet now from src to dst, outside any CBR flow.
  void send_data(NodeId src, NodeId dst);
  /// DATA packets still queued, buffered or on the air, counted by walking
  /// queues and buffers.
  std::uint64_t count_data_in_network() const;

 private:
  // RouterPort
  void send(NodeId self, Frame frame) override;
  void arm(NodeId self, Timer timer, SimTime at) override;
  void observe_rreq(NodeId self, const Packet& rreq, bool fresh) override;
  bool blocked(NodeId self, NodeId other) const override;
  void rtt_sample(NodeId self, double rtt) override;
  void delivered(NodeId self, const Packet& data) override;
  void dropped(NodeId self, const Packet& data, DropReason reason) override;

  void dispatch(const Event& ev);
  void on_arrival(NodeId node, const Packet& p);
  void on_timer(NodeId node, const Timer& t);
  void on_tx_ready(NodeId node);
  void on_app_send(std::uint32_t flow);
  void kick(NodeId node);
  void apply(NodeId observer, const DetectionAction& a);
  void trace(const char* kind, NodeId node, const std::string& detail);
  std::uint64_t new_payload(std::uint32_t flow);

  ScenarioConfig cfg_;
  std::uint64_t seed_;
  NetworkOptions opts_;
  EventQueue queue_;
  RandomWaypoint mobility_;
  Channel channel_;
  AttackerProfile attack_profile_;
  std::vector<bool> attacker_;
  std::vector<NodeId> attacker_list_;
  std::vector<std::unique_ptr<Router>> routers_;
  std::vector<Detector> detectors_;
  std::vector<TxLog> tx_log_;
  WakeQueue wakes_;

  std::vector<FlowStats> flows_;
  std::vector<SimTime> flow_stop_;
  std::vector<std::uint32_t> payload_flow_;  // payload id -> flow (UINT32_MAX = ad hoc)
  std::vector<std::uint8_t> payload_state_;  // 0 in flight, 1 delivered, 2 dropped
  DropCounts drops_;
  std::uint64_t delivered_ = 0;

  std::vector<std::optional<SimTime>> first_flood_;
  std::vector<std::optional<SimTime>> first_detained_;
  std::vector<std::unordered_map<std::uint64_t, std::uint32_t>> forward_log_;
  std::uint64_t events_ = 0;
  std::uint64_t rreq_tx_ = 0;
  std::uint64_t rrep_for_invalid_ = 0;
  std::uint64_t attack_rreqs_ = 0;
  std::uint64_t detentions_ = 0;
  std::uint64_t isolations_rx_ = 0;
  bool started_ = false;
};

struct RunOptions {
  std::ostream* trace = nullptr;
  std::ostream* detect_log = nullptr;
};

/// Full simulation of `cfg` to cfg.sim_duration under `seed`. Throws
/// ConfigError if validate_config reports violations.
RunReport run_scenario(const ScenarioConfig& cfg, std::uint64_t seed, RunOptions opts = {});

}  // namespace floodguard
