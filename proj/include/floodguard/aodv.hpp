#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <vector>

#include "absl/container/flat_hash_set.h"
#include "floodguard/engine.hpp"
#include "floodguard/model.hpp"
#include "floodguard/packet.hpp"

namespace floodguard {

enum class DropReason : std::uint8_t {
  Loss,
  NoRoute,
  TtlExceeded,
  QueueOverflow,
  DetainedNextHop,
  DetainedSender,
};

const char* to_string(DropReason reason);

/// What a router needs from the node hosting it.
class RouterPort {
 public:
  virtual ~RouterPort() = default;
  virtual SimTime now() const = 0;
  virtual void send(NodeId self, Frame frame) = 0;
  virtual void arm(NodeId self, Timer timer, SimTime at) = 0;
  /// Every RREQ heard, before suppression. `fresh` = first copy seen.
  virtual void observe_rreq(NodeId self, const Packet& rreq, bool fresh) = 0;
  /// True when `self` currently detains `other`.
  virtual bool blocked(NodeId self, NodeId other) const = 0;
  virtual void rtt_sample(NodeId self, double rtt) = 0;
  virtual void delivered(NodeId self, const Packet& data) = 0;
  virtual void dropped(NodeId self, const Packet& data, DropReason reason) = 0;
};

struct RouteEntry {
  NodeId dest = 0;
  NodeId next_hop = 0;
  std::uint32_t hop_count = 0;
  std::uint32_t dest_seq = 0;
  SimTime expiry = 0.0;

  bool usable(SimTime now) const { return expiry > now; }
};

struct RouterParams {
  std::uint32_t node_count = 0;
  double route_lifetime = 10.0;
  double discovery_timeout = 1.0;
  std::uint32_t discovery_retries = 2;
  std::size_t buffer_limit = 64;
  double seen_lifetime = 30.0;

  static RouterParams from(const ScenarioConfig& cfg);
};

/// Reactive AODV subset: flooded RREQ with duplicate suppression, unicast
/// RREP along reverse routes, expiry-based invalidation and Hello beacons
/// that carry cumulative RREQ counters.
class Router {
 public:
  Router(NodeId self, RouterParams params, RouterPort& port);

  NodeId self() const { return self_; }
  const RreqCounters& counters() const { return counters_; }

  /// Hands a locally generated DATA packet to routing.
  void originate_data(Packet data);
  /// Broadcasts a fresh RREQ for `dest` and buffers DATA until a reply.
  /// No-op while a discovery for `dest` is already pending.
  void initiate_route_discovery(NodeId dest);
  /// Fire-and-forget RREQ toward `dest` (no buffering, no retries).
  void flood_rreq(NodeId dest);

  void handle_rreq(const Packet& rreq);
  void handle_rrep(const Packet& rrep);
  void forward_data(Packet data);
  /// Builds the Hello beacon. `advertise_sent` overrides the sent counter.
  void emit_hello(std::optional<std::uint64_t> advertise_sent = std::nullopt);

  void on_discovery_timeout(NodeId dest, std::uint32_t generation);
  /// Unicast delivery to `next_hop` failed; `frame` is the frame as sent.
  void on_link_failure(const Frame& frame, bool out_of_range);

  /// Invalidates routes through `neighbor` (it has been isolated).
  void drop_routes_via(NodeId neighbor);
  /// Marks `neighbor` reachable in one hop.
  void refresh_neighbor_route(NodeId neighbor);
  void prune_seen();

  std::optional<RouteEntry> route(NodeId dest) const;
  std::size_t buffered(NodeId dest) const;
  std::size_t total_buffered() const;
  /// Buffered DATA, for conservation accounting.
  std::vector<Packet> buffered_packets() const;
  bool discovery_pending(NodeId dest) const { return pending_.contains(dest); }
  std::uint32_t last_rreq_id() const { return rreq_id_; }

 private:
  struct Discovery {
    std::uint32_t attempt = 0;
    std::uint32_t generation = 0;
    SimTime sent_at = 0.0;
    std::deque<Packet> buffer;
  };

  void send_rreq(NodeId dest, Discovery& d);
  void buffer_packet(Packet data);
  void update_route(NodeId dest, NodeId next_hop, std::uint32_t hops, std::uint32_t seq,
                    bool seq_known);
  bool mark_seen(NodeId origin, std::uint32_t rreq_id);
  RouteEntry* live_route(NodeId dest);

  NodeId self_;
  RouterParams params_;
  RouterPort& port_;
  RreqCounters counters_;
  std::uint32_t seq_ = 0;
  std::uint32_t rreq_id_ = 0;
  std::uint32_t generation_ = 0;
  std::vector<std::optional<RouteEntry>> routes_;
  absl::flat_hash_set<std::uint64_t> seen_;
  std::deque<std::pair<SimTime, std::uint64_t>> seen_order_;
  std::map<NodeId, Discovery> pending_;
};

}  // namespace floodguard
