#include "floodguard/aodv.hpp"

#include <algorithm>

namespace floodguard {

const char* to_string(DropReason reason) {
  switch (reason) {
    case DropReason::Loss: return "loss";
    case DropReason::NoRoute: return "no-route";
    case DropReason::TtlExceeded: return "ttl-exceeded";
    case DropReason::QueueOverflow: return "queue-overflow";
    case DropReason::DetainedNextHop: return "detained-next-hop";
    case DropReason::DetainedSender: return "detained-sender";
  }
  return "?";
}

RouterParams RouterParams::from(const ScenarioConfig& cfg) {
  RouterParams p;
  p.node_count = cfg.node_count;
  p.route_lifetime = cfg.route_lifetime;
  return p;
}

Router::Router(NodeId self, RouterParams params, RouterPort& port)
    : self_(self), params_(params), port_(port), routes_(params.node_count) {}

RouteEntry* Router::live_route(NodeId dest) {
  if (dest >= routes_.size() || !routes_[dest]) return nullptr;
  auto& r = *routes_[dest];
  return r.usable(port_.now()) ? &r : nullptr;
}

std::optional<RouteEntry> Router::route(NodeId dest) const {
  if (dest >= routes_.size() || !routes_[dest] || !routes_[dest]->usable(port_.now()))
    return std::nullopt;
  return routes_[dest];
}

void Router::update_route(NodeId dest, NodeId next_hop, std::uint32_t hops, std::uint32_t seq,
                          bool seq_known) {
  if (dest >= routes_.size() || dest == self_) return;
  const SimTime expiry = port_.now() + params_.route_lifetime;
  auto& slot = routes_[dest];
  const bool replace = !slot || !slot->usable(port_.now()) ||
                       (seq_known && seq > slot->dest_seq) ||
                       (seq_known && seq == slot->dest_seq && hops <= slot->hop_count);
  if (replace) {
    slot = RouteEntry{dest, next_hop, hops, seq_known ? seq : (slot ? slot->dest_seq : 0), expiry};
  } else if (slot->next_hop == next_hop && slot->hop_count == hops) {
    slot->expiry = std::max(slot->expiry, expiry);
  }
}

void Router::refresh_neighbor_route(NodeId neighbor) {
  if (neighbor >= routes_.size() || neighbor == self_) return;
  auto& slot = routes_[neighbor];
  const SimTime expiry = port_.now() + params_.route_lifetime;
  if (slot && slot->usable(port_.now()) && slot->hop_count == 1 && slot->next_hop == neighbor) {
    slot->expiry = std::max(slot->expiry, expiry);
    return;
  }
  slot = RouteEntry{neighbor, neighbor, 1, slot ? slot->dest_seq : 0, expiry};
}

void Router::drop_routes_via(NodeId neighbor) {
  for (auto& slot : routes_) {
    if (slot && slot->next_hop == neighbor) slot.reset();
  }
}

bool Router::mark_seen(NodeId origin, std::uint32_t rreq_id) {
  const std::uint64_t key = (static_cast<std::uint64_t>(origin) << 32) | rreq_id;
  if (!seen_.insert(key).second) return false;
  seen_order_.emplace_back(port_.now() + params_.seen_lifetime, key);
  return true;
}

void Router::prune_seen() {
  // Expiries are appended in time order, so the oldest sit at the front.
  const SimTime now = port_.now();
  while (!seen_order_.empty() && seen_order_.front().first <= now) {
    seen_.erase(seen_order_.front().second);
    seen_order_.pop_front();
  }
}

// ---------------------------------------------------------------------------
// Discovery

void Router::send_rreq(NodeId dest, Discovery& d) {
  ++seq_;
  Packet p;
  p.kind = PacketKind::Rreq;
  p.origin = self_;
  p.sender = self_;
  p.dest = dest;
  p.seq = seq_;
  p.rreq_id = ++rreq_id_;
  p.dest_seq = dest < routes_.size() && routes_[dest] ? routes_[dest]->dest_seq : 0;
  p.created = port_.now();
  mark_seen(self_, p.rreq_id);
  ++counters_.sent;
  d.sent_at = port_.now();
  port_.send(self_, Frame{p, std::nullopt});
  port_.arm(self_, Timer{TimerKind::DiscoveryTimeout, dest, d.generation},
            port_.now() + params_.discovery_timeout);
}

void Router::initiate_route_discovery(NodeId dest) {
  auto [it, created] = pending_.try_emplace(dest);
  if (!created) return;
  it->second.generation = ++generation_;
  send_rreq(dest, it->second);
}

void Router::flood_rreq(NodeId dest) {
  Packet p;
  p.kind = PacketKind::Rreq;
  p.origin = self_;
  p.sender = self_;
  p.dest = dest;
  p.seq = ++seq_;
  p.rreq_id = ++rreq_id_;
  p.created = port_.now();
  mark_seen(self_, p.rreq_id);
  ++counters_.sent;
  port_.send(self_, Frame{p, std::nullopt});
}

void Router::on_discovery_timeout(NodeId dest, std::uint32_t generation) {
  auto it = pending_.find(dest);
  if (it == pending_.end() || it->second.generation != generation) return;
  auto& d = it->second;
  if (d.attempt < params_.discovery_retries) {
    ++d.attempt;
    send_rreq(dest, d);
    return;
  }
  auto buffer = std::move(d.buffer);
  pending_.erase(it);
  for (const auto& p : buffer) port_.dropped(self_, p, DropReason::NoRoute);
}

void Router::buffer_packet(Packet data) {
  const NodeId dest = data.dest;
  auto [it, created] = pending_.try_emplace(dest);
  auto& buf = it->second.buffer;
  if (buf.size() >= params_.buffer_limit) {
    port_.dropped(self_, buf.front(), DropReason::QueueOverflow);
    buf.pop_front();
  }
  buf.push_back(std::move(data));
  if (created) {
    it->second.generation = ++generation_;
    send_rreq(dest, it->second);
  }
}

std::size_t Router::buffered(NodeId dest) const {
  auto it = pending_.find(dest);
  return it == pending_.end() ? 0 : it->second.buffer.size();
}

std::size_t Router::total_buffered() const {
  std::size_t n = 0;
  for (const auto& [dest, d] : pending_) n += d.buffer.size();
  return n;
}

std::vector<Packet> Router::buffered_packets() const {
  std::vector<Packet> out;
  for (const auto& [dest, d] : pending_) out.insert(out.end(), d.buffer.begin(), d.buffer.end());
  return out;
}

// ---------------------------------------------------------------------------
// Control handling

void Router::handle_rreq(const Packet& rreq) {
  ++counters_.received;
  const bool fresh = mark_seen(rreq.origin, rreq.rreq_id);
  port_.observe_rreq(self_, rreq, fresh);
  if (port_.blocked(self_, rreq.sender) || port_.blocked(self_, rreq.origin)) return;
  if (!fresh) return;

  refresh_neighbor_route(rreq.sender);
  update_route(rreq.origin, rreq.sender, rreq.hop_count + 1, rreq.seq, true);

  if (rreq.dest == self_) {
    seq_ = std::max(seq_, rreq.dest_seq);
    Packet rep;
    rep.kind = PacketKind::Rrep;
    rep.origin = rreq.origin;
    rep.sender = self_;
    rep.dest = self_;
    rep.seq = seq_;
    rep.hop_count = 0;
    rep.created = rreq.created;
    port_.send(self_, Frame{rep, rreq.sender});
    return;
  }

  if (const RouteEntry* r = live_route(rreq.dest);
      r && r->dest_seq > 0 && r->dest_seq >= rreq.dest_seq && r->next_hop != rreq.sender &&
      !port_.blocked(self_, r->next_hop)) {
    Packet rep;
    rep.kind = PacketKind::Rrep;
    rep.origin = rreq.origin;
    rep.sender = self_;
    rep.dest = rreq.dest;
    rep.seq = r->dest_seq;
    rep.hop_count = r->hop_count;
    rep.created = rreq.created;
    port_.send(self_, Frame{rep, rreq.sender});
    return;
  }

  Packet fwd = rreq;
  fwd.sender = self_;
  fwd.hop_count = rreq.hop_count + 1;
  ++counters_.sent;
  port_.send(self_, Frame{fwd, std::nullopt});
}

void Router::handle_rrep(const Packet& rrep) {
  if (port_.blocked(self_, rrep.sender)) return;
  refresh_neighbor_route(rrep.sender);
  update_route(rrep.dest, rrep.sender, rrep.hop_count + 1, rrep.seq, true);

  if (rrep.origin == self_) {
    auto it = pending_.find(rrep.dest);
    if (it == pending_.end()) return;
    port_.rtt_sample(self_, port_.now() - it->second.sent_at);
    auto buffer = std::move(it->second.buffer);
    pending_.erase(it);
    for (auto& p : buffer) forward_data(std::move(p));
    return;
  }

  const RouteEntry* back = live_route(rrep.origin);
  if (!back || port_.blocked(self_, back->next_hop)) return;
  Packet fwd = rrep;
  fwd.sender = self_;
  fwd.hop_count = rrep.hop_count + 1;
  port_.send(self_, Frame{fwd, back->next_hop});
}

void Router::emit_hello(std::optional<std::uint64_t> advertise_sent) {
  Packet h;
  h.kind = PacketKind::Hello;
  h.origin = self_;
  h.sender = self_;
  h.dest = self_;
  h.seq = seq_;
  h.hello_counters = counters_;
  if (advertise_sent) h.hello_counters.sent = *advertise_sent;
  h.created = port_.now();
  port_.send(self_, Frame{h, std::nullopt});
}

// ---------------------------------------------------------------------------
// Data

void Router::originate_data(Packet data) {
  data.origin = self_;
  data.sender = self_;
  data.hop_count = 0;
  forward_data(std::move(data));
}

void Router::forward_data(Packet data) {
  if (data.sender != self_ && port_.blocked(self_, data.sender)) {
    port_.dropped(self_, data, DropReason::DetainedSender);
    return;
  }
  if (data.dest == self_) {
    port_.delivered(self_, data);
    return;
  }
  if (data.hop_count >= params_.node_count) {
    port_.dropped(self_, data, DropReason::TtlExceeded);
    return;
  }
  RouteEntry* r = live_route(data.dest);
  if (!r) {
    data.sender = self_;
    buffer_packet(std::move(data));
    return;
  }
  if (port_.blocked(self_, r->next_hop)) {
    port_.dropped(self_, data, DropReason::DetainedNextHop);
    return;
  }
  r->expiry = std::max(r->expiry, port_.now() + params_.route_lifetime);
  const NodeId hop = r->next_hop;
  data.sender = self_;
  ++data.hop_count;
  port_.send(self_, Frame{std::move(data), hop});
}

void Router::on_link_failure(const Frame& frame, bool out_of_range) {
  if (!frame.next_hop) return;
  drop_routes_via(*frame.next_hop);
  if (frame.packet.kind != PacketKind::Data) return;
  if (!out_of_range) {
    port_.dropped(self_, frame.packet, DropReason::Loss);
    return;
  }
  Packet p = frame.packet;
  --p.hop_count;
  p.sender = self_;
  forward_data(std::move(p));
}

}  // namespace floodguard
