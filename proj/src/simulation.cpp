#include "floodguard/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <ostream>

#include "floodguard/scenario_io.hpp"

namespace floodguard {
namespace {

constexpr std::uint32_t kAdHocFlow = UINT32_MAX;
constexpr std::uint8_t kInFlight = 0, kDelivered = 1, kDropped = 2;

std::string join_violations(const std::vector<std::string>& v) {
  std::string s = "invalid scenario:";
  for (const auto& x : v) s += " [" + x + "]";
  return s;
}

RandomWaypoint make_mobility(const ScenarioConfig& cfg, std::uint64_t seed,
                             const NetworkOptions& opts) {
  if (opts.positions) return RandomWaypoint(*opts.positions, cfg.field_width, cfg.field_height);
  return RandomWaypoint(cfg, seed);
}

const char* timer_name(TimerKind k) {
  switch (k) {
    case TimerKind::Hello: return "HELLO";
    case TimerKind::Measure: return "MEASURE";
    case TimerKind::DiscoveryTimeout: return "DISCOVERY";
    case TimerKind::AttackTick: return "ATTACK";
  }
  return "?";
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::invalid_argument(join_violations(violations)), violations_(std::move(violations)) {}

Network::Network(ScenarioConfig cfg, std::uint64_t seed, NetworkOptions opts)
    : cfg_(std::move(cfg)),
      seed_(seed),
      opts_(std::move(opts)),
      mobility_(make_mobility(cfg_, seed_, opts_)),
      channel_(cfg_, seed_),
      attack_profile_(AttackerProfile::from(cfg_)),
      attacker_(cfg_.node_count, false),
      tx_log_(cfg_.node_count),
      wakes_(cfg_.node_count),
      first_flood_(cfg_.node_count),
      first_detained_(cfg_.node_count),
      forward_log_(opts_.record_forwards ? cfg_.node_count : 0) {
  if (opts_.positions && opts_.positions->size() != cfg_.node_count)
    throw ConfigError({"positions override must list node_count positions"});

  attacker_list_ = opts_.attackers ? *opts_.attackers : select_attackers(cfg_, seed_);
  std::sort(attacker_list_.begin(), attacker_list_.end());
  for (NodeId a : attacker_list_) attacker_.at(a) = true;

  const auto rparams = RouterParams::from(cfg_);
  auto dparams = DefenseParams::from(cfg_);
  routers_.reserve(cfg_.node_count);
  detectors_.reserve(cfg_.node_count);
  for (NodeId n = 0; n < cfg_.node_count; ++n) {
    routers_.push_back(std::make_unique<Router>(n, rparams, static_cast<RouterPort&>(*this)));
    auto p = dparams;
    // Attackers do not run the security module.
    if (attacker_[n]) p.enabled = false;
    detectors_.emplace_back(n, p);
  }

  std::vector<std::pair<NodeId, NodeId>> endpoints;
  if (opts_.flows) {
    endpoints = *opts_.flows;
  } else if (cfg_.cbr_flow_count > 0) {
    std::vector<NodeId> benign;
    for (NodeId n = 0; n < cfg_.node_count; ++n)
      if (!attacker_[n]) benign.push_back(n);
    Rng traffic(seed_, Stream::Traffic);
    for (std::uint32_t f = 0; f < cfg_.cbr_flow_count && benign.size() >= 2; ++f) {
      NodeId src = benign[traffic.index(benign.size())];
      NodeId dst;
      do dst = benign[traffic.index(benign.size())];
      while (dst == src);
      endpoints.emplace_back(src, dst);
    }
  }
  for (auto [s, d] : endpoints) flows_.push_back(FlowStats{s, d, 0, 0});
}

Network::~Network() = default;

void Network::start() {
  if (started_) return;
  started_ = true;
  Rng jitter(seed_, Stream::Jitter);
  for (NodeId n = 0; n < cfg_.node_count; ++n) {
    const double hello_at = jitter.uniform(0.0, cfg_.hello_interval);
    const double measure_at = cfg_.measurement_interval + jitter.uniform(0.0, cfg_.measurement_interval);
    if (opts_.hello) queue_.schedule(hello_at, TimerFire{n, Timer{TimerKind::Hello}});
    if (opts_.measure) queue_.schedule(measure_at, TimerFire{n, Timer{TimerKind::Measure}});
    if (opts_.attack && attacker_[n] && attack_profile_.duty_cycle > 0.0) {
      const double first = attack_profile_.start_time + jitter.uniform(0.0, attack_profile_.tick_interval());
      queue_.schedule(first, TimerFire{n, Timer{TimerKind::AttackTick}});
    }
  }
  if (opts_.traffic) {
    const double drain = std::min(5.0, 0.1 * cfg_.sim_duration);
    Rng traffic(seed_, Stream::Traffic, 1);
    flow_stop_.assign(flows_.size(), cfg_.sim_duration - drain);
    for (std::uint32_t f = 0; f < flows_.size(); ++f)
      queue_.schedule(traffic.uniform(1.0, 2.0), AppSend{f});
  }
}

std::uint64_t Network::run_until(SimTime t_end) {
  // Radio wake-ups live in their own queue; at equal times other events go first.
  std::uint64_t n = 0;
  for (;;) {
    const auto te = queue_.next_time();
    const auto tw = wakes_.next_time();
    if (te && *te <= t_end && (!tw || *te <= *tw)) {
      dispatch(queue_.pop_next());
    } else if (tw && *tw <= t_end) {
      queue_.advance_to(*tw);
      on_tx_ready(wakes_.pop());
    } else {
      break;
    }
    ++n;
  }
  queue_.advance_to(t_end);
  events_ += n;
  return n;
}

void Network::trace(const char* kind, NodeId node, const std::string& detail) {
  if (!opts_.trace) return;
  char head[64];
  std::snprintf(head, sizeof head, "%.6f\t%s\t%u\t", now(), kind, node);
  *opts_.trace << head << detail << '\n';
}

void Network::dispatch(const Event& ev) {
  std::visit(
      [this](const auto& body) {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, PacketArrival>) {
          const auto& d = *body.delivery;
          for (NodeId r : d.receivers) {
            if (opts_.trace) trace("RX", r, d.packet.describe());
            on_arrival(r, d.packet);
          }
        } else if constexpr (std::is_same_v<T, TimerFire>) {
          if (opts_.trace) {
            std::string d = timer_name(body.timer.kind);
            if (body.timer.kind == TimerKind::DiscoveryTimeout)
              d += " d=" + std::to_string(body.timer.target);
            trace("TIMER", body.node, d);
          }
          on_timer(body.node, body.timer);
        } else {
          if (opts_.trace)
            trace("APP", flows_[body.flow].src, "flow=" + std::to_string(body.flow));
          on_app_send(body.flow);
        }
      },
      ev.body);
}

// ---------------------------------------------------------------------------
// Radio

void Network::send(NodeId self, Frame frame) {
  const auto& p = frame.packet;
  if (p.kind == PacketKind::Rreq) ++tx_log_[self].rreq_requested;
  if (p.kind == PacketKind::Rrep && p.dest >= cfg_.node_count) ++rrep_for_invalid_;
  const bool is_data = p.kind == PacketKind::Data;
  const bool is_rreq = p.kind == PacketKind::Rreq;
  if (!channel_.enqueue(self, std::move(frame))) {
    if (is_rreq) ++tx_log_[self].rreq_queue_drops;
    if (is_data) dropped(self, p, DropReason::QueueOverflow);
    return;
  }
  kick(self);
}

void Network::kick(NodeId node) {
  if (channel_.queued(node) == 0) return;
  wakes_.set(node, std::max(now(), channel_.free_at(node)));
}

void Network::on_tx_ready(NodeId node) {
  auto out = channel_.try_start(node, now(), mobility_);
  if (!out) {
    if (opts_.trace && channel_.queued(node) > 0) trace("TX", node, "busy");
    kick(node);
    return;
  }
  // Nodes that were waiting for the channel now wait for this frame to end.
  for (NodeId r : out->neighbors) wakes_.postpone(r, channel_.free_at(r));
  const Packet& p = out->frame.packet;
  if (opts_.trace) trace("TX", node, p.describe());
  auto& log = tx_log_[node];
  switch (p.kind) {
    case PacketKind::Rreq:
      ++log.rreq_on_air;
      ++rreq_tx_;
      if (opts_.record_forwards && p.origin != node)
        ++forward_log_[node][(static_cast<std::uint64_t>(p.origin) << 32) | p.rreq_id];
      break;
    case PacketKind::Hello: ++log.hello_on_air; break;
    case PacketKind::Rrep: ++log.rrep_on_air; break;
    case PacketKind::Isolate: ++log.isolate_on_air; break;
    case PacketKind::Data: break;
  }
  if (!out->receivers.empty())
    queue_.schedule(out->arrival, PacketArrival{std::make_shared<const Delivery>(Delivery{std::move(out->receivers), p})});
  if (out->out_of_range || out->lost) routers_[node]->on_link_failure(out->frame, out->out_of_range);
  kick(node);
}

std::uint32_t Network::forwards_of(NodeId node, NodeId origin, std::uint32_t rreq_id) const {
  if (forward_log_.empty()) return 0;
  const auto& m = forward_log_[node];
  auto it = m.find((static_cast<std::uint64_t>(origin) << 32) | rreq_id);
  return it == m.end() ? 0 : it->second;
}

void Network::inject(NodeId receiver, Packet p, SimTime at) {
  queue_.schedule(at, PacketArrival{std::make_shared<const Delivery>(Delivery{{receiver}, std::move(p)})});
}

// ---------------------------------------------------------------------------
// RouterPort

void Network::arm(NodeId self, Timer timer, SimTime at) { queue_.schedule(at, TimerFire{self, timer}); }

void Network::observe_rreq(NodeId self, const Packet& rreq, bool fresh) {
  detectors_[self].on_rreq(rreq, fresh, now());
}

bool Network::blocked(NodeId self, NodeId other) const {
  return other < cfg_.node_count && detectors_[self].blocks(other);
}

void Network::rtt_sample(NodeId self, double rtt) { detectors_[self].add_rtt_sample(rtt); }

void Network::delivered(NodeId, const Packet& data) {
  auto& st = payload_state_.at(data.payload_id);
  if (st != kInFlight) return;
  st = kDelivered;
  ++delivered_;
  if (auto f = payload_flow_[data.payload_id]; f != kAdHocFlow) ++flows_[f].received;
}

void Network::dropped(NodeId, const Packet& data, DropReason reason) {
  auto& st = payload_state_.at(data.payload_id);
  if (st != kInFlight) return;
  st = kDropped;
  switch (reason) {
    case DropReason::Loss: ++drops_.loss; break;
    case DropReason::NoRoute: ++drops_.no_route; break;
    case DropReason::TtlExceeded: ++drops_.ttl_exceeded; break;
    case DropReason::QueueOverflow: ++drops_.queue_overflow; break;
    case DropReason::DetainedNextHop: ++drops_.detained_next_hop; break;
    case DropReason::DetainedSender: ++drops_.detained_sender; break;
  }
}

// ---------------------------------------------------------------------------
// Node behavior

void Network::on_arrival(NodeId node, const Packet& p) {
  auto& router = *routers_[node];
  switch (p.kind) {
    case PacketKind::Rreq: router.handle_rreq(p); break;
    case PacketKind::Rrep: router.handle_rrep(p); break;
    case PacketKind::Data: router.forward_data(p); break;
    case PacketKind::Hello:
      if (!blocked(node, p.sender)) router.refresh_neighbor_route(p.sender);
      detectors_[node].on_hello(p.sender, p.hello_counters, now());
      break;
    case PacketKind::Isolate:
      if (attacker_[node]) break;
      if (auto a = detectors_[node].on_isolate(p.suspect, p.expiry, now())) {
        ++isolations_rx_;
        apply(node, *a);
      }
      break;
  }
}

void Network::on_timer(NodeId node, const Timer& t) {
  switch (t.kind) {
    case TimerKind::Hello: {
      std::optional<std::uint64_t> advertise;
      if (attacker_[node] && cfg_.lying_counters) advertise = 0;
      routers_[node]->emit_hello(advertise);
      routers_[node]->prune_seen();
      arm(node, Timer{TimerKind::Hello}, now() + cfg_.hello_interval);
      break;
    }
    case TimerKind::Measure:
      for (const auto& a : detectors_[node].measure(now())) apply(node, a);
      arm(node, Timer{TimerKind::Measure}, now() + cfg_.measurement_interval);
      break;
    case TimerKind::DiscoveryTimeout:
      routers_[node]->on_discovery_timeout(t.target, t.generation);
      break;
    case TimerKind::AttackTick:
      if (attack_profile_.active_at(now())) {
        if (!first_flood_[node]) first_flood_[node] = now();
        ++attack_rreqs_;
        routers_[node]->flood_rreq(invalid_address(cfg_.node_count));
      }
      arm(node, Timer{TimerKind::AttackTick}, now() + attack_profile_.tick_interval());
      break;
  }
}

void Network::apply(NodeId observer, const DetectionAction& a) {
  if (opts_.detect_log) {
    char line[160];
    std::snprintf(line, sizeof line, "%.6f\t%u\t%u\t%.6f\t%.6f\t%s\n", now(), observer, a.suspect,
                  a.d_low, a.d_high, to_string(a.kind));
    *opts_.detect_log << line;
  }
  if (a.kind == DetectionAction::Kind::Release) return;

  routers_[observer]->drop_routes_via(a.suspect);
  if (!attacker_[observer] && !first_detained_[a.suspect]) first_detained_[a.suspect] = now();
  if (a.kind != DetectionAction::Kind::Detain) return;

  ++detentions_;
  Packet iso;
  iso.kind = PacketKind::Isolate;
  iso.origin = observer;
  iso.sender = observer;
  iso.dest = observer;
  iso.suspect = a.suspect;
  iso.expiry = a.entry.expiry;
  iso.created = now();
  send(observer, Frame{iso, std::nullopt});
}

std::uint64_t Network::new_payload(std::uint32_t flow) {
  payload_flow_.push_back(flow);
  payload_state_.push_back(kInFlight);
  return payload_flow_.size() - 1;
}

void Network::on_app_send(std::uint32_t flow) {
  auto& f = flows_[flow];
  Packet p;
  p.kind = PacketKind::Data;
  p.dest = f.dst;
  p.payload_id = new_payload(flow);
  p.payload_bytes = cfg_.cbr_packet_size;
  p.created = now();
  ++f.sent;
  routers_[f.src]->originate_data(std::move(p));
  const SimTime next = now() + 1.0 / cfg_.cbr_rate;
  if (next < flow_stop_[flow]) queue_.schedule(next, AppSend{flow});
}

void Network::send_data(NodeId src, NodeId dst) {
  Packet p;
  p.kind = PacketKind::Data;
  p.dest = dst;
  p.payload_id = new_payload(kAdHocFlow);
  p.payload_bytes = cfg_.cbr_packet_size;
  p.created = now();
  routers_[src]->originate_data(std::move(p));
}

std::uint64_t Network::count_data_in_network() const {
  std::uint64_t n = 0;
  for (const auto& ev : queue_.pending()) {
    if (auto* a = std::get_if<PacketArrival>(&ev.body); a && a->delivery->packet.kind == PacketKind::Data)
      n += a->delivery->receivers.size();
  }
  for (NodeId node = 0; node < cfg_.node_count; ++node) {
    for (const auto& fr : channel_.queue(node))
      if (fr.packet.kind == PacketKind::Data) ++n;
    n += routers_[node]->total_buffered();
  }
  return n;
}

RunReport Network::report() const {
  RunReport r;
  r.config_digest = config_digest(cfg_);
  r.seed = seed_;
  r.attacker_ratio = cfg_.attacker_ratio;
  r.defense = cfg_.defense;
  r.node_count = cfg_.node_count;
  r.sim_duration = cfg_.sim_duration;
  r.attackers = attacker_list_;
  for (NodeId n = 0; n < cfg_.node_count; ++n)
    if (first_detained_[n]) r.detected.push_back(n);
  r.cm = confusion(r.attackers, r.detected, cfg_.node_count);
  r.fpr = fpr(r.cm);
  r.fnr = fnr(r.cm);
  r.dr = dr(r.cm);
  r.flows = flows_;
  try {
    r.pdr = run_pdr(flows_);
  } catch (const NoTraffic&) {
    r.pdr = std::nullopt;
  }
  r.data_originated = payload_state_.size();
  r.data_delivered = delivered_;
  r.drops = drops_;
  r.data_in_flight = r.data_originated - r.data_delivered - r.drops.total();
  for (NodeId a : attacker_list_) r.attacker_timing.push_back({a, first_flood_[a], first_detained_[a]});
  r.events_processed = events_;
  r.rreq_transmissions = rreq_tx_;
  r.attack_rreqs = attack_rreqs_;
  r.rrep_for_invalid = rrep_for_invalid_;
  r.detentions = detentions_;
  r.isolations_received = isolations_rx_;
  return r;
}

RunReport run_scenario(const ScenarioConfig& cfg, std::uint64_t seed, RunOptions opts) {
  if (auto v = validate_config(cfg); !v.empty()) throw ConfigError(std::move(v));
  const auto t0 = std::chrono::steady_clock::now();
  NetworkOptions nopts;
  nopts.trace = opts.trace;
  nopts.detect_log = opts.detect_log;
  Network net(cfg, seed, nopts);
  net.start();
  net.run_until(cfg.sim_duration);
  auto r = net.report();
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace floodguard
