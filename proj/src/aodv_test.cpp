#include <queue>
#include <random>
#include <set>

#include "catch_amalgamated.hpp"
#include "floodguard/aodv.hpp"
#include "floodguard/scenario_io.hpp"
#include "floodguard/simulation.hpp"

using namespace floodguard;

namespace {

/// Records everything a single router asks of its host.
struct FakePort : RouterPort {
  SimTime t = 0.0;
  std::vector<Frame> sent;
  std::vector<std::pair<Timer, SimTime>> armed;
  std::vector<std::pair<Packet, DropReason>> drops;
  std::vector<Packet> deliveries;
  std::set<NodeId> detained;
  int observed = 0;

  SimTime now() const override { return t; }
  void send(NodeId, Frame f) override { sent.push_back(std::move(f)); }
  void arm(NodeId, Timer timer, SimTime at) override { armed.emplace_back(timer, at); }
  void observe_rreq(NodeId, const Packet&, bool) override { ++observed; }
  bool blocked(NodeId, NodeId other) const override { return detained.contains(other); }
  void rtt_sample(NodeId, double) override {}
  void delivered(NodeId, const Packet& p) override { deliveries.push_back(p); }
  void dropped(NodeId, const Packet& p, DropReason r) override { drops.emplace_back(p, r); }
};

RouterParams params(std::uint32_t n) {
  RouterParams p;
  p.node_count = n;
  return p;
}

Packet rreq(NodeId origin, NodeId sender, NodeId dest, std::uint32_t id, std::uint32_t hops = 0) {
  Packet p;
  p.kind = PacketKind::Rreq;
  p.origin = origin;
  p.sender = sender;
  p.dest = dest;
  p.rreq_id = id;
  p.seq = id;
  p.hop_count = hops;
  return p;
}

ScenarioConfig static_cfg(std::uint32_t n) {
  ScenarioConfig c;
  c.node_count = n;
  c.attacker_ratio = 0.0;
  c.link_success_prob = 1.0;
  c.v_min = 0.0;
  c.v_max = 0.0;
  c.cbr_flow_count = 0;
  c.sim_duration = 100.0;
  return c;
}

NetworkOptions quiet(std::vector<Position> pos) {
  NetworkOptions o;
  o.positions = std::move(pos);
  o.attackers = std::vector<NodeId>{};
  o.hello = false;
  o.measure = false;
  o.attack = false;
  o.traffic = false;
  return o;
}

/// Hop distances from `src` in the unit-disk graph; -1 if unreachable.
std::vector<int> bfs_hops(const std::vector<Position>& pos, double range, NodeId src) {
  std::vector<int> d(pos.size(), -1);
  std::queue<NodeId> q;
  d[src] = 0;
  q.push(src);
  while (!q.empty()) {
    const NodeId u = q.front();
    q.pop();
    for (NodeId v = 0; v < pos.size(); ++v) {
      if (d[v] < 0 && distance(pos[u], pos[v]) <= range) {
        d[v] = d[u] + 1;
        q.push(v);
      }
    }
  }
  return d;
}

}  // namespace

TEST_CASE("RREQ is flooded once and reverse route recorded", "[aodv]") {
  FakePort port;
  Router r(1, params(10), port);
  r.handle_rreq(rreq(0, 0, 5, 1));
  REQUIRE(port.sent.size() == 1);
  const auto& fwd = port.sent[0];
  CHECK_FALSE(fwd.next_hop);
  CHECK(fwd.packet.sender == 1);
  CHECK(fwd.packet.hop_count == 1);
  REQUIRE(r.route(0));
  CHECK(r.route(0)->next_hop == 0);
  CHECK(r.route(0)->hop_count == 1);

  r.handle_rreq(rreq(0, 3, 5, 1, 2));  // duplicate via another neighbor
  CHECK(port.sent.size() == 1);
  CHECK(port.observed == 2);
  CHECK(r.counters().received == 2);
  CHECK(r.counters().sent == 1);
}

TEST_CASE("destination answers with a unicast RREP", "[aodv]") {
  FakePort port;
  Router r(5, params(10), port);
  r.handle_rreq(rreq(0, 2, 5, 1, 1));
  REQUIRE(port.sent.size() == 1);
  CHECK(port.sent[0].packet.kind == PacketKind::Rrep);
  CHECK(port.sent[0].next_hop == NodeId{2});
  CHECK(port.sent[0].packet.origin == 0);
}

TEST_CASE("RREQs from detained senders or origins are ignored", "[aodv]") {
  FakePort port;
  port.detained = {7};
  Router r(1, params(10), port);
  r.handle_rreq(rreq(7, 7, 5, 1));
  r.handle_rreq(rreq(7, 3, 5, 2, 1));
  r.handle_rreq(rreq(4, 7, 5, 3, 1));
  CHECK(port.sent.empty());
  CHECK(port.observed == 3);
  CHECK_FALSE(r.route(7));
}

TEST_CASE("five fake RREQs from a detained flooder: counted, not relayed", "[aodv]") {
  FakePort port;
  port.detained = {9};
  Router r(1, params(100), port);
  const auto before = r.counters();
  for (std::uint32_t i = 0; i < 5; ++i) r.handle_rreq(rreq(9, 9, 90 + i, 100 + i));
  CHECK(r.counters().received == before.received + 5);
  CHECK(r.counters().sent == before.sent);
  CHECK(port.sent.empty());
}

TEST_CASE("data buffers behind a discovery and times out as no-route", "[aodv]") {
  FakePort port;
  Router r(0, params(10), port);
  Packet d;
  d.kind = PacketKind::Data;
  d.dest = 4;
  for (int i = 0; i < 3; ++i) r.originate_data(d);
  CHECK(r.buffered(4) == 3);
  CHECK(port.sent.size() == 1);  // one RREQ
  REQUIRE(port.armed.size() == 1);
  const auto gen = port.armed[0].first.generation;
  for (int attempt = 0; attempt < 2; ++attempt) r.on_discovery_timeout(4, gen);
  CHECK(port.sent.size() == 3);  // two retries
  CHECK(port.drops.empty());
  r.on_discovery_timeout(4, gen);
  CHECK(port.drops.size() == 3);
  for (const auto& [p, why] : port.drops) CHECK(why == DropReason::NoRoute);
  CHECK_FALSE(r.discovery_pending(4));
}

TEST_CASE("discovery buffer drops the oldest on overflow", "[aodv]") {
  FakePort port;
  auto p = params(10);
  p.buffer_limit = 2;
  Router r(0, p, port);
  Packet d;
  d.kind = PacketKind::Data;
  d.dest = 4;
  for (std::uint64_t i = 0; i < 3; ++i) {
    d.payload_id = i;
    r.originate_data(d);
  }
  REQUIRE(port.drops.size() == 1);
  CHECK(port.drops[0].first.payload_id == 0);
  CHECK(port.drops[0].second == DropReason::QueueOverflow);
}

TEST_CASE("forwarding refuses a detained next hop and stale TTL", "[aodv]") {
  FakePort port;
  Router r(1, params(4), port);
  r.refresh_neighbor_route(2);
  Packet d;
  d.kind = PacketKind::Data;
  d.origin = 0;
  d.sender = 0;
  d.dest = 2;
  d.hop_count = 1;
  port.detained = {2};
  r.forward_data(d);
  REQUIRE(port.drops.size() == 1);
  CHECK(port.drops[0].second == DropReason::DetainedNextHop);

  port.detained.clear();
  d.hop_count = 4;
  r.forward_data(d);
  REQUIRE(port.drops.size() == 2);
  CHECK(port.drops[1].second == DropReason::TtlExceeded);

  port.detained = {0};
  d.hop_count = 1;
  r.forward_data(d);
  CHECK(port.drops.back().second == DropReason::DetainedSender);
}

TEST_CASE("Hello carries cumulative counters", "[aodv]") {
  FakePort port;
  Router r(3, params(10), port);
  r.emit_hello();
  CHECK(port.sent.back().packet.hello_counters == RreqCounters{0, 0});
  for (int i = 0; i < 7; ++i) r.flood_rreq(invalid_address(10));
  r.emit_hello();
  CHECK(port.sent.back().packet.hello_counters == RreqCounters{7, 0});
  r.emit_hello(0);
  CHECK(port.sent.back().packet.hello_counters.sent == 0);
}

TEST_CASE("two nodes: route and delivery", "[aodv][network]") {
  Network net(static_cfg(2), 1, quiet({{0, 0}, {200, 0}}));
  net.start();
  net.send_data(0, 1);
  net.run_until(5.0);
  const auto r = net.router(0).route(1);
  REQUIRE(r);
  CHECK(r->next_hop == 1);
  CHECK(r->hop_count == 1);
  CHECK(net.report().data_delivered == 1);
}

TEST_CASE("line topology route matches BFS hops", "[aodv][network]") {
  for (std::uint32_t n = 3; n <= 6; ++n) {
    std::vector<Position> pos;
    for (std::uint32_t i = 0; i < n; ++i) pos.push_back({250.0 * i, 0.0});
    Network net(static_cfg(n), 1, quiet(pos));
    net.start();
    net.send_data(0, n - 1);
    net.run_until(5.0);
    const auto hops = bfs_hops(pos, 300.0, 0);
    const auto r = net.router(0).route(n - 1);
    REQUIRE(r);
    CHECK(r->next_hop == 1);
    CHECK(static_cast<int>(r->hop_count) == hops[n - 1]);
    CHECK(net.report().data_delivered == 1);
  }
}

TEST_CASE("random topologies: routes are real paths no shorter than BFS", "[aodv][network][property]") {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> u(0.0, 800.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::uint32_t n = 15;
    std::vector<Position> pos;
    for (std::uint32_t i = 0; i < n; ++i) pos.push_back({u(gen), u(gen)});
    const auto hops = bfs_hops(pos, 300.0, 0);
    NodeId dst = n - 1;
    Network net(static_cfg(n), trial, quiet(pos));
    net.start();
    net.send_data(0, dst);
    net.run_until(10.0);
    const auto r = net.router(0).route(dst);
    if (hops[dst] < 0) {
      CHECK_FALSE(r);
      CHECK(net.report().drops.no_route == 1);
      continue;
    }
    REQUIRE(r);
    CHECK(static_cast<int>(r->hop_count) >= hops[dst]);
    // Walk next hops: every hop is a radio neighbor and the walk ends at dst.
    NodeId at = 0;
    std::uint32_t walked = 0;
    while (at != dst && walked <= n) {
      const auto e = net.router(at).route(dst);
      REQUIRE(e);
      CHECK(distance(pos[at], pos[e->next_hop]) <= 300.0);
      at = e->next_hop;
      ++walked;
    }
    CHECK(at == dst);
    CHECK(walked == r->hop_count);
  }
}

TEST_CASE("RREQ to an invalid address gets no reply and each node forwards once",
          "[aodv][network]") {
  const std::uint32_t n = 12;
  std::vector<Position> pos;
  for (std::uint32_t i = 0; i < n; ++i) pos.push_back({200.0 * (i % 4), 200.0 * (i / 4)});
  auto o = quiet(pos);
  o.record_forwards = true;
  Network net(static_cfg(n), 1, o);
  net.start();
  for (int i = 0; i < 5; ++i) net.router(0).flood_rreq(invalid_address(n));
  net.run_until(10.0);
  CHECK(net.rrep_for_invalid() == 0);
  for (NodeId v = 0; v < n; ++v) {
    CHECK(net.tx_log(v).rrep_on_air == 0);
    for (std::uint32_t id = 1; id <= 5; ++id) {
      if (v == 0) continue;
      CHECK(net.forwards_of(v, 0, id) == 1);
    }
  }
  CHECK(net.router(0).counters().sent == 5);
  CHECK(net.router(0).last_rreq_id() == 5);
}

TEST_CASE("Hello cadence and neighbor counters", "[aodv][network]") {
  auto o = quiet({{0, 0}, {100, 0}});
  o.hello = true;
  Network net(static_cfg(2), 1, o);
  net.start();
  net.run_until(0.999);
  net.run_until(3.0);
  const auto* rec = net.detector(1).neighbor(0);
  REQUIRE(rec);
  CHECK(rec->last_counters == RreqCounters{0, 0});
  for (int i = 0; i < 7; ++i) net.router(0).flood_rreq(invalid_address(2));
  net.run_until(100.0);
  CHECK(net.detector(1).neighbor(0)->last_counters.sent == 7);
  for (NodeId v = 0; v < 2; ++v) CHECK(net.tx_log(v).hello_on_air == Catch::Approx(100).margin(1));
}

TEST_CASE("neighbor table: insert, refresh and expire", "[aodv][network]") {
  auto cfg = static_cfg(2);
  auto o = quiet({{0, 0}, {100, 0}});
  o.hello = true;
  o.measure = true;
  Network net(cfg, 1, o);
  net.start();
  net.run_until(2.5);
  REQUIRE(net.detector(1).neighbor(0));
  CHECK(net.detector(1).neighbor(0)->active);
  const SimTime seen = net.detector(1).neighbor(0)->last_seen;
  net.run_until(5.0);
  CHECK(net.detector(1).neighbor(0)->last_seen > seen);
  // Node 0 drives out of range; after two silent Hello intervals it is inactive.
  net.mobility().set_leg(0, {0, 0}, {5000, 0}, 1e6, net.now());
  net.run_until(10.0);
  CHECK_FALSE(net.detector(1).neighbor(0)->active);
}

TEST_CASE("static lossless network delivers every packet", "[aodv][network]") {
  const auto cfg = preset("static-lossless");
  const auto r = run_scenario(cfg, 1);
  REQUIRE(r.pdr);
  CHECK(*r.pdr == 100.0);
  CHECK(r.data_delivered == r.data_originated);
  CHECK(r.drops.total() == 0);
}

TEST_CASE("every DATA packet is delivered, dropped or still in the network",
          "[aodv][network][property]") {
  auto cfg = preset("default");
  cfg.node_count = 40;
  cfg.field_width = cfg.field_height = 700.0;
  cfg.attacker_ratio = 0.1;
  cfg.sim_duration = 60.0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    for (bool defense : {true, false}) {
      cfg.defense = defense;
      Network net(cfg, seed);
      net.start();
      for (SimTime t = 10.0; t <= cfg.sim_duration; t += 10.0) {
        net.run_until(t);
        const auto r = net.report();
        REQUIRE(r.data_originated ==
                r.data_delivered + r.drops.total() + net.count_data_in_network());
      }
    }
  }
}
