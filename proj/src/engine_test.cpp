#include <cmath>
#include <vector>

#include "catch_amalgamated.hpp"
#include "floodguard/engine.hpp"

using namespace floodguard;

namespace {

std::vector<std::uint32_t> drain_flows(EventQueue& q, SimTime until) {
  std::vector<std::uint32_t> order;
  q.run_until(until, [&](const Event& ev) { order.push_back(std::get<AppSend>(ev.body).flow); });
  return order;
}

Frame broadcast(PacketKind kind = PacketKind::Hello) {
  Packet p;
  p.kind = kind;
  return Frame{p, std::nullopt};
}

ScenarioConfig channel_cfg(std::uint32_t n, double success) {
  ScenarioConfig c;
  c.node_count = n;
  c.link_success_prob = success;
  c.radio_range = 300.0;
  return c;
}

}  // namespace

TEST_CASE("events leave in time order", "[engine][queue]") {
  EventQueue q;
  q.schedule(3.0, AppSend{3});
  q.schedule(1.0, AppSend{1});
  q.schedule(2.0, AppSend{2});
  CHECK(drain_flows(q, 10.0) == std::vector<std::uint32_t>{1, 2, 3});
  CHECK(q.now() == 10.0);
}

TEST_CASE("equal-time events leave in insertion order", "[engine][queue]") {
  EventQueue q;
  for (std::uint32_t i = 0; i < 50; ++i) q.schedule(5.0, AppSend{i});
  const auto order = drain_flows(q, 5.0);
  REQUIRE(order.size() == 50);
  for (std::uint32_t i = 0; i < 50; ++i) CHECK(order[i] == i);
}

TEST_CASE("scheduling in the past is rejected", "[engine][queue]") {
  EventQueue q;
  q.schedule(2.0, AppSend{0});
  drain_flows(q, 2.0);
  CHECK_THROWS_AS(q.schedule(1.999, AppSend{1}), SchedulingInPast);
  CHECK_NOTHROW(q.schedule(2.0, AppSend{1}));
}

TEST_CASE("run_until on an empty queue only advances the clock", "[engine][queue]") {
  EventQueue q;
  CHECK(q.run_until(7.5, [](const Event&) { FAIL("no events expected"); }) == 0);
  CHECK(q.now() == 7.5);
  q.schedule(9.0, AppSend{0});
  CHECK(q.run_until(8.0, [](const Event&) {}) == 0);
  CHECK(q.size() == 1);
}

TEST_CASE("handlers may schedule at the current time", "[engine][queue]") {
  EventQueue q;
  q.schedule(1.0, AppSend{0});
  std::vector<std::uint32_t> seen;
  q.run_until(2.0, [&](const Event& ev) {
    const auto f = std::get<AppSend>(ev.body).flow;
    seen.push_back(f);
    if (f < 3) q.schedule(q.now(), AppSend{f + 1});
  });
  CHECK(seen == std::vector<std::uint32_t>{0, 1, 2, 3});
}

TEST_CASE("wake queue orders by time, then by last reschedule", "[engine][queue]") {
  WakeQueue w(4);
  w.set(0, 2.0);
  w.set(1, 1.0);
  w.set(2, 1.0);
  w.postpone(1, 3.0);
  w.postpone(2, 0.5);  // earlier: ignored
  CHECK(w.next_time() == 1.0);
  CHECK(w.pop() == 2);
  CHECK(w.pop() == 0);
  CHECK(w.pop() == 1);
  CHECK_FALSE(w.next_time());
  CHECK_FALSE(w.pending(3));
  w.postpone(3, 1.0);  // nothing pending: no-op
  CHECK_FALSE(w.pending(3));
}

TEST_CASE("random streams are reproducible and independent", "[engine][rng]") {
  Rng a(42, Stream::Loss), b(42, Stream::Loss), c(42, Stream::Traffic), d(43, Stream::Loss);
  int same_c = 0, same_d = 0;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    same_c += x == c.uniform();
    same_d += x == d.uniform();
  }
  CHECK(same_c == 0);
  CHECK(same_d == 0);
  Rng e(1, Stream::Attacker);
  for (int i = 0; i < 1000; ++i) CHECK(e.index(7) < 7);
}

TEST_CASE("random waypoint stays in the field and respects v_max", "[engine][mobility][property]") {
  ScenarioConfig c;
  c.node_count = 10;
  RandomWaypoint m(c, 99);
  std::vector<Position> last(c.node_count);
  for (NodeId n = 0; n < c.node_count; ++n) last[n] = m.position_at(n, 0.0);
  const double dt = 0.37;
  for (int step = 1; step <= 10000; ++step) {
    const SimTime t = step * dt;
    for (NodeId n = 0; n < c.node_count; ++n) {
      const Position p = m.position_at(n, t);
      REQUIRE(p.x >= 0.0);
      REQUIRE(p.x <= c.field_width);
      REQUIRE(p.y >= 0.0);
      REQUIRE(p.y <= c.field_height);
      REQUIRE(distance(p, last[n]) <= c.v_max * dt + 1e-9);
      last[n] = p;
    }
  }
}

TEST_CASE("scripted legs move linearly then pause", "[engine][mobility]") {
  ScenarioConfig c;
  c.node_count = 1;
  c.pause_time = 2.0;
  RandomWaypoint m(c, 1);
  m.set_leg(0, {0, 0}, {100, 0}, 10.0, 0.0);
  const Position half = m.position_at(0, 5.0);
  CHECK(half.x == Catch::Approx(50.0));
  CHECK(half.y == Catch::Approx(0.0));
  CHECK(m.position_at(0, 10.0).x == Catch::Approx(100.0));
  CHECK(m.position_at(0, 11.9).x == Catch::Approx(100.0));
  // After the pause a new leg starts from the waypoint.
  const Position later = m.position_at(0, 12.5);
  CHECK(distance(later, {100, 0}) <= c.v_max * 0.5 + 1e-9);
}

TEST_CASE("fixed positions never move", "[engine][mobility]") {
  RandomWaypoint m({{1, 2}, {3, 4}});
  for (double t : {0.0, 10.0, 1e6}) {
    CHECK(m.position_at(1, t).x == 3.0);
    CHECK(m.position_at(1, t).y == 4.0);
  }
}

TEST_CASE("same seed gives the same trajectories", "[engine][mobility]") {
  ScenarioConfig c;
  c.node_count = 20;
  RandomWaypoint a(c, 5), b(c, 5), d(c, 6);
  bool differs = false;
  for (int i = 0; i < 200; ++i) {
    for (NodeId n = 0; n < c.node_count; ++n) {
      const auto pa = a.position_at(n, i * 3.0), pb = b.position_at(n, i * 3.0);
      REQUIRE(pa.x == pb.x);
      REQUIRE(pa.y == pb.y);
      differs |= d.position_at(n, i * 3.0).x != pa.x;
    }
  }
  CHECK(differs);
}

TEST_CASE("unit disk: 300 m reaches, 301 m never does", "[engine][channel]") {
  RandomWaypoint m({{0, 0}, {300, 0}, {0, 301}});
  Channel ch(channel_cfg(3, 1.0), 1);
  for (int i = 0; i < 200; ++i) {
    const SimTime t = i * 1.0;
    REQUIRE(ch.enqueue(0, broadcast()));
    auto out = ch.try_start(0, t, m);
    REQUIRE(out);
    CHECK(out->receivers == std::vector<NodeId>{1});
    CHECK(out->neighbors == std::vector<NodeId>{1});
    CHECK(out->arrival == Catch::Approx(out->end + Channel::kPropagationDelay));
  }
}

TEST_CASE("range is symmetric", "[engine][channel][property]") {
  ScenarioConfig c;
  c.node_count = 40;
  RandomWaypoint m(c, 3);
  Channel ch(c, 3);
  for (int step = 0; step < 50; ++step) {
    const SimTime t = step * 7.0;
    for (NodeId a = 0; a < c.node_count; ++a) {
      for (NodeId b : ch.in_range(a, t, m)) {
        const auto back = ch.in_range(b, t, m);
        REQUIRE(std::binary_search(back.begin(), back.end(), a));
      }
    }
  }
}

TEST_CASE("per-reception loss matches link_success_prob", "[engine][channel]") {
  RandomWaypoint m({{0, 0}, {100, 0}});
  Channel ch(channel_cfg(2, 0.9), 17);
  const int trials = 100000;
  int heard = 0;
  for (int i = 0; i < trials; ++i) {
    ch.enqueue(0, broadcast());
    heard += static_cast<int>(ch.try_start(0, i * 1.0, m)->receivers.size());
  }
  CHECK(static_cast<double>(heard) / trials == Catch::Approx(0.9).margin(0.01));
}

TEST_CASE("unicast retries, reports loss and out-of-range", "[engine][channel]") {
  RandomWaypoint m({{0, 0}, {100, 0}, {900, 0}});
  Channel lossy(channel_cfg(3, 0.0), 1);
  Packet p;
  p.kind = PacketKind::Data;
  p.payload_bytes = 512;
  lossy.enqueue(0, Frame{p, NodeId{1}});
  auto out = lossy.try_start(0, 0.0, m);
  REQUIRE(out);
  CHECK(out->lost);
  CHECK(out->receivers.empty());
  // Every retry occupies the medium.
  CHECK(out->end == Catch::Approx(4 * lossy.airtime(p)));

  Channel clean(channel_cfg(3, 1.0), 1);
  clean.enqueue(0, Frame{p, NodeId{2}});
  out = clean.try_start(0, 0.0, m);
  REQUIRE(out);
  CHECK(out->out_of_range);
  CHECK_FALSE(out->lost);
}

TEST_CASE("a busy medium defers neighbors, queue is bounded", "[engine][channel]") {
  RandomWaypoint m({{0, 0}, {100, 0}, {2000, 0}});
  auto cfg = channel_cfg(3, 1.0);
  cfg.tx_queue_limit = 2;
  Channel ch(cfg, 1);
  CHECK(ch.enqueue(0, broadcast()));
  CHECK(ch.enqueue(0, broadcast()));
  CHECK_FALSE(ch.enqueue(0, broadcast()));
  auto first = ch.try_start(0, 0.0, m);
  REQUIRE(first);
  CHECK(ch.free_at(1) == first->end);
  CHECK(ch.free_at(2) == 0.0);
  ch.enqueue(1, broadcast());
  CHECK_FALSE(ch.try_start(1, first->end / 2, m));
  CHECK(ch.try_start(1, first->end, m));
  CHECK_FALSE(ch.try_start(0, first->end, m));  // own radio heard node 1
}
