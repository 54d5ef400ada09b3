#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <queue>
#include <random>
#include <stdexcept>
#include <variant>
#include <vector>

#include <boost/heap/d_ary_heap.hpp>

#include "floodguard/model.hpp"
#include "floodguard/packet.hpp"

namespace floodguard {

// ---------------------------------------------------------------------------
// Random streams
// ---------------------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x);

/// Independent concerns draw from independent streams so that, for example,
/// changing the attacker count does not perturb node placement.
enum class Stream : std::uint64_t {
  Placement = 1,
  Mobility = 2,
  Loss = 3,
  Traffic = 4,
  Attacker = 5,
  Jitter = 6,
};

class Rng {
 public:
  Rng(std::uint64_t seed, Stream stream, std::uint64_t substream = 0);

  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool bernoulli(double p) { return p >= 1.0 || uniform() < p; }
  /// Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n);

 private:
  std::mt19937_64 gen_;
};

// ---------------------------------------------------------------------------
// Event queue
// ---------------------------------------------------------------------------

enum class TimerKind : std::uint8_t { Hello, Measure, DiscoveryTimeout, AttackTick };

struct Timer {
  TimerKind kind = TimerKind::Hello;
  NodeId target = 0;  // destination for DiscoveryTimeout
  std::uint32_t generation = 0;
};

/// One frame reaching its receivers. Every receiver of a broadcast hears it
/// at the same instant; receivers are processed in ascending id order.
struct Delivery {
  std::vector<NodeId> receivers;
  Packet packet;
};
/// Held by pointer so queued events stay small.
struct PacketArrival {
  std::shared_ptr<const Delivery> delivery;
};
struct TimerFire {
  NodeId node;
  Timer timer;
};
struct AppSend {
  std::uint32_t flow;
};

using EventBody = std::variant<PacketArrival, TimerFire, AppSend>;

struct Event {
  SimTime time = 0.0;
  std::uint64_t seq = 0;
  EventBody body;
};

class SchedulingInPast : public std::logic_error {
 public:
  SchedulingInPast(SimTime at, SimTime now);
};

/// Min-queue on (time, seq). `seq` is assigned at insertion, so events at
/// equal times leave in insertion order.
class EventQueue {
 public:
  void schedule(SimTime at, EventBody body);
  SimTime now() const { return now_; }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  const std::vector<Event>& pending() const { return heap_; }

  /// Processes every event with time <= t_end in order, then sets the clock
  /// to t_end. `handler` may schedule further events.
  template <typename Handler>
  std::uint64_t run_until(SimTime t_end, Handler&& handler) {
    std::uint64_t processed = 0;
    while (!heap_.empty() && heap_.front().time <= t_end) {
      Event ev = pop_next();
      handler(ev);
      ++processed;
    }
    advance_to(t_end);
    return processed;
  }

  std::optional<SimTime> next_time() const;
  /// Removes the earliest event and moves the clock to its time.
  Event pop_next();
  /// Moves the clock forward; never backward.
  void advance_to(SimTime t) {
    if (t > now_) now_ = t;
  }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };
  std::vector<Event> heap_;
  std::uint64_t next_seq_ = 0;
  SimTime now_ = 0.0;
};

/// At most one pending wake-up per node, which can be moved later in place.
/// Ties leave in the order they were last (re)scheduled.
class WakeQueue {
 public:
  explicit WakeQueue(std::size_t nodes) : handles_(nodes) {}

  /// Sets the wake time of `node`, replacing any pending one.
  void set(NodeId node, SimTime at);
  /// Moves a pending wake of `node` to `at` if it is currently earlier.
  void postpone(NodeId node, SimTime at);
  bool pending(NodeId node) const { return handles_[node].has_value(); }
  std::optional<SimTime> next_time() const;
  /// Removes the earliest wake-up and returns its node.
  NodeId pop();

 private:
  struct Entry {
    SimTime time;
    std::uint64_t seq;
    NodeId node;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };
  using Heap = boost::heap::d_ary_heap<Entry, boost::heap::arity<4>, boost::heap::mutable_<true>,
                                       boost::heap::compare<Later>>;
  Heap heap_;
  std::vector<std::optional<Heap::handle_type>> handles_;
  std::uint64_t next_seq_ = 0;
};

// ---------------------------------------------------------------------------
// Random waypoint mobility
// ---------------------------------------------------------------------------

struct MobilityState {
  Position from;
  Position waypoint;
  double speed = 0.0;
  SimTime depart = 0.0;
  SimTime arrive = 0.0;
  SimTime pause_until = 0.0;
};

/// Positions are advanced lazily at query time. Per node, queries must be
/// made at non-decreasing times.
class RandomWaypoint {
 public:
  /// Uniform initial placement; every node immediately departs to its first
  /// waypoint.
  RandomWaypoint(const ScenarioConfig& cfg, std::uint64_t seed);
  /// Fixed positions, never moving.
  explicit RandomWaypoint(std::vector<Position> fixed, double width = 1e9, double height = 1e9);

  std::size_t size() const { return state_.size(); }
  Position position_at(NodeId node, SimTime t) {
    const auto& s = state_[node];
    if (s.speed <= 0.0) return s.from;
    if (v_max_ > 0.0 && t >= s.pause_until) advance(node, t);
    if (t >= s.arrive) return s.waypoint;
    if (t <= s.depart) return s.from;
    const double frac = (t - s.depart) / (s.arrive - s.depart);
    return Position{s.from.x + (s.waypoint.x - s.from.x) * frac,
                    s.from.y + (s.waypoint.y - s.from.y) * frac};
  }
  /// Overrides the current leg of `node`.
  void set_leg(NodeId node, Position from, Position to, double speed, SimTime depart);
  const MobilityState& state(NodeId node) const { return state_[node]; }

 private:
  void begin_leg(NodeId node, SimTime depart);
  void advance(NodeId node, SimTime t);

  double width_, height_, v_min_ = 0.0, v_max_ = 0.0, pause_ = 0.0;
  std::vector<MobilityState> state_;
  std::vector<Rng> rng_;
};

// ---------------------------------------------------------------------------
// Shared radio channel
// ---------------------------------------------------------------------------

struct Frame {
  Packet packet;
  std::optional<NodeId> next_hop;  // nullopt = broadcast
};

struct TxOutcome {
  Frame frame;
  SimTime end = 0.0;     // radio free again
  SimTime arrival = 0.0;  // when receivers hear the frame
  std::vector<NodeId> receivers;
  /// Every node in range of the sender; their channel is busy until `end`.
  std::vector<NodeId> neighbors;
  /// Unicast only: the next hop was out of range at send time.
  bool out_of_range = false;
  /// Unicast only: every attempt was lost.
  bool lost = false;
};

/// Unit-disk radio with per-reception Bernoulli loss over a collision-free
/// shared medium. A transmission occupies the channel at every node in range
/// of the sender for its airtime; a node only starts sending when its local
/// channel is idle. Each node has a bounded FIFO transmit queue.
class Channel {
 public:
  static constexpr double kPropagationDelay = 1e-3;

  Channel(const ScenarioConfig& cfg, std::uint64_t seed);

  double airtime(const Packet& p) const { return p.size_bytes() * 8.0 / bandwidth_; }

  /// False when the queue was full and the frame was dropped.
  bool enqueue(NodeId sender, Frame frame);
  std::size_t queued(NodeId node) const { return queues_[node].size(); }
  const std::deque<Frame>& queue(NodeId node) const { return queues_[node]; }
  bool transmitting(NodeId node, SimTime now) const { return tx_end_[node] > now; }
  /// Earliest time `node` could start sending.
  SimTime free_at(NodeId node) const;

  /// Starts the head frame of `sender` if its radio and local channel are
  /// idle at `now`.
  std::optional<TxOutcome> try_start(NodeId sender, SimTime now, RandomWaypoint& mobility);

  /// Nodes within range of `node` at `t`, ascending ids.
  std::vector<NodeId> in_range(NodeId node, SimTime t, RandomWaypoint& mobility) const;

 private:
  double range_, success_, bandwidth_;
  std::uint32_t retries_, queue_limit_;
  std::vector<std::deque<Frame>> queues_;
  std::vector<SimTime> busy_until_;
  std::vector<SimTime> tx_end_;
  Rng loss_;
};

}  // namespace floodguard
