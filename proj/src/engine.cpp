#include "floodguard/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace floodguard {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, Stream stream, std::uint64_t substream)
    : gen_(splitmix64(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream))) +
                      substream)) {}

double Rng::uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::index(std::uint64_t n) {
  // Rejection sampling keeps the result exactly uniform and platform independent.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do v = gen_();
  while (v >= limit);
  return v % n;
}

// ---------------------------------------------------------------------------

SchedulingInPast::SchedulingInPast(SimTime at, SimTime now)
    : std::logic_error("event at t=" + std::to_string(at) + " scheduled at t=" +
                       std::to_string(now)) {}

void EventQueue::schedule(SimTime at, EventBody body) {
  if (at < now_) throw SchedulingInPast(at, now_);
  heap_.push_back(Event{at, next_seq_++, std::move(body)});
  std::push_heap(heap_.begin(), heap_.end(), Later{});
}

std::optional<SimTime> EventQueue::next_time() const {
  if (heap_.empty()) return std::nullopt;
  return heap_.front().time;
}

Event EventQueue::pop_next() {
  std::pop_heap(heap_.begin(), heap_.end(), Later{});
  Event ev = std::move(heap_.back());
  heap_.pop_back();
  now_ = ev.time;
  return ev;
}

void WakeQueue::set(NodeId node, SimTime at) {
  auto& h = handles_[node];
  const Entry e{at, next_seq_++, node};
  if (h) {
    heap_.update(*h, e);
  } else {
    h = heap_.push(e);
  }
}

void WakeQueue::postpone(NodeId node, SimTime at) {
  auto& h = handles_[node];
  if (!h || (**h).time >= at) return;
  heap_.update(*h, Entry{at, next_seq_++, node});
}

std::optional<SimTime> WakeQueue::next_time() const {
  if (heap_.empty()) return std::nullopt;
  return heap_.top().time;
}

NodeId WakeQueue::pop() {
  const NodeId node = heap_.top().node;
  heap_.pop();
  handles_[node].reset();
  return node;
}

// ---------------------------------------------------------------------------

RandomWaypoint::RandomWaypoint(const ScenarioConfig& cfg, std::uint64_t seed)
    : width_(cfg.field_width),
      height_(cfg.field_height),
      v_min_(cfg.v_min),
      v_max_(cfg.v_max),
      pause_(cfg.pause_time) {
  Rng placement(seed, Stream::Placement);
  state_.resize(cfg.node_count);
  rng_.reserve(cfg.node_count);
  for (NodeId n = 0; n < cfg.node_count; ++n) {
    rng_.emplace_back(seed, Stream::Mobility, n);
    Position p{placement.uniform(0.0, width_), placement.uniform(0.0, height_)};
    state_[n] = MobilityState{p, p, 0.0, 0.0, 0.0, 0.0};
    if (v_max_ > 0.0) begin_leg(n, 0.0);
  }
}

RandomWaypoint::RandomWaypoint(std::vector<Position> fixed, double width, double height)
    : width_(width), height_(height) {
  state_.reserve(fixed.size());
  for (std::size_t n = 0; n < fixed.size(); ++n) {
    state_.push_back(MobilityState{fixed[n], fixed[n], 0.0, 0.0, 0.0, 0.0});
    rng_.emplace_back(0, Stream::Mobility, n);
  }
}

void RandomWaypoint::begin_leg(NodeId node, SimTime depart) {
  auto& s = state_[node];
  auto& rng = rng_[node];
  s.from = s.waypoint;
  s.waypoint = Position{rng.uniform(0.0, width_), rng.uniform(0.0, height_)};
  s.speed = rng.uniform(v_min_, v_max_);
  s.depart = depart;
  s.arrive = depart + distance(s.from, s.waypoint) / s.speed;
  s.pause_until = s.arrive + pause_;
}

void RandomWaypoint::set_leg(NodeId node, Position from, Position to, double speed,
                             SimTime depart) {
  auto& s = state_[node];
  s.from = from;
  s.waypoint = to;
  s.speed = speed;
  s.depart = depart;
  s.arrive = speed > 0.0 ? depart + distance(from, to) / speed : depart;
  s.pause_until = speed > 0.0 ? s.arrive + pause_ : depart;
  if (speed <= 0.0) s.waypoint = from;
  if (v_max_ <= 0.0 && speed > 0.0) {
    // A scripted leg on an otherwise static node ends parked at the waypoint.
    s.pause_until = std::numeric_limits<double>::infinity();
  }
}

void RandomWaypoint::advance(NodeId node, SimTime t) {
  auto& s = state_[node];
  while (t >= s.pause_until) begin_leg(node, s.pause_until);
}

// ---------------------------------------------------------------------------

Channel::Channel(const ScenarioConfig& cfg, std::uint64_t seed)
    : range_(cfg.radio_range),
      success_(cfg.link_success_prob),
      bandwidth_(cfg.bandwidth),
      retries_(cfg.mac_retries),
      queue_limit_(cfg.tx_queue_limit),
      queues_(cfg.node_count),
      busy_until_(cfg.node_count, 0.0),
      tx_end_(cfg.node_count, 0.0),
      loss_(seed, Stream::Loss) {}

bool Channel::enqueue(NodeId sender, Frame frame) {
  auto& q = queues_[sender];
  if (q.size() >= queue_limit_) return false;
  q.push_back(std::move(frame));
  return true;
}

SimTime Channel::free_at(NodeId node) const {
  return std::max(busy_until_[node], tx_end_[node]);
}

std::vector<NodeId> Channel::in_range(NodeId node, SimTime t, RandomWaypoint& mobility) const {
  std::vector<NodeId> out;
  out.reserve(32);
  const Position here = mobility.position_at(node, t);
  const double r2 = range_ * range_;
  for (NodeId other = 0; other < mobility.size(); ++other) {
    if (other == node) continue;
    const Position p = mobility.position_at(other, t);
    const double dx = p.x - here.x, dy = p.y - here.y;
    if (dx * dx + dy * dy <= r2) out.push_back(other);
  }
  return out;
}

std::optional<TxOutcome> Channel::try_start(NodeId sender, SimTime now,
                                            RandomWaypoint& mobility) {
  auto& q = queues_[sender];
  if (q.empty() || free_at(sender) > now) return std::nullopt;

  TxOutcome out;
  out.frame = std::move(q.front());
  q.pop_front();

  const double one_shot = airtime(out.frame.packet);
  out.neighbors = in_range(sender, now, mobility);
  const auto& neighbors = out.neighbors;
  double occupied = one_shot;

  if (!out.frame.next_hop) {
    for (NodeId r : neighbors) {
      if (loss_.bernoulli(success_)) out.receivers.push_back(r);
    }
  } else {
    const NodeId hop = *out.frame.next_hop;
    if (!std::binary_search(neighbors.begin(), neighbors.end(), hop)) {
      out.out_of_range = true;
    } else {
      out.lost = true;
      for (std::uint32_t attempt = 0; attempt <= retries_; ++attempt) {
        occupied = one_shot * (attempt + 1);
        if (loss_.bernoulli(success_)) {
          out.lost = false;
          out.receivers.push_back(hop);
          break;
        }
      }
    }
  }

  out.end = now + occupied;
  out.arrival = out.end + kPropagationDelay;
  tx_end_[sender] = out.end;
  busy_until_[sender] = std::max(busy_until_[sender], out.end);
  for (NodeId r : neighbors) busy_until_[r] = std::max(busy_until_[r], out.end);
  return out;
}

}  // namespace floodguard
