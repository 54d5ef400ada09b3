#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "absl/container/btree_map.h"
#include "floodguard/model.hpp"
#include "floodguard/packet.hpp"

namespace floodguard {

class AlphaOutOfRange : public std::invalid_argument {
 public:
  explicit AlphaOutOfRange(double alpha);
};

/// One exponentially weighted moving average of per-interval RREQ counts.
/// The first observation seeds the average directly.
struct Ewma {
  double value = 0.0;
  bool initialized = false;
};

/// D = c on the first call, then D = alpha * c + (1 - alpha) * D.
/// Throws AlphaOutOfRange unless 0 < alpha <= 1.
double ewma_update(Ewma& state, double c, double alpha);

/// The fast and slow APT-RREQ averages kept for each neighbor.
struct EwmaState {
  Ewma low;   // alpha_low: slow, confirms persistence
  Ewma high;  // alpha_high: fast, reacts to onset
  std::int64_t last_interval_index = -1;

  bool initialized() const { return low.initialized && high.initialized; }
  double d_low() const { return low.value; }
  double d_high() const { return high.value; }
  void update(double c, double alpha_low, double alpha_high);
  void reset() { *this = EwmaState{}; }
};

struct NeighborRecord {
  NodeId neighbor = 0;
  bool active = false;
  SimTime last_seen = 0.0;
  RreqCounters last_counters;
  RreqCounters prev_counters;
  EwmaState ewma;
  /// RREQs this neighbor originated and we heard directly, this interval.
  std::uint64_t observed_rreq_this_interval = 0;
  /// Most recent C_t and the Hello-reported sent delta over the same interval.
  std::uint64_t last_observed = 0;
  std::uint64_t last_hello_delta = 0;
  /// Observed originations exceeded what the neighbor advertised.
  bool counter_mismatch = false;
};

enum class AlarmMode : std::uint8_t { Quiet, Alarmed };

/// Node-local network alarm over a sliding window of distinct RREQs.
class AlarmState {
 public:
  AlarmState(double threshold, double window) : threshold_(threshold), window_(window) {}

  /// Records one newly seen RREQ and re-evaluates.
  AlarmMode observe(SimTime now);
  /// Re-evaluates without a new observation (window slide, hysteresis).
  AlarmMode evaluate(SimTime now);

  AlarmMode mode() const { return mode_; }
  std::size_t window_rreq_count() const { return times_.size(); }
  SimTime window_start() const { return times_.empty() ? 0.0 : times_.front(); }
  /// Test hook: pin the mode regardless of traffic.
  void force(std::optional<AlarmMode> mode) { forced_ = mode; }

 private:
  double threshold_, window_;
  AlarmMode mode_ = AlarmMode::Quiet;
  std::optional<AlarmMode> forced_;
  SimTime last_exceeded_ = 0.0;
  std::deque<SimTime> times_;
};

enum class Verdict : std::uint8_t { Normal, Attacker };

/// Attacker iff both averages exceed the threshold. Requires an initialized
/// EWMA; uninitialized records are Normal.
Verdict classify_neighbor(const NeighborRecord& record, double apt_threshold);

struct DetentionEntry {
  NodeId suspect = 0;
  SimTime detained_at = 0.0;
  SimTime expiry = 0.0;
  std::uint32_t offense_count = 1;
};

/// Running mean of RREQ->RREP round trips.
class RttEstimator {
 public:
  explicit RttEstimator(double default_rtt) : default_(default_rtt) {}
  void add_sample(double rtt);
  double estimate() const { return count_ == 0 ? default_ : sum_ / count_; }
  std::uint64_t sample_count() const { return count_; }

 private:
  double default_;
  double sum_ = 0.0;
  std::uint64_t count_ = 0;
};

class DetentionList {
 public:
  /// New entry with expiry now + 4 * rtt, or nullopt if already detained.
  std::optional<DetentionEntry> detain(NodeId suspect, SimTime now, double rtt);
  /// New entry with an externally chosen expiry, or nullopt if already detained.
  std::optional<DetentionEntry> detain_until(NodeId suspect, SimTime now, SimTime expiry);
  /// Removes and returns every entry with expiry <= now, ascending by suspect.
  std::vector<DetentionEntry> revise(SimTime now);

  bool contains(NodeId suspect) const { return active_.contains(suspect); }
  const DetentionEntry* find(NodeId suspect) const;
  std::size_t size() const { return active_.size(); }
  std::uint32_t offenses(NodeId suspect) const;

 private:
  std::map<NodeId, DetentionEntry> active_;
  std::map<NodeId, std::uint32_t> offenses_;
};

struct DefenseParams {
  double alpha_low = 0.3;
  double alpha_high = 0.7;
  double apt_threshold = 5.0;
  double net_alarm_threshold = 20.0;
  double net_alarm_window = 10.0;
  double hello_interval = 1.0;
  double default_rtt = 0.5;
  bool require_local_confirmation = false;
  /// Off: neighbor bookkeeping only, never classifies or detains.
  bool enabled = true;

  static DefenseParams from(const ScenarioConfig& cfg);
};

struct DetectionAction {
  enum class Kind : std::uint8_t { Detain, Release, IsolateRx };
  Kind kind;
  NodeId suspect;
  double d_low;
  double d_high;
  DetentionEntry entry;
};

const char* to_string(DetectionAction::Kind kind);

/// Per-node flooding detector: neighbor table, alarm, APT-RREQ averages,
/// detention list and revision.
class Detector {
 public:
  Detector(NodeId self, DefenseParams params);

  void on_hello(NodeId from, const RreqCounters& counters, SimTime now);
  /// Called for every RREQ heard, before duplicate suppression. `fresh` marks
  /// the first copy of (origin, rreq_id) this node has seen.
  void on_rreq(const Packet& rreq, bool fresh, SimTime now);
  /// ISOLATE from a neighbor. Returns the new entry, if one was created.
  std::optional<DetectionAction> on_isolate(NodeId suspect, SimTime expiry, SimTime now);
  void add_rtt_sample(double rtt) { rtt_.add_sample(rtt); }

  /// One measurement tick: revise, fold the interval's counts into the
  /// averages, expire silent neighbors and, under alarm, convict.
  std::vector<DetectionAction> measure(SimTime now);

  /// Frames received from or addressed to `node` must be rejected.
  bool blocks(NodeId node) const { return detention_.contains(node); }

  NodeId self() const { return self_; }
  const DefenseParams& params() const { return params_; }
  const absl::btree_map<NodeId, NeighborRecord>& neighbors() const { return table_; }
  NeighborRecord* neighbor(NodeId id);
  AlarmState& alarm() { return alarm_; }
  const AlarmState& alarm() const { return alarm_; }
  DetentionList& detention() { return detention_; }
  const DetentionList& detention() const { return detention_; }
  RttEstimator& rtt() { return rtt_; }
  std::int64_t interval_index() const { return interval_index_; }

 private:
  NeighborRecord& touch(NodeId from, SimTime now);

  NodeId self_;
  DefenseParams params_;
  absl::btree_map<NodeId, NeighborRecord> table_;
  AlarmState alarm_;
  DetentionList detention_;
  RttEstimator rtt_;
  std::int64_t interval_index_ = 0;
};

}  // namespace floodguard
