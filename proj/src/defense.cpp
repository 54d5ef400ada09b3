#include "floodguard/defense.hpp"

#include <string>

namespace floodguard {

AlphaOutOfRange::AlphaOutOfRange(double alpha)
    : std::invalid_argument("alpha " + std::to_string(alpha) + " out of (0,1]") {}

double ewma_update(Ewma& state, double c, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw AlphaOutOfRange(alpha);
  if (!state.initialized) {
    state.value = c;
    state.initialized = true;
  } else {
    state.value = alpha * c + (1.0 - alpha) * state.value;
  }
  return state.value;
}

void EwmaState::update(double c, double alpha_low, double alpha_high) {
  ewma_update(low, c, alpha_low);
  ewma_update(high, c, alpha_high);
}

// ---------------------------------------------------------------------------

AlarmMode AlarmState::observe(SimTime now) {
  times_.push_back(now);
  return evaluate(now);
}

AlarmMode AlarmState::evaluate(SimTime now) {
  while (!times_.empty() && times_.front() <= now - window_) times_.pop_front();
  if (static_cast<double>(times_.size()) > threshold_) {
    mode_ = AlarmMode::Alarmed;
    last_exceeded_ = now;
  } else if (mode_ == AlarmMode::Alarmed && now - last_exceeded_ >= window_) {
    mode_ = AlarmMode::Quiet;
  }
  return forced_ ? *forced_ : mode_;
}

Verdict classify_neighbor(const NeighborRecord& record, double apt_threshold) {
  const auto& e = record.ewma;
  if (!e.initialized()) return Verdict::Normal;
  return e.d_low() > apt_threshold && e.d_high() > apt_threshold ? Verdict::Attacker
                                                                 : Verdict::Normal;
}

// ---------------------------------------------------------------------------

void RttEstimator::add_sample(double rtt) {
  if (rtt <= 0.0) return;
  sum_ += rtt;
  ++count_;
}

std::optional<DetentionEntry> DetentionList::detain(NodeId suspect, SimTime now, double rtt) {
  return detain_until(suspect, now, now + 4.0 * rtt);
}

std::optional<DetentionEntry> DetentionList::detain_until(NodeId suspect, SimTime now,
                                                          SimTime expiry) {
  if (active_.contains(suspect)) return std::nullopt;
  DetentionEntry e{suspect, now, expiry, ++offenses_[suspect]};
  active_.emplace(suspect, e);
  return e;
}

std::vector<DetentionEntry> DetentionList::revise(SimTime now) {
  std::vector<DetentionEntry> released;
  for (auto it = active_.begin(); it != active_.end();) {
    if (it->second.expiry <= now) {
      released.push_back(it->second);
      it = active_.erase(it);
    } else {
      ++it;
    }
  }
  return released;
}

const DetentionEntry* DetentionList::find(NodeId suspect) const {
  auto it = active_.find(suspect);
  return it == active_.end() ? nullptr : &it->second;
}

std::uint32_t DetentionList::offenses(NodeId suspect) const {
  auto it = offenses_.find(suspect);
  return it == offenses_.end() ? 0 : it->second;
}

// ---------------------------------------------------------------------------

DefenseParams DefenseParams::from(const ScenarioConfig& cfg) {
  DefenseParams p;
  p.alpha_low = cfg.alpha_low;
  p.alpha_high = cfg.alpha_high;
  p.apt_threshold = cfg.apt_threshold;
  p.net_alarm_threshold = cfg.net_alarm_threshold;
  p.net_alarm_window = cfg.net_alarm_window;
  p.hello_interval = cfg.hello_interval;
  p.default_rtt = cfg.default_rtt;
  p.require_local_confirmation = cfg.require_local_confirmation;
  p.enabled = cfg.defense;
  return p;
}

const char* to_string(DetectionAction::Kind kind) {
  switch (kind) {
    case DetectionAction::Kind::Detain: return "DETAIN";
    case DetectionAction::Kind::Release: return "RELEASE";
    case DetectionAction::Kind::IsolateRx: return "ISOLATE_RX";
  }
  return "?";
}

Detector::Detector(NodeId self, DefenseParams params)
    : self_(self),
      params_(params),
      alarm_(params.net_alarm_threshold, params.net_alarm_window),
      rtt_(params.default_rtt) {}

NeighborRecord* Detector::neighbor(NodeId id) {
  auto it = table_.find(id);
  return it == table_.end() ? nullptr : &it->second;
}

NeighborRecord& Detector::touch(NodeId from, SimTime now) {
  auto [it, inserted] = table_.try_emplace(from);
  auto& rec = it->second;
  if (inserted) rec.neighbor = from;
  rec.active = true;
  rec.last_seen = now;
  return rec;
}

void Detector::on_hello(NodeId from, const RreqCounters& counters, SimTime now) {
  auto& rec = touch(from, now);
  rec.last_counters = counters;
}

void Detector::on_rreq(const Packet& rreq, bool fresh, SimTime now) {
  auto& rec = touch(rreq.sender, now);
  if (rreq.origin == rreq.sender) ++rec.observed_rreq_this_interval;
  if (fresh) alarm_.observe(now);
}

std::optional<DetectionAction> Detector::on_isolate(NodeId suspect, SimTime expiry, SimTime now) {
  if (!params_.enabled || suspect == self_ || expiry <= now) return std::nullopt;
  const NeighborRecord* rec = neighbor(suspect);
  if (params_.require_local_confirmation) {
    if (!rec || !rec->ewma.initialized() || rec->ewma.d_high() <= params_.apt_threshold)
      return std::nullopt;
  }
  auto entry = detention_.detain_until(suspect, now, expiry);
  if (!entry) return std::nullopt;
  return DetectionAction{DetectionAction::Kind::IsolateRx, suspect,
                         rec ? rec->ewma.d_low() : 0.0, rec ? rec->ewma.d_high() : 0.0, *entry};
}

std::vector<DetectionAction> Detector::measure(SimTime now) {
  std::vector<DetectionAction> actions;
  ++interval_index_;

  for (const auto& e : detention_.revise(now)) {
    double lo = 0.0, hi = 0.0;
    if (auto* rec = neighbor(e.suspect)) {
      lo = rec->ewma.d_low();
      hi = rec->ewma.d_high();
      rec->ewma.reset();
    }
    actions.push_back({DetectionAction::Kind::Release, e.suspect, lo, hi, e});
  }

  const double stale_after = 2.0 * params_.hello_interval;
  for (auto& [id, rec] : table_) {
    if (rec.active && now - rec.last_seen >= stale_after) rec.active = false;
    if (!rec.active && rec.observed_rreq_this_interval == 0) continue;

    const auto c = rec.observed_rreq_this_interval;
    rec.last_hello_delta = rec.last_counters.sent >= rec.prev_counters.sent
                               ? rec.last_counters.sent - rec.prev_counters.sent
                               : 0;
    rec.counter_mismatch = c > rec.last_hello_delta;
    rec.prev_counters = rec.last_counters;
    rec.last_observed = c;
    rec.observed_rreq_this_interval = 0;
    rec.ewma.update(static_cast<double>(c), params_.alpha_low, params_.alpha_high);
    rec.ewma.last_interval_index = interval_index_;
  }

  if (!params_.enabled || alarm_.evaluate(now) != AlarmMode::Alarmed) return actions;

  for (auto& [id, rec] : table_) {
    if (rec.ewma.last_interval_index != interval_index_) continue;
    if (classify_neighbor(rec, params_.apt_threshold) != Verdict::Attacker) continue;
    if (auto entry = detention_.detain(id, now, rtt_.estimate())) {
      actions.push_back({DetectionAction::Kind::Detain, id, rec.ewma.d_low(),
                         rec.ewma.d_high(), *entry});
    }
  }
  return actions;
}

}  // namespace floodguard
