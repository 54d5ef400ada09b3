#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "floodguard/model.hpp"

namespace floodguard {

/// Node-level confusion matrix; attackers are the positive class.
struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

/// `truth` and `detected` must be subsets of [0, node_count).
ConfusionMatrix confusion(const std::vector<NodeId>& truth, const std::vector<NodeId>& detected,
                          std::uint32_t node_count);

// Percentages; nullopt when the denominator is zero (not applicable).
std::optional<double> fpr(const ConfusionMatrix& cm);
std::optional<double> fnr(const ConfusionMatrix& cm);
std::optional<double> dr(const ConfusionMatrix& cm);

struct FlowStats {
  NodeId src = 0;
  NodeId dst = 0;
  std::uint64_t sent = 0;      // Z_i
  std::uint64_t received = 0;  // A_i
};

struct DropCounts {
  std::uint64_t loss = 0;
  std::uint64_t no_route = 0;
  std::uint64_t ttl_exceeded = 0;
  std::uint64_t queue_overflow = 0;
  std::uint64_t detained_next_hop = 0;
  std::uint64_t detained_sender = 0;

  std::uint64_t total() const {
    return loss + no_route + ttl_exceeded + queue_overflow + detained_next_hop + detained_sender;
  }
};

struct AttackerTiming {
  NodeId node = 0;
  std::optional<SimTime> first_flood;
  std::optional<SimTime> first_detained;
};

struct RunReport {
  std::uint64_t config_digest = 0;
  std::uint64_t seed = 0;
  double attacker_ratio = 0.0;
  bool defense = true;
  std::uint32_t node_count = 0;
  SimTime sim_duration = 0.0;

  std::vector<NodeId> attackers;  // ground truth, fixed at start
  std::vector<NodeId> detected;   // detained at least once by a benign node
  ConfusionMatrix cm;
  std::optional<double> fpr, fnr, dr, pdr;

  std::vector<FlowStats> flows;
  std::uint64_t data_originated = 0;
  std::uint64_t data_delivered = 0;
  std::uint64_t data_in_flight = 0;
  DropCounts drops;

  std::vector<AttackerTiming> attacker_timing;
  std::uint64_t events_processed = 0;
  std::uint64_t rreq_transmissions = 0;
  std::uint64_t attack_rreqs = 0;
  std::uint64_t rrep_for_invalid = 0;
  std::uint64_t detentions = 0;
  std::uint64_t isolations_received = 0;

  double wall_time_s = 0.0;  // not serialized
};

class NoTraffic : public std::runtime_error {
 public:
  NoTraffic() : std::runtime_error("run sent no DATA packets") {}
};

/// Sum A_i / sum Z_i * 100 for one run. Throws NoTraffic when sum Z_i == 0.
double run_pdr(const std::vector<FlowStats>& flows);

/// Mean over experiments of per-run delivery ratios, in percent.
double pdr(const std::vector<RunReport>& reports);

enum class Metric : std::uint8_t { Fpr, Fnr, Dr, Pdr };
const char* to_string(Metric m);
std::optional<double> metric_of(const RunReport& r, Metric m);
inline constexpr Metric kAllMetrics[] = {Metric::Fpr, Metric::Fnr, Metric::Dr, Metric::Pdr};

struct SweepRow {
  double ratio = 0.0;
  Metric metric = Metric::Fpr;
  std::optional<double> mean;  // nullopt if no run defined the metric
  double stddev = 0.0;         // sample standard deviation, 0 when n < 2
  std::size_t n_seeds = 0;     // runs where the metric was defined
};

/// Rows ordered by ratio, then metric. Undefined values are skipped.
std::vector<SweepRow> aggregate_sweep(const std::map<double, std::vector<RunReport>>& by_ratio);

/// `ratio,metric,mean,stddev,n_seeds`, three decimals, NA for undefined means.
std::string sweep_csv(const std::vector<SweepRow>& rows, std::optional<Metric> only = {});

/// Deterministic JSON text of a report, without wall time.
std::string serialize_report(const RunReport& r);

}  // namespace floodguard
