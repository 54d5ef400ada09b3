#include "floodguard/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "json.hpp"

namespace floodguard {

ConfusionMatrix confusion(const std::vector<NodeId>& truth, const std::vector<NodeId>& detected,
                          std::uint32_t node_count) {
  const std::set<NodeId> t(truth.begin(), truth.end());
  const std::set<NodeId> d(detected.begin(), detected.end());
  ConfusionMatrix cm;
  for (NodeId n = 0; n < node_count; ++n) {
    const bool pos = t.contains(n), flagged = d.contains(n);
    if (pos && flagged) ++cm.tp;
    else if (flagged) ++cm.fp;
    else if (pos) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

namespace {
std::optional<double> percent(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return 100.0 * static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace

std::optional<double> fpr(const ConfusionMatrix& cm) { return percent(cm.fp, cm.fp + cm.tn); }
std::optional<double> fnr(const ConfusionMatrix& cm) { return percent(cm.fn, cm.fn + cm.tp); }
std::optional<double> dr(const ConfusionMatrix& cm) { return percent(cm.tp, cm.tp + cm.fn); }

double run_pdr(const std::vector<FlowStats>& flows) {
  std::uint64_t sent = 0, received = 0;
  for (const auto& f : flows) {
    sent += f.sent;
    received += f.received;
  }
  if (sent == 0) throw NoTraffic();
  return 100.0 * static_cast<double>(received) / static_cast<double>(sent);
}

double pdr(const std::vector<RunReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("pdr needs at least one experiment");
  double sum = 0.0;
  for (const auto& r : reports) sum += run_pdr(r.flows);
  return sum / static_cast<double>(reports.size());
}

const char* to_string(Metric m) {
  switch (m) {
    case Metric::Fpr: return "fpr";
    case Metric::Fnr: return "fnr";
    case Metric::Dr: return "dr";
    case Metric::Pdr: return "pdr";
  }
  return "?";
}

std::optional<double> metric_of(const RunReport& r, Metric m) {
  switch (m) {
    case Metric::Fpr: return r.fpr;
    case Metric::Fnr: return r.fnr;
    case Metric::Dr: return r.dr;
    case Metric::Pdr: return r.pdr;
  }
  return std::nullopt;
}

std::vector<SweepRow> aggregate_sweep(const std::map<double, std::vector<RunReport>>& by_ratio) {
  std::vector<SweepRow> rows;
  for (const auto& [ratio, runs] : by_ratio) {
    for (Metric m : kAllMetrics) {
      std::vector<double> values;
      for (const auto& r : runs)
        if (auto v = metric_of(r, m)) values.push_back(*v);
      SweepRow row{ratio, m, std::nullopt, 0.0, values.size()};
      if (!values.empty()) {
        double sum = 0.0;
        for (double v : values) sum += v;
        const double mean = sum / values.size();
        row.mean = mean;
        if (values.size() > 1) {
          double ss = 0.0;
          for (double v : values) ss += (v - mean) * (v - mean);
          row.stddev = std::sqrt(ss / (values.size() - 1));
        }
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, std::optional<Metric> only) {
  std::string out = "ratio,metric,mean,stddev,n_seeds\n";
  char buf[160];
  for (const auto& r : rows) {
    if (only && r.metric != *only) continue;
    if (r.mean) {
      std::snprintf(buf, sizeof buf, "%.3f,%s,%.3f,%.3f,%zu\n", r.ratio, to_string(r.metric),
                    *r.mean, r.stddev, r.n_seeds);
    } else {
      std::snprintf(buf, sizeof buf, "%.3f,%s,NA,NA,0\n", r.ratio, to_string(r.metric));
    }
    out += buf;
  }
  return out;
}

std::string serialize_report(const RunReport& r) {
  using nlohmann::ordered_json;
  auto opt = [](const std::optional<double>& v) -> ordered_json {
    return v ? ordered_json(*v) : ordered_json(nullptr);
  };
  ordered_json j;
  char digest[17];
  std::snprintf(digest, sizeof digest, "%016llx", static_cast<unsigned long long>(r.config_digest));
  j["config_digest"] = digest;
  j["seed"] = r.seed;
  j["attacker_ratio"] = r.attacker_ratio;
  j["defense"] = r.defense;
  j["node_count"] = r.node_count;
  j["sim_duration"] = r.sim_duration;
  j["attackers"] = r.attackers;
  j["detected"] = r.detected;
  j["confusion"] = {{"tp", r.cm.tp}, {"fp", r.cm.fp}, {"tn", r.cm.tn}, {"fn", r.cm.fn}};
  j["fpr"] = opt(r.fpr);
  j["fnr"] = opt(r.fnr);
  j["dr"] = opt(r.dr);
  j["pdr"] = opt(r.pdr);
  auto flows = ordered_json::array();
  for (const auto& f : r.flows)
    flows.push_back({{"src", f.src}, {"dst", f.dst}, {"sent", f.sent}, {"received", f.received}});
  j["flows"] = flows;
  j["data"] = {{"originated", r.data_originated},
               {"delivered", r.data_delivered},
               {"in_flight", r.data_in_flight}};
  j["drops"] = {{"loss", r.drops.loss},
                {"no_route", r.drops.no_route},
                {"ttl_exceeded", r.drops.ttl_exceeded},
                {"queue_overflow", r.drops.queue_overflow},
                {"detained_next_hop", r.drops.detained_next_hop},
                {"detained_sender", r.drops.detained_sender}};
  auto timing = ordered_json::array();
  for (const auto& t : r.attacker_timing) {
    auto opt_t = [](const std::optional<SimTime>& v) {
      return v ? ordered_json(*v) : ordered_json(nullptr);
    };
    timing.push_back({{"node", t.node},
                      {"first_flood", opt_t(t.first_flood)},
                      {"first_detained", opt_t(t.first_detained)}});
  }
  j["attacker_timing"] = timing;
  j["events_processed"] = r.events_processed;
  j["rreq_transmissions"] = r.rreq_transmissions;
  j["attack_rreqs"] = r.attack_rreqs;
  j["rrep_for_invalid"] = r.rrep_for_invalid;
  j["detentions"] = r.detentions;
  j["isolations_received"] = r.isolations_received;
  return j.dump(2) + "\n";
}

}  // namespace floodguard
