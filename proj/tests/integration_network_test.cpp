// End-to-end runs of complete networks.

#include <sstream>

#include "catch_amalgamated.hpp"
#include "floodguard/scenario_io.hpp"
#include "floodguard/simulation.hpp"
#include "floodguard/sweep.hpp"

using namespace floodguard;

namespace {

ScenarioConfig small(double ratio, double duration = 60.0) {
  auto c = preset("default");
  c.node_count = 40;
  c.field_width = c.field_height = 700.0;
  c.attacker_ratio = ratio;
  c.cbr_flow_count = 5;
  c.sim_duration = duration;
  return c;
}

}  // namespace

TEST_CASE("identical seed and config reproduce the report, trace and detection log",
          "[integration]") {
  const auto cfg = small(0.1);
  std::ostringstream t1, t2, d1, d2;
  const auto a = run_scenario(cfg, 77, {&t1, &d1});
  const auto b = run_scenario(cfg, 77, {&t2, &d2});
  CHECK(serialize_report(a) == serialize_report(b));
  CHECK(a.events_processed == b.events_processed);
  CHECK(t1.str() == t2.str());
  CHECK(d1.str() == d2.str());
  CHECK_FALSE(t1.str().empty());
  CHECK_FALSE(d1.str().empty());
  CHECK(serialize_report(run_scenario(cfg, 78)) != serialize_report(a));
}

TEST_CASE("invalid configs are rejected before running", "[integration]") {
  auto cfg = small(0.1);
  cfg.alpha_low = 1.2;
  cfg.node_count = 1;
  try {
    run_scenario(cfg, 1);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.violations().size() >= 2);
  }
}

TEST_CASE("flooders are detected and benign nodes are not", "[integration]") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto r = run_scenario(small(0.1), derive_run_seed(1, seed));
    REQUIRE(r.dr);
    CHECK(*r.dr == 100.0);
    CHECK(*r.fpr <= 5.0);
    for (const auto& t : r.attacker_timing) {
      REQUIRE(t.first_flood);
      REQUIRE(t.first_detained);
      CHECK(*t.first_detained - *t.first_flood <= 30.0);
    }
    CHECK(r.rrep_for_invalid == 0);
  }
}

TEST_CASE("no attackers: nobody detained, DR undefined", "[integration]") {
  const auto r = run_scenario(small(0.0), 5);
  CHECK(r.attackers.empty());
  CHECK(r.detected.empty());
  CHECK_FALSE(r.dr);
  CHECK_FALSE(r.fnr);
  CHECK(*r.fpr == 0.0);
  CHECK(r.attack_rreqs == 0);
}

TEST_CASE("the defense protects delivery under flooding", "[integration]") {
  auto on = small(0.2, 120.0);
  auto off = on;
  off.defense = false;
  double pdr_on = 0.0, pdr_off = 0.0;
  for (std::uint64_t s = 0; s < 2; ++s) {
    pdr_on += *run_scenario(on, derive_run_seed(1, s)).pdr;
    pdr_off += *run_scenario(off, derive_run_seed(1, s)).pdr;
  }
  CHECK(pdr_on > pdr_off);
}

TEST_CASE("report accounting is conserved", "[integration][property]") {
  for (double ratio : {0.0, 0.1, 0.3}) {
    const auto r = run_scenario(small(ratio), 3);
    CHECK(r.data_originated == r.data_delivered + r.drops.total() + r.data_in_flight);
    std::uint64_t sent = 0, received = 0;
    for (const auto& f : r.flows) {
      sent += f.sent;
      received += f.received;
      CHECK(f.received <= f.sent);
    }
    CHECK(sent == r.data_originated);
    CHECK(received == r.data_delivered);
    CHECK(r.cm.total() == r.node_count);
  }
}

TEST_CASE("trace lines are tab separated with known kinds", "[integration]") {
  auto cfg = small(0.1, 8.0);
  std::ostringstream trace;
  run_scenario(cfg, 1, {&trace, nullptr});
  std::istringstream in(trace.str());
  std::string line;
  int n = 0;
  while (std::getline(in, line) && n < 5000) {
    ++n;
    std::istringstream fields(line);
    std::string t, kind, node;
    REQUIRE(std::getline(fields, t, '\t'));
    REQUIRE(std::getline(fields, kind, '\t'));
    REQUIRE(std::getline(fields, node, '\t'));
    CHECK((kind == "RX" || kind == "TX" || kind == "TIMER" || kind == "APP"));
    CHECK(std::stoul(node) < cfg.node_count);
  }
  CHECK(n > 100);
}
