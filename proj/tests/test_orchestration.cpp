#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numeric>

#include "edgesim/presets.hpp"
#include "support.hpp"

using namespace edgesim;
using edgesim::testing::close_rel;

namespace {

EdgeDeviceState make_edge(std::uint32_t id, double x, double range, int capacity,
                          std::vector<std::string> nets = {"wifi"}) {
  EdgeDeviceState e;
  e.id = EntityId{id};
  e.name = "E" + std::to_string(id);
  e.mobility.location = {x, 0.0, 0.0};
  e.signal_range = {range, range};
  e.max_iot_capacity = capacity;
  e.mips = 1000.0;
  e.network_protocols = std::move(nets);
  e.hosted_mels = {MelId{1}};
  return e;
}

IoTDeviceState make_iot(std::uint32_t id, double x, const std::string& net = "wifi") {
  IoTDeviceState d;
  d.id = EntityId{id};
  d.name = "S" + std::to_string(id);
  d.mobility.location = {x, 0.0, 0.0};
  d.entry_mel = MelId{1};
  d.network_protocol = NetworkProtocolSpec{net, 200.0, 2304.0};
  return d;
}

// One static sensor next to one mains-powered edge running a single MEL.
ScenarioConfig single_pair(int sensors = 1, double instructions = 100.0) {
  ScenarioConfig cfg;
  IoTTemplate s;
  s.assignment_id = 1;
  s.name = "S";
  s.data_frequency = 1.0;
  s.data_size_mb = 1.0;
  s.network_type = "wifi";
  s.communication_protocol = "coap";
  s.max_battery_capacity = 100.0;
  s.battery_drainage_rate = 10.0;
  s.count = sensors;
  cfg.iot_devices.push_back(s);
  EdgeTemplate e;
  e.name = "E";
  e.range_x = e.range_y = 10.0;
  e.max_iot_capacity = 100;
  e.mips = 1000.0;
  e.network_types = {"wifi"};
  cfg.edge_devices.push_back(e);
  cfg.mel_graph = std::vector<MelConfig>{MelConfig{1, {"E"}, 0.5, instructions, 0.0, {}, {}}};
  return cfg;
}

// FIFO single server: completion_k = max(arrival_k, completion_{k-1}) + s.
std::vector<double> fifo_sojourns(std::vector<double> arrivals, double service) {
  std::sort(arrivals.begin(), arrivals.end());
  std::vector<double> out;
  double free_at = 0.0;
  for (double a : arrivals) {
    free_at = std::max(a, free_at) + service;
    out.push_back(free_at - a);
  }
  return out;
}

struct ReplayTotals {
  std::uint64_t delivered = 0;
  std::uint64_t discarded = 0;
  std::uint64_t undelivered = 0;
  std::uint64_t in_flight = 0;
};

}  // namespace

TEST_CASE("connection table bookkeeping") {
  ConnectionTable t;
  t.bind(EntityId{10}, EntityId{2}, MelId{1});
  t.bind(EntityId{11}, EntityId{2}, MelId{1});
  CHECK(t.active_count(EntityId{2}) == 2);
  CHECK(t.bound_to(EntityId{2}) == std::vector<EntityId>{EntityId{10}, EntityId{11}});
  t.bind(EntityId{10}, EntityId{3}, MelId{1});  // rebinding moves the device
  CHECK(t.active_count(EntityId{2}) == 1);
  CHECK(t.active_edge(EntityId{10}) == EntityId{3});
  t.drop(EntityId{11});
  t.drop(EntityId{11});
  CHECK(t.active_count(EntityId{2}) == 0);
  CHECK(t.find(EntityId{11})->status == BindingStatus::Dropped);
  CHECK_FALSE(t.active_edge(EntityId{11}));
}

TEST_CASE("edge selection prefers the nearest eligible edge") {
  ConnectionTable table;
  std::vector<EdgeDeviceState> edges{make_edge(2, 30.0, 50.0, 1), make_edge(3, 10.0, 50.0, 1),
                                     make_edge(4, -10.0, 50.0, 1)};
  const auto d = make_iot(9, 0.0);
  auto s = select_edge(d, edges, table);
  REQUIRE(s.edge);
  CHECK(*s.edge == EntityId{3});  // tie at distance 10 goes to the lower id

  table.bind(EntityId{20}, EntityId{3}, MelId{1});
  CHECK(*select_edge(d, edges, table).edge == EntityId{4});
  table.bind(EntityId{21}, EntityId{4}, MelId{1});
  CHECK(*select_edge(d, edges, table).edge == EntityId{2});
  table.bind(EntityId{22}, EntityId{2}, MelId{1});
  CHECK(select_edge(d, edges, table).reason == NackReason::Capacity);

  CHECK(select_edge(make_iot(9, 500.0), edges, ConnectionTable{}).reason ==
        NackReason::OutOfRange);
  CHECK(select_edge(make_iot(9, 0.0, "zigbee"), edges, ConnectionTable{}).reason ==
        NackReason::ProtocolMismatch);
  auto other = make_iot(9, 0.0);
  other.entry_mel = MelId{5};
  CHECK(select_edge(other, edges, ConnectionTable{}).reason == NackReason::NoEdge);
  for (auto& e : edges) e.enabled = false;
  CHECK(select_edge(d, edges, ConnectionTable{}).reason == NackReason::NoEdge);
}

TEST_CASE("establish_connection binds on success") {
  ConnectionTable table;
  std::vector<EdgeDeviceState> edges{make_edge(2, 0.0, 5.0, 3)};
  auto d = make_iot(9, 1.0);
  auto out = establish_connection(d, edges, table);
  CHECK(out.ack);
  CHECK(table.active_edge(d.id) == EntityId{2});
  auto far = make_iot(10, 100.0);
  out = establish_connection(far, edges, table);
  CHECK_FALSE(out.ack);
  CHECK(out.reason == NackReason::OutOfRange);
  CHECK_FALSE(table.active_edge(far.id));
  d.enabled = false;
  CHECK_THROWS_AS(establish_connection(d, edges, table), std::logic_error);
}

TEST_CASE("processing queue is first in, first out") {
  ProcessingQueue q;
  EdgeLet a;
  a.id = 1;
  EdgeLet b;
  b.id = 2;
  EdgeLet c;
  c.id = 3;
  auto s1 = q.submit(a, 2.0, 1.0);
  CHECK(s1.started_now);
  CHECK(s1.completion == 3.0);
  auto s2 = q.submit(b, 1.0, 1.5);
  CHECK_FALSE(s2.started_now);
  CHECK(s2.completion == 4.0);
  auto s3 = q.submit(c, 0.5, 2.0);
  CHECK(s3.completion == 4.5);
  CHECK(q.waiting() == 2);

  CHECK(q.finish().edgelet.id == 1);
  CHECK(q.start_next(3.0) == 4.0);
  CHECK(q.running()->edgelet.id == 2);
  CHECK(q.finish().edgelet.id == 2);
  CHECK(q.start_next(4.0) == 4.5);
  CHECK(q.finish().edgelet.id == 3);
  CHECK_FALSE(q.start_next(4.5));
  CHECK_FALSE(q.busy());
  CHECK_THROWS_AS(q.finish(), std::logic_error);

  q.submit(a, 1.0, 10.0);
  q.submit(b, 1.0, 10.0);
  auto taken = q.take_waiting();
  CHECK(taken.size() == 1);
  CHECK(q.busy_until() == 11.0);

  Mel m;
  m.instructions_per_mb = 500.0;
  ProcessingQueue q2;
  EdgeLet big;
  big.payload_mb = 2.0;
  CHECK(submit_edgelet(big, q2, m, 1000.0, 5.0) == 6.0);
}

TEST_CASE("single sensor: latency and execution time from the link and CPU models") {
  const auto cfg = single_pair();
  const auto report = run_scenario(cfg);
  const auto catalog = default_protocol_catalog();
  const auto& wifi = catalog.network_protocol("wifi");
  const auto& coap = catalog.iot_protocol("coap");
  const double service = 1.0 * 100.0 / 1000.0;
  const double latency =
      transmission_time(1.0, wifi, coap) + service + transmission_time(0.5, wifi, coap);

  // 100 units at 10 per reading: the tenth reading, at t = 9, empties it.
  CHECK(report.generated == 10);
  CHECK(report.delivered == 10);
  CHECK(report.responses.size() == 10);
  for (const auto& r : report.responses) {
    CHECK(close_rel(r.latency, latency, 1e-12));
    CHECK(close_rel(r.execution_time, service, 1e-12));
    CHECK_FALSE(r.relayed);
  }
  CHECK(report.termination == TerminationReason::BatteriesDepleted);
  CHECK(close_rel(report.end_time, 9.0 + latency, 1e-12));
  REQUIRE(report.device("S_0"));
  CHECK(report.device("S_0")->depleted_at == 9.0);
  CHECK(report.device("E_0")->edgelets == 10);
}

TEST_CASE("simultaneous arrivals queue behind one CPU") {
  const auto cfg = single_pair(4, 200.0);  // 0.2 s per reading
  const auto report = run_scenario(cfg);
  std::vector<double> arrivals;
  for (int t = 0; t < 10; ++t) {
    for (int k = 0; k < 4; ++k) arrivals.push_back(t);
  }
  const auto sojourn = fifo_sojourns(arrivals, 0.2);
  const double expected = std::accumulate(sojourn.begin(), sojourn.end(), 0.0) / 40.0;
  CHECK(report.delivered == 40);
  CHECK(close_rel(report.mean_execution_time(), expected, 1e-9));
}

TEST_CASE("fan-out lineages resolve once every branch is back") {
  auto cfg = single_pair();
  (*cfg.mel_graph)[0].downlinks = {2, 3};
  cfg.mel_graph->push_back(MelConfig{2, {"E"}, 0.5, 100.0, 0.0, {}, {}});
  cfg.mel_graph->push_back(MelConfig{3, {"E"}, 0.2, 100.0, 0.0, {}, {}});
  std::vector<TraceRecord> trace;
  RunOptions options;
  options.trace = &trace;
  const auto report = run_scenario(cfg, options);
  CHECK(report.generated == 10);
  CHECK(report.delivered == 10);
  CHECK(report.responses.size() == 20);
  const auto replay = edgesim::testing::replay_trace(trace);
  CHECK(replay.delivered == 10);
  CHECK(replay.in_flight == 0);
}

TEST_CASE("a depleted edge hands its devices and queue to another host") {
  auto cfg = single_pair(2);
  cfg.edge_devices[0].battery = BatteryConfig{1.0, 0.125, 0.125};  // 8 readings
  EdgeTemplate backup = cfg.edge_devices[0];
  backup.name = "B";
  backup.battery.reset();
  backup.mobility.location.x = 5.0;
  cfg.edge_devices.push_back(backup);
  (*cfg.mel_graph)[0].hosts = {"E", "B"};

  const auto report = run_scenario(cfg);
  const auto* e = report.device("E_0");
  const auto* b = report.device("B_0");
  REQUIRE(e);
  REQUIRE(b);
  CHECK(e->depleted_at);
  CHECK(e->final_level == 0.0);
  CHECK(e->edgelets == 8);
  CHECK(b->edgelets == 12);
  CHECK(report.handoffs == 2);
  CHECK(report.delivered == report.generated);
  CHECK(report.discarded == 0);
}

TEST_CASE("losing the last edge stops the run") {
  auto cfg = single_pair();
  cfg.edge_devices[0].battery = BatteryConfig{0.25, 0.1, 0.1};
  const auto report = run_scenario(cfg);
  CHECK(report.termination == TerminationReason::EdgesDisabled);
  CHECK(report.generated ==
        report.delivered + report.discarded + report.undelivered + report.in_flight);
  CHECK(report.device("E_0")->depleted_at);
}

TEST_CASE("mains-powered edges are never detached") {
  Simulation sim(single_pair());
  CHECK_THROWS_AS(sim.detach_depleted_edge(sim.edge_devices()[0].id), std::logic_error);
}

TEST_CASE("degenerate populations") {
  ScenarioConfig empty;
  auto r = run_scenario(empty);
  CHECK(r.end_time == 0.0);
  CHECK(r.generated == 0);
  CHECK(r.devices.empty());

  auto no_edges = single_pair();
  no_edges.edge_devices.clear();
  no_edges.mel_graph.reset();
  r = run_scenario(no_edges);
  CHECK(r.end_time == 0.0);
  CHECK(r.termination == TerminationReason::EdgesDisabled);
  CHECK(r.connection_failures == 1);
}

TEST_CASE("horizon cuts a run short") {
  auto cfg = single_pair();
  cfg.iot_devices[0].battery_drainage_rate = 0.0;
  cfg.run.horizon = 4.5;
  const auto r = run_scenario(cfg);
  CHECK(r.termination == TerminationReason::Horizon);
  CHECK(r.end_time == 4.5);
  CHECK(r.generated == 5);
}

TEST_CASE("relay planning") {
  Simulation sim(case3_preset(1));
  const auto rsu1 = sim.edge_devices()[0].id;
  const auto rsu2 = sim.edge_devices()[1].id;
  const auto car = sim.iot_devices()[0].id;
  // Covered by the origin: delivered directly.
  auto plan = sim.edge_to_edge_relay(rsu1, car);
  CHECK(plan.deliverable);
  CHECK_FALSE(plan.relayed);
  // Moved past the origin's coverage: the other RSU relays.
  sim.iot(car).mobility.location.x = 75.0;
  plan = sim.edge_to_edge_relay(rsu1, car);
  CHECK(plan.deliverable);
  CHECK(plan.relayed);
  CHECK(plan.via_edge == rsu2);
  // Outside every coverage box.
  sim.iot(car).mobility.location.x = 150.0;
  CHECK_FALSE(sim.edge_to_edge_relay(rsu1, car).deliverable);
}

TEST_CASE("case3 with one car: handoff at the first tick past the boundary") {
  std::vector<TraceRecord> trace;
  RunOptions options;
  options.trace = &trace;
  const auto r = run_scenario(case3_preset(1), options);
  CHECK(r.handoffs == 1);
  CHECK(r.first_out_of_range == 101.0);
  CHECK(r.relays == 1);
  CHECK(r.dropped_bindings == 1);  // leaving the second RSU at t = 201
  std::vector<double> handoff_times;
  for (const auto& t : trace) {
    if (t.kind == TraceKind::Handoff) handoff_times.push_back(t.time);
  }
  CHECK(handoff_times == std::vector<double>{101.0});
}

TEST_CASE("property: accounting identity and replay agreement on random scenarios") {
  std::mt19937_64 rng(424242);
  ReplayTotals totals;
  for (int trial = 0; trial < 60; ++trial) {
    const auto cfg = edgesim::testing::random_scenario(rng);
    std::vector<TraceRecord> trace;
    RunOptions options;
    options.trace = &trace;
    const auto r = run_scenario(cfg, options);
    CAPTURE(trial);
    CHECK(r.generated == r.delivered + r.discarded + r.undelivered + r.in_flight);
    const auto replay = edgesim::testing::replay_trace(trace);
    CHECK(replay.generated == r.generated);
    CHECK(replay.delivered == r.delivered);
    CHECK(replay.discarded == r.discarded);
    CHECK(replay.undelivered == r.undelivered);
    CHECK(replay.in_flight == r.in_flight);
    CHECK(replay.responses == r.responses.size());
    totals.delivered += r.delivered;
    totals.discarded += r.discarded;
    totals.undelivered += r.undelivered;
    totals.in_flight += r.in_flight;
    for (const auto& resp : r.responses) {
      CHECK(resp.latency >= 0.0);
      CHECK(resp.execution_time >= 0.0);
    }
    const auto audit = edgesim::testing::audit_energy(cfg, r, 1e-9);
    CHECK_MESSAGE(audit.ok, audit.detail);
  }
  // The generator reaches every outcome class.
  CHECK(totals.delivered > 0);
  CHECK(totals.discarded > 0);
  CHECK(totals.undelivered > 0);
  CHECK(totals.in_flight > 0);
  MESSAGE("delivered " << totals.delivered << ", discarded " << totals.discarded
                       << ", undelivered " << totals.undelivered << ", in flight "
                       << totals.in_flight);
}
