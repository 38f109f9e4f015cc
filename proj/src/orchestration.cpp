#include "edgesim/orchestration.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <string>

namespace edgesim {

// ---------------------------------------------------------------------------
// ConnectionTable

const Binding* ConnectionTable::find(EntityId iot) const {
  auto it = bindings_.find(iot);
  return it == bindings_.end() ? nullptr : &it->second;
}

std::optional<EntityId> ConnectionTable::active_edge(EntityId iot) const {
  const auto* b = find(iot);
  if (b == nullptr || b->status != BindingStatus::Active) return std::nullopt;
  return b->edge;
}

int ConnectionTable::active_count(EntityId edge) const {
  auto it = load_.find(edge);
  return it == load_.end() ? 0 : it->second;
}

std::vector<EntityId> ConnectionTable::bound_to(EntityId edge) const {
  std::vector<EntityId> out;
  for (const auto& [iot, b] : bindings_) {
    if (b.status == BindingStatus::Active && b.edge == edge) out.push_back(iot);
  }
  return out;
}

void ConnectionTable::bind(EntityId iot, EntityId edge, MelId mel) {
  drop(iot);
  bindings_[iot] = Binding{edge, mel, BindingStatus::Active};
  ++load_[edge];
}

void ConnectionTable::drop(EntityId iot) {
  auto it = bindings_.find(iot);
  if (it == bindings_.end() || it->second.status != BindingStatus::Active) return;
  it->second.status = BindingStatus::Dropped;
  --load_[it->second.edge];
}

std::string_view to_string(NackReason reason) {
  switch (reason) {
    case NackReason::None: return "none";
    case NackReason::OutOfRange: return "out-of-range";
    case NackReason::Capacity: return "capacity";
    case NackReason::ProtocolMismatch: return "protocol-mismatch";
    case NackReason::NoEdge: return "no-edge";
  }
  return "unknown";
}

EdgeSelection select_edge(const IoTDeviceState& iot, std::span<const EdgeDeviceState> candidates,
                          const ConnectionTable& table) {
  bool any_host = false;
  bool any_in_range = false;
  bool any_protocol = false;
  const EdgeDeviceState* best = nullptr;
  double best_distance = 0.0;

  for (const auto& e : candidates) {
    if (!e.enabled) continue;
    if (std::find(e.hosted_mels.begin(), e.hosted_mels.end(), iot.entry_mel) ==
        e.hosted_mels.end()) {
      continue;
    }
    any_host = true;
    if (is_out_of_range(iot.mobility.location, e)) continue;
    any_in_range = true;
    if (!e.supports(iot.network_protocol.name)) continue;
    any_protocol = true;
    if (table.active_count(e.id) >= e.max_iot_capacity) continue;

    const double d = planar_distance(iot.mobility.location, e.mobility.location);
    if (best == nullptr || d < best_distance || (d == best_distance && e.id < best->id)) {
      best = &e;
      best_distance = d;
    }
  }

  if (best != nullptr) return {best->id, NackReason::None};
  if (!any_host) return {std::nullopt, NackReason::NoEdge};
  if (!any_in_range) return {std::nullopt, NackReason::OutOfRange};
  if (!any_protocol) return {std::nullopt, NackReason::ProtocolMismatch};
  return {std::nullopt, NackReason::Capacity};
}

ConnectionOutcome establish_connection(const IoTDeviceState& iot,
                                       std::span<const EdgeDeviceState> edges,
                                       ConnectionTable& table) {
  if (!iot.enabled) {
    throw std::logic_error("establish_connection for disabled device " + iot.name);
  }
  const auto selection = select_edge(iot, edges, table);
  if (!selection.edge) return {false, EntityId{}, selection.reason};
  table.bind(iot.id, *selection.edge, iot.entry_mel);
  return {true, *selection.edge, NackReason::None};
}

// ---------------------------------------------------------------------------
// ProcessingQueue

ProcessingQueue::ProcessingQueue(std::shared_ptr<const SchedulingPolicy> policy)
    : policy_(policy ? std::move(policy) : std::make_shared<FifoPolicy>()) {}

ProcessingQueue::Submission ProcessingQueue::submit(const EdgeLet& edgelet, double service_time,
                                                    SimTime now) {
  QueuedJob job{edgelet, now, service_time};
  if (!running_) {
    running_ = job;
    busy_until_ = now + service_time;
    running_completion_ = busy_until_;
    return {busy_until_, true};
  }
  busy_until_ = std::max(now, busy_until_) + service_time;
  waiting_.push_back(std::move(job));
  return {busy_until_, false};
}

QueuedJob ProcessingQueue::finish() {
  if (!running_) throw std::logic_error("ProcessingQueue::finish with an idle CPU");
  QueuedJob job = std::move(*running_);
  running_.reset();
  return job;
}

std::optional<SimTime> ProcessingQueue::start_next(SimTime now) {
  if (running_) throw std::logic_error("ProcessingQueue::start_next while busy");
  if (waiting_.empty()) return std::nullopt;
  const auto index = policy_->select_next(waiting_);
  running_ = std::move(waiting_[index]);
  waiting_.erase(waiting_.begin() + static_cast<std::ptrdiff_t>(index));
  running_completion_ = now + running_->service_time;
  return running_completion_;
}

std::vector<QueuedJob> ProcessingQueue::take_waiting() {
  std::vector<QueuedJob> out(std::make_move_iterator(waiting_.begin()),
                             std::make_move_iterator(waiting_.end()));
  waiting_.clear();
  busy_until_ = running_ ? running_completion_ : 0.0;
  return out;
}

SimTime submit_edgelet(const EdgeLet& edgelet, ProcessingQueue& queue, const Mel& mel,
                       double mips, SimTime now) {
  const double service = mel_processing_time(edgelet.payload_mb, mel, mips);
  return queue.submit(edgelet, service, now).completion;
}

// ---------------------------------------------------------------------------
// Simulation

std::string_view to_string(TraceKind kind) {
  switch (kind) {
    case TraceKind::Generated: return "generated";
    case TraceKind::Discarded: return "discarded";
    case TraceKind::Submitted: return "submitted";
    case TraceKind::Processed: return "processed";
    case TraceKind::Forwarded: return "forwarded";
    case TraceKind::Delivered: return "delivered";
    case TraceKind::Undelivered: return "undelivered";
    case TraceKind::OutOfRange: return "out-of-range";
    case TraceKind::Handoff: return "handoff";
    case TraceKind::Dropped: return "dropped";
  }
  return "unknown";
}

namespace {

struct AckPayload {
  ConnectionOutcome outcome;
};
struct BatteryPayload {
  EntityId iot;
  double data_mb = 0.0;
  double amount = 0.0;
};
struct ArrivalPayload {
  EdgeLet edgelet;
  EntityId edge;
};
struct CompletionPayload {
  EntityId edge;
};
struct LocationPayload {
  EntityId device;
  bool is_edge = false;
  bool registration = false;
};
struct DeliveryPayload {
  EdgeLet result;
  EntityId via;
  bool relayed = false;
  SimTime finished_at = 0.0;
};

}  // namespace

class Simulation::Dispatcher final : public Entity {
 public:
  explicit Dispatcher(Simulation& sim) : sim_(sim) {}

  void process_event(const Event& event) override {
    switch (event.kind) {
      case EventKind::ConnectAck: sim_.on_connect_ack(event); break;
      case EventKind::GenerateData: sim_.on_generate(event); break;
      case EventKind::BatteryUpdate: sim_.on_battery_update(event); break;
      case EventKind::EdgeLetArrival: sim_.on_arrival(event); break;
      case EventKind::ProcessingComplete: sim_.on_processing_complete(event); break;
      case EventKind::LocationUpdate: sim_.on_location_update(event); break;
      case EventKind::RelayDelivery: sim_.on_delivery(event); break;
      case EventKind::Terminate: sim_.on_terminate(event); break;
    }
  }

 private:
  Simulation& sim_;
};

Simulation::Simulation(const ScenarioConfig& config, RunOptions options)
    : config_(config), options_(std::move(options)), rng_(config.run.seed) {
  validate_scenario(config_);
  catalog_ = config_.effective_catalog();
  auto population = expand_entities(config_);
  iot_ = std::move(population.iot_devices);
  edges_ = std::move(population.edge_devices);
  graph_ = std::move(population.graph);

  for (std::size_t i = 0; i < edges_.size(); ++i) {
    if (edges_[i].id.value != kBrokerId.value + 1 + i) {
      throw std::logic_error("edge ids are not contiguous");
    }
    queues_.emplace_back(options_.policy);
    broker_.available_edges.insert(edges_[i].id);
  }
  for (std::size_t i = 0; i < iot_.size(); ++i) {
    if (iot_[i].id.value != kBrokerId.value + 1 + edges_.size() + i) {
      throw std::logic_error("IoT ids are not contiguous");
    }
    broker_.available_iot.insert(iot_[i].id);
  }
  generating_.assign(iot_.size(), false);
  tracking_.assign(iot_.size(), false);

  dispatcher_ = std::make_unique<Dispatcher>(*this);
  kernel_.register_entity(kDatacenterId, *dispatcher_);
  kernel_.register_entity(kBrokerId, *dispatcher_);
  for (const auto& d : iot_) kernel_.register_entity(d.id, *dispatcher_);

  report_.devices.reserve(edges_.size() + iot_.size());
  for (const auto& e : edges_) {
    DeviceMetrics m;
    m.name = e.name;
    m.is_edge = true;
    m.has_battery = e.battery.has_value();
    m.max_capacity = e.battery ? e.battery->max_capacity : 0.0;
    report_.devices.push_back(m);
  }
  for (const auto& d : iot_) {
    DeviceMetrics m;
    m.name = d.name;
    m.has_battery = true;
    m.max_capacity = d.battery.max_capacity;
    report_.devices.push_back(m);
  }
}

Simulation::~Simulation() = default;

std::size_t Simulation::edge_index(EntityId id) const {
  const auto first = kBrokerId.value + 1;
  if (id.value < first || id.value >= first + edges_.size()) {
    throw std::out_of_range("entity " + std::to_string(id.value) + " is not an edge device");
  }
  return id.value - first;
}

std::size_t Simulation::iot_index(EntityId id) const {
  const auto first = kBrokerId.value + 1 + edges_.size();
  if (id.value < first || id.value >= first + iot_.size()) {
    throw std::out_of_range("entity " + std::to_string(id.value) + " is not an IoT device");
  }
  return id.value - first;
}

IoTDeviceState& Simulation::iot(EntityId id) { return iot_[iot_index(id)]; }
EdgeDeviceState& Simulation::edge(EntityId id) { return edges_[edge_index(id)]; }

const ProcessingQueue& Simulation::queue(EntityId edge) const {
  return queues_[edge_index(edge)];
}

bool Simulation::any_edge_enabled() const {
  return std::any_of(edges_.begin(), edges_.end(), [](const auto& e) { return e.enabled; });
}

void Simulation::record(TraceKind kind, const EdgeLet& edgelet, EntityId device,
                        std::uint64_t parent, bool relayed) {
  if (options_.trace == nullptr) return;
  options_.trace->push_back(
      TraceRecord{kernel_.now(), kind, edgelet.id, parent, edgelet.lineage, device, relayed});
}

void Simulation::record_energy(const std::string& device, double data_mb, double shrink,
                               double requested, double applied) {
  if (!options_.record_energy) return;
  report_.energy.push_back(
      EnergyRecord{device, kernel_.now(), data_mb, shrink, requested, applied});
}

MetricsReport Simulation::run() {
  if (ran_) throw std::logic_error("Simulation::run called twice");
  ran_ = true;
  const auto wall_start = std::chrono::steady_clock::now();

  if (!iot_.empty()) {
    for (auto& d : iot_) {
      const auto outcome = establish_connection(d, edges_, connections_);
      if (outcome.ack) {
        ++report_.connections;
      } else {
        ++report_.connection_failures;
      }
      kernel_.schedule(Event{0.0, 0, d.id, EventKind::ConnectAck, AckPayload{outcome}});
    }
    for (const auto& e : edges_) {
      if (e.mobility.movable) {
        kernel_.schedule(Event{0.0, 0, kDatacenterId, EventKind::LocationUpdate,
                               LocationPayload{e.id, true, true}});
      }
    }
    if (!any_edge_enabled()) {
      report_.termination = TerminationReason::EdgesDisabled;
    } else {
      if (config_.run.horizon) {
        kernel_.schedule(Event{*config_.run.horizon, 0, kDatacenterId, EventKind::Terminate, {}});
      }
      kernel_.run();
    }
  }

  report_.end_time = kernel_.now();
  report_.events = kernel_.dispatched();
  report_.in_flight = lineages_.size();
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    auto& m = report_.devices[i];
    if (edges_[i].battery) m.final_level = edges_[i].battery->current_level;
    m.energy_consumed = m.max_capacity - m.final_level;
    m.active_until = m.depleted_at.value_or(report_.end_time);
  }
  for (std::size_t i = 0; i < iot_.size(); ++i) {
    auto& m = report_.devices[edges_.size() + i];
    m.final_level = iot_[i].battery.current_level;
    m.energy_consumed = m.max_capacity - m.final_level;
    m.active_until = m.depleted_at.value_or(report_.end_time);
  }
  report_.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return report_;
}

void Simulation::on_connect_ack(const Event& event) {
  const auto i = iot_index(event.target);
  auto& d = iot_[i];
  if (!d.enabled) return;
  const auto& outcome = std::any_cast<const AckPayload&>(event.payload).outcome;
  if (outcome.ack && !generating_[i]) {
    generating_[i] = true;
    kernel_.schedule_in(0.0, d.id, EventKind::GenerateData);
  }
  // Tracking starts after the first generation is queued, so at shared
  // timestamps a device emits before its location is advanced.
  if (d.mobility.movable && !tracking_[i]) {
    tracking_[i] = true;
    kernel_.schedule_in(0.0, kDatacenterId, EventKind::LocationUpdate,
                        LocationPayload{d.id, false, true});
  }
}

void Simulation::on_generate(const Event& event) {
  const auto i = iot_index(event.target);
  auto& d = iot_[i];
  auto generation = generate_edgelet(d, kernel_.now(), next_edgelet_id_);
  if (!generation) return;
  ++next_edgelet_id_;
  const EdgeLet& edgelet = generation->edgelet;

  SimTime next_at = generation->next_at;
  if (config_.run.generation_jitter > 0.0) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    next_at = kernel_.now() +
              (1.0 + config_.run.generation_jitter * unit(rng_)) / d.data_frequency;
  }
  kernel_.schedule(Event{next_at, 0, d.id, EventKind::GenerateData, {}});

  ++report_.generated;
  ++report_.devices[edges_.size() + i].edgelets;
  lineages_.emplace(edgelet.lineage, LineageState{d.id, edgelet.created_at, std::nullopt, 1});
  broker_.pending_results.emplace(edgelet.lineage, d.id);
  record(TraceKind::Generated, edgelet, d.id);

  // The device ships the whole payload, so all of it is billed as transfer.
  const double amount = battery_consumption(edgelet.payload_mb, 1.0, 0.0,
                                            d.battery.drain_rate_transfer,
                                            d.iot_protocol.energy_coefficient);
  kernel_.schedule_in(0.0, kBrokerId, EventKind::BatteryUpdate,
                      BatteryPayload{d.id, edgelet.payload_mb, amount});

  auto target = connections_.active_edge(d.id);
  if (target && !edges_[edge_index(*target)].enabled) {
    connections_.drop(d.id);
    target.reset();
  }
  if (!target) {
    const auto outcome = establish_connection(d, edges_, connections_);
    if (outcome.ack) {
      ++report_.connections;
      target = outcome.edge;
    }
  }
  if (!target) {
    record(TraceKind::Discarded, edgelet, d.id);
    resolve_branch(edgelet.lineage, BranchOutcome::Discarded);
    return;
  }
  const double uplink = transmission_time(edgelet.payload_mb, d.network_protocol, d.iot_protocol);
  kernel_.schedule_in(uplink, kDatacenterId, EventKind::EdgeLetArrival,
                      ArrivalPayload{edgelet, *target});
}

void Simulation::on_battery_update(const Event& event) {
  const auto& p = std::any_cast<const BatteryPayload&>(event.payload);
  const auto i = iot_index(p.iot);
  auto& d = iot_[i];
  const double before = d.battery.current_level;
  const auto result = drain(d.battery, p.amount);
  d.battery = result.battery;
  record_energy(d.name, p.data_mb, 1.0, p.amount, before - d.battery.current_level);
  if (result.depleted && d.enabled) {
    d.enabled = false;
    report_.devices[edges_.size() + i].depleted_at = kernel_.now();
    broker_.available_iot.erase(d.id);
    connections_.drop(d.id);
    check_finished();
  }
}

void Simulation::on_arrival(const Event& event) {
  const auto& p = std::any_cast<const ArrivalPayload&>(event.payload);
  auto& lineage = lineages_.at(p.edgelet.lineage);
  if (!lineage.first_arrival) lineage.first_arrival = kernel_.now();
  if (!edges_[edge_index(p.edge)].enabled) {
    reroute(p.edgelet);
    return;
  }
  submit(p.edgelet, p.edge);
}

void Simulation::submit(const EdgeLet& edgelet, EntityId edge_id) {
  const auto& e = edges_[edge_index(edge_id)];
  const auto& mel = graph_.mel(edgelet.destination_mel);
  const double service = mel_processing_time(edgelet.payload_mb, mel, e.mips);
  const auto submission = queues_[edge_index(edge_id)].submit(edgelet, service, kernel_.now());
  record(TraceKind::Submitted, edgelet, edge_id);
  if (submission.started_now) {
    kernel_.schedule(Event{submission.completion, 0, kDatacenterId,
                           EventKind::ProcessingComplete, CompletionPayload{edge_id}});
  }
}

void Simulation::on_processing_complete(const Event& event) {
  const auto edge_id = std::any_cast<const CompletionPayload&>(event.payload).edge;
  const auto index = edge_index(edge_id);
  auto& e = edges_[index];
  auto& queue = queues_[index];
  const QueuedJob job = queue.finish();
  const auto& mel = graph_.mel(job.edgelet.destination_mel);
  record(TraceKind::Processed, job.edgelet, edge_id);
  ++report_.devices[index].edgelets;

  bool depleted = false;
  if (e.battery) {
    const double amount = battery_consumption(job.edgelet.payload_mb, mel.shrink_factor,
                                              e.battery->drain_rate_processing,
                                              e.battery->drain_rate_transfer);
    const double before = e.battery->current_level;
    const auto result = drain(*e.battery, amount);
    e.battery = result.battery;
    record_energy(e.name, job.edgelet.payload_mb, mel.shrink_factor, amount,
                  before - e.battery->current_level);
    if (result.depleted) {
      depleted = true;
      report_.devices[index].depleted_at = kernel_.now();
    }
  }

  auto output = shrink_and_forward(job.edgelet, mel, next_edgelet_id_);
  if (!output.forwarded.empty()) {
    lineages_.at(job.edgelet.lineage).outstanding +=
        static_cast<int>(output.forwarded.size()) - 1;
    for (const auto& child : output.forwarded) {
      record(TraceKind::Forwarded, child, edge_id, job.edgelet.id);
      route_to_mel(child, edge_id);
    }
  } else if (output.final_result) {
    const EdgeLet& result = *output.final_result;
    record(TraceKind::Forwarded, result, edge_id, job.edgelet.id);
    const auto plan = edge_to_edge_relay(edge_id, result.source_iot);
    if (plan.deliverable) {
      const auto& target = iot_[iot_index(result.source_iot)];
      const double delay =
          (plan.relayed ? config_.run.relay_delay : 0.0) +
          transmission_time(result.payload_mb, target.network_protocol, target.iot_protocol);
      kernel_.schedule_in(delay, kBrokerId, EventKind::RelayDelivery,
                          DeliveryPayload{result, plan.via_edge, plan.relayed, kernel_.now()});
    } else {
      record(TraceKind::Undelivered, result, result.source_iot);
      resolve_branch(result.lineage, BranchOutcome::Undelivered);
    }
  }

  if (depleted) {
    detach_depleted_edge(edge_id);
  } else if (auto completion = queue.start_next(kernel_.now())) {
    kernel_.schedule(Event{*completion, 0, kDatacenterId, EventKind::ProcessingComplete,
                           CompletionPayload{edge_id}});
  }
}

std::optional<EntityId> Simulation::edge_for_mel(const Mel& mel,
                                                 std::optional<EntityId> preferred) const {
  auto hosts = [&mel](EntityId id) {
    return std::find(mel.host_edges.begin(), mel.host_edges.end(), id) != mel.host_edges.end();
  };
  if (preferred && hosts(*preferred) && edges_[edge_index(*preferred)].enabled) return preferred;
  for (auto id : mel.host_edges) {
    if (edges_[edge_index(id)].enabled) return id;
  }
  return std::nullopt;
}

void Simulation::route_to_mel(const EdgeLet& edgelet, EntityId from_edge) {
  const auto& mel = graph_.mel(edgelet.destination_mel);
  const auto target = edge_for_mel(mel, from_edge);
  if (!target) {
    record(TraceKind::Discarded, edgelet, edgelet.source_iot);
    resolve_branch(edgelet.lineage, BranchOutcome::Discarded);
    return;
  }
  double delay = 0.0;
  if (*target != from_edge) {
    const auto& from = edges_[edge_index(from_edge)];
    const auto& source = iot_[iot_index(edgelet.source_iot)];
    delay = transmission_time(edgelet.payload_mb,
                              catalog_.network_protocol(from.network_protocols.front()),
                              source.iot_protocol);
  }
  kernel_.schedule_in(delay, kDatacenterId, EventKind::EdgeLetArrival,
                      ArrivalPayload{edgelet, *target});
}

void Simulation::reroute(const EdgeLet& edgelet) {
  const auto& mel = graph_.mel(edgelet.destination_mel);
  std::optional<EntityId> target;
  if (graph_.is_entry(mel.id)) {
    const auto& source = iot_[iot_index(edgelet.source_iot)];
    const auto bound = connections_.active_edge(source.id);
    if (bound && edges_[edge_index(*bound)].enabled) {
      target = bound;
    } else {
      target = select_edge(source, edges_, connections_).edge;
    }
  } else {
    target = edge_for_mel(mel, std::nullopt);
  }
  if (!target) {
    record(TraceKind::Discarded, edgelet, edgelet.source_iot);
    resolve_branch(edgelet.lineage, BranchOutcome::Discarded);
    return;
  }
  // Hand-over between edges of one datacenter is free.
  kernel_.schedule_in(0.0, kDatacenterId, EventKind::EdgeLetArrival,
                      ArrivalPayload{edgelet, *target});
}

DeliveryPlan Simulation::edge_to_edge_relay(EntityId origin_edge, EntityId target_iot) const {
  const auto& device = iot_[iot_index(target_iot)];
  const auto& origin = edges_[edge_index(origin_edge)];
  const auto& where = device.mobility.location;
  const auto bound = connections_.active_edge(target_iot);
  auto covers = [&](const EdgeDeviceState& e) {
    return e.enabled && e.supports(device.network_protocol.name) && !is_out_of_range(where, e);
  };

  if (origin.enabled && ((bound && *bound == origin_edge) || covers(origin))) {
    return {true, false, origin_edge};
  }
  if (bound && covers(edges_[edge_index(*bound)])) return {true, true, *bound};

  const EdgeDeviceState* best = nullptr;
  double best_distance = 0.0;
  for (const auto& e : edges_) {
    if (e.id == origin_edge || !covers(e)) continue;
    const double d = planar_distance(where, e.mobility.location);
    if (best == nullptr || d < best_distance) {
      best = &e;
      best_distance = d;
    }
  }
  if (best != nullptr) return {true, true, best->id};
  return {false, false, EntityId{}};
}

void Simulation::on_delivery(const Event& event) {
  const auto& p = std::any_cast<const DeliveryPayload&>(event.payload);
  const auto& lineage = lineages_.at(p.result.lineage);
  ResponseRecord r;
  r.lineage = p.result.lineage;
  r.result_id = p.result.id;
  r.source_iot = iot_[iot_index(p.result.source_iot)].name;
  r.created_at = lineage.created_at;
  r.delivered_at = kernel_.now();
  r.latency = r.delivered_at - r.created_at;
  r.execution_time = p.finished_at - lineage.first_arrival.value_or(p.finished_at);
  r.relayed = p.relayed;
  report_.responses.push_back(std::move(r));
  if (p.relayed) ++report_.relays;
  record(TraceKind::Delivered, p.result, p.result.source_iot, 0, p.relayed);
  resolve_branch(p.result.lineage, BranchOutcome::Delivered);
}

void Simulation::on_location_update(const Event& event) {
  const auto& p = std::any_cast<const LocationPayload&>(event.payload);
  if (p.is_edge) {
    auto& e = edges_[edge_index(p.device)];
    if (!e.enabled) return;
    const double interval = e.mobility.update_interval;
    if (!p.registration) e.mobility = update_location(e.mobility, interval).state;
    for (auto device : connections_.bound_to(e.id)) check_binding(device);
    kernel_.schedule_in(interval, kDatacenterId, EventKind::LocationUpdate,
                        LocationPayload{e.id, true, false});
    return;
  }
  const auto i = iot_index(p.device);
  auto& d = iot_[i];
  if (!d.enabled) {
    tracking_[i] = false;
    return;
  }
  const double interval = d.mobility.update_interval;
  if (!p.registration) d.mobility = update_location(d.mobility, interval).state;
  check_binding(d.id);
  kernel_.schedule_in(interval, kDatacenterId, EventKind::LocationUpdate,
                      LocationPayload{d.id, false, false});
}

void Simulation::check_binding(EntityId iot_id) {
  const auto i = iot_index(iot_id);
  auto& d = iot_[i];
  if (!d.enabled) return;
  if (const auto bound = connections_.active_edge(iot_id)) {
    const auto& e = edges_[edge_index(*bound)];
    if (e.enabled && !is_out_of_range(d.mobility.location, e)) return;
    if (!report_.first_out_of_range) report_.first_out_of_range = kernel_.now();
    record(TraceKind::OutOfRange, EdgeLet{}, iot_id);
    rebind_or_drop(iot_id, *bound);
    return;
  }
  const auto outcome = establish_connection(d, edges_, connections_);
  if (outcome.ack) {
    ++report_.connections;
    if (!generating_[i]) {
      kernel_.schedule_in(0.0, iot_id, EventKind::ConnectAck, AckPayload{outcome});
    }
  }
}

void Simulation::rebind_or_drop(EntityId iot_id, EntityId /*previous_edge*/) {
  auto& d = iot_[iot_index(iot_id)];
  connections_.drop(iot_id);
  const auto selection = select_edge(d, edges_, connections_);
  if (selection.edge) {
    connections_.bind(iot_id, *selection.edge, d.entry_mel);
    ++report_.handoffs;
    record(TraceKind::Handoff, EdgeLet{}, iot_id);
  } else {
    ++report_.dropped_bindings;
    record(TraceKind::Dropped, EdgeLet{}, iot_id);
  }
}

void Simulation::detach_depleted_edge(EntityId edge_id) {
  const auto index = edge_index(edge_id);
  auto& e = edges_[index];
  if (!e.battery || !e.battery->depleted()) {
    throw std::logic_error("detach_depleted_edge on " + e.name + ", which still has power");
  }
  if (!e.enabled) return;
  e.enabled = false;
  broker_.available_edges.erase(edge_id);
  if (!report_.devices[index].depleted_at) report_.devices[index].depleted_at = kernel_.now();

  for (auto device : connections_.bound_to(edge_id)) rebind_or_drop(device, edge_id);
  for (auto& job : queues_[index].take_waiting()) reroute(job.edgelet);

  if (!any_edge_enabled() && !kernel_.stopped()) {
    report_.termination = TerminationReason::EdgesDisabled;
    kernel_.stop();
  }
}

void Simulation::on_terminate(const Event&) {
  if (kernel_.stopped()) return;
  report_.termination = TerminationReason::Horizon;
  kernel_.stop();
}

void Simulation::resolve_branch(std::uint64_t lineage, BranchOutcome outcome) {
  auto it = lineages_.find(lineage);
  if (it == lineages_.end()) throw std::logic_error("branch of unknown lineage resolved");
  auto& state = it->second;
  if (outcome == BranchOutcome::Discarded) state.discarded = true;
  if (outcome == BranchOutcome::Undelivered) state.undelivered = true;
  if (--state.outstanding > 0) return;

  if (state.discarded) {
    ++report_.discarded;
  } else if (state.undelivered) {
    ++report_.undelivered;
  } else {
    ++report_.delivered;
  }
  broker_.pending_results.erase(lineage);
  lineages_.erase(it);
  check_finished();
}

void Simulation::check_finished() {
  if (kernel_.stopped()) return;
  if (!broker_.available_iot.empty() || !lineages_.empty()) return;
  report_.termination = TerminationReason::BatteriesDepleted;
  kernel_.stop();
}

MetricsReport run_scenario(const ScenarioConfig& config, RunOptions options) {
  Simulation sim(config, std::move(options));
  return sim.run();
}

}  // namespace edgesim
