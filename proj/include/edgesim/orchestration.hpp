#pragma once

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "edgesim/app_graph.hpp"
#include "edgesim/device.hpp"
#include "edgesim/kernel.hpp"
#include "edgesim/metrics.hpp"
#include "edgesim/scenario.hpp"

namespace edgesim {

// ---------------------------------------------------------------------------
// Connections

enum class BindingStatus { Pending, Active, Dropped };

struct Binding {
  EntityId edge;
  MelId mel;
  BindingStatus status = BindingStatus::Pending;
};

/// IoT device -> (edge, entry MEL) bindings. At most one active binding per
/// device; the per-edge active count is maintained alongside.
class ConnectionTable {
 public:
  [[nodiscard]] const Binding* find(EntityId iot) const;
  [[nodiscard]] std::optional<EntityId> active_edge(EntityId iot) const;
  [[nodiscard]] int active_count(EntityId edge) const;
  /// Devices actively bound to `edge`, ascending by id.
  [[nodiscard]] std::vector<EntityId> bound_to(EntityId edge) const;

  void bind(EntityId iot, EntityId edge, MelId mel);
  void drop(EntityId iot);

 private:
  std::map<EntityId, Binding> bindings_;
  std::map<EntityId, int> load_;
};

enum class NackReason { None, OutOfRange, Capacity, ProtocolMismatch, NoEdge };

std::string_view to_string(NackReason reason);

struct EdgeSelection {
  std::optional<EntityId> edge;
  NackReason reason = NackReason::None;  // why the filter came up empty
};

/**
 * Picks the edge an IoT device should use. Candidates must host the device's
 * entry MEL and be enabled, in range, protocol compatible and below capacity;
 * among those the nearest (planar distance) wins, ties to the lowest id.
 */
EdgeSelection select_edge(const IoTDeviceState& iot, std::span<const EdgeDeviceState> candidates,
                          const ConnectionTable& table);

struct ConnectionOutcome {
  bool ack = false;
  EntityId edge;
  NackReason reason = NackReason::None;
};

/// Runs select_edge and records an active binding on success.
ConnectionOutcome establish_connection(const IoTDeviceState& iot,
                                       std::span<const EdgeDeviceState> edges,
                                       ConnectionTable& table);

// ---------------------------------------------------------------------------
// Processing

struct QueuedJob {
  EdgeLet edgelet;
  SimTime enqueued_at = 0.0;
  double service_time = 0.0;
};

/// Chooses which waiting job an edge CPU serves next.
class SchedulingPolicy {
 public:
  virtual ~SchedulingPolicy() = default;
  [[nodiscard]] virtual std::size_t select_next(const std::deque<QueuedJob>& waiting) const = 0;
  [[nodiscard]] virtual std::string_view name() const = 0;
};

class FifoPolicy final : public SchedulingPolicy {
 public:
  [[nodiscard]] std::size_t select_next(const std::deque<QueuedJob>&) const override { return 0; }
  [[nodiscard]] std::string_view name() const override { return "fifo"; }
};

/// Single CPU shared by every MEL on one edge device.
class ProcessingQueue {
 public:
  explicit ProcessingQueue(std::shared_ptr<const SchedulingPolicy> policy = nullptr);

  struct Submission {
    SimTime completion = 0.0;  // predicted; exact under FIFO
    bool started_now = false;  // caller schedules the completion event
  };

  Submission submit(const EdgeLet& edgelet, double service_time, SimTime now);

  /// Removes the running job. Precondition: busy().
  QueuedJob finish();

  /// Starts the next waiting job, if any, and returns its completion time.
  std::optional<SimTime> start_next(SimTime now);

  /// Empties the waiting line (the running job is kept).
  std::vector<QueuedJob> take_waiting();

  [[nodiscard]] bool busy() const { return running_.has_value(); }
  [[nodiscard]] SimTime busy_until() const { return busy_until_; }
  [[nodiscard]] std::size_t waiting() const { return waiting_.size(); }
  [[nodiscard]] const std::optional<QueuedJob>& running() const { return running_; }

 private:
  std::shared_ptr<const SchedulingPolicy> policy_;
  std::deque<QueuedJob> waiting_;
  std::optional<QueuedJob> running_;
  SimTime busy_until_ = 0.0;
  SimTime running_completion_ = 0.0;
};

/// Service time from the MEL model, then queue. Returns the completion time.
SimTime submit_edgelet(const EdgeLet& edgelet, ProcessingQueue& queue, const Mel& mel,
                       double mips, SimTime now);

struct BrokerState {
  std::set<EntityId> available_iot;
  std::set<EntityId> available_edges;
  std::map<std::uint64_t, EntityId> pending_results;  // lineage -> source device
};

// ---------------------------------------------------------------------------
// Run driver

enum class TraceKind {
  Generated,
  Discarded,
  Submitted,
  Processed,
  Forwarded,
  Delivered,
  Undelivered,
  OutOfRange,
  Handoff,
  Dropped,
};

std::string_view to_string(TraceKind kind);

/// EdgeLet lifecycle and mobility record, emitted when RunOptions::trace is set.
struct TraceRecord {
  SimTime time = 0.0;
  TraceKind kind = TraceKind::Generated;
  std::uint64_t edgelet = 0;
  std::uint64_t parent = 0;  // Forwarded: the EdgeLet this one was derived from
  std::uint64_t lineage = 0;
  EntityId device;  // edge for Submitted/Processed, IoT device otherwise
  bool relayed = false;
};

struct RunOptions {
  std::vector<TraceRecord>* trace = nullptr;
  bool record_energy = true;
  std::shared_ptr<const SchedulingPolicy> policy;  // FIFO when null
};

struct DeliveryPlan {
  bool deliverable = false;
  bool relayed = false;
  EntityId via_edge;
};

class Simulation {
 public:
  explicit Simulation(const ScenarioConfig& config, RunOptions options = {});
  ~Simulation();
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  /// Runs to termination and returns the collected metrics. Single use.
  MetricsReport run();

  // State inspection and the individual steps, exposed for testing.
  [[nodiscard]] const Kernel& kernel() const { return kernel_; }
  [[nodiscard]] const std::vector<IoTDeviceState>& iot_devices() const { return iot_; }
  [[nodiscard]] const std::vector<EdgeDeviceState>& edge_devices() const { return edges_; }
  [[nodiscard]] const ConnectionTable& connections() const { return connections_; }
  [[nodiscard]] const ProcessingQueue& queue(EntityId edge) const;
  [[nodiscard]] const BrokerState& broker() const { return broker_; }
  [[nodiscard]] const ApplicationGraph& graph() const { return graph_; }

  IoTDeviceState& iot(EntityId id);
  EdgeDeviceState& edge(EntityId id);

  /// Where a finished result for `target_iot` produced on `origin_edge` goes.
  [[nodiscard]] DeliveryPlan edge_to_edge_relay(EntityId origin_edge, EntityId target_iot) const;

  /// Disables a depleted edge, rebinds its devices and re-routes its queue.
  void detach_depleted_edge(EntityId edge);

 private:
  class Dispatcher;
  struct LineageState {
    EntityId source;
    SimTime created_at = 0.0;
    std::optional<SimTime> first_arrival;
    int outstanding = 1;
    bool discarded = false;
    bool undelivered = false;
  };
  enum class BranchOutcome { Delivered, Discarded, Undelivered };

  void on_connect_ack(const Event& event);
  void on_generate(const Event& event);
  void on_battery_update(const Event& event);
  void on_arrival(const Event& event);
  void on_processing_complete(const Event& event);
  void on_location_update(const Event& event);
  void on_delivery(const Event& event);
  void on_terminate(const Event& event);

  void submit(const EdgeLet& edgelet, EntityId edge);
  void reroute(const EdgeLet& edgelet);
  void route_to_mel(const EdgeLet& edgelet, EntityId from_edge);
  void check_binding(EntityId iot_id);
  void rebind_or_drop(EntityId iot_id, EntityId previous_edge);
  std::optional<EntityId> edge_for_mel(const Mel& mel, std::optional<EntityId> preferred) const;
  void resolve_branch(std::uint64_t lineage, BranchOutcome outcome);
  void check_finished();
  void record(TraceKind kind, const EdgeLet& edgelet, EntityId device, std::uint64_t parent = 0,
              bool relayed = false);
  void record_energy(const std::string& device, double data_mb, double shrink, double requested,
                     double applied);
  [[nodiscard]] bool any_edge_enabled() const;
  [[nodiscard]] std::size_t edge_index(EntityId id) const;
  [[nodiscard]] std::size_t iot_index(EntityId id) const;

  ScenarioConfig config_;
  RunOptions options_;
  Kernel kernel_;
  ProtocolCatalog catalog_;
  std::vector<IoTDeviceState> iot_;
  std::vector<EdgeDeviceState> edges_;
  ApplicationGraph graph_;
  ConnectionTable connections_;
  std::vector<ProcessingQueue> queues_;
  BrokerState broker_;
  std::unique_ptr<Dispatcher> dispatcher_;

  std::unordered_map<std::uint64_t, LineageState> lineages_;
  std::vector<bool> generating_;
  std::vector<bool> tracking_;
  std::mt19937_64 rng_;
  std::uint64_t next_edgelet_id_ = 0;
  bool ran_ = false;
  MetricsReport report_;
};

/// Validates, runs and reports one scenario.
MetricsReport run_scenario(const ScenarioConfig& config, RunOptions options = {});

}  // namespace edgesim
