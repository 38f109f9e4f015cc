#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "edgesim/kernel.hpp"

namespace edgesim {

/// One result returned to its IoT device.
struct ResponseRecord {
  std::uint64_t lineage = 0;    // id of the generated EdgeLet
  std::uint64_t result_id = 0;  // id of the final EdgeLet
  std::string source_iot;
  SimTime created_at = 0.0;
  SimTime delivered_at = 0.0;
  double latency = 0.0;         // delivered_at - created_at
  double execution_time = 0.0;  // first edge arrival -> last MEL completion
  bool relayed = false;
};

struct DeviceMetrics {
  std::string name;
  bool is_edge = false;
  bool has_battery = false;
  double max_capacity = 0.0;
  double final_level = 0.0;
  double energy_consumed = 0.0;
  std::optional<SimTime> depleted_at;
  std::uint64_t edgelets = 0;  // generated (IoT) or processed (edge)
  SimTime active_until = 0.0;  // depletion time, or end of run
};

enum class TerminationReason { QueueExhausted, Horizon, BatteriesDepleted, EdgesDisabled };

std::string_view to_string(TerminationReason reason);

/// One battery drain as applied to a device.
struct EnergyRecord {
  std::string device;
  SimTime time = 0.0;
  double data_mb = 0.0;
  double shrink_factor = 0.0;
  double requested = 0.0;  // battery_consumption result
  double applied = 0.0;    // after clamping at empty
};

struct MetricsReport {
  std::vector<ResponseRecord> responses;  // in delivery order
  std::vector<DeviceMetrics> devices;     // edges first, then IoT devices
  std::vector<EnergyRecord> energy;       // in application order

  // EdgeLet accounting, per generated EdgeLet.
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  std::uint64_t discarded = 0;    // no edge could accept it
  std::uint64_t undelivered = 0;  // result could not reach its device
  std::uint64_t in_flight = 0;    // unresolved at termination

  std::uint64_t connections = 0;
  std::uint64_t connection_failures = 0;
  std::uint64_t handoffs = 0;
  std::uint64_t dropped_bindings = 0;
  std::uint64_t relays = 0;
  std::uint64_t events = 0;  // kernel dispatches
  std::optional<SimTime> first_out_of_range;

  SimTime end_time = 0.0;
  TerminationReason termination = TerminationReason::QueueExhausted;
  double wall_clock_s = 0.0;  // never serialized

  [[nodiscard]] double mean_latency() const;
  [[nodiscard]] double mean_execution_time() const;
  /// Averages over battery-powered edge devices; 0 when there are none.
  [[nodiscard]] double mean_edge_energy() const;
  [[nodiscard]] double mean_edge_power() const;
  [[nodiscard]] const DeviceMetrics* device(const std::string& name) const;
};

}  // namespace edgesim
