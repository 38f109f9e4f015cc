#pragma once

#include <optional>
#include <string>
#include <vector>

#include "edgesim/app_graph.hpp"
#include "edgesim/kernel.hpp"
#include "edgesim/protocols.hpp"

namespace edgesim {

/// Position in meters.
struct Location {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Location&, const Location&) = default;
};

struct MobilityState {
  bool movable = false;
  Location location;
  double velocity_x = 0.0;  // m/s
  double velocity_y = 0.0;
  double update_interval = 1.0;  // s between location updates
};

/// Half-widths of the coverage box centred on an edge device.
struct SignalRange {
  double range_x = 0.0;
  double range_y = 0.0;
};

struct Battery {
  double max_capacity = 0.0;
  double current_level = 0.0;
  double drain_rate_processing = 0.0;  // units per MB processed locally
  double drain_rate_transfer = 0.0;    // units per MB sent

  [[nodiscard]] bool depleted() const { return current_level <= 0.0; }
};

struct IoTDeviceState {
  EntityId id;
  std::string name;
  std::string iot_type;
  MobilityState mobility;
  Battery battery;
  double data_frequency = 1.0;  // generations per second
  double data_generation_time = 0.0;
  double data_size_mb = 0.0;
  MelId entry_mel;
  NetworkProtocolSpec network_protocol;
  IoTProtocolSpec iot_protocol;
  bool enabled = true;
};

struct EdgeDeviceState {
  EntityId id;
  std::string name;
  std::string device_type;
  MobilityState mobility;
  SignalRange signal_range;
  int max_iot_capacity = 0;
  double mips = 0.0;
  double ram_mb = 0.0;
  double bandwidth_mbps = 0.0;
  std::vector<std::string> network_protocols;
  std::optional<Battery> battery;  // empty for mains-powered devices
  std::vector<MelId> hosted_mels;
  bool enabled = true;

  [[nodiscard]] bool supports(const std::string& network_protocol) const;
};

/**
 * Energy for handling `data_mb` of data when a `shrink_factor` share is
 * transmitted and the rest processed locally:
 * DS * [(1 - rho) * drain_proc + rho * drain_comm * coeff].
 */
double battery_consumption(double data_mb, double shrink_factor, double drain_proc,
                           double drain_comm, double protocol_energy_coeff = 1.0);

struct DrainResult {
  Battery battery;
  bool depleted = false;
};

/// Removes `amount` from the battery, clamping at zero.
DrainResult drain(const Battery& battery, double amount);

/// Seconds to push `data_mb` megabytes through the given protocol pair.
double transmission_time(double data_mb, const NetworkProtocolSpec& net,
                         const IoTProtocolSpec& iot);

struct LocationDelta {
  double dx = 0.0;
  double dy = 0.0;
};

struct LocationUpdate {
  MobilityState state;
  LocationDelta moved;
};

/// Advances a movable device by velocity * interval. Throws std::logic_error
/// for devices that are not movable.
LocationUpdate update_location(const MobilityState& mobility, double interval);

/// True when the device lies outside the edge's coverage box.
bool is_out_of_range(const Location& iot_location, const EdgeDeviceState& edge);

/// Planar distance used to rank candidate edges.
double planar_distance(const Location& a, const Location& b);

struct Generation {
  EdgeLet edgelet;
  SimTime next_at = 0.0;
};

/**
 * Produces the EdgeLet a device senses at `now`, addressed to its entry MEL,
 * and the time of its next generation. Returns nullopt for a disabled device.
 */
std::optional<Generation> generate_edgelet(const IoTDeviceState& device, SimTime now,
                                           std::uint64_t edgelet_id);

}  // namespace edgesim
