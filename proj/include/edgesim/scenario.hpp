#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "edgesim/app_graph.hpp"
#include "edgesim/device.hpp"
#include "edgesim/protocols.hpp"

namespace edgesim {

// Scenario documents are JSON. Keys of the IoT section keep the historical
// spelling ("iOTDeviceEntities", "complexityOfDataPackage", "numberofEntity",
// ...); docs/scenario-schema.md lists every field.

struct MobilityConfig {
  bool movable = false;
  Location location;
  double velocity_x = 0.0;
  double velocity_y = 0.0;
  std::optional<double> interval;  // falls back to run.trackingInterval

  friend bool operator==(const MobilityConfig&, const MobilityConfig&) = default;
};

struct IoTTemplate {
  MobilityConfig mobility;
  std::int64_t assignment_id = 0;  // entry MEL id
  std::string class_name;
  std::string iot_type;
  std::string name;
  double data_frequency = 1.0;
  double data_generation_time = 1.0;  // carried, no effect on dynamics
  double data_size_mb = 1.0;          // "complexityOfDataPackage"
  std::string network_type;
  std::string communication_protocol;
  double max_battery_capacity = 0.0;
  double battery_drainage_rate = 0.0;  // transfer drain rate, units per MB
  double processing_ability = 1.0;     // carried, reserved
  int count = 1;

  friend bool operator==(const IoTTemplate&, const IoTTemplate&) = default;
};

struct BatteryConfig {
  double max_capacity = 0.0;
  double processing_drainage_rate = 0.0;
  double transfer_drainage_rate = 0.0;

  friend bool operator==(const BatteryConfig&, const BatteryConfig&) = default;
};

struct EdgeTemplate {
  std::string name;
  std::string type;
  MobilityConfig mobility;
  double range_x = 0.0;
  double range_y = 0.0;
  int max_iot_capacity = 0;
  double mips = 0.0;
  double ram_mb = 0.0;
  double bandwidth_mbps = 0.0;
  std::vector<std::string> network_types;
  std::optional<BatteryConfig> battery;
  int count = 1;

  friend bool operator==(const EdgeTemplate&, const EdgeTemplate&) = default;
};

struct MelConfig {
  std::int64_t id = 0;
  std::vector<std::string> hosts;  // edge template names, preference order
  double shrink_factor = 1.0;
  double instructions_per_mb = 0.0;
  double shrink_instructions_per_mb = 0.0;
  std::vector<std::int64_t> uplinks;
  std::vector<std::int64_t> downlinks;

  friend bool operator==(const MelConfig&, const MelConfig&) = default;
};

struct RunConfig {
  std::optional<double> horizon;
  std::uint64_t seed = 1;
  double tracking_interval = 1.0;
  double relay_delay = 0.0;
  double generation_jitter = 0.0;  // fraction of the generation period, in [0, 1)

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct ScenarioConfig {
  std::vector<IoTTemplate> iot_devices;
  std::vector<EdgeTemplate> edge_devices;
  std::optional<std::vector<MelConfig>> mel_graph;  // absent in IoT-only documents
  ProtocolCatalog protocol_overrides;
  RunConfig run;

  [[nodiscard]] ProtocolCatalog effective_catalog() const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct ScenarioIssue {
  std::string path;  // JSON pointer, or "line:column" for syntax errors
  std::string message;
};

class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(std::vector<ScenarioIssue> issues);
  [[nodiscard]] const std::vector<ScenarioIssue>& issues() const { return issues_; }

 private:
  std::vector<ScenarioIssue> issues_;
};

/// Parses and validates a scenario document. Throws ScenarioError listing
/// every problem found.
ScenarioConfig parse_scenario(std::string_view text);

/// Reads and parses a scenario file. I/O failures throw std::system_error.
ScenarioConfig load_scenario(const std::string& path);

/// Canonical JSON text for a config; parse_scenario(serialize_scenario(c)) == c.
std::string serialize_scenario(const ScenarioConfig& config);

/// Checks a config built in code against the same rules as parse_scenario.
void validate_scenario(const ScenarioConfig& config);

/// Concrete devices and MEL graph derived from a config.
struct Population {
  std::vector<IoTDeviceState> iot_devices;
  std::vector<EdgeDeviceState> edge_devices;
  ApplicationGraph graph;
};

/// Clones every template `count` times. Ids: 0 and 1 are reserved for the
/// datacenter and the broker, edges follow in declaration order, then IoT
/// devices. Instance names are "<template>_<index>".
Population expand_entities(const ScenarioConfig& config);

inline constexpr EntityId kDatacenterId{0};
inline constexpr EntityId kBrokerId{1};

}  // namespace edgesim
