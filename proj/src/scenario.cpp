#include "edgesim/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <system_error>

#include "json.hpp"

namespace edgesim {

using nlohmann::json;

namespace {

std::string join_issues(const std::vector<ScenarioIssue>& issues) {
  std::string text = "invalid scenario";
  for (const auto& i : issues) text += "\n  " + i.path + ": " + i.message;
  return text;
}

std::string escape_token(std::string_view key) {
  std::string out;
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

std::string child(const std::string& path, std::string_view key) {
  return path + "/" + escape_token(key);
}

std::string child(const std::string& path, std::size_t index) {
  return path + "/" + std::to_string(index);
}

// Reads typed fields out of a JSON document, recording every problem
// instead of stopping at the first one.
class Reader {
 public:
  explicit Reader(std::vector<ScenarioIssue>& issues) : issues_(issues) {}

  void issue(std::string path, std::string message) {
    issues_.push_back({path.empty() ? "/" : std::move(path), std::move(message)});
  }

  bool object(const json& j, const std::string& path,
              std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) {
      issue(path, "expected an object");
      return false;
    }
    for (const auto& [key, value] : j.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        issue(child(path, key), "unknown field");
      }
    }
    return true;
  }

  const json* field(const json& obj, const std::string& path, std::string_view key,
                    bool required) {
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) issue(child(path, key), "missing required field");
      return nullptr;
    }
    return &*it;
  }

  void number(const json& obj, const std::string& path, std::string_view key, double& out,
              bool required = false) {
    const json* v = field(obj, path, key, required);
    if (v == nullptr) return;
    if (!v->is_number()) {
      issue(child(path, key), "expected a number");
      return;
    }
    out = v->get<double>();
  }

  void optional_number(const json& obj, const std::string& path, std::string_view key,
                       std::optional<double>& out) {
    double value = 0.0;
    if (obj.contains(key)) {
      const auto before = issues_.size();
      number(obj, path, key, value);
      if (issues_.size() == before) out = value;
    }
  }

  template <class Int>
  void integer(const json& obj, const std::string& path, std::string_view key, Int& out,
               bool required = false) {
    const json* v = field(obj, path, key, required);
    if (v == nullptr) return;
    if (!v->is_number_integer()) {
      issue(child(path, key), "expected an integer");
      return;
    }
    if constexpr (std::is_unsigned_v<Int>) {
      if (v->is_number_unsigned()) {
        out = v->get<Int>();
      } else {
        issue(child(path, key), "expected a non-negative integer");
      }
    } else {
      if (v->is_number_unsigned() &&
          v->get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<Int>::max())) {
        issue(child(path, key), "integer out of range");
        return;
      }
      const auto wide = v->get<std::int64_t>();
      if (wide < std::numeric_limits<Int>::min() || wide > std::numeric_limits<Int>::max()) {
        issue(child(path, key), "integer out of range");
        return;
      }
      out = static_cast<Int>(wide);
    }
  }

  void boolean(const json& obj, const std::string& path, std::string_view key, bool& out) {
    const json* v = field(obj, path, key, false);
    if (v == nullptr) return;
    if (!v->is_boolean()) {
      issue(child(path, key), "expected true or false");
      return;
    }
    out = v->get<bool>();
  }

  void string(const json& obj, const std::string& path, std::string_view key, std::string& out,
              bool required = false) {
    const json* v = field(obj, path, key, required);
    if (v == nullptr) return;
    if (!v->is_string()) {
      issue(child(path, key), "expected a string");
      return;
    }
    out = v->get<std::string>();
  }

  const json* array(const json& obj, const std::string& path, std::string_view key,
                    bool required = false) {
    const json* v = field(obj, path, key, required);
    if (v == nullptr) return nullptr;
    if (!v->is_array()) {
      issue(child(path, key), "expected an array");
      return nullptr;
    }
    return v;
  }

  void strings(const json& obj, const std::string& path, std::string_view key,
               std::vector<std::string>& out, bool required = false) {
    const json* arr = array(obj, path, key, required);
    if (arr == nullptr) return;
    out.clear();
    const auto base = child(path, key);
    for (std::size_t i = 0; i < arr->size(); ++i) {
      if (!(*arr)[i].is_string()) {
        issue(child(base, i), "expected a string");
        continue;
      }
      out.push_back((*arr)[i].get<std::string>());
    }
  }

  void integers(const json& obj, const std::string& path, std::string_view key,
                std::vector<std::int64_t>& out) {
    const json* arr = array(obj, path, key);
    if (arr == nullptr) return;
    out.clear();
    const auto base = child(path, key);
    for (std::size_t i = 0; i < arr->size(); ++i) {
      if (!(*arr)[i].is_number_integer()) {
        issue(child(base, i), "expected an integer");
        continue;
      }
      out.push_back((*arr)[i].get<std::int64_t>());
    }
  }

 private:
  std::vector<ScenarioIssue>& issues_;
};

void read_mobility(Reader& r, const json& j, const std::string& path, MobilityConfig& m) {
  if (!r.object(j, path, {"movable", "location", "velocity", "interval"})) return;
  r.boolean(j, path, "movable", m.movable);
  if (const json* loc = r.field(j, path, "location", false)) {
    const auto p = child(path, "location");
    if (r.object(*loc, p, {"x", "y", "z"})) {
      r.number(*loc, p, "x", m.location.x);
      r.number(*loc, p, "y", m.location.y);
      r.number(*loc, p, "z", m.location.z);
    }
  }
  if (const json* vel = r.field(j, path, "velocity", false)) {
    const auto p = child(path, "velocity");
    if (r.object(*vel, p, {"x", "y"})) {
      r.number(*vel, p, "x", m.velocity_x);
      r.number(*vel, p, "y", m.velocity_y);
    }
  }
  r.optional_number(j, path, "interval", m.interval);
}

void read_iot(Reader& r, const json& j, const std::string& path, IoTTemplate& t) {
  if (!r.object(j, path,
                {"mobilityEntity", "assignmentId", "ioTClassName", "ioTType", "name",
                 "data_frequency", "dataGenerationTime", "complexityOfDataPackage",
                 "networkModelEntity", "max_battery_capacity", "battery_drainage_rate",
                 "processingAbility", "numberofEntity"})) {
    return;
  }
  if (const json* m = r.field(j, path, "mobilityEntity", false)) {
    read_mobility(r, *m, child(path, "mobilityEntity"), t.mobility);
  }
  r.integer(j, path, "assignmentId", t.assignment_id, true);
  r.string(j, path, "ioTClassName", t.class_name);
  r.string(j, path, "ioTType", t.iot_type);
  r.string(j, path, "name", t.name, true);
  r.number(j, path, "data_frequency", t.data_frequency, true);
  r.number(j, path, "dataGenerationTime", t.data_generation_time);
  r.number(j, path, "complexityOfDataPackage", t.data_size_mb, true);
  if (const json* net = r.field(j, path, "networkModelEntity", true)) {
    const auto p = child(path, "networkModelEntity");
    if (r.object(*net, p, {"networkType", "communicationProtocol"})) {
      r.string(*net, p, "networkType", t.network_type, true);
      r.string(*net, p, "communicationProtocol", t.communication_protocol, true);
    }
  }
  r.number(j, path, "max_battery_capacity", t.max_battery_capacity, true);
  r.number(j, path, "battery_drainage_rate", t.battery_drainage_rate, true);
  r.number(j, path, "processingAbility", t.processing_ability);
  r.integer(j, path, "numberofEntity", t.count);
}

void read_edge(Reader& r, const json& j, const std::string& path, EdgeTemplate& t) {
  if (!r.object(j, path,
                {"name", "type", "mobilityEntity", "signalRange", "maxIoTDeviceCapacity", "mips",
                 "ram", "bandwidth", "networkTypes", "battery", "numberofEntity"})) {
    return;
  }
  r.string(j, path, "name", t.name, true);
  r.string(j, path, "type", t.type);
  if (const json* m = r.field(j, path, "mobilityEntity", false)) {
    read_mobility(r, *m, child(path, "mobilityEntity"), t.mobility);
  }
  if (const json* range = r.field(j, path, "signalRange", true)) {
    const auto p = child(path, "signalRange");
    if (r.object(*range, p, {"x", "y"})) {
      r.number(*range, p, "x", t.range_x, true);
      r.number(*range, p, "y", t.range_y, true);
    }
  }
  r.integer(j, path, "maxIoTDeviceCapacity", t.max_iot_capacity, true);
  r.number(j, path, "mips", t.mips, true);
  r.number(j, path, "ram", t.ram_mb);
  r.number(j, path, "bandwidth", t.bandwidth_mbps);
  r.strings(j, path, "networkTypes", t.network_types, true);
  if (const json* b = r.field(j, path, "battery", false)) {
    const auto p = child(path, "battery");
    if (r.object(*b, p,
                 {"max_battery_capacity", "processing_drainage_rate", "transfer_drainage_rate"})) {
      BatteryConfig battery;
      r.number(*b, p, "max_battery_capacity", battery.max_capacity, true);
      r.number(*b, p, "processing_drainage_rate", battery.processing_drainage_rate, true);
      r.number(*b, p, "transfer_drainage_rate", battery.transfer_drainage_rate, true);
      t.battery = battery;
    }
  }
  r.integer(j, path, "numberofEntity", t.count);
}

void read_mel(Reader& r, const json& j, const std::string& path, MelConfig& m) {
  if (!r.object(j, path,
                {"id", "hosts", "shrinkingFactor", "instructionsPerMB", "shrinkInstructionsPerMB",
                 "upLink", "downLink"})) {
    return;
  }
  r.integer(j, path, "id", m.id, true);
  r.strings(j, path, "hosts", m.hosts, true);
  r.number(j, path, "shrinkingFactor", m.shrink_factor, true);
  r.number(j, path, "instructionsPerMB", m.instructions_per_mb, true);
  r.number(j, path, "shrinkInstructionsPerMB", m.shrink_instructions_per_mb);
  r.integers(j, path, "upLink", m.uplinks);
  r.integers(j, path, "downLink", m.downlinks);
}

ScenarioConfig read_document(const json& doc, std::vector<ScenarioIssue>& issues) {
  Reader r(issues);
  ScenarioConfig cfg;
  if (!r.object(doc, "",
                {"iOTDeviceEntities", "edgeDeviceEntities", "melGraph", "protocolCatalog",
                 "run"})) {
    return cfg;
  }

  if (const json* arr = r.array(doc, "", "iOTDeviceEntities")) {
    for (std::size_t i = 0; i < arr->size(); ++i) {
      IoTTemplate t;
      read_iot(r, (*arr)[i], child("/iOTDeviceEntities", i), t);
      cfg.iot_devices.push_back(std::move(t));
    }
  }
  if (const json* arr = r.array(doc, "", "edgeDeviceEntities")) {
    for (std::size_t i = 0; i < arr->size(); ++i) {
      EdgeTemplate t;
      read_edge(r, (*arr)[i], child("/edgeDeviceEntities", i), t);
      cfg.edge_devices.push_back(std::move(t));
    }
  }
  if (const json* arr = r.array(doc, "", "melGraph")) {
    cfg.mel_graph.emplace();
    for (std::size_t i = 0; i < arr->size(); ++i) {
      MelConfig m;
      read_mel(r, (*arr)[i], child("/melGraph", i), m);
      cfg.mel_graph->push_back(std::move(m));
    }
  }
  if (const json* cat = r.field(doc, "", "protocolCatalog", false)) {
    const std::string base = "/protocolCatalog";
    if (!cat->is_object()) {
      r.issue(base, "expected an object");
    } else {
      for (const auto& [key, value] : cat->items()) {
        if (key != "network" && key != "iot") r.issue(child(base, key), "unknown field");
      }
      if (const json* net = r.field(*cat, base, "network", false)) {
        const auto p = child(base, "network");
        if (!net->is_object()) {
          r.issue(p, "expected an object");
        } else {
          for (const auto& [name, spec] : net->items()) {
            const auto q = child(p, name);
            NetworkProtocolSpec s{name};
            if (r.object(spec, q, {"dataRate", "maxPacketSize"})) {
              r.number(spec, q, "dataRate", s.data_rate_mbps, true);
              r.number(spec, q, "maxPacketSize", s.max_packet_size_bytes, true);
            }
            cfg.protocol_overrides.network[name] = s;
          }
        }
      }
      if (const json* iot = r.field(*cat, base, "iot", false)) {
        const auto p = child(base, "iot");
        if (!iot->is_object()) {
          r.issue(p, "expected an object");
        } else {
          for (const auto& [name, spec] : iot->items()) {
            const auto q = child(p, name);
            IoTProtocolSpec s{name};
            if (r.object(spec, q, {"headerSize", "qosAckFactor", "energyCoefficient"})) {
              r.number(spec, q, "headerSize", s.header_size_bytes, true);
              r.number(spec, q, "qosAckFactor", s.qos_ack_factor);
              r.number(spec, q, "energyCoefficient", s.energy_coefficient);
            }
            cfg.protocol_overrides.iot[name] = s;
          }
        }
      }
    }
  }
  if (const json* run = r.field(doc, "", "run", false)) {
    const std::string p = "/run";
    if (r.object(*run, p,
                 {"horizon", "seed", "trackingInterval", "relayDelay", "generationJitter"})) {
      r.optional_number(*run, p, "horizon", cfg.run.horizon);
      r.integer(*run, p, "seed", cfg.run.seed);
      r.number(*run, p, "trackingInterval", cfg.run.tracking_interval);
      r.number(*run, p, "relayDelay", cfg.run.relay_delay);
      r.number(*run, p, "generationJitter", cfg.run.generation_jitter);
    }
  }
  return cfg;
}

// --- semantic checks, shared by parse_scenario and validate_scenario ---

class Checker {
 public:
  explicit Checker(std::vector<ScenarioIssue>& issues) : issues_(issues) {}

  void finite(const std::string& path, double v) {
    if (!std::isfinite(v)) add(path, "must be a finite number");
  }
  void positive(const std::string& path, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) add(path, "must be positive");
  }
  void non_negative(const std::string& path, double v) {
    if (!(v >= 0.0) || !std::isfinite(v)) add(path, "must be non-negative");
  }
  void unit_interval(const std::string& path, double v) {
    if (!(v >= 0.0 && v <= 1.0)) add(path, "must lie in [0, 1]");
  }
  void add(const std::string& path, std::string message) {
    issues_.push_back({path, std::move(message)});
  }

 private:
  std::vector<ScenarioIssue>& issues_;
};

void check_mobility(Checker& c, const std::string& path, const MobilityConfig& m) {
  c.finite(path + "/location/x", m.location.x);
  c.finite(path + "/location/y", m.location.y);
  c.finite(path + "/location/z", m.location.z);
  c.finite(path + "/velocity/x", m.velocity_x);
  c.finite(path + "/velocity/y", m.velocity_y);
  if (m.interval) c.positive(path + "/interval", *m.interval);
}

void collect_issues(const ScenarioConfig& cfg, std::vector<ScenarioIssue>& issues) {
  Checker c(issues);
  const auto catalog = cfg.effective_catalog();

  for (const auto& [name, spec] : cfg.protocol_overrides.network) {
    const auto p = "/protocolCatalog/network/" + escape_token(name);
    c.positive(p + "/dataRate", spec.data_rate_mbps);
    c.positive(p + "/maxPacketSize", spec.max_packet_size_bytes);
  }
  for (const auto& [name, spec] : cfg.protocol_overrides.iot) {
    const auto p = "/protocolCatalog/iot/" + escape_token(name);
    c.non_negative(p + "/headerSize", spec.header_size_bytes);
    c.positive(p + "/qosAckFactor", spec.qos_ack_factor);
    c.non_negative(p + "/energyCoefficient", spec.energy_coefficient);
  }

  bool any_movable = false;
  std::set<std::string> edge_names;
  for (std::size_t i = 0; i < cfg.edge_devices.size(); ++i) {
    const auto& t = cfg.edge_devices[i];
    const auto p = child("/edgeDeviceEntities", i);
    if (t.name.empty()) {
      c.add(p + "/name", "must not be empty");
    } else if (!edge_names.insert(t.name).second) {
      c.add(p + "/name", "duplicate edge name '" + t.name + "'");
    }
    check_mobility(c, p + "/mobilityEntity", t.mobility);
    any_movable = any_movable || t.mobility.movable;
    c.non_negative(p + "/signalRange/x", t.range_x);
    c.non_negative(p + "/signalRange/y", t.range_y);
    if (t.max_iot_capacity < 0) c.add(p + "/maxIoTDeviceCapacity", "must be non-negative");
    c.positive(p + "/mips", t.mips);
    c.non_negative(p + "/ram", t.ram_mb);
    c.non_negative(p + "/bandwidth", t.bandwidth_mbps);
    if (t.network_types.empty()) c.add(p + "/networkTypes", "must list at least one protocol");
    for (std::size_t k = 0; k < t.network_types.size(); ++k) {
      if (!catalog.network.count(t.network_types[k])) {
        c.add(child(p + "/networkTypes", k),
              "unknown network protocol '" + t.network_types[k] + "'");
      }
    }
    if (t.battery) {
      c.positive(p + "/battery/max_battery_capacity", t.battery->max_capacity);
      c.non_negative(p + "/battery/processing_drainage_rate", t.battery->processing_drainage_rate);
      c.non_negative(p + "/battery/transfer_drainage_rate", t.battery->transfer_drainage_rate);
    }
    if (t.count < 1) c.add(p + "/numberofEntity", "must be at least 1");
  }

  std::set<std::int64_t> mel_ids;
  if (cfg.mel_graph) {
    for (const auto& m : *cfg.mel_graph) mel_ids.insert(m.id);
  }

  std::vector<MelId> entries;
  for (std::size_t i = 0; i < cfg.iot_devices.size(); ++i) {
    const auto& t = cfg.iot_devices[i];
    const auto p = child("/iOTDeviceEntities", i);
    check_mobility(c, p + "/mobilityEntity", t.mobility);
    any_movable = any_movable || t.mobility.movable;
    if (t.name.empty()) c.add(p + "/name", "must not be empty");
    c.positive(p + "/data_frequency", t.data_frequency);
    c.non_negative(p + "/dataGenerationTime", t.data_generation_time);
    c.non_negative(p + "/complexityOfDataPackage", t.data_size_mb);
    if (!catalog.network.count(t.network_type)) {
      c.add(p + "/networkModelEntity/networkType",
            "unknown network protocol '" + t.network_type + "'");
    }
    if (!catalog.iot.count(t.communication_protocol)) {
      c.add(p + "/networkModelEntity/communicationProtocol",
            "unknown IoT protocol '" + t.communication_protocol + "'");
    }
    c.positive(p + "/max_battery_capacity", t.max_battery_capacity);
    c.non_negative(p + "/battery_drainage_rate", t.battery_drainage_rate);
    c.non_negative(p + "/processingAbility", t.processing_ability);
    if (t.count < 1) c.add(p + "/numberofEntity", "must be at least 1");
    if (cfg.mel_graph) {
      if (!mel_ids.count(t.assignment_id)) {
        c.add(p + "/assignmentId", "no MEL with id " + std::to_string(t.assignment_id));
      } else {
        entries.push_back(MelId{t.assignment_id});
      }
    }
  }

  if (cfg.mel_graph) {
    std::vector<Mel> mels;
    for (std::size_t i = 0; i < cfg.mel_graph->size(); ++i) {
      const auto& m = (*cfg.mel_graph)[i];
      const auto p = child("/melGraph", i);
      if (m.hosts.empty()) c.add(p + "/hosts", "must name at least one edge device");
      for (std::size_t k = 0; k < m.hosts.size(); ++k) {
        if (!edge_names.count(m.hosts[k])) {
          c.add(child(p + "/hosts", k), "no edge device named '" + m.hosts[k] + "'");
        }
      }
      c.unit_interval(p + "/shrinkingFactor", m.shrink_factor);
      c.non_negative(p + "/instructionsPerMB", m.instructions_per_mb);
      c.non_negative(p + "/shrinkInstructionsPerMB", m.shrink_instructions_per_mb);
      Mel mel;
      mel.id = MelId{m.id};
      for (auto u : m.uplinks) mel.uplinks.push_back(MelId{u});
      for (auto d : m.downlinks) mel.downlinks.push_back(MelId{d});
      mels.push_back(std::move(mel));
    }
    if (auto error = validate_graph(mels, entries)) {
      std::string path = "/melGraph";
      for (std::size_t i = 0; i < cfg.mel_graph->size(); ++i) {
        if ((*cfg.mel_graph)[i].id == error->mels.front().value) {
          path = child("/melGraph", i);
          break;
        }
      }
      c.add(path, error->message);
    }
  }

  if (cfg.run.horizon) c.positive("/run/horizon", *cfg.run.horizon);
  c.positive("/run/trackingInterval", cfg.run.tracking_interval);
  c.non_negative("/run/relayDelay", cfg.run.relay_delay);
  if (!(cfg.run.generation_jitter >= 0.0 && cfg.run.generation_jitter < 1.0)) {
    c.add("/run/generationJitter", "must lie in [0, 1)");
  }
  if (any_movable && !cfg.run.horizon) {
    c.add("/run/horizon", "required when any device is movable");
  }
}

std::string line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return std::to_string(line) + ":" + std::to_string(column);
}

json mobility_json(const MobilityConfig& m) {
  json j = {{"movable", m.movable},
            {"location", {{"x", m.location.x}, {"y", m.location.y}, {"z", m.location.z}}},
            {"velocity", {{"x", m.velocity_x}, {"y", m.velocity_y}}}};
  if (m.interval) j["interval"] = *m.interval;
  return j;
}

}  // namespace

ScenarioError::ScenarioError(std::vector<ScenarioIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

ProtocolCatalog ScenarioConfig::effective_catalog() const {
  auto catalog = default_protocol_catalog();
  catalog.merge(protocol_overrides);
  return catalog;
}

ScenarioConfig parse_scenario(std::string_view text) {
  std::string owned(text);
  // The reference example is a bare `"iOTDeviceEntities": [...]` member.
  const auto first = owned.find_first_not_of(" \t\r\n");
  const bool fragment = first != std::string::npos && owned[first] == '"';
  if (fragment) owned = "{" + owned + "\n}";

  json doc;
  try {
    doc = json::parse(owned);
  } catch (const json::parse_error& e) {
    std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    if (fragment) byte = byte > 0 ? byte - 1 : 0;
    std::string message = e.what();
    if (auto pos = message.find("syntax error"); pos != std::string::npos) {
      message = message.substr(pos);
    }
    throw ScenarioError({{line_column(text, byte), message}});
  }

  std::vector<ScenarioIssue> issues;
  auto cfg = read_document(doc, issues);
  if (issues.empty()) collect_issues(cfg, issues);
  if (!issues.empty()) throw ScenarioError(std::move(issues));
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::system_error(errno ? errno : ENOENT, std::generic_category(),
                            "cannot read " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw std::system_error(EIO, std::generic_category(), "cannot read " + path);
  return parse_scenario(buffer.str());
}

std::string serialize_scenario(const ScenarioConfig& cfg) {
  json doc = json::object();
  json iot = json::array();
  for (const auto& t : cfg.iot_devices) {
    iot.push_back({{"mobilityEntity", mobility_json(t.mobility)},
                   {"assignmentId", t.assignment_id},
                   {"ioTClassName", t.class_name},
                   {"ioTType", t.iot_type},
                   {"name", t.name},
                   {"data_frequency", t.data_frequency},
                   {"dataGenerationTime", t.data_generation_time},
                   {"complexityOfDataPackage", t.data_size_mb},
                   {"networkModelEntity",
                    {{"networkType", t.network_type},
                     {"communicationProtocol", t.communication_protocol}}},
                   {"max_battery_capacity", t.max_battery_capacity},
                   {"battery_drainage_rate", t.battery_drainage_rate},
                   {"processingAbility", t.processing_ability},
                   {"numberofEntity", t.count}});
  }
  doc["iOTDeviceEntities"] = std::move(iot);

  json edges = json::array();
  for (const auto& t : cfg.edge_devices) {
    json e = {{"name", t.name},
              {"type", t.type},
              {"mobilityEntity", mobility_json(t.mobility)},
              {"signalRange", {{"x", t.range_x}, {"y", t.range_y}}},
              {"maxIoTDeviceCapacity", t.max_iot_capacity},
              {"mips", t.mips},
              {"ram", t.ram_mb},
              {"bandwidth", t.bandwidth_mbps},
              {"networkTypes", t.network_types},
              {"numberofEntity", t.count}};
    if (t.battery) {
      e["battery"] = {{"max_battery_capacity", t.battery->max_capacity},
                      {"processing_drainage_rate", t.battery->processing_drainage_rate},
                      {"transfer_drainage_rate", t.battery->transfer_drainage_rate}};
    }
    edges.push_back(std::move(e));
  }
  doc["edgeDeviceEntities"] = std::move(edges);

  if (cfg.mel_graph) {
    json mels = json::array();
    for (const auto& m : *cfg.mel_graph) {
      mels.push_back({{"id", m.id},
                      {"hosts", m.hosts},
                      {"shrinkingFactor", m.shrink_factor},
                      {"instructionsPerMB", m.instructions_per_mb},
                      {"shrinkInstructionsPerMB", m.shrink_instructions_per_mb},
                      {"upLink", m.uplinks},
                      {"downLink", m.downlinks}});
    }
    doc["melGraph"] = std::move(mels);
  }

  if (!cfg.protocol_overrides.network.empty() || !cfg.protocol_overrides.iot.empty()) {
    json cat = json::object();
    for (const auto& [name, s] : cfg.protocol_overrides.network) {
      cat["network"][name] = {{"dataRate", s.data_rate_mbps},
                              {"maxPacketSize", s.max_packet_size_bytes}};
    }
    for (const auto& [name, s] : cfg.protocol_overrides.iot) {
      cat["iot"][name] = {{"headerSize", s.header_size_bytes},
                          {"qosAckFactor", s.qos_ack_factor},
                          {"energyCoefficient", s.energy_coefficient}};
    }
    doc["protocolCatalog"] = std::move(cat);
  }

  json run = {{"seed", cfg.run.seed},
              {"trackingInterval", cfg.run.tracking_interval},
              {"relayDelay", cfg.run.relay_delay},
              {"generationJitter", cfg.run.generation_jitter}};
  if (cfg.run.horizon) run["horizon"] = *cfg.run.horizon;
  doc["run"] = std::move(run);
  return doc.dump(2) + "\n";
}

void validate_scenario(const ScenarioConfig& config) {
  std::vector<ScenarioIssue> issues;
  collect_issues(config, issues);
  if (!issues.empty()) throw ScenarioError(std::move(issues));
}

Population expand_entities(const ScenarioConfig& cfg) {
  const auto catalog = cfg.effective_catalog();
  Population pop;
  std::uint32_t next_id = kBrokerId.value + 1;

  std::map<std::string, std::vector<EntityId>> instances;
  for (const auto& t : cfg.edge_devices) {
    for (int k = 0; k < t.count; ++k) {
      EdgeDeviceState e;
      e.id = EntityId{next_id++};
      e.name = t.name + "_" + std::to_string(k);
      e.device_type = t.type;
      e.mobility = MobilityState{t.mobility.movable, t.mobility.location, t.mobility.velocity_x,
                                 t.mobility.velocity_y,
                                 t.mobility.interval.value_or(cfg.run.tracking_interval)};
      e.signal_range = SignalRange{t.range_x, t.range_y};
      e.max_iot_capacity = t.max_iot_capacity;
      e.mips = t.mips;
      e.ram_mb = t.ram_mb;
      e.bandwidth_mbps = t.bandwidth_mbps;
      e.network_protocols = t.network_types;
      if (t.battery) {
        e.battery = Battery{t.battery->max_capacity, t.battery->max_capacity,
                            t.battery->processing_drainage_rate,
                            t.battery->transfer_drainage_rate};
      }
      if (cfg.mel_graph) {
        for (const auto& m : *cfg.mel_graph) {
          if (std::find(m.hosts.begin(), m.hosts.end(), t.name) != m.hosts.end()) {
            e.hosted_mels.push_back(MelId{m.id});
          }
        }
        std::sort(e.hosted_mels.begin(), e.hosted_mels.end());
      }
      instances[t.name].push_back(e.id);
      pop.edge_devices.push_back(std::move(e));
    }
  }

  std::vector<MelId> entries;
  for (const auto& t : cfg.iot_devices) {
    for (int k = 0; k < t.count; ++k) {
      IoTDeviceState d;
      d.id = EntityId{next_id++};
      d.name = t.name + "_" + std::to_string(k);
      d.iot_type = t.iot_type;
      d.mobility = MobilityState{t.mobility.movable, t.mobility.location, t.mobility.velocity_x,
                                 t.mobility.velocity_y,
                                 t.mobility.interval.value_or(cfg.run.tracking_interval)};
      d.battery = Battery{t.max_battery_capacity, t.max_battery_capacity, 0.0,
                          t.battery_drainage_rate};
      d.data_frequency = t.data_frequency;
      d.data_generation_time = t.data_generation_time;
      d.data_size_mb = t.data_size_mb;
      d.entry_mel = MelId{t.assignment_id};
      d.network_protocol = catalog.network_protocol(t.network_type);
      d.iot_protocol = catalog.iot_protocol(t.communication_protocol);
      pop.iot_devices.push_back(std::move(d));
    }
    if (cfg.mel_graph) entries.push_back(MelId{t.assignment_id});
  }

  std::vector<Mel> mels;
  if (cfg.mel_graph) {
    for (const auto& m : *cfg.mel_graph) {
      Mel mel;
      mel.id = MelId{m.id};
      for (const auto& host : m.hosts) {
        auto it = instances.find(host);
        if (it != instances.end()) {
          mel.host_edges.insert(mel.host_edges.end(), it->second.begin(), it->second.end());
        }
      }
      mel.shrink_factor = m.shrink_factor;
      mel.instructions_per_mb = m.instructions_per_mb;
      mel.shrink_instructions_per_mb = m.shrink_instructions_per_mb;
      for (auto u : m.uplinks) mel.uplinks.push_back(MelId{u});
      for (auto d : m.downlinks) mel.downlinks.push_back(MelId{d});
      mels.push_back(std::move(mel));
    }
  }
  pop.graph = ApplicationGraph(std::move(mels), std::move(entries));
  return pop;
}

}  // namespace edgesim
