#include "edgesim/presets.hpp"

namespace edgesim {

namespace {

// Raspberry Pi class edge device. Battery capacity and drain rates are the
// healthcare case study values; RAM, bandwidth and capacity are generous so
// that only the CPU and the battery constrain a run.
EdgeTemplate raspberry_pi(const std::string& name, double x, const std::string& network) {
  EdgeTemplate e;
  e.name = name;
  e.type = "raspberry-pi";
  e.mobility.location = Location{x, 0.0, 0.0};
  e.range_x = 100.0;
  e.range_y = 100.0;
  e.max_iot_capacity = 10000;
  e.mips = 10000.0;
  e.ram_mb = 10000.0;
  e.bandwidth_mbps = 10000.0;
  e.network_types = {network};
  e.battery = BatteryConfig{20000.0, 0.1, 0.6};
  return e;
}

IoTTemplate sensor(const std::string& name, const std::string& type, const std::string& network,
                   const std::string& protocol) {
  IoTTemplate t;
  t.assignment_id = 1;
  t.class_name = "org.edge.core.iot." + name;
  t.iot_type = type;
  t.name = name;
  t.data_frequency = 1.0;
  t.data_generation_time = 1.0;
  t.data_size_mb = 1.0;
  t.network_type = network;
  t.communication_protocol = protocol;
  t.processing_ability = 1.0;
  return t;
}

}  // namespace

ScenarioConfig case1_preset(double shrink) {
  ScenarioConfig cfg;
  auto s = sensor("HealthSensor", "healthcare", "bluetooth", "coap");
  s.max_battery_capacity = 300.0;
  // Calibration: a sensor drain this low keeps the sensor alive for the whole
  // run, so the edge battery is what the shrinking factor shows up in.
  s.battery_drainage_rate = 0.001;
  cfg.iot_devices.push_back(s);

  cfg.edge_devices.push_back(raspberry_pi("E1", 100.0, "bluetooth"));
  auto e2 = raspberry_pi("E2", 200.0, "bluetooth");
  e2.battery.reset();  // mains powered
  cfg.edge_devices.push_back(e2);

  // Instruction coefficients are calibration values: 1 MB takes 0.1 s on E1.
  MelConfig mel1{1, {"E1"}, shrink, 1000.0, 0.0, {}, {2}};
  MelConfig mel2{2, {"E2"}, 0.1, 2000.0, 0.0, {1}, {}};
  cfg.mel_graph = std::vector<MelConfig>{mel1, mel2};
  cfg.run.horizon = 150000.0;
  return cfg;
}

ScenarioConfig case2_preset(int devices, const std::string& protocol) {
  ScenarioConfig cfg;
  auto s = sensor("EnvSensor", "environmental", "bluetooth", protocol);
  s.max_battery_capacity = 300.0;
  s.battery_drainage_rate = 1.0;
  s.count = devices;
  cfg.iot_devices.push_back(s);

  cfg.edge_devices.push_back(raspberry_pi("E1", 100.0, "bluetooth"));

  // 400 instructions per MB: 0.04 s per EdgeLet, so the edge CPU saturates
  // at 25 sensors generating once per second.
  cfg.mel_graph = std::vector<MelConfig>{MelConfig{1, {"E1"}, 0.5, 400.0, 0.0, {}, {}}};
  return cfg;
}

ScenarioConfig case3_preset(int cars) {
  ScenarioConfig cfg;
  auto car = sensor("CarSensor", "vehicular", "wifi", "xmpp");
  car.mobility.movable = true;
  car.mobility.velocity_x = 0.5;
  // Calibration: 0.1 MB readings and a 70 unit battery keep a car reporting
  // until well after it has left both roadside units.
  car.data_size_mb = 0.1;
  car.max_battery_capacity = 70.0;
  car.battery_drainage_rate = 1.0;
  car.count = cars;
  cfg.iot_devices.push_back(car);

  for (auto [name, x] : {std::pair{"RSU1", 0.0}, std::pair{"RSU2", 50.0}}) {
    EdgeTemplate rsu = raspberry_pi(name, x, "wifi");
    rsu.type = "roadside-unit";
    rsu.range_x = 50.0;
    rsu.range_y = 50.0;
    cfg.edge_devices.push_back(rsu);
  }

  cfg.mel_graph = std::vector<MelConfig>{MelConfig{1, {"RSU1", "RSU2"}, 0.5, 2000.0, 0.0, {}, {}}};
  cfg.run.horizon = 1000.0;
  cfg.run.tracking_interval = 1.0;
  return cfg;
}

std::optional<ScenarioConfig> preset_by_name(std::string_view name, const PresetOptions& o) {
  if (name == "case1") return case1_preset(o.shrink.value_or(0.5));
  if (name == "case2") return case2_preset(o.devices.value_or(1), o.protocol.value_or("coap"));
  if (name == "case3") return case3_preset(o.devices.value_or(1));
  return std::nullopt;
}

}  // namespace edgesim
