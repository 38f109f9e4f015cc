// Shared helpers for the test binaries: random scenario generation and
// independent oracles that recompute results from raw traces.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "edgesim/device.hpp"
#include "edgesim/orchestration.hpp"
#include "edgesim/scenario.hpp"

namespace edgesim::testing {

inline bool close_rel(double a, double b, double tol) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) <= tol * scale;
}

struct GeneratorLimits {
  int max_edge_templates = 3;
  int max_edge_count = 2;
  int max_iot_templates = 2;
  int max_iot_count = 3;
  int max_mels = 4;
  double min_horizon = 5.0;
  double max_horizon = 30.0;
  double max_data_mb = 0.5;
};

/// A random but valid scenario. Small batteries make depletion, rerouting
/// and discards common.
inline ScenarioConfig random_scenario(std::mt19937_64& rng, const GeneratorLimits& lim = {}) {
  auto uniform = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  auto pick = [&rng](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto coin = [&rng](double p) { return std::bernoulli_distribution(p)(rng); };
  const std::vector<std::string> networks{"wifi", "bluetooth", "zigbee"};
  const std::vector<std::string> protocols{"coap", "mqtt", "amqp", "xmpp"};

  ScenarioConfig cfg;
  const int edge_templates = pick(1, lim.max_edge_templates);
  for (int i = 0; i < edge_templates; ++i) {
    EdgeTemplate e;
    e.name = "E" + std::to_string(i);
    e.type = "edge";
    e.mobility.location = {uniform(0.0, 100.0), uniform(0.0, 20.0), 0.0};
    if (coin(0.2)) {
      e.mobility.movable = true;
      e.mobility.velocity_x = uniform(-2.0, 2.0);
    }
    e.range_x = uniform(20.0, 120.0);
    e.range_y = uniform(20.0, 120.0);
    e.max_iot_capacity = pick(1, 5);
    e.mips = uniform(500.0, 5000.0);
    e.ram_mb = 1024.0;
    e.bandwidth_mbps = 100.0;
    for (const auto& n : networks) {
      if (coin(0.6)) e.network_types.push_back(n);
    }
    if (e.network_types.empty()) e.network_types.push_back(networks[pick(0, 2)]);
    if (coin(0.7)) e.battery = BatteryConfig{uniform(0.5, 10.0), uniform(0.0, 1.0), uniform(0.0, 1.0)};
    e.count = pick(1, lim.max_edge_count);
    cfg.edge_devices.push_back(e);
  }

  std::vector<MelConfig> mels;
  const int mel_count = pick(1, lim.max_mels);
  for (int i = 0; i < mel_count; ++i) {
    MelConfig m;
    m.id = i + 1;
    for (const auto& e : cfg.edge_devices) {
      if (coin(0.5)) m.hosts.push_back(e.name);
    }
    if (m.hosts.empty()) m.hosts.push_back(cfg.edge_devices[static_cast<std::size_t>(pick(0, edge_templates - 1))].name);
    m.shrink_factor = uniform(0.0, 1.0);
    m.instructions_per_mb = uniform(100.0, 5000.0);
    m.shrink_instructions_per_mb = coin(0.5) ? uniform(0.0, 5000.0) : 0.0;
    if (i > 0) {
      // At least one upstream MEL keeps everything reachable from MEL 1.
      m.uplinks.push_back(pick(1, i));
      for (int j = 1; j <= i; ++j) {
        if (coin(0.2)) m.uplinks.push_back(j);
      }
      std::sort(m.uplinks.begin(), m.uplinks.end());
      m.uplinks.erase(std::unique(m.uplinks.begin(), m.uplinks.end()), m.uplinks.end());
    }
    mels.push_back(m);
  }
  cfg.mel_graph = mels;

  const int iot_templates = pick(1, lim.max_iot_templates);
  for (int i = 0; i < iot_templates; ++i) {
    IoTTemplate t;
    t.assignment_id = 1;
    t.name = "S" + std::to_string(i);
    t.iot_type = "sensor";
    t.data_frequency = uniform(0.5, 2.0);
    t.data_size_mb = uniform(0.01 * lim.max_data_mb / 0.5, lim.max_data_mb);
    t.network_type = networks[static_cast<std::size_t>(pick(0, 2))];
    t.communication_protocol = protocols[static_cast<std::size_t>(pick(0, 3))];
    t.max_battery_capacity = uniform(0.5, 10.0);
    t.battery_drainage_rate = uniform(0.1, 3.0);
    t.mobility.location = {uniform(0.0, 100.0), uniform(0.0, 20.0), 0.0};
    if (coin(0.5)) {
      t.mobility.movable = true;
      t.mobility.velocity_x = uniform(-5.0, 5.0);
      t.mobility.velocity_y = uniform(-1.0, 1.0);
    }
    t.count = pick(1, lim.max_iot_count);
    cfg.iot_devices.push_back(t);
  }

  cfg.run.horizon = uniform(lim.min_horizon, lim.max_horizon);
  cfg.run.seed = rng();
  cfg.run.tracking_interval = uniform(0.5, 2.0);
  cfg.run.relay_delay = coin(0.3) ? uniform(0.0, 0.5) : 0.0;
  cfg.run.generation_jitter = coin(0.5) ? uniform(0.0, 0.9) : 0.0;
  return cfg;
}

inline int device_count(const ScenarioConfig& cfg) {
  int n = 0;
  for (const auto& t : cfg.iot_devices) n += t.count;
  for (const auto& t : cfg.edge_devices) n += t.count;
  return n;
}

struct ReplayCounts {
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  std::uint64_t discarded = 0;
  std::uint64_t undelivered = 0;
  std::uint64_t in_flight = 0;
  std::uint64_t responses = 0;
};

/// Rebuilds per-lineage outcomes from the lifecycle trace alone. An EdgeLet
/// is live from its Generated/Forwarded record until it is processed
/// (appears as a parent) or reaches a terminal record.
inline ReplayCounts replay_trace(const std::vector<TraceRecord>& trace) {
  struct Lineage {
    std::set<std::uint64_t> live;
    bool discarded = false;
    bool undelivered = false;
  };
  std::map<std::uint64_t, Lineage> lineages;
  ReplayCounts c;
  for (const auto& r : trace) {
    switch (r.kind) {
      case TraceKind::Generated:
        ++c.generated;
        lineages[r.lineage].live.insert(r.edgelet);
        break;
      case TraceKind::Forwarded:
        lineages[r.lineage].live.erase(r.parent);
        lineages[r.lineage].live.insert(r.edgelet);
        break;
      case TraceKind::Discarded:
        lineages[r.lineage].live.erase(r.edgelet);
        lineages[r.lineage].discarded = true;
        break;
      case TraceKind::Undelivered:
        lineages[r.lineage].live.erase(r.edgelet);
        lineages[r.lineage].undelivered = true;
        break;
      case TraceKind::Delivered:
        ++c.responses;
        lineages[r.lineage].live.erase(r.edgelet);
        break;
      default:
        break;
    }
  }
  for (const auto& [id, l] : lineages) {
    if (!l.live.empty()) {
      ++c.in_flight;
    } else if (l.discarded) {
      ++c.discarded;
    } else if (l.undelivered) {
      ++c.undelivered;
    } else {
      ++c.delivered;
    }
  }
  return c;
}

struct EnergyAudit {
  bool ok = true;
  std::string detail;
};

/// Checks the energy ledger of a finished run against freshly computed
/// drain amounts and the devices' final levels.
inline EnergyAudit audit_energy(const ScenarioConfig& cfg, const MetricsReport& report,
                                double tol) {
  EnergyAudit audit;
  auto fail = [&audit](std::string why) {
    if (audit.ok) audit.detail = std::move(why);
    audit.ok = false;
  };
  const auto pop = expand_entities(cfg);
  std::map<std::string, double> applied;
  std::map<std::string, double> level;
  std::map<std::string, const EdgeDeviceState*> edges;
  std::map<std::string, const IoTDeviceState*> iots;
  for (const auto& e : pop.edge_devices) {
    edges[e.name] = &e;
    if (e.battery) level[e.name] = e.battery->max_capacity;
  }
  for (const auto& d : pop.iot_devices) {
    iots[d.name] = &d;
    level[d.name] = d.battery.max_capacity;
  }

  for (const auto& r : report.energy) {
    double expected = 0.0;
    if (auto it = edges.find(r.device); it != edges.end()) {
      if (!it->second->battery) {
        fail("mains-powered edge " + r.device + " was drained");
        continue;
      }
      const auto& b = *it->second->battery;
      expected = r.data_mb * ((1.0 - r.shrink_factor) * b.drain_rate_processing +
                              r.shrink_factor * b.drain_rate_transfer);
    } else {
      const auto* d = iots.at(r.device);
      expected = r.data_mb * d->battery.drain_rate_transfer * d->iot_protocol.energy_coefficient;
    }
    if (!close_rel(r.requested, expected, tol) && !(r.requested == 0.0 && expected == 0.0)) {
      fail("drain request for " + r.device + " differs from the consumption model");
    }
    const double before = level[r.device];
    const double after = std::max(0.0, before - r.requested);
    if (r.applied < 0.0 || r.applied > r.requested * (1.0 + tol)) {
      fail("applied drain on " + r.device + " outside [0, requested]");
    }
    if (!close_rel(r.applied, before - after, tol) && std::abs(r.applied - (before - after)) > 1e-300) {
      fail("applied drain on " + r.device + " does not match the clamp");
    }
    level[r.device] = before - r.applied;
    if (level[r.device] < 0.0) fail("battery of " + r.device + " went negative");
    applied[r.device] += r.applied;
  }

  for (const auto& d : report.devices) {
    if (!d.has_battery) {
      if (d.energy_consumed != 0.0) fail(d.name + " has no battery but consumed energy");
      continue;
    }
    if (d.final_level < 0.0 || d.final_level > d.max_capacity) {
      fail(d.name + " final level outside [0, capacity]");
    }
    const double sum = applied[d.name];
    if (!close_rel(sum, d.energy_consumed, tol) && !(sum == 0.0 && d.energy_consumed == 0.0)) {
      fail(d.name + ": sum of drains differs from total consumed");
    }
  }
  return audit;
}

}  // namespace edgesim::testing
