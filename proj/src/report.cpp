#include "edgesim/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <system_error>

namespace edgesim {

namespace fs = std::filesystem;

namespace {

constexpr double kSecondsPerHour = 3600.0;

std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : std::string{}; }

std::string cell(std::uint64_t v) { return std::to_string(v); }

struct BatteryHours {
  std::optional<double> mean;
  std::optional<double> min;
};

BatteryHours battery_hours(const MetricsReport& r, bool edges) {
  double sum = 0.0;
  std::size_t n = 0;
  BatteryHours out;
  for (const auto& d : r.devices) {
    if (d.is_edge != edges || !d.depleted_at) continue;
    const double hours = *d.depleted_at / kSecondsPerHour;
    sum += hours;
    ++n;
    out.min = out.min ? std::min(*out.min, hours) : hours;
  }
  if (n > 0) out.mean = sum / static_cast<double>(n);
  return out;
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value,
                                 std::chars_format::general, 9);
  if (ec != std::errc{}) throw std::runtime_error("format_number: conversion failed");
  return std::string(buffer, end);
}

std::string summary_csv(const MetricsReport& r) {
  std::string out =
      "generated,delivered,discarded,undelivered,in_flight,connections,connection_failures,"
      "handoffs,dropped_bindings,relays,events,first_out_of_range,end_time,termination,"
      "mean_latency,mean_execution_time,mean_edge_energy,mean_edge_power\n";
  out += cell(r.generated) + ',' + cell(r.delivered) + ',' + cell(r.discarded) + ',' +
         cell(r.undelivered) + ',' + cell(r.in_flight) + ',' + cell(r.connections) + ',' +
         cell(r.connection_failures) + ',' + cell(r.handoffs) + ',' + cell(r.dropped_bindings) +
         ',' + cell(r.relays) + ',' + cell(r.events) + ',' + cell(r.first_out_of_range) + ',' +
         format_number(r.end_time) + ',' + std::string(to_string(r.termination)) + ',' +
         format_number(r.mean_latency()) + ',' + format_number(r.mean_execution_time()) + ',' +
         format_number(r.mean_edge_energy()) + ',' + format_number(r.mean_edge_power()) + '\n';
  return out;
}

std::string latencies_csv(const MetricsReport& r) {
  std::string out =
      "lineage,result_id,source_iot,created_at,delivered_at,latency,execution_time,relayed\n";
  for (const auto& x : r.responses) {
    out += cell(x.lineage) + ',' + cell(x.result_id) + ',' + x.source_iot + ',' +
           format_number(x.created_at) + ',' + format_number(x.delivered_at) + ',' +
           format_number(x.latency) + ',' + format_number(x.execution_time) + ',' +
           (x.relayed ? "1" : "0") + '\n';
  }
  return out;
}

std::string devices_csv(const MetricsReport& r) {
  std::string out =
      "name,kind,has_battery,max_capacity,final_level,energy_consumed,depleted_at_s,"
      "battery_hours,edgelets,active_until\n";
  for (const auto& d : r.devices) {
    std::optional<double> hours;
    if (d.depleted_at) hours = *d.depleted_at / kSecondsPerHour;
    out += d.name + ',' + (d.is_edge ? "edge" : "iot") + ',' + (d.has_battery ? "1" : "0") + ',' +
           format_number(d.max_capacity) + ',' + format_number(d.final_level) + ',' +
           format_number(d.energy_consumed) + ',' + cell(d.depleted_at) + ',' + cell(hours) +
           ',' + cell(d.edgelets) + ',' + format_number(d.active_until) + '\n';
  }
  return out;
}

std::string aggregate_csv(const std::vector<SweepPoint>& points) {
  std::string out =
      "value,generated,delivered,discarded,undelivered,in_flight,handoffs,relays,responses,"
      "mean_latency,mean_execution_time,mean_edge_energy,mean_edge_power,"
      "mean_iot_battery_hours,min_iot_battery_hours,mean_edge_battery_hours,events,end_time\n";
  for (const auto& p : points) {
    const auto& r = p.report;
    const auto iot = battery_hours(r, false);
    const auto edge = battery_hours(r, true);
    out += format_number(p.value) + ',' + cell(r.generated) + ',' + cell(r.delivered) + ',' +
           cell(r.discarded) + ',' + cell(r.undelivered) + ',' + cell(r.in_flight) + ',' +
           cell(r.handoffs) + ',' + cell(r.relays) + ',' +
           cell(static_cast<std::uint64_t>(r.responses.size())) + ',' +
           format_number(r.mean_latency()) + ',' + format_number(r.mean_execution_time()) + ',' +
           format_number(r.mean_edge_energy()) + ',' + format_number(r.mean_edge_power()) + ',' +
           cell(iot.mean) + ',' + cell(iot.min) + ',' + cell(edge.mean) + ',' + cell(r.events) +
           ',' + format_number(r.end_time) + '\n';
  }
  return out;
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw fs::filesystem_error("cannot open for writing", path,
                               std::make_error_code(std::errc::permission_denied));
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) {
    throw fs::filesystem_error("write failed", path, std::make_error_code(std::errc::io_error));
  }
}

void write_report(const MetricsReport& report, const fs::path& dir) {
  fs::create_directories(dir);
  write_text(dir / "summary.csv", summary_csv(report));
  write_text(dir / "latencies.csv", latencies_csv(report));
  write_text(dir / "devices.csv", devices_csv(report));
}

}  // namespace edgesim
