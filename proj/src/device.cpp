#include "edgesim/device.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace edgesim {

namespace {
constexpr double kBytesPerMb = 1e6;
constexpr double kBitsPerMbit = 1e6;
}  // namespace

bool EdgeDeviceState::supports(const std::string& network_protocol) const {
  return std::find(network_protocols.begin(), network_protocols.end(), network_protocol) !=
         network_protocols.end();
}

double battery_consumption(double data_mb, double shrink_factor, double drain_proc,
                           double drain_comm, double protocol_energy_coeff) {
  if (data_mb < 0.0 || drain_proc < 0.0 || drain_comm < 0.0 || protocol_energy_coeff < 0.0) {
    throw std::invalid_argument("battery_consumption: inputs must be non-negative");
  }
  if (shrink_factor < 0.0 || shrink_factor > 1.0) {
    throw std::invalid_argument("battery_consumption: shrink factor must lie in [0, 1]");
  }
  return data_mb * ((1.0 - shrink_factor) * drain_proc +
                    shrink_factor * drain_comm * protocol_energy_coeff);
}

DrainResult drain(const Battery& battery, double amount) {
  if (amount < 0.0) throw std::invalid_argument("drain: amount must be non-negative");
  DrainResult out{battery, false};
  out.battery.current_level = std::max(0.0, battery.current_level - amount);
  out.depleted = out.battery.current_level == 0.0;
  return out;
}

double transmission_time(double data_mb, const NetworkProtocolSpec& net,
                         const IoTProtocolSpec& iot) {
  if (data_mb < 0.0) throw std::invalid_argument("transmission_time: negative data size");
  if (!(net.data_rate_mbps > 0.0)) {
    throw std::invalid_argument("transmission_time: data rate of '" + net.name +
                                "' must be positive");
  }
  if (!(net.max_packet_size_bytes > 0.0)) {
    throw std::invalid_argument("transmission_time: max packet size of '" + net.name +
                                "' must be positive");
  }
  const double payload_bytes = data_mb * kBytesPerMb;
  const double data_packets = std::ceil(payload_bytes / net.max_packet_size_bytes);
  // Every acknowledged copy resends the payload together with one header per packet.
  const double total_bytes =
      iot.qos_ack_factor * (payload_bytes + data_packets * iot.header_size_bytes);
  return total_bytes * 8.0 / (net.data_rate_mbps * kBitsPerMbit);
}

LocationUpdate update_location(const MobilityState& mobility, double interval) {
  if (!mobility.movable) throw std::logic_error("update_location on a static device");
  if (!(interval > 0.0)) throw std::invalid_argument("update_location: interval must be positive");
  LocationUpdate out{mobility, {mobility.velocity_x * interval, mobility.velocity_y * interval}};
  out.state.location.x += out.moved.dx;
  out.state.location.y += out.moved.dy;
  return out;
}

bool is_out_of_range(const Location& iot_location, const EdgeDeviceState& edge) {
  const auto& centre = edge.mobility.location;
  return std::abs(iot_location.x - centre.x) > edge.signal_range.range_x ||
         std::abs(iot_location.y - centre.y) > edge.signal_range.range_y;
}

double planar_distance(const Location& a, const Location& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

std::optional<Generation> generate_edgelet(const IoTDeviceState& device, SimTime now,
                                           std::uint64_t edgelet_id) {
  if (!device.enabled) return std::nullopt;
  if (!(device.data_frequency > 0.0)) {
    throw std::invalid_argument("generate_edgelet: data frequency must be positive");
  }
  Generation g;
  g.edgelet.id = edgelet_id;
  g.edgelet.lineage = edgelet_id;
  g.edgelet.payload_mb = device.data_size_mb;
  g.edgelet.source_iot = device.id;
  g.edgelet.destination_mel = device.entry_mel;
  g.edgelet.created_at = now;
  g.next_at = now + 1.0 / device.data_frequency;
  return g;
}

}  // namespace edgesim
