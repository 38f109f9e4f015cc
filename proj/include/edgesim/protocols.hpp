#pragma once

#include <map>
#include <string>

namespace edgesim {

/// Link-layer model: throughput and the largest payload a single packet carries.
struct NetworkProtocolSpec {
  std::string name;
  double data_rate_mbps = 0.0;
  double max_packet_size_bytes = 0.0;

  friend bool operator==(const NetworkProtocolSpec&, const NetworkProtocolSpec&) = default;
};

/// Messaging-layer model. The ack factor multiplies the packet count, the
/// energy coefficient multiplies the transfer drain rate.
struct IoTProtocolSpec {
  std::string name;
  double header_size_bytes = 0.0;
  double qos_ack_factor = 1.0;
  double energy_coefficient = 1.0;

  friend bool operator==(const IoTProtocolSpec&, const IoTProtocolSpec&) = default;
};

struct ProtocolCatalog {
  std::map<std::string, NetworkProtocolSpec> network;
  std::map<std::string, IoTProtocolSpec> iot;

  [[nodiscard]] const NetworkProtocolSpec& network_protocol(const std::string& name) const;
  [[nodiscard]] const IoTProtocolSpec& iot_protocol(const std::string& name) const;

  /// Entries of `overrides` replace same-named entries here.
  void merge(const ProtocolCatalog& overrides);

  friend bool operator==(const ProtocolCatalog&, const ProtocolCatalog&) = default;
};

/**
 * Built-in protocol parameters.
 *
 * Network rates: wifi 200 Mbps and 4g-lte 150 Mbps; the low-power links use
 * the approximate rates of the usual IoT protocol comparison tables
 * (bluetooth 0.27, zigbee 0.25, lora 0.05, sigfox 0.001, nfc 0.042 Mbps).
 * Max packet sizes are typical link MTUs.
 *
 * Messaging headers: coap 4 B, mqtt 2 B, amqp 8 B. XMPP has no fixed header
 * and defaults to 0 B. Energy coefficients and ack factors are calibration
 * values (coap 1.0, mqtt 1.1, amqp 1.2, xmpp 1.25), chosen so that a
 * CoAP device outlives an otherwise identical XMPP device by 25%.
 */
ProtocolCatalog default_protocol_catalog();

}  // namespace edgesim
