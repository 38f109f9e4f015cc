#include "edgesim/protocols.hpp"

#include <stdexcept>

namespace edgesim {

const NetworkProtocolSpec& ProtocolCatalog::network_protocol(const std::string& name) const {
  auto it = network.find(name);
  if (it == network.end()) throw std::out_of_range("unknown network protocol '" + name + "'");
  return it->second;
}

const IoTProtocolSpec& ProtocolCatalog::iot_protocol(const std::string& name) const {
  auto it = iot.find(name);
  if (it == iot.end()) throw std::out_of_range("unknown IoT protocol '" + name + "'");
  return it->second;
}

void ProtocolCatalog::merge(const ProtocolCatalog& overrides) {
  for (const auto& [name, spec] : overrides.network) network[name] = spec;
  for (const auto& [name, spec] : overrides.iot) iot[name] = spec;
}

ProtocolCatalog default_protocol_catalog() {
  ProtocolCatalog c;
  auto net = [&c](const char* name, double mbps, double mtu) {
    c.network[name] = NetworkProtocolSpec{name, mbps, mtu};
  };
  net("wifi", 200.0, 2304.0);
  net("4g-lte", 150.0, 1500.0);
  net("bluetooth", 0.27, 251.0);
  net("zigbee", 0.25, 127.0);
  net("lora", 0.05, 222.0);
  net("sigfox", 0.001, 12.0);
  net("nfc", 0.042, 255.0);

  auto msg = [&c](const char* name, double header, double ack, double coeff) {
    c.iot[name] = IoTProtocolSpec{name, header, ack, coeff};
  };
  msg("coap", 4.0, 1.0, 1.0);
  msg("mqtt", 2.0, 1.0, 1.1);
  msg("amqp", 8.0, 1.0, 1.2);
  msg("xmpp", 0.0, 1.0, 1.25);
  return c;
}

}  // namespace edgesim
