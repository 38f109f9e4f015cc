#include "edgesim/metrics.hpp"

namespace edgesim {

std::string_view to_string(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::QueueExhausted: return "queue-exhausted";
    case TerminationReason::Horizon: return "horizon";
    case TerminationReason::BatteriesDepleted: return "batteries-depleted";
    case TerminationReason::EdgesDisabled: return "edges-disabled";
  }
  return "unknown";
}

double MetricsReport::mean_latency() const {
  if (responses.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : responses) sum += r.latency;
  return sum / static_cast<double>(responses.size());
}

double MetricsReport::mean_execution_time() const {
  if (responses.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : responses) sum += r.execution_time;
  return sum / static_cast<double>(responses.size());
}

double MetricsReport::mean_edge_energy() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& d : devices) {
    if (!d.is_edge || !d.has_battery) continue;
    sum += d.energy_consumed;
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

double MetricsReport::mean_edge_power() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& d : devices) {
    if (!d.is_edge || !d.has_battery) continue;
    if (d.active_until > 0.0) sum += d.energy_consumed / d.active_until;
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

const DeviceMetrics* MetricsReport::device(const std::string& name) const {
  for (const auto& d : devices) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

}  // namespace edgesim
