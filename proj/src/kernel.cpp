#include "edgesim/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace edgesim {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::ConnectAck: return "connect-ack";
    case EventKind::GenerateData: return "generate-data";
    case EventKind::EdgeLetArrival: return "edgelet-arrival";
    case EventKind::ProcessingComplete: return "processing-complete";
    case EventKind::LocationUpdate: return "location-update";
    case EventKind::BatteryUpdate: return "battery-update";
    case EventKind::RelayDelivery: return "relay-delivery";
    case EventKind::Terminate: return "terminate";
  }
  return "unknown";
}

void Kernel::register_entity(EntityId id, Entity& entity) {
  if (!entities_.emplace(id.value, &entity).second) {
    throw std::invalid_argument("entity id " + std::to_string(id.value) +
                                " registered twice");
  }
}

std::uint64_t Kernel::schedule(Event event) {
  if (std::isnan(event.fire_at) || event.fire_at < clock_) {
    throw SchedulingError("cannot schedule " + std::string(to_string(event.kind)) +
                          " at t=" + std::to_string(event.fire_at) +
                          " before clock t=" + std::to_string(clock_));
  }
  event.sequence = next_sequence_++;
  const auto seq = event.sequence;
  heap_.push_back(std::move(event));
  std::push_heap(heap_.begin(), heap_.end(), Later{});
  return seq;
}

std::uint64_t Kernel::schedule_in(SimTime delay, EntityId target, EventKind kind,
                                  std::any payload) {
  return schedule(Event{clock_ + delay, 0, target, kind, std::move(payload)});
}

SimTime Kernel::run(SimTime until) {
  stopped_ = false;
  while (!heap_.empty() && !stopped_) {
    if (heap_.front().fire_at > until) break;
    std::pop_heap(heap_.begin(), heap_.end(), Later{});
    Event event = std::move(heap_.back());
    heap_.pop_back();
    clock_ = event.fire_at;
    ++dispatched_;
    if (trace_) trace_(event);
    auto it = entities_.find(event.target.value);
    if (it == entities_.end()) {
      throw std::logic_error("event " + std::string(to_string(event.kind)) +
                             " targets unregistered entity " +
                             std::to_string(event.target.value));
    }
    it->second->process_event(event);
  }
  return clock_;
}

std::vector<Event> Kernel::undelivered() const {
  std::vector<Event> out = heap_;
  std::sort(out.begin(), out.end(),
            [](const Event& a, const Event& b) { return Later{}(b, a); });
  return out;
}

}  // namespace edgesim
