#pragma once

#include <any>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace edgesim {

/// Simulated time in seconds.
using SimTime = double;

inline constexpr SimTime kForever = std::numeric_limits<SimTime>::infinity();

/// Opaque identifier of a simulated entity (datacenter, broker, device).
struct EntityId {
  std::uint32_t value = 0;

  friend constexpr auto operator<=>(EntityId, EntityId) = default;
};

enum class EventKind : std::uint8_t {
  ConnectAck,
  GenerateData,
  EdgeLetArrival,
  ProcessingComplete,
  LocationUpdate,
  BatteryUpdate,
  RelayDelivery,
  Terminate,
};

std::string_view to_string(EventKind kind);

struct Event {
  SimTime fire_at = 0.0;
  std::uint64_t sequence = 0;  // assigned by the kernel
  EntityId target;
  EventKind kind = EventKind::Terminate;
  std::any payload;
};

/// Thrown when an event would be scheduled before the current clock.
class SchedulingError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class Entity {
 public:
  virtual ~Entity() = default;
  virtual void process_event(const Event& event) = 0;
};

/**
 * Single-threaded discrete-event engine.
 *
 * Events fire in (fire_at, sequence) order; equal timestamps are served in
 * the order they were scheduled. The kernel does not own the entities it
 * dispatches to.
 */
class Kernel {
 public:
  using TraceHook = std::function<void(const Event&)>;

  void register_entity(EntityId id, Entity& entity);

  /// Enqueues the event and returns the sequence number it was given.
  std::uint64_t schedule(Event event);

  /// Convenience overload: fire `delay` seconds from now.
  std::uint64_t schedule_in(SimTime delay, EntityId target, EventKind kind,
                            std::any payload = {});

  /**
   * Dispatches events until the queue is empty, stop() is called, or the next
   * event lies beyond `until`. Returns the clock, which is the time of the
   * last dispatched event (0 if none was dispatched).
   */
  SimTime run(SimTime until = kForever);

  /// Requests termination after the event currently being dispatched.
  void stop() { stopped_ = true; }

  [[nodiscard]] SimTime now() const { return clock_; }
  [[nodiscard]] bool stopped() const { return stopped_; }
  [[nodiscard]] std::size_t pending() const { return heap_.size(); }
  [[nodiscard]] std::uint64_t dispatched() const { return dispatched_; }

  /// Events still queued, in dispatch order. Used to report undelivered work.
  [[nodiscard]] std::vector<Event> undelivered() const;

  void set_trace(TraceHook hook) { trace_ = std::move(hook); }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.sequence > b.sequence;
    }
  };

  std::vector<Event> heap_;  // binary heap ordered by Later
  std::unordered_map<std::uint32_t, Entity*> entities_;
  SimTime clock_ = 0.0;
  std::uint64_t next_sequence_ = 0;
  std::uint64_t dispatched_ = 0;
  bool stopped_ = false;
  TraceHook trace_;
};

}  // namespace edgesim
