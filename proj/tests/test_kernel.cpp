#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <tuple>

#include "edgesim/kernel.hpp"

using namespace edgesim;

namespace {

struct Recorder : Entity {
  std::vector<std::pair<SimTime, int>> seen;  // (clock, tag)
  Kernel* kernel = nullptr;
  std::function<void(const Event&)> on_event;

  void process_event(const Event& e) override {
    seen.emplace_back(kernel->now(), std::any_cast<int>(e.payload));
    if (on_event) on_event(e);
  }
};

}  // namespace

TEST_CASE("events fire in time order, ties in scheduling order") {
  Kernel k;
  Recorder r;
  r.kernel = &k;
  k.register_entity(EntityId{7}, r);
  k.schedule(Event{5.0, 0, EntityId{7}, EventKind::GenerateData, 1});
  k.schedule(Event{1.0, 0, EntityId{7}, EventKind::GenerateData, 2});
  k.schedule(Event{5.0, 0, EntityId{7}, EventKind::GenerateData, 3});
  k.schedule(Event{1.0, 0, EntityId{7}, EventKind::GenerateData, 4});

  CHECK(k.run() == 5.0);
  const std::vector<std::pair<SimTime, int>> expected{{1.0, 2}, {1.0, 4}, {5.0, 1}, {5.0, 3}};
  CHECK(r.seen == expected);
  CHECK(k.dispatched() == 4);
  CHECK(k.pending() == 0);
}

TEST_CASE("scheduling into the past is rejected") {
  Kernel k;
  Recorder r;
  r.kernel = &k;
  k.register_entity(EntityId{1}, r);
  r.on_event = [&k](const Event&) {
    CHECK_THROWS_AS(k.schedule(Event{0.5, 0, EntityId{1}, EventKind::Terminate, 0}),
                    SchedulingError);
    CHECK_THROWS_AS(k.schedule_in(-1e-9, EntityId{1}, EventKind::Terminate, 0), SchedulingError);
  };
  k.schedule(Event{2.0, 0, EntityId{1}, EventKind::Terminate, 9});
  k.run();
  CHECK(r.seen.size() == 1);
  CHECK_THROWS_AS(k.schedule(Event{std::nan(""), 0, EntityId{1}, EventKind::Terminate, 0}),
                  SchedulingError);
}

TEST_CASE("an empty run leaves the clock at zero") {
  Kernel k;
  CHECK(k.run() == 0.0);
  CHECK(k.dispatched() == 0);
}

TEST_CASE("run(until) leaves later events queued") {
  Kernel k;
  Recorder r;
  r.kernel = &k;
  k.register_entity(EntityId{3}, r);
  for (int i = 0; i < 5; ++i) {
    k.schedule(Event{static_cast<double>(i), 0, EntityId{3}, EventKind::GenerateData, i});
  }
  CHECK(k.run(2.5) == 2.0);
  CHECK(k.pending() == 2);
  const auto left = k.undelivered();
  REQUIRE(left.size() == 2);
  CHECK(left[0].fire_at == 3.0);
  CHECK(left[1].fire_at == 4.0);
  CHECK(k.run() == 4.0);
}

TEST_CASE("stop ends the run after the current event") {
  Kernel k;
  Recorder r;
  r.kernel = &k;
  k.register_entity(EntityId{3}, r);
  r.on_event = [&k](const Event& e) {
    if (std::any_cast<int>(e.payload) == 1) k.stop();
  };
  for (int i = 0; i < 4; ++i) {
    k.schedule(Event{1.0, 0, EntityId{3}, EventKind::GenerateData, i});
  }
  CHECK(k.run() == 1.0);
  CHECK(r.seen.size() == 2);
  CHECK(k.stopped());
  CHECK(k.undelivered().size() == 2);
}

TEST_CASE("entity registration") {
  Kernel k;
  Recorder a;
  k.register_entity(EntityId{1}, a);
  CHECK_THROWS_AS(k.register_entity(EntityId{1}, a), std::logic_error);
  k.schedule(Event{0.0, 0, EntityId{2}, EventKind::Terminate, 0});
  CHECK_THROWS_AS(k.run(), std::logic_error);
}

TEST_CASE("trace hook sees every dispatch") {
  Kernel k;
  Recorder r;
  r.kernel = &k;
  k.register_entity(EntityId{1}, r);
  std::vector<std::uint64_t> sequences;
  k.set_trace([&](const Event& e) { sequences.push_back(e.sequence); });
  const auto s0 = k.schedule(Event{1.0, 0, EntityId{1}, EventKind::Terminate, 0});
  const auto s1 = k.schedule(Event{0.0, 0, EntityId{1}, EventKind::Terminate, 1});
  k.run();
  CHECK(sequences == std::vector<std::uint64_t>{s1, s0});
}

// Property: dispatch order equals a stable sort of all scheduled events by
// time, where events scheduled from handlers join in scheduling order.
TEST_CASE("dispatch order matches a stable sort oracle") {
  std::mt19937 rng(20240601);
  for (int trial = 0; trial < 200; ++trial) {
    Kernel k;
    Recorder r;
    r.kernel = &k;
    k.register_entity(EntityId{1}, r);

    std::uniform_int_distribution<int> slot(0, 6);
    std::uniform_int_distribution<int> spawn(0, 2);
    int next_tag = 0;
    std::vector<std::tuple<SimTime, int>> scheduled;  // in scheduling order
    auto add = [&](SimTime at) {
      scheduled.emplace_back(at, next_tag);
      k.schedule(Event{at, 0, EntityId{1}, EventKind::GenerateData, next_tag++});
    };
    r.on_event = [&](const Event&) {
      if (next_tag > 60) return;
      for (int i = spawn(rng); i > 0; --i) add(k.now() + slot(rng) * 0.5);
    };
    for (int i = 0; i < 10; ++i) add(slot(rng) * 0.5);
    k.run();

    // Replay: repeatedly take the earliest time, lowest scheduling index.
    auto oracle = scheduled;
    std::stable_sort(oracle.begin(), oracle.end(),
                     [](const auto& a, const auto& b) { return std::get<0>(a) < std::get<0>(b); });
    REQUIRE(r.seen.size() == oracle.size());
    for (std::size_t i = 0; i < oracle.size(); ++i) {
      CHECK(r.seen[i].first == std::get<0>(oracle[i]));
      CHECK(r.seen[i].second == std::get<1>(oracle[i]));
    }
    // The clock never runs backwards.
    CHECK(std::is_sorted(r.seen.begin(), r.seen.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; }));
  }
}
