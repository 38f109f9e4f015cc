#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "edgesim/scenario.hpp"

namespace edgesim {

/// Healthcare pipeline: one sensor, two Raspberry Pi class edges, MEL 1 on
/// the first edge feeding MEL 2 on the second. `shrink` is MEL 1's factor.
ScenarioConfig case1_preset(double shrink = 0.5);

/// `devices` identical environmental sensors behind one edge.
ScenarioConfig case2_preset(int devices = 1, const std::string& protocol = "coap");

/// `cars` vehicles driving along x past two roadside units.
ScenarioConfig case3_preset(int cars = 1);

struct PresetOptions {
  std::optional<int> devices;  // case2 sensors, case3 cars
  std::optional<std::string> protocol;
  std::optional<double> shrink;
};

/// Looks up case1|case2|case3; nullopt for any other name.
std::optional<ScenarioConfig> preset_by_name(std::string_view name,
                                             const PresetOptions& options = {});

}  // namespace edgesim
