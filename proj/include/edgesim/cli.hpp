#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "edgesim/report.hpp"
#include "edgesim/scenario.hpp"

namespace edgesim {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitRuntime = 2, kExitIo = 3 };

/// FIELD=FROM:TO:STEP. FIELD addresses a numeric scenario value with dots
/// and indices, e.g. `iOTDeviceEntities[0].numberofEntity`.
struct SweepAxis {
  std::string field;
  double from = 0.0;
  double to = 0.0;
  double step = 1.0;
};

/// Throws std::invalid_argument on malformed or unordered bounds.
SweepAxis parse_sweep_axis(std::string_view spec);

/// from, from + step, ... up to `to` inclusive.
std::vector<double> sweep_values(const SweepAxis& axis);

/// A copy of `base` with `field` set to `value`. Integer fields accept only
/// integral values. Throws ScenarioError when the result is invalid.
ScenarioConfig apply_axis_value(const ScenarioConfig& base, const std::string& field,
                                double value);

/// Runs every axis point, `threads` at a time, and writes per-point reports
/// to `out_dir`/point_NNN when `out_dir` is non-empty. Results come back in
/// axis order.
std::vector<SweepPoint> run_sweep(const ScenarioConfig& base, const SweepAxis& axis,
                                  const std::filesystem::path& out_dir, unsigned threads = 0);

/// Full command-line front end; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace edgesim
