#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "edgesim/metrics.hpp"

namespace edgesim {

// Report tables are comma-separated with LF line endings and a header row.
// Numbers use 9 significant digits; absent values are empty cells.
//
//   summary.csv    one row of run counters and headline means
//   latencies.csv  one row per delivered result, in delivery order
//   devices.csv    one row per device, edges first

/// Shortest of fixed/scientific notation with 9 significant digits.
std::string format_number(double value);

std::string summary_csv(const MetricsReport& report);
std::string latencies_csv(const MetricsReport& report);
std::string devices_csv(const MetricsReport& report);

/// Writes the three tables into `dir`, creating it if needed. Failures
/// throw std::filesystem::filesystem_error naming the path.
void write_report(const MetricsReport& report, const std::filesystem::path& dir);

struct SweepPoint {
  double value = 0.0;
  MetricsReport report;
};

/// One row per sweep point, in the given order, with the headline metrics.
std::string aggregate_csv(const std::vector<SweepPoint>& points);

/// Writes `content` to `path` byte for byte.
void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace edgesim
