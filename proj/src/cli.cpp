#include "edgesim/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "edgesim/orchestration.hpp"
#include "edgesim/presets.hpp"
#include "json.hpp"

namespace edgesim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double parse_double(std::string_view text, std::string_view what) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size() || !std::isfinite(v)) {
    throw std::invalid_argument("sweep " + std::string(what) + " '" + std::string(text) +
                                "' is not a number");
  }
  return v;
}

struct PathStep {
  std::string key;  // empty for an index step
  std::size_t index = 0;
};

std::vector<PathStep> parse_field(const std::string& field) {
  std::vector<PathStep> steps;
  std::size_t i = 0;
  auto fail = [&field]() {
    return ScenarioError({{field, "malformed sweep field"}});
  };
  while (i < field.size()) {
    if (field[i] == '[') {
      const auto close = field.find(']', i);
      if (close == std::string::npos || close == i + 1) throw fail();
      std::size_t index = 0;
      auto [end, ec] = std::from_chars(field.data() + i + 1, field.data() + close, index);
      if (ec != std::errc{} || end != field.data() + close) throw fail();
      steps.push_back({"", index});
      i = close + 1;
      if (i < field.size() && field[i] == '.') ++i;
      continue;
    }
    const auto stop = field.find_first_of(".[", i);
    const auto key = field.substr(i, stop == std::string::npos ? std::string::npos : stop - i);
    if (key.empty()) throw fail();
    steps.push_back({key, 0});
    i = stop == std::string::npos ? field.size() : stop;
    if (i < field.size() && field[i] == '.') ++i;
  }
  if (steps.empty() || steps.back().key.empty()) throw fail();
  return steps;
}

// Integral values go back as integers so integer fields keep their type.
json number_for(const json& existing, double value, const std::string& field) {
  if (existing.is_number_integer()) {
    if (std::floor(value) != value) {
      throw ScenarioError({{field, "integer field cannot take value " + format_number(value)}});
    }
    return json(static_cast<std::int64_t>(value));
  }
  return json(value);
}

struct ResolvedInput {
  ScenarioConfig config;
  std::string label;
};

}  // namespace

SweepAxis parse_sweep_axis(std::string_view spec) {
  const auto eq = spec.rfind('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw std::invalid_argument("sweep must look like FIELD=FROM:TO:STEP");
  }
  SweepAxis axis;
  axis.field = std::string(spec.substr(0, eq));
  const auto range = spec.substr(eq + 1);
  const auto c1 = range.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : range.find(':', c1 + 1);
  if (c2 == std::string_view::npos) {
    throw std::invalid_argument("sweep must look like FIELD=FROM:TO:STEP");
  }
  axis.from = parse_double(range.substr(0, c1), "start");
  axis.to = parse_double(range.substr(c1 + 1, c2 - c1 - 1), "end");
  axis.step = parse_double(range.substr(c2 + 1), "step");
  if (!(axis.step > 0.0)) throw std::invalid_argument("sweep step must be positive");
  if (axis.to < axis.from) throw std::invalid_argument("sweep end is below its start");
  return axis;
}

std::vector<double> sweep_values(const SweepAxis& axis) {
  const auto count =
      static_cast<std::size_t>(std::floor((axis.to - axis.from) / axis.step + 1e-9)) + 1;
  std::vector<double> values;
  values.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    // Round away accumulated binary noise, e.g. 0.1 + 2 * 0.1.
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.12g", axis.from + static_cast<double>(i) * axis.step);
    values.push_back(std::strtod(buffer, nullptr));
  }
  return values;
}

ScenarioConfig apply_axis_value(const ScenarioConfig& base, const std::string& field,
                                double value) {
  json doc = json::parse(serialize_scenario(base));
  json* node = &doc;
  const auto steps = parse_field(field);
  for (std::size_t s = 0; s + 1 < steps.size(); ++s) {
    const auto& step = steps[s];
    if (step.key.empty()) {
      if (!node->is_array() || step.index >= node->size()) {
        throw ScenarioError({{field, "index " + std::to_string(step.index) + " out of range"}});
      }
      node = &(*node)[step.index];
    } else {
      if (!node->is_object() || !node->contains(step.key)) {
        throw ScenarioError({{field, "no field '" + step.key + "'"}});
      }
      node = &(*node)[step.key];
    }
  }
  const auto& last = steps.back().key;
  if (!node->is_object()) throw ScenarioError({{field, "does not address a field"}});
  if (node->contains(last)) {
    if (!(*node)[last].is_number()) throw ScenarioError({{field, "is not a numeric field"}});
    (*node)[last] = number_for((*node)[last], value, field);
  } else {
    (*node)[last] = value;  // optional numeric field left unset in the base
  }
  return parse_scenario(doc.dump());
}

std::vector<SweepPoint> run_sweep(const ScenarioConfig& base, const SweepAxis& axis,
                                  const fs::path& out_dir, unsigned threads) {
  const auto values = sweep_values(axis);
  std::vector<ScenarioConfig> configs;
  configs.reserve(values.size());
  for (double v : values) configs.push_back(apply_axis_value(base, axis.field, v));

  std::vector<SweepPoint> points(values.size());
  std::vector<std::exception_ptr> errors(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      try {
        RunOptions options;
        options.record_energy = false;
        points[i] = SweepPoint{values[i], run_scenario(configs[i], options)};
        if (!out_dir.empty()) {
          char name[32];
          std::snprintf(name, sizeof name, "point_%03zu", i);
          write_report(points[i].report, out_dir / name);
          write_text(out_dir / name / "scenario.json", serialize_scenario(configs[i]));
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(values.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return points;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Deterministic IoT/edge discrete-event simulator", "edgesim"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string preset_name;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<double> horizon;
  std::string sweep_spec;
  bool quiet = false;
  PresetOptions preset_options;
  unsigned threads = 0;

  auto common = [&](CLI::App* sub, bool positional_preset) {
    if (positional_preset) {
      sub->add_option("name", preset_name, "case1, case2 or case3")->required();
    } else {
      auto* scenario = sub->add_option("--scenario", scenario_path, "Scenario JSON file");
      auto* preset = sub->add_option("--preset", preset_name, "case1, case2 or case3");
      scenario->excludes(preset);
    }
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_option("--seed", seed, "Override run.seed");
    sub->add_option("--horizon", horizon, "Override run.horizon (simulated seconds)");
    sub->add_flag("--quiet", quiet, "Print nothing on success");
    sub->add_option("--cars,--devices", preset_options.devices,
                    "Preset population (case2 sensors, case3 cars)");
    sub->add_option("--protocol", preset_options.protocol, "Preset IoT protocol (case2)");
    sub->add_option("--shrink", preset_options.shrink, "Preset shrinking factor (case1)");
  };

  auto* run_cmd = app.add_subcommand("run", "Run one scenario and write its reports");
  common(run_cmd, false);
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep");
  common(sweep_cmd, false);
  sweep_cmd->add_option("--sweep", sweep_spec, "FIELD=FROM:TO:STEP")->required();
  sweep_cmd->add_option("--threads", threads, "Parallel runs (0 = one per core)");
  auto* preset_cmd = app.add_subcommand("preset", "Run a shipped case study");
  common(preset_cmd, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    ScenarioConfig config;
    if (!scenario_path.empty()) {
      config = load_scenario(scenario_path);
    } else if (!preset_name.empty()) {
      auto preset = preset_by_name(preset_name, preset_options);
      if (!preset) {
        err << "error: unknown preset '" << preset_name << "' (expected case1, case2 or case3)\n";
        return kExitConfig;
      }
      config = std::move(*preset);
    } else {
      err << "error: one of --scenario or --preset is required\n";
      return kExitConfig;
    }
    if (seed) config.run.seed = *seed;
    if (horizon) config.run.horizon = *horizon;
    validate_scenario(config);

    if (sweep_cmd->parsed()) {
      SweepAxis axis;
      try {
        axis = parse_sweep_axis(sweep_spec);
      } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
      }
      const fs::path dir(out_dir);
      fs::create_directories(dir);
      const auto points = run_sweep(config, axis, dir, threads);
      write_text(dir / "aggregate.csv", aggregate_csv(points));
      if (!quiet) {
        out << "sweep " << axis.field << ": " << points.size() << " points -> "
            << (dir / "aggregate.csv").string() << '\n';
      }
      return kExitOk;
    }

    const auto report = run_scenario(config);
    const fs::path dir(out_dir);
    write_report(report, dir);
    write_text(dir / "scenario.json", serialize_scenario(config));
    if (!quiet) {
      out << "generated=" << report.generated << " delivered=" << report.delivered
          << " discarded=" << report.discarded << " undelivered=" << report.undelivered
          << " in_flight=" << report.in_flight << " handoffs=" << report.handoffs
          << " relays=" << report.relays << '\n'
          << "mean_latency=" << format_number(report.mean_latency())
          << " mean_execution_time=" << format_number(report.mean_execution_time())
          << " end_time=" << format_number(report.end_time) << " ("
          << to_string(report.termination) << ")\n"
          << "reports written to " << dir.string() << '\n';
    }
    return kExitOk;
  } catch (const ScenarioError& e) {
    err << "configuration error:\n";
    for (const auto& issue : e.issues()) err << "  " << issue.path << ": " << issue.message << '\n';
    return kExitConfig;
  } catch (const std::system_error& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace edgesim
