#include "eitsim/app.hpp"

#include <fstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "eitsim/spectra.hpp"

namespace eitsim {

namespace fs = std::filesystem;

namespace {

double round9(double x) { return std::stod(fmt::format("{:.9g}", x)); }

YAML::Node yaml_number(double x) { return YAML::Node(fmt::format("{:.9g}", x)); }

std::ofstream open_output(const fs::path& file) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw std::runtime_error(fmt::format("cannot write {}", file.string()));
  return os;
}

void write_json(const fs::path& file, const nlohmann::json& j) {
  auto os = open_output(file);
  os << j.dump(2) << '\n';
}

nlohmann::json yaml_to_json(const YAML::Node& n) {
  switch (n.Type()) {
    case YAML::NodeType::Map: {
      nlohmann::json j = nlohmann::json::object();
      for (const auto& kv : n) j[kv.first.as<std::string>()] = yaml_to_json(kv.second);
      return j;
    }
    case YAML::NodeType::Sequence: {
      nlohmann::json j = nlohmann::json::array();
      for (const auto& v : n) j.push_back(yaml_to_json(v));
      return j;
    }
    case YAML::NodeType::Scalar: {
      const std::string& s = n.Scalar();
      if (s == "true" || s == "false") return s == "true";
      try {
        std::size_t used = 0;
        const long long i = std::stoll(s, &used);
        if (used == s.size()) return i;
      } catch (const std::exception&) {
      }
      try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size() && std::isfinite(v)) return round9(v);
      } catch (const std::exception&) {
      }
      return s;
    }
    default:
      return nullptr;
  }
}

Scenario scenario_of(const std::string& command) {
  if (command == "slowlight") return Scenario::slowlight;
  if (command == "storage") return Scenario::storage;
  if (command == "slp") return Scenario::slp;
  return Scenario::spectrum;
}

std::string run_spectrum(const RunConfig& c, const ResolvedRun& r, const fs::path& out) {
  const auto detunings = linear_grid(c.spectrum.start, c.spectrum.stop, c.spectrum.points);
  std::vector<SpectrumPoint> points;
  if (c.spectrum.model == SpectrumModel::homogeneous) {
    points = sweep_spectrum(detunings, [&](double dp) {
      return transmission_homogeneous(dp, r.medium, r.drive, r.scheme);
    });
  } else {
    // The inhomogeneous model resolves the radial profile itself, so it gets
    // the bare control amplitude.
    DriveConfig bare = r.drive;
    bare.omega_c_plus = ControlEnvelope(c.omega_c_plus);
    points = sweep_spectrum(detunings, [&](double dp) {
      const auto t = transmission_inhomogeneous(dp, r.medium, bare, r.scheme,
                                                c.spectrum.quadrature);
      if (!t.converged) {
        spdlog::warn("quadrature not converged at delta_p = {:.4g} (difference {:.3g})", dp,
                     t.doubled_difference);
      }
      return t.transmission;
    });
  }
  for (const auto& p : points) {
    if (!std::isfinite(p.transmission)) {
      throw RunError(fmt::format("non-finite transmission at delta_p = {:.6g}", p.delta_p));
    }
  }
  auto os = open_output(out / "spectrum.csv");
  write_spectrum_csv(os, points);
  return "spectrum.csv";
}

std::string run_calibrate(const RunConfig& c, const fs::path& out, CalibrationCache* cache) {
  auto temps = c.calibration.temperatures_uK;
  if (temps.empty()) temps.push_back(c.temperature_uK);
  auto omegas = c.calibration.omega_c;
  if (omegas.empty()) omegas.push_back(c.omega_c_plus);
  std::vector<CalibrationRow> rows;
  for (double t : temps) {
    for (double oc : omegas) {
      RunConfig one = c;
      one.temperature_uK = t;
      one.medium.theta = t * 1e-6;
      one.omega_c_plus = oc;
      one.effective.calibrate = true;
      try {
        const auto r = resolve_run(one, Scenario::spectrum, cache);
        rows.push_back({t * 1e-6, oc, r.effective});
      } catch (const CalibrationError& e) {
        throw RunError(fmt::format("calibration at temperature_uK = {:.6g}, omega_c = {:.6g}: {}",
                                   t, oc, e.what()));
      }
    }
  }
  auto os = open_output(out / "calibration.csv");
  write_calibration_csv(os, rows);
  return "calibration.csv";
}

std::string run_scenario(const std::string& command, const RunConfig& c, const ResolvedRun& r,
                         const fs::path& out) {
  ScenarioResult result;
  if (command == "slowlight") {
    result = run_slow_light(r.drive, r.medium, r.scheme, r.grid);
  } else if (command == "storage") {
    result = run_storage(r.drive, r.medium, r.scheme, r.grid);
  } else {
    result = run_slp(r.drive, r.medium, r.scheme, r.grid);
  }
  for (double e : {result.input_energy, result.output_energy_forward,
                   result.output_energy_backward}) {
    if (!std::isfinite(e)) throw RunError("non-finite output energy");
  }
  nlohmann::json j = to_json(result);
  j["config"] = yaml_to_json(resolved_document(c, &r));
  write_json(out / "result.json", j);
  {
    auto os = open_output(out / "timeseries.csv");
    write_time_series_csv(os, result.record);
  }
  if (!result.record.snapshots.empty()) {
    fs::create_directories(out / "snapshots");
    for (std::size_t i = 0; i < result.record.snapshots.size(); ++i) {
      auto os = open_output(out / "snapshots" / fmt::format("snapshot_{:05d}.csv", i));
      write_snapshot_csv(os, result.record.snapshots[i]);
    }
  }
  return "result.json";
}

}  // namespace

bool is_command(const std::string& name) {
  return name == "spectrum" || name == "calibrate" || name == "slowlight" || name == "storage" ||
         name == "slp";
}

YAML::Node resolved_document(const RunConfig& c, const ResolvedRun* r) {
  YAML::Node doc = YAML::Clone(c.resolved);
  if (r) {
    YAML::Node d;
    d["sigma_a"] = yaml_number(r->medium.sigma_a);
    d["k_thermal"] = yaml_number(r->medium.k_thermal);
    d["phase_mismatch"] = yaml_number(r->medium.phase_mismatch);
    d["beta"] = yaml_number(r->effective.beta);
    d["gamma_inh"] = yaml_number(r->effective.gamma_inh);
    d["calibrated"] = r->calibrated;
    if (r->calibrated) d["calibration_residual"] = yaml_number(r->effective.residual);
    d["delta_p"] = yaml_number(r->delta_p);
    d["t_end"] = yaml_number(r->grid.t_end);
    d["velocity_classes"] = static_cast<int>(r->grid.velocity_classes.size());
    doc["derived"] = d;
  }
  YAML::Node defaults(YAML::NodeType::Sequence);
  for (const auto& p : c.defaults_applied) defaults.push_back(p);
  doc["defaults_applied"] = defaults;
  return doc;
}

void write_resolved_config(const fs::path& file, const RunConfig& c, const ResolvedRun* r) {
  YAML::Emitter em;
  em.SetDoublePrecision(9);
  em << resolved_document(c, r);
  auto os = open_output(file);
  os << em.c_str() << '\n';
}

std::string run_command(const std::string& command, const RunConfig& config, const fs::path& out,
                        const CommandOptions& options) {
  if (!is_command(command)) throw ConfigError("<command>", fmt::format("unknown '{}'", command));
  fs::create_directories(out);
  RunConfig c = config;
  if (options.snapshot_stride >= 0) {
    c.grid.snapshot_stride = options.snapshot_stride;
    c.resolved["grid"]["snapshot_stride"] = options.snapshot_stride;
  }
  if (command == "calibrate") {
    const auto file = run_calibrate(c, out, options.cache);
    write_resolved_config(out / "resolved_config.yaml", c, nullptr);
    return file;
  }
  ResolvedRun r;
  try {
    r = resolve_run(c, scenario_of(command), options.cache);
  } catch (const CalibrationError& e) {
    throw RunError(e.what());
  }
  write_resolved_config(out / "resolved_config.yaml", c, &r);
  if (command == "spectrum") return run_spectrum(c, r, out);
  return run_scenario(command, c, r, out);
}

std::vector<SweepEntry> run_sweep(const YAML::Node& document, const RunConfig& config,
                                  const fs::path& out, const CommandOptions& options) {
  if (config.sweep.axes.empty()) throw ConfigError("sweep.axes", "no axes to sweep over");
  std::vector<SweepEntry> entries{SweepEntry{}};
  for (const auto& axis : config.sweep.axes) {
    std::vector<SweepEntry> next;
    for (const auto& e : entries) {
      for (const auto& v : axis.values) {
        SweepEntry n = e;
        n.parameters.emplace_back(axis.parameter, v);
        next.push_back(std::move(n));
      }
    }
    entries = std::move(next);
  }
  fs::create_directories(out);

  YAML::Node base = YAML::Clone(document);
  base.remove("sweep");
  std::vector<RunConfig> configs(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    YAML::Node doc = base;
    for (const auto& [path, value] : entries[i].parameters) doc = with_override(doc, path, value);
    configs[i] = parse_config(doc);
    entries[i].directory = fmt::format("run_{:04d}", i);
  }

  const int n = static_cast<int>(entries.size());
  const bool nested = n > 1;
#pragma omp parallel for schedule(dynamic, 1) if (nested)
  for (int i = 0; i < n; ++i) {
    RunConfig c = configs[static_cast<std::size_t>(i)];
    if (nested) c.grid.kernel = KernelMode::serial;
    auto& e = entries[static_cast<std::size_t>(i)];
    try {
      e.result = e.directory + "/" + run_command(config.sweep.command, c, out / e.directory, options);
    } catch (const std::exception& ex) {
      e.error = ex.what();
    }
  }

  nlohmann::json index;
  index["format_version"] = kOutputFormatVersion;
  index["command"] = config.sweep.command;
  index["entries"] = nlohmann::json::array();
  std::string csv = "directory,result,status";
  for (const auto& a : config.sweep.axes) csv += "," + a.parameter;
  csv += "\n";
  for (const auto& e : entries) {
    nlohmann::json p = nlohmann::json::object();
    for (const auto& [path, value] : e.parameters) p[path] = yaml_to_json(value);
    nlohmann::json row{{"directory", e.directory}, {"parameters", p}};
    row["result"] = e.error.empty() ? nlohmann::json(e.result) : nlohmann::json(nullptr);
    if (!e.error.empty()) row["error"] = e.error;
    index["entries"].push_back(row);
    csv += fmt::format("{},{},{}", e.directory, e.result, e.error.empty() ? "ok" : "failed");
    for (const auto& [path, value] : e.parameters) csv += "," + value.Scalar();
    csv += "\n";
  }
  write_json(out / "index.json", index);
  auto os = open_output(out / "index.csv");
  os << csv;
  return entries;
}

}  // namespace eitsim
