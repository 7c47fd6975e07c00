#include "eitsim/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace eitsim {

ProbeEnvelope PulseSpec::envelope() const { return ProbeEnvelope::gaussian(peak, fwhm, center); }

double PulseSpec::bandwidth() const { return 4.0 * std::numbers::ln2 / fwhm; }

const TimeWindow& ScenarioResult::window(const std::string& name) const {
  for (const auto& w : windows) {
    if (w.name == name) return w;
  }
  throw std::out_of_range("no window named " + name);
}

double eit_window_width(double od, double omega_c_eff, const LevelScheme& scheme) {
  if (!(od > 0.0)) throw std::invalid_argument("eit_window_width needs od > 0");
  return omega_c_eff * omega_c_eff / (scheme.gamma * std::sqrt(od));
}

double phase_matching_detuning(double v_g_over_c, const LevelScheme& scheme) {
  if (v_g_over_c < 0.0 || v_g_over_c > 1.0) {
    throw std::invalid_argument("group velocity must lie in [0, c]");
  }
  return -scheme.delta_omega_21 * v_g_over_c;
}

double integrate_window(const std::vector<double>& t, const std::vector<double>& y, double a,
                        double b) {
  if (t.size() != y.size()) throw std::invalid_argument("integrate_window: size mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double lo = std::max(a, t[i]), hi = std::min(b, t[i + 1]);
    if (!(hi > lo)) continue;
    const double slope = (y[i + 1] - y[i]) / (t[i + 1] - t[i]);
    const double ylo = y[i] + slope * (lo - t[i]);
    const double yhi = y[i] + slope * (hi - t[i]);
    sum += 0.5 * (ylo + yhi) * (hi - lo);
  }
  return sum;
}

DriveConfig slow_light_drive(Complex omega_c, const PulseSpec& pulse, double delta_c,
                             double delta_p) {
  DriveConfig d;
  d.omega_c_plus = ControlEnvelope(omega_c);
  d.probe = pulse.envelope();
  d.delta_c_plus = delta_c;
  d.delta_c_minus = delta_c;
  d.delta_p_plus = delta_p;
  return d;
}

DriveConfig storage_drive(Complex omega_c, const PulseSpec& pulse, const StorageProtocol& protocol,
                          double delta_c, double delta_p) {
  if (protocol.storage_time < protocol.ramp) {
    throw std::invalid_argument("storage time must cover the switch-off ramp");
  }
  DriveConfig d = slow_light_drive(omega_c, pulse, delta_c, delta_p);
  d.omega_c_plus.switch_to(protocol.switch_off, 0.0, protocol.ramp)
      .switch_to(protocol.switch_off + protocol.storage_time, omega_c, protocol.ramp);
  return d;
}

DriveConfig slp_drive(Complex omega_c_plus, Complex omega_c_minus, const PulseSpec& pulse,
                      const SlpProtocol& protocol, double delta_c_plus, double delta_c_minus,
                      double delta_p) {
  DriveConfig d = slow_light_drive(omega_c_plus, pulse, delta_c_plus, delta_p);
  d.delta_c_minus = delta_c_minus;
  if (std::abs(omega_c_minus) > 0.0) {
    d.omega_c_minus = ControlEnvelope(0.0);
    d.omega_c_minus.switch_to(protocol.backward_on, omega_c_minus, protocol.ramp)
        .switch_to(protocol.backward_off, 0.0, protocol.ramp);
  }
  return d;
}

namespace {

double centroid(const std::vector<double>& t, const std::vector<double>& y) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double h = t[i + 1] - t[i];
    num += 0.5 * h * (t[i] * y[i] + t[i + 1] * y[i + 1]);
    den += 0.5 * h * (y[i] + y[i + 1]);
  }
  return den > 0.0 ? num / den : std::numeric_limits<double>::quiet_NaN();
}

double pulse_width(const DriveConfig& drive) {
  double w = 0.0;
  for (const auto& c : drive.probe.components()) {
    if (c.kind == ProbeEnvelope::Kind::gaussian) w = std::max(w, c.width);
  }
  return w;
}

double pulse_center(const DriveConfig& drive) {
  double t0 = 0.0;
  for (const auto& c : drive.probe.components()) {
    if (c.kind == ProbeEnvelope::Kind::gaussian) t0 = std::max(t0, c.center);
  }
  return t0;
}

double free_delay(const MediumConfig& medium, const DriveConfig& drive) {
  const double oc = drive.omega_c_plus.peak_magnitude();
  return oc > 0.0 ? medium.od / (oc * oc) : std::numeric_limits<double>::infinity();
}

// Integrated energies plus one window per consecutive pair of boundaries.
ScenarioResult measure(std::string kind, TimeSeriesRecord record,
                       const std::vector<std::pair<std::string, double>>& starts) {
  ScenarioResult r;
  r.kind = std::move(kind);
  const auto& t = record.time;
  const double scale = record.input_peak_intensity;
  const double t0 = t.front(), t1 = t.back();
  r.input_energy = scale * integrate_window(t, record.probe_in, t0, t1);
  r.output_energy_forward = scale * integrate_window(t, record.probe_out_forward, t0, t1);
  r.output_energy_backward = scale * integrate_window(t, record.probe_out_backward, t0, t1);
  for (std::size_t i = 0; i < starts.size(); ++i) {
    TimeWindow w;
    w.name = starts[i].first;
    w.start = std::clamp(starts[i].second, t0, t1);
    w.end = i + 1 < starts.size() ? std::clamp(starts[i + 1].second, t0, t1) : t1;
    w.energy_forward = scale * integrate_window(t, record.probe_out_forward, w.start, w.end);
    w.energy_backward = scale * integrate_window(t, record.probe_out_backward, w.start, w.end);
    r.windows.push_back(w);
  }
  r.warnings = record.warnings;
  r.record = std::move(record);
  return r;
}

double vacuum_centroid(const DriveConfig& drive, const SimulationGrid& grid,
                       const LevelScheme& scheme) {
  MediumConfig vacuum;
  SimulationGrid reduced = grid;
  reduced.nz = 32;
  reduced.n_max = 0;
  reduced.velocity_classes = {{0.0, 1.0}};
  reduced.snapshot_stride = 0;
  DriveConfig probe_only = drive;
  const auto rec = propagate(probe_only, vacuum, scheme, reduced);
  return centroid(rec.time, rec.probe_out_forward);
}

void warn(ScenarioResult& r, std::string message) {
  spdlog::warn("{}", message);
  r.warnings.push_back(std::move(message));
}

void slow_light_metrics(ScenarioResult& r, const DriveConfig& drive, const MediumConfig& medium,
                        const LevelScheme& scheme, const SimulationGrid& grid) {
  r.transmission = r.input_energy > 0.0 ? r.output_energy_forward / r.input_energy : 0.0;
  r.efficiency = r.transmission;
  r.delay = centroid(r.record.time, r.record.probe_out_forward) -
            vacuum_centroid(drive, grid, scheme);
  const double width = pulse_width(drive);
  if (medium.od > 0.0 && width > 0.0) {
    const double eit = eit_window_width(medium.od, drive.omega_c_plus.peak_magnitude(), scheme);
    const double bw = 4.0 * std::numbers::ln2 / width;
    if (bw > 0.5 * eit) {
      warn(r, fmt::format("pulse bandwidth {:.3g} exceeds half the EIT window width ({:.3g})", bw,
                          0.5 * eit));
    }
  }
}

}  // namespace

ScenarioResult run_slow_light(const DriveConfig& drive, const MediumConfig& medium,
                              const LevelScheme& scheme, const SimulationGrid& grid) {
  auto rec = propagate(drive, medium, scheme, grid);
  auto r = measure("slowlight", std::move(rec), {{"output", 0.0}});
  slow_light_metrics(r, drive, medium, scheme, grid);
  return r;
}

ScenarioResult run_storage(const DriveConfig& drive, const MediumConfig& medium,
                           const LevelScheme& scheme, const SimulationGrid& grid) {
  double off = std::numeric_limits<double>::quiet_NaN();
  double on = std::numeric_limits<double>::quiet_NaN();
  for (const auto& s : drive.omega_c_plus.switches()) {
    if (std::isnan(off) && std::abs(s.level) == 0.0) {
      off = s.start;
    } else if (!std::isnan(off) && std::isnan(on) && std::abs(s.level) > 0.0) {
      on = s.start;
    }
  }
  if (std::isnan(off) || std::isnan(on)) {
    throw std::invalid_argument("storage protocol needs a control switch-off followed by a switch-on");
  }
  auto rec = propagate(drive, medium, scheme, grid);
  auto r = measure("storage", std::move(rec),
                   {{"transmitted", 0.0}, {"storage", off}, {"retrieval", on}});
  r.storage_time = on - off;
  r.efficiency = r.input_energy > 0.0 ? r.window("retrieval").energy_forward / r.input_energy : 0.0;
  r.transmission = r.input_energy > 0.0 ? r.output_energy_forward / r.input_energy : 0.0;
  const double width = pulse_width(drive);
  const double delay = free_delay(medium, drive);
  if (delay < width) {
    warn(r, fmt::format("pulse does not fit inside the medium: delay {:.3g} < pulse FWHM {:.3g}",
                        delay, width));
  }
  return r;
}

ScenarioResult run_slp(const DriveConfig& drive, const MediumConfig& medium,
                       const LevelScheme& scheme, const SimulationGrid& grid) {
  if (drive.omega_c_minus.is_zero()) {
    auto r = run_slow_light(drive, medium, scheme, grid);
    r.kind = "slp";
    return r;
  }
  double on = std::numeric_limits<double>::quiet_NaN();
  double off = grid.t_end;
  if (std::abs(drive.omega_c_minus.initial()) > 0.0) on = 0.0;
  for (const auto& s : drive.omega_c_minus.switches()) {
    if (std::isnan(on) && std::abs(s.level) > 0.0) {
      on = s.start;
    } else if (!std::isnan(on) && std::abs(s.level) == 0.0) {
      off = s.start;
      break;
    }
  }
  auto rec = propagate(drive, medium, scheme, grid);
  auto r = measure("slp", std::move(rec),
                   {{"slow_light", 0.0}, {"leakage", on}, {"retrieval", off}});
  r.transmission = r.input_energy > 0.0 ? r.output_energy_forward / r.input_energy : 0.0;
  const double retrieved = r.window("retrieval").energy_forward;
  r.efficiency = r.input_energy > 0.0 ? retrieved / r.input_energy : 0.0;

  const double exit_time = pulse_center(drive) + free_delay(medium, drive) + pulse_width(drive);
  r.slp_signature = r.input_energy > 0.0 && retrieved > kSlpSignatureFraction * r.input_energy &&
                    off > exit_time;

  if (medium.od > 0.0) {
    const double omega_eff = std::hypot(drive.omega_c_plus.peak_magnitude(),
                                        drive.omega_c_minus.peak_magnitude());
    const double eit = eit_window_width(medium.od, omega_eff, scheme);
    if (std::abs(drive.zeta()) <= eit) {
      warn(r, fmt::format("|zeta| = {:.3g} does not exceed the EIT window width {:.3g}; "
                          "ground-state gratings will suppress stationary light",
                          std::abs(drive.zeta()), eit));
    }
  }
  return r;
}

namespace {

nlohmann::json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return std::stod(fmt::format("{:.9g}", x));
}

}  // namespace

nlohmann::json to_json(const ScenarioResult& r) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["kind"] = r.kind;
  j["input_energy"] = number(r.input_energy);
  j["output_energy_forward"] = number(r.output_energy_forward);
  j["output_energy_backward"] = number(r.output_energy_backward);
  j["delay"] = number(r.delay);
  j["transmission"] = number(r.transmission);
  j["efficiency"] = number(r.efficiency);
  j["storage_time"] = number(r.storage_time);
  j["slp_signature"] = r.slp_signature;
  j["truncation_ratio"] = number(r.record.truncation_ratio);
  j["windows"] = nlohmann::json::array();
  for (const auto& w : r.windows) {
    j["windows"].push_back({{"name", w.name},
                            {"start", number(w.start)},
                            {"end", number(w.end)},
                            {"energy_forward", number(w.energy_forward)},
                            {"energy_backward", number(w.energy_backward)}});
  }
  j["warnings"] = r.warnings;
  return j;
}

}  // namespace eitsim
