#include "eitsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include <fmt/format.h>

#include "eitsim/spectra.hpp"

namespace eitsim {

ConfigError::ConfigError(const std::string& path, const std::string& message, int line)
    : std::runtime_error(line > 0 ? fmt::format("{} (line {}): {}", path, line, message)
                                  : fmt::format("{}: {}", path, message)),
      path_(path),
      line_(line) {}

namespace {

bool present(const YAML::Node& n) { return n.IsDefined() && !n.IsNull(); }

YAML::Node yaml_number(double x) { return YAML::Node(fmt::format("{:.9g}", x)); }

int line_of(const YAML::Node& n) { return n.Mark().is_null() ? 0 : n.Mark().line + 1; }

// Reads one mapping, recording consumed keys, resolved values and defaults.
class Section {
 public:
  Section(YAML::Node node, std::string path, YAML::Node out, std::vector<std::string>& defaults)
      : node_(std::move(node)), path_(std::move(path)), out_(std::move(out)), defaults_(defaults) {
    if (present(node_) && !node_.IsMap()) {
      throw ConfigError(path_.empty() ? "<root>" : path_, "expected a mapping", line_of(node_));
    }
  }

  double number(const std::string& key, double fallback) {
    const auto n = take(key);
    if (!present(n)) return record(key, fallback);
    return record(key, as_number(n, key));
  }

  int integer(const std::string& key, int fallback) {
    const auto n = take(key);
    if (!present(n)) return record(key, fallback);
    try {
      return record(key, n.as<int>());
    } catch (const YAML::Exception&) {
      throw ConfigError(full(key), "expected an integer", line_of(n));
    }
  }

  bool boolean(const std::string& key, bool fallback) {
    const auto n = take(key);
    if (!present(n)) return record(key, fallback);
    try {
      return record(key, n.as<bool>());
    } catch (const YAML::Exception&) {
      throw ConfigError(full(key), "expected true or false", line_of(n));
    }
  }

  std::string choice(const std::string& key, const std::string& fallback,
                     std::initializer_list<const char*> allowed) {
    const auto n = take(key);
    if (!present(n)) return record(key, fallback);
    const std::string v = as_text(n, key);
    for (const char* a : allowed) {
      if (v == a) return record(key, v);
    }
    std::string list;
    for (const char* a : allowed) list += fmt::format("{}{}", list.empty() ? "" : ", ", a);
    throw ConfigError(full(key), fmt::format("'{}' is not one of {}", v, list), line_of(n));
  }

  /// Number or the literal `auto` (returned as nullopt).
  std::optional<double> number_or_auto(const std::string& key,
                                       std::optional<double> fallback = std::nullopt) {
    const auto n = take(key);
    if (!present(n)) {
      if (fallback) return record(key, *fallback);
      out_[key] = "auto";
      defaults_.push_back(full(key));
      return std::nullopt;
    }
    if (n.IsScalar() && n.Scalar() == "auto") {
      out_[key] = "auto";
      return std::nullopt;
    }
    return record(key, as_number(n, key));
  }

  std::vector<double> numbers(const std::string& key) {
    const auto n = take(key);
    std::vector<double> v;
    if (!present(n)) {
      out_[key] = YAML::Node(YAML::NodeType::Sequence);
      defaults_.push_back(full(key));
      return v;
    }
    if (!n.IsSequence()) throw ConfigError(full(key), "expected a list of numbers", line_of(n));
    for (std::size_t i = 0; i < n.size(); ++i) {
      v.push_back(as_number(n[i], fmt::format("{}[{}]", key, i)));
    }
    YAML::Node seq(YAML::NodeType::Sequence);
    for (double x : v) seq.push_back(yaml_number(x));
    out_[key] = seq;
    return v;
  }

  Section child(const std::string& key) {
    auto n = take(key);
    YAML::Node out = out_[key];
    return Section(n, full(key), out, defaults_);
  }

  /// Raw access for values with a custom grammar.
  YAML::Node raw(const std::string& key) { return take(key); }
  YAML::Node out() { return out_; }
  [[nodiscard]] std::string full(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  /// Rejects keys that were never consumed.
  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!used_.count(key)) throw ConfigError(full(key), "unknown key", line_of(kv.first));
    }
  }

  template <typename T>
  T record(const std::string& key, T value) {
    if constexpr (std::is_floating_point_v<T>) {
      out_[key] = yaml_number(value);
    } else {
      out_[key] = value;
    }
    if (!explicit_.count(key)) defaults_.push_back(full(key));
    return value;
  }

 private:
  YAML::Node take(const std::string& key) {
    used_.insert(key);
    if (!node_ || !node_.IsMap()) return YAML::Node();
    auto n = node_[key];
    if (!n || n.IsNull()) return YAML::Node();
    explicit_.insert(key);
    return n;
  }

  double as_number(const YAML::Node& n, const std::string& key) const {
    try {
      return n.as<double>();
    } catch (const YAML::Exception&) {
      throw ConfigError(full(key), "expected a number", line_of(n));
    }
  }

  std::string as_text(const YAML::Node& n, const std::string& key) const {
    if (!n.IsScalar()) throw ConfigError(full(key), "expected a string", line_of(n));
    return n.Scalar();
  }

  YAML::Node node_;
  std::string path_;
  YAML::Node out_;
  std::vector<std::string>& defaults_;
  std::set<std::string> used_;
  std::set<std::string> explicit_;
};

void require(bool ok, const std::string& path, const std::string& message) {
  if (!ok) throw ConfigError(path, message);
}

LevelScheme named_scheme(const std::string& name) {
  if (name == "rb87_d2") return default_rb87_d2();
  if (name == "three_level") return three_level_scheme(default_rb87_d2().delta_omega_21);
  throw ConfigError("scheme", fmt::format("unknown scheme '{}'", name));
}

void parse_scheme(const YAML::Node& doc, RunConfig& c, std::vector<std::string>& defaults) {
  const auto n = doc["scheme"];
  if (!n || n.IsNull()) {
    c.scheme_name = "rb87_d2";
    c.scheme = default_rb87_d2();
    c.resolved["scheme"]["base"] = c.scheme_name;
    defaults.push_back("scheme");
  } else if (n.IsScalar()) {
    c.scheme_name = n.Scalar();
    c.scheme = named_scheme(c.scheme_name);
    c.resolved["scheme"]["base"] = c.scheme_name;
  } else {
    YAML::Node out = c.resolved["scheme"];
    Section s(n, "scheme", out, defaults);
    c.scheme_name = s.choice("base", "rb87_d2", {"rb87_d2", "three_level"});
    const LevelScheme base = named_scheme(c.scheme_name);
    c.scheme.gamma = s.number("gamma", base.gamma);
    c.scheme.delta_34 = s.number("delta_34", base.delta_34);
    c.scheme.delta_35 = s.number("delta_35", base.delta_35);
    c.scheme.delta_36 = s.number("delta_36", base.delta_36);
    c.scheme.delta_omega_21 = s.number("delta_omega_21", base.delta_omega_21);
    c.scheme.s_tilde_14 = s.number("s_tilde_14", base.s_tilde_14);
    c.scheme.s_tilde_15 = s.number("s_tilde_15", base.s_tilde_15);
    c.scheme.s_tilde_25 = s.number("s_tilde_25", base.s_tilde_25);
    c.scheme.s_tilde_26 = s.number("s_tilde_26", base.s_tilde_26);
    c.scheme.s_13 = s.number("s_13", base.s_13);
    c.scheme.s_23 = s.number("s_23", base.s_23);
    s.finish();
    return;
  }
  // Echo the constants of a named scheme as well.
  YAML::Node out = c.resolved["scheme"];
  out["gamma"] = yaml_number(c.scheme.gamma);
  out["delta_34"] = yaml_number(c.scheme.delta_34);
  out["delta_35"] = yaml_number(c.scheme.delta_35);
  out["delta_36"] = yaml_number(c.scheme.delta_36);
  out["delta_omega_21"] = yaml_number(c.scheme.delta_omega_21);
  out["s_tilde_14"] = yaml_number(c.scheme.s_tilde_14);
  out["s_tilde_15"] = yaml_number(c.scheme.s_tilde_15);
  out["s_tilde_25"] = yaml_number(c.scheme.s_tilde_25);
  out["s_tilde_26"] = yaml_number(c.scheme.s_tilde_26);
  out["s_13"] = yaml_number(c.scheme.s_13);
  out["s_23"] = yaml_number(c.scheme.s_23);
}

void validate(const RunConfig& c) {
  try {
    c.scheme.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("scheme", e.what());
  }
  const auto& m = c.medium;
  require(m.od >= 0.0 && std::isfinite(m.od), "medium.od", "must be finite and >= 0");
  require(c.temperature_uK >= 0.0, "medium.temperature_uK", "must be >= 0");
  require(c.trap_depth_mK > 0.0, "medium.trap_depth_mK", "must be positive");
  require(c.length_m > 0.0, "medium.length_m", "must be positive");
  require(m.gamma_trd >= 0.0, "medium.gamma_trd", "must be >= 0");
  require(m.sigma_pc > 0.0, "medium.sigma_pc", "must be positive");
  require(c.sigma_a_auto || m.sigma_a > 0.0, "medium.sigma_a", "must be positive");
  require(std::isfinite(m.phase_mismatch), "medium.phase_mismatch", "must be finite");
  require(c.omega_c_plus >= 0.0, "drive.omega_c_plus", "must be >= 0");
  require(c.omega_c_minus >= 0.0, "drive.omega_c_minus", "must be >= 0");
  require(c.pulse.fwhm > 0.0, "pulse.fwhm", "must be positive");
  require(std::abs(c.pulse.peak) > 0.0, "pulse.peak", "must be nonzero");
  require(c.storage.ramp >= 0.0, "protocol.storage.ramp", "must be >= 0");
  require(c.storage.storage_time >= c.storage.ramp, "protocol.storage.storage_time",
          "must cover the switch-off ramp");
  require(c.slp.ramp >= 0.0, "protocol.slp.ramp", "must be >= 0");
  require(c.slp.backward_off >= c.slp.backward_on + c.slp.ramp, "protocol.slp.backward_off",
          "must follow the completed switch-on ramp");
  require(c.grid.nz >= 32, "grid.nz", "must be >= 32");
  require(c.grid.dt > 0.0, "grid.dt", "must be positive");
  require(c.grid.n_max >= 0, "grid.n_max", "must be >= 0");
  require(c.grid.record_stride >= 1, "grid.record_stride", "must be >= 1");
  require(c.grid.snapshot_stride >= 0, "grid.snapshot_stride", "must be >= 0");
  require(c.grid.stability_check_interval >= 1, "grid.stability_check_interval", "must be >= 1");
  require(c.velocity_nodes >= 1, "grid.velocity_nodes", "must be >= 1");
  require(c.t_end_auto || c.grid.t_end > 0.0, "grid.t_end", "must be positive");
  require(c.tail > 0.0, "grid.tail", "must be positive");
  require(c.effective.beta > 0.0 && c.effective.beta <= 1.0, "effective.beta",
          "must lie in (0, 1]");
  require(c.effective.gamma_inh >= 0.0, "effective.gamma_inh", "must be >= 0");
  require(c.spectrum.points >= 2, "spectrum.points", "must be >= 2");
  require(c.spectrum.stop > c.spectrum.start, "spectrum.stop", "must exceed spectrum.start");
  require(c.spectrum.quadrature.radial_nodes >= 4, "spectrum.radial_nodes", "must be >= 4");
  require(c.spectrum.quadrature.velocity_nodes >= 1, "spectrum.velocity_nodes", "must be >= 1");
  require(c.calibration.options.points >= 41, "calibration.points", "must be >= 41");
  require(c.calibration.options.half_span > 0.0, "calibration.half_span", "must be positive");
  require(c.calibration.options.tolerance > 0.0, "calibration.tolerance", "must be positive");
  require(c.calibration.options.max_evaluations >= 10, "calibration.max_evaluations",
          "must be >= 10");
  for (double t : c.calibration.temperatures_uK) {
    require(t >= 0.0, "calibration.temperatures_uK", "entries must be >= 0");
  }
  for (double o : c.calibration.omega_c) {
    require(o > 0.0, "calibration.omega_c", "entries must be positive");
  }
  std::set<std::string> seen;
  for (const auto& a : c.sweep.axes) {
    require(!a.values.empty(), "sweep.axes", fmt::format("axis '{}' has no values", a.parameter));
    require(seen.insert(a.parameter).second, "sweep.axes",
            fmt::format("axis '{}' appears twice", a.parameter));
  }
}

}  // namespace

RunConfig parse_config(const YAML::Node& doc) {
  RunConfig c;
  c.resolved = YAML::Node(YAML::NodeType::Map);
  auto& defaults = c.defaults_applied;
  if (doc && !doc.IsNull() && !doc.IsMap()) throw ConfigError("<root>", "expected a mapping");

  YAML::Node root_out = c.resolved;
  Section root(doc, "", root_out, defaults);
  const int version = root.integer("format_version", kConfigFormatVersion);
  if (version != kConfigFormatVersion) {
    throw ConfigError("format_version", fmt::format("unsupported version {}", version));
  }
  root.raw("scheme");
  parse_scheme(doc, c, defaults);

  {
    auto s = root.child("medium");
    auto& m = c.medium;
    m.od = s.number("od", 50.0);
    c.temperature_uK = s.number("temperature_uK", 0.0);
    m.theta = c.temperature_uK * 1e-6;
    m.gamma_trd = s.number("gamma_trd", 0.0);
    m.sigma_pc = s.number("sigma_pc", 1.0);
    const auto sa = s.number_or_auto("sigma_a");
    c.sigma_a_auto = !sa.has_value();
    if (sa) m.sigma_a = *sa;
    c.trap_depth_mK = s.number("trap_depth_mK", 2.25);
    c.length_m = s.number("length_m", 0.1);
    const auto pm = s.number_or_auto("phase_mismatch");
    c.phase_mismatch_auto = !pm.has_value();
    if (pm) m.phase_mismatch = *pm;
    m.gamma_inh_tracks_control = s.boolean("gamma_inh_tracks_control", true);
    s.finish();
  }
  {
    auto s = root.child("drive");
    c.omega_c_plus = s.number("omega_c_plus", 3.0);
    c.omega_c_minus = s.number("omega_c_minus", 0.0);
    c.delta_c_plus = s.number("delta_c_plus", 0.0);
    c.delta_c_minus = s.number("delta_c_minus", c.delta_c_plus);
    c.delta_p = s.number_or_auto("delta_p");
    s.finish();
  }
  {
    auto s = root.child("pulse");
    c.pulse.fwhm = s.number("fwhm", 8.0);
    c.pulse.peak = s.number("peak", 0.01);
    const auto center = s.number_or_auto("center");
    c.pulse_center_auto = !center.has_value();
    c.pulse.center = center.value_or(2.0 * c.pulse.fwhm);
    s.finish();
  }
  {
    auto p = root.child("protocol");
    {
      auto s = p.child("storage");
      c.storage.switch_off = s.number("switch_off", 20.0);
      const auto us = s.raw("storage_time_us");
      if (present(us)) {
        double v = 0.0;
        try {
          v = us.as<double>();
        } catch (const YAML::Exception&) {
          throw ConfigError(s.full("storage_time_us"), "expected a number", line_of(us));
        }
        s.out()["storage_time_us"] = yaml_number(v);
        if (present(s.raw("storage_time"))) {
          throw ConfigError(s.full("storage_time"),
                            "give either storage_time or storage_time_us, not both");
        }
        c.storage.storage_time = units::from_microseconds(v);
        s.out()["storage_time"] = yaml_number(c.storage.storage_time);
      } else {
        c.storage.storage_time = s.number("storage_time", units::from_microseconds(0.6));
      }
      c.storage.ramp = s.number("ramp", 3.81);
      s.finish();
    }
    {
      auto s = p.child("slp");
      c.slp.backward_on = s.number("backward_on", 16.0);
      c.slp.backward_off = s.number("backward_off", 30.0);
      c.slp.ramp = s.number("ramp", 1.9);
      s.finish();
    }
    p.finish();
  }
  {
    auto s = root.child("grid");
    auto& g = c.grid;
    g.nz = s.integer("nz", 200);
    g.dt = s.number("dt", 0.01);
    const auto t_end = s.number_or_auto("t_end");
    c.t_end_auto = !t_end.has_value();
    if (t_end) g.t_end = *t_end;
    c.tail = s.number("tail", 60.0);
    g.n_max = s.integer("n_max", 3);
    c.velocity_nodes = s.integer("velocity_nodes", 11);
    g.phase_gauge = s.choice("phase_gauge", "backward_only", {"backward_only", "both_fields"}) ==
                            "both_fields"
                        ? PhaseGauge::both_fields
                        : PhaseGauge::backward_only;
    g.kernel = s.choice("kernel", "parallel", {"parallel", "serial"}) == "serial"
                   ? KernelMode::serial
                   : KernelMode::parallel;
    g.record_stride = s.integer("record_stride", 1);
    g.snapshot_stride = s.integer("snapshot_stride", 0);
    g.stability_check_interval = s.integer("stability_check_interval", 16);
    s.finish();
  }
  {
    auto s = root.child("effective");
    const auto mode = s.choice("mode", "explicit", {"explicit", "calibrate"});
    c.effective.calibrate = mode == "calibrate";
    c.effective.beta = s.number("beta", 1.0);
    c.effective.gamma_inh = s.number("gamma_inh", 0.0);
    s.finish();
  }
  {
    auto s = root.child("spectrum");
    c.spectrum.start = s.number("start", -8.0);
    c.spectrum.stop = s.number("stop", 8.0);
    c.spectrum.points = s.integer("points", 161);
    c.spectrum.model = s.choice("model", "inhomogeneous", {"inhomogeneous", "homogeneous"}) ==
                               "homogeneous"
                           ? SpectrumModel::homogeneous
                           : SpectrumModel::inhomogeneous;
    c.spectrum.quadrature.radial_nodes = s.integer("radial_nodes", 48);
    c.spectrum.quadrature.velocity_nodes = s.integer("velocity_nodes", 16);
    c.spectrum.quadrature.check_convergence = s.boolean("check_convergence", false);
    s.finish();
  }
  {
    auto s = root.child("calibration");
    auto& o = c.calibration.options;
    o.beta_start = s.number("beta_start", 0.8);
    o.gamma_start = s.number("gamma_start", 0.01);
    o.half_span = s.number("half_span", 3.0);
    o.points = s.integer("points", 61);
    o.max_evaluations = s.integer("max_evaluations", 400);
    o.tolerance = s.number("tolerance", 0.01);
    o.quadrature = c.spectrum.quadrature;
    c.calibration.temperatures_uK = s.numbers("temperatures_uK");
    c.calibration.omega_c = s.numbers("omega_c");
    s.finish();
  }
  {
    auto s = root.child("sweep");
    c.sweep.command = s.choice("command", "slp", {"spectrum", "calibrate", "slowlight", "storage",
                                                  "slp"});
    const auto axes = s.raw("axes");
    YAML::Node axes_out(YAML::NodeType::Sequence);
    if (present(axes)) {
      if (!axes.IsSequence()) {
        throw ConfigError("sweep.axes", "expected a list of {parameter, values}", line_of(axes));
      }
      for (std::size_t i = 0; i < axes.size(); ++i) {
        const std::string path = fmt::format("sweep.axes[{}]", i);
        const auto a = axes[i];
        if (!a.IsMap() || !a["parameter"] || !a["values"] || a.size() != 2) {
          throw ConfigError(path, "each axis needs exactly `parameter` and `values`", line_of(a));
        }
        if (!a["values"].IsSequence()) {
          throw ConfigError(path + ".values", "expected a list", line_of(a["values"]));
        }
        SweepAxis axis;
        axis.parameter = a["parameter"].as<std::string>();
        if (axis.parameter.rfind("sweep", 0) == 0 || axis.parameter.rfind("output", 0) == 0) {
          throw ConfigError(path + ".parameter", "cannot sweep over sweep or output settings");
        }
        for (const auto& v : a["values"]) axis.values.push_back(YAML::Clone(v));
        YAML::Node echo;
        echo["parameter"] = axis.parameter;
        echo["values"] = YAML::Clone(a["values"]);
        axes_out.push_back(echo);
        c.sweep.axes.push_back(std::move(axis));
      }
    } else {
      defaults.push_back("sweep.axes");
    }
    s.out()["axes"] = axes_out;
    s.finish();
  }
  {
    auto s = root.child("output");
    const auto dir = s.raw("directory");
    if (present(dir)) {
      c.output_directory = dir.as<std::string>();
    } else {
      defaults.push_back("output.directory");
    }
    s.out()["directory"] = c.output_directory;
    s.finish();
  }
  root.finish();
  validate(c);

  // Sweep axes must name keys the schema knows; check by re-parsing one tuple.
  for (const auto& a : c.sweep.axes) {
    try {
      parse_config(with_override(
          [&] {
            YAML::Node d = YAML::Clone(doc);
            d.remove("sweep");
            return d;
          }(),
          a.parameter, a.values.front()));
    } catch (const ConfigError& e) {
      throw ConfigError("sweep.axes", fmt::format("parameter '{}': {}", a.parameter, e.what()));
    }
  }
  return c;
}

RunConfig parse_config_text(const std::string& text) {
  YAML::Node doc;
  try {
    doc = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("<document>", e.msg, e.mark.line + 1);
  }
  return parse_config(doc);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", fmt::format("cannot open {}", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

YAML::Node with_override(const YAML::Node& document, const std::string& path,
                         const YAML::Node& value) {
  YAML::Node doc = document && !document.IsNull() ? YAML::Clone(document)
                                                  : YAML::Node(YAML::NodeType::Map);
  std::vector<std::string> parts;
  std::stringstream ss(path);
  for (std::string p; std::getline(ss, p, '.');) {
    if (p.empty()) throw ConfigError(path, "empty component in key path");
    parts.push_back(p);
  }
  if (parts.empty()) throw ConfigError(path, "empty key path");
  // A scalar scheme name is expanded so that scheme constants can be swept.
  if (parts.front() == "scheme" && parts.size() > 1 && doc["scheme"] &&
      doc["scheme"].IsScalar()) {
    const std::string base = doc["scheme"].Scalar();
    doc["scheme"] = YAML::Node(YAML::NodeType::Map);
    doc["scheme"]["base"] = base;
  }
  std::vector<YAML::Node> chain{doc};
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    YAML::Node next = chain.back()[parts[i]];
    if (!next || next.IsNull()) {
      chain.back()[parts[i]] = YAML::Node(YAML::NodeType::Map);
      next = chain.back()[parts[i]];
    } else if (!next.IsMap()) {
      throw ConfigError(path, fmt::format("'{}' is not a mapping", parts[i]));
    }
    chain.push_back(next);
  }
  chain.back()[parts.back()] = YAML::Clone(value);
  return doc;
}

double thermal_cloud_radius(double sigma_pc, double temperature_uK, double trap_depth_mK) {
  return sigma_pc * std::sqrt(temperature_uK * 1e-6 / (2.0 * trap_depth_mK * 1e-3));
}

ResolvedRun resolve_run(const RunConfig& c, Scenario scenario, CalibrationCache* cache) {
  ResolvedRun r;
  r.scheme = c.scheme;
  r.medium = c.medium;
  auto& m = r.medium;
  m.k_thermal = units::doppler_scale(m.theta);
  if (c.sigma_a_auto) {
    m.sigma_a = thermal_cloud_radius(m.sigma_pc, c.temperature_uK, c.trap_depth_mK);
    // A cold cloud is point-like compared with the beam.
    if (!(m.sigma_a > 0.0)) m.sigma_a = 1e-6 * (std::isinf(m.sigma_pc) ? 1.0 : m.sigma_pc);
  }
  if (c.phase_mismatch_auto) m.phase_mismatch = units::phase_mismatch_for_length(c.length_m);

  if (c.effective.calibrate) {
    DriveConfig cw;
    cw.omega_c_plus = ControlEnvelope(c.omega_c_plus);
    cw.delta_c_plus = c.delta_c_plus;
    cw.delta_c_minus = c.delta_c_plus;
    MediumConfig cal = m;
    cal.gamma_inh = 0.0;
    r.effective = cache ? cache->get(cal, cw, r.scheme, c.calibration.options)
                        : calibrate(cal, cw, r.scheme, c.calibration.options);
    r.calibrated = true;
  } else {
    r.effective = {c.effective.beta, c.effective.gamma_inh, 0.0};
  }
  m.gamma_inh = r.effective.gamma_inh;

  const double beta = r.effective.beta;
  const double oc_plus = beta * c.omega_c_plus;
  const double oc_minus = beta * c.omega_c_minus;
  r.delta_p = c.delta_p ? *c.delta_p
                        : eit_resonance_detuning(r.scheme, oc_plus, c.delta_c_plus,
                                                 m.gamma_trd + m.gamma_inh);

  switch (scenario) {
    case Scenario::spectrum:
    case Scenario::slowlight:
      r.drive = slow_light_drive(oc_plus, c.pulse, c.delta_c_plus, r.delta_p);
      r.drive.delta_c_minus = c.delta_c_minus;
      break;
    case Scenario::storage:
      r.drive = storage_drive(oc_plus, c.pulse, c.storage, c.delta_c_plus, r.delta_p);
      r.drive.delta_c_minus = c.delta_c_minus;
      break;
    case Scenario::slp:
      r.drive = slp_drive(oc_plus, oc_minus, c.pulse, c.slp, c.delta_c_plus, c.delta_c_minus,
                          r.delta_p);
      break;
  }

  r.grid = c.grid;
  r.grid.velocity_classes = make_velocity_classes(m.k_thermal, c.velocity_nodes);
  if (c.t_end_auto) {
    const double delay = oc_plus > 0.0 ? m.od / (oc_plus * oc_plus) : 0.0;
    double last = c.pulse.center + delay;
    if (scenario == Scenario::storage) {
      last = std::max(last, c.storage.switch_off + c.storage.storage_time + c.storage.ramp);
    } else if (scenario == Scenario::slp && c.omega_c_minus > 0.0) {
      last = std::max(last, c.slp.backward_off + c.slp.ramp);
    }
    r.grid.t_end = last + c.tail;
  }
  return r;
}

}  // namespace eitsim
