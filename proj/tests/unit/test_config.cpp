#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "eitsim/app.hpp"
#include "eitsim/config.hpp"
#include "eitsim/units.hpp"

using namespace eitsim;
namespace fs = std::filesystem;

namespace {

std::string preset(const std::string& name) {
  return std::string(EITSIM_PRESET_DIR) + "/" + name + ".yaml";
}

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("eitsim_unit_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// A run small enough for a unit test.
constexpr const char* kTinySlp = R"(
format_version: 1
medium: {od: 10, gamma_trd: 0.01}
drive: {omega_c_plus: 3, omega_c_minus: 3, delta_c_minus: -3, delta_p: 0}
pulse: {fwhm: 4, center: 8}
protocol: {slp: {backward_on: 10, backward_off: 14, ramp: 1}}
grid: {nz: 32, dt: 0.02, t_end: 30, n_max: 1, kernel: serial}
)";

}  // namespace

TEST_CASE("minimal document takes every default") {
  const auto c = parse_config_text("format_version: 1\n");
  CHECK(c.medium.od == 50.0);
  CHECK(c.omega_c_plus == 3.0);
  CHECK(c.grid.n_max == 3);
  CHECK(c.sigma_a_auto);
  CHECK(c.phase_mismatch_auto);
  CHECK_FALSE(c.delta_p.has_value());
  CHECK(c.storage.storage_time == doctest::Approx(units::from_microseconds(0.6)));
  const std::set<std::string> defaults(c.defaults_applied.begin(), c.defaults_applied.end());
  CHECK(defaults.count("medium.od") == 1);
  CHECK(defaults.count("grid.nz") == 1);
  CHECK(defaults.count("format_version") == 0);
}

TEST_CASE("validation names the offending key") {
  CHECK(error_of("format_version: 1\nmedium: {od: -1}\n").find("medium.od") == 0);
  CHECK(error_of("format_version: 2\n").find("format_version") == 0);
  CHECK(error_of("format_version: 1\ngrid: {nz: 8}\n").find("grid.nz") == 0);
  CHECK(error_of("format_version: 1\ndrive: {omega_c_plus: abc}\n").find("drive.omega_c_plus") == 0);
  CHECK(error_of("format_version: 1\ngrid: {kernel: gpu}\n").find("grid.kernel") == 0);
  CHECK(error_of("format_version: 1\nprotocol: {storage: {storage_time: 5, storage_time_us: 1}}\n")
            .find("protocol.storage") == 0);
}

TEST_CASE("unknown keys are rejected with their line") {
  try {
    parse_config_text("format_version: 1\nmedium:\n  od: 5\n  odd: 3\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.path() == "medium.odd");
    CHECK(e.line() == 4);
  }
}

TEST_CASE("stationary-light preset carries the measured parameter set") {
  const auto c = load_config(preset("fig3c_slp"));
  CHECK(c.medium.od == 53.0);
  CHECK(c.temperature_uK == 350.0);
  CHECK(c.medium.gamma_trd == 0.006);
  CHECK(c.omega_c_plus == 2.6);
  CHECK(c.omega_c_minus == 3.8);
  CHECK(c.delta_c_plus == 1.0);
  CHECK(c.delta_c_minus == -2.5);
  REQUIRE(c.delta_p.has_value());
  CHECK(*c.delta_p == 0.45);
  CHECK(c.effective.gamma_inh == 0.012);
  CHECK(c.grid.n_max == 3);
  const auto r = resolve_run(c, Scenario::slp);
  CHECK(r.medium.phase_mismatch == doctest::Approx(14.325).epsilon(1e-3));
  CHECK(r.drive.zeta() == -3.5);
  CHECK(r.medium.gamma_inh == 0.012);
}

TEST_CASE("every shipped preset parses and resolves") {
  for (const auto& entry : fs::directory_iterator(EITSIM_PRESET_DIR)) {
    CAPTURE(entry.path().string());
    const auto c = load_config(entry.path().string());
    CHECK_NOTHROW(resolve_run(c, Scenario::spectrum));
  }
}

TEST_CASE("geometry defaults") {
  CHECK(thermal_cloud_radius(1.0, 450.0, 2.25) == doctest::Approx(0.3162).epsilon(1e-3));
  const auto cold = resolve_run(parse_config_text("format_version: 1\n"), Scenario::spectrum);
  CHECK(cold.medium.sigma_a > 0.0);
  CHECK(cold.grid.velocity_classes.size() == 1);
}

TEST_CASE("overrides replace nested values") {
  const auto doc = YAML::Load("format_version: 1\ndrive: {omega_c_plus: 2}\n");
  const auto out = with_override(doc, "drive.omega_c_minus", YAML::Node(4.4));
  CHECK(out["drive"]["omega_c_minus"].as<double>() == 4.4);
  CHECK(out["drive"]["omega_c_plus"].as<double>() == 2.0);
  CHECK_FALSE(doc["drive"]["omega_c_minus"]);
  const auto s = with_override(YAML::Load("scheme: rb87_d2\n"), "scheme.delta_omega_21",
                               YAML::Node(0.0));
  CHECK(parse_config(s).scheme.delta_omega_21 == 0.0);
}

TEST_CASE("automatic detuning and duration") {
  const auto c = parse_config_text(R"(
format_version: 1
medium: {od: 40}
drive: {omega_c_plus: 2}
pulse: {fwhm: 5}
grid: {tail: 30}
)");
  const auto r = resolve_run(c, Scenario::slowlight);
  CHECK(r.grid.t_end == doctest::Approx(10.0 + 10.0 + 30.0));
  CHECK(r.delta_p == doctest::Approx(eit_resonance_detuning(r.scheme, 2.0, 0.0, 0.0)));
}

TEST_CASE("sweep index covers the cross product exactly once") {
  auto doc = YAML::Load(kTinySlp);
  doc["sweep"] = YAML::Load(R"(
command: slp
axes:
  - {parameter: drive.omega_c_minus, values: [2, 3]}
  - {parameter: medium.od, values: [5, 10, 15]}
)");
  const auto c = parse_config(doc);
  const auto dir = scratch_dir("sweep");
  const auto entries = run_sweep(doc, c, dir);
  REQUIRE(entries.size() == 6);
  const auto index = nlohmann::json::parse(slurp(dir / "index.json"));
  REQUIRE(index["entries"].size() == 6);
  std::set<std::pair<double, double>> seen;
  for (const auto& e : index["entries"]) {
    CHECK(e["result"].is_string());
    CHECK(fs::exists(dir / e["result"].get<std::string>()));
    seen.emplace(e["parameters"]["drive.omega_c_minus"].get<double>(),
                 e["parameters"]["medium.od"].get<double>());
    const auto result =
        nlohmann::json::parse(slurp(dir / e["result"].get<std::string>()));
    CHECK(result["config"]["medium"]["od"].get<double>() ==
          e["parameters"]["medium.od"].get<double>());
  }
  CHECK(seen.size() == 6);
  CHECK(fs::exists(dir / "index.csv"));
}

TEST_CASE("sweep rejects axes on its own settings") {
  auto doc = YAML::Load(kTinySlp);
  doc["sweep"] = YAML::Load("axes: [{parameter: sweep.command, values: [slp]}]");
  CHECK_THROWS_AS(parse_config(doc), ConfigError);
  doc["sweep"] = YAML::Load("axes: [{parameter: medium.nope, values: [1]}]");
  CHECK_THROWS_AS(parse_config(doc), ConfigError);
}

TEST_CASE("repeated runs write byte-identical files") {
  const auto c = parse_config_text(kTinySlp);
  const auto a = scratch_dir("repeat_a");
  const auto b = scratch_dir("repeat_b");
  run_command("slp", c, a);
  run_command("slp", c, b);
  for (const char* f : {"result.json", "timeseries.csv", "resolved_config.yaml"}) {
    CAPTURE(f);
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK_FALSE(slurp(a / f).empty());
  }
}

TEST_CASE("resolved configuration records derived values and defaults") {
  const auto c = parse_config_text(kTinySlp);
  const auto dir = scratch_dir("resolved");
  run_command("slp", c, dir);
  const auto doc = YAML::LoadFile((dir / "resolved_config.yaml").string());
  CHECK(doc["derived"]["t_end"].as<double>() == 30.0);
  CHECK(doc["derived"]["phase_mismatch"].as<double>() == doctest::Approx(14.325).epsilon(1e-3));
  CHECK(doc["medium"]["od"].as<double>() == 10.0);
  bool has_default = false;
  for (const auto& d : doc["defaults_applied"]) has_default |= d.as<std::string>() == "pulse.peak";
  CHECK(has_default);
  // The resolved document is itself a valid configuration.
  auto again = YAML::LoadFile((dir / "resolved_config.yaml").string());
  again.remove("derived");
  again.remove("defaults_applied");
  const auto c2 = parse_config(again);
  CHECK(c2.medium.od == c.medium.od);
  CHECK(c2.pulse.center == c.pulse.center);
  CHECK(c2.grid.t_end == c.grid.t_end);
}
