#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include "eitsim/app.hpp"

namespace fs = std::filesystem;

namespace {

fs::path workdir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "eitsim_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const auto p = workdir() / name;
  std::ofstream(p) << text;
  return p;
}

int run(const std::string& args) {
  const std::string cmd = std::string(EITSIM_CLI_PATH) + " " + args + " -q 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

constexpr const char* kTiny = R"(
format_version: 1
medium: {od: 10, gamma_trd: 0.01}
drive: {omega_c_plus: 3}
pulse: {fwhm: 4, center: 8}
grid: {nz: 32, dt: 0.02, t_end: 30, n_max: 0}
spectrum: {points: 11, model: homogeneous}
)";

}  // namespace

TEST_CASE("cli exit codes") {
  const auto good = write_config("good.yaml", kTiny);
  const auto out = workdir() / "out";

  CHECK(run("slowlight --config " + good.string() + " --out " + out.string()) ==
        eitsim::kExitSuccess);
  CHECK(fs::exists(out / "result.json"));
  CHECK(fs::exists(out / "timeseries.csv"));
  CHECK(fs::exists(out / "resolved_config.yaml"));

  CHECK(run("spectrum --config " + good.string() + " --out " + (out / "spec").string()) ==
        eitsim::kExitSuccess);
  CHECK(fs::exists(out / "spec" / "spectrum.csv"));

  CHECK(run("slowlight --config " + good.string() + " --snapshot-stride 500 --out " +
            (out / "snap").string()) == eitsim::kExitSuccess);
  CHECK(fs::exists(out / "snap" / "snapshots" / "snapshot_00000.csv"));

  const auto bad = write_config("bad.yaml", "format_version: 1\nmedium: {od: -3}\n");
  CHECK(run("spectrum --config " + bad.string() + " --out " + out.string()) ==
        eitsim::kExitConfigError);
  const auto unknown = write_config("unknown.yaml", "format_version: 1\nmedum: {od: 3}\n");
  CHECK(run("spectrum --config " + unknown.string()) == eitsim::kExitConfigError);
  const auto broken = write_config("broken.yaml", "format_version: [1\n");
  CHECK(run("spectrum --config " + broken.string()) == eitsim::kExitConfigError);
  CHECK(run("spectrum --config " + (workdir() / "missing.yaml").string()) ==
        eitsim::kExitConfigError);
  CHECK(run("frobnicate") == eitsim::kExitConfigError);

  const auto blowup = write_config("blowup.yaml", R"(
format_version: 1
medium: {od: 10}
drive: {omega_c_plus: 6}
pulse: {fwhm: 4, center: 8}
grid: {nz: 32, dt: 0.6, t_end: 60, n_max: 0}
)");
  CHECK(run("slowlight --config " + blowup.string() + " --out " + (out / "blowup").string()) ==
        eitsim::kExitNumericalFailure);
}

TEST_CASE("cli sweep over a preset") {
  const auto out = workdir() / "sweep";
  const auto cfg = write_config("sweep.yaml", std::string(kTiny) + R"(
sweep:
  command: slowlight
  axes:
    - {parameter: medium.od, values: [5, 10]}
)");
  CHECK(run("sweep --config " + cfg.string() + " --out " + out.string() + " --threads 1") ==
        eitsim::kExitSuccess);
  CHECK(fs::exists(out / "index.json"));
  CHECK(fs::exists(out / "run_0001" / "result.json"));
}
