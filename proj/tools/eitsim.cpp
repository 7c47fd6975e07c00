#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>
#include <yaml-cpp/yaml.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "eitsim/app.hpp"
#include "eitsim/config.hpp"
#include "eitsim/mb_solver.hpp"

namespace {

int default_threads() {
  if (const char* env = std::getenv("EITSIM_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
    spdlog::warn("ignoring invalid EITSIM_THREADS='{}'", env);
  }
  return 0;
}

YAML::Node load_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw eitsim::ConfigError("--config", fmt::format("cannot open {}", path));
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return YAML::Load(ss.str());
  } catch (const YAML::ParserException& e) {
    throw eitsim::ConfigError(path, e.msg, e.mark.line + 1);
  }
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("eitsim"));
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"Maxwell-Bloch simulation of EIT, light storage and stationary light"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  int threads = default_threads();
  int snapshot_stride = -1;
  bool quiet = false;
  const std::pair<const char*, const char*> commands[] = {
      {"spectrum", "Steady-state probe transmission and absorption spectrum"},
      {"calibrate", "Fit the effective (beta, gamma_inh) to the inhomogeneous spectrum"},
      {"slowlight", "Propagate a probe pulse under a constant control field"},
      {"storage", "Store and retrieve a probe pulse by switching the control off and on"},
      {"slp", "Stationary light with counter-propagating control fields"},
      {"sweep", "Cross product of parameter values over one of the scenario commands"},
  };
  for (const auto& [name, description] : commands) {
    auto* sub = app.add_subcommand(name, description);
    sub->add_option("--config", config_path, "YAML run configuration")->required();
    sub->add_option("--out", out_dir, "Output directory (overrides output.directory)");
    sub->add_option("--threads", threads,
                    "Worker threads (default: EITSIM_THREADS or all cores)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--snapshot-stride", snapshot_stride,
                    "Record z-resolved field snapshots every k steps (0 disables)")
        ->check(CLI::NonNegativeNumber);
    sub->add_flag("-q,--quiet", quiet, "Only report errors");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? eitsim::kExitSuccess : eitsim::kExitConfigError;
  }
  if (quiet) spdlog::set_level(spdlog::level::err);
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    const YAML::Node document = load_document(config_path);
    const eitsim::RunConfig config = eitsim::parse_config(document);
    const std::filesystem::path out = out_dir.empty() ? config.output_directory : out_dir;
    eitsim::CalibrationCache cache;
    eitsim::CommandOptions options;
    options.snapshot_stride = snapshot_stride;
    options.cache = &cache;

    if (command == "sweep") {
      const auto entries = eitsim::run_sweep(document, config, out, options);
      int failed = 0;
      for (const auto& e : entries) {
        if (e.error.empty()) continue;
        ++failed;
        std::string tuple;
        for (const auto& [path, value] : e.parameters) {
          tuple += fmt::format("{}{}={}", tuple.empty() ? "" : ", ", path, value.Scalar());
        }
        spdlog::error("sweep point ({}) failed: {}", tuple, e.error);
      }
      spdlog::info("sweep: {} runs, {} failed; index written to {}", entries.size(), failed,
                   (out / "index.json").string());
      return failed ? eitsim::kExitNumericalFailure : eitsim::kExitSuccess;
    }
    const auto file = eitsim::run_command(command, config, out, options);
    spdlog::info("{}: wrote {}", command, (out / file).string());
    return eitsim::kExitSuccess;
  } catch (const eitsim::ConfigError& e) {
    spdlog::error("configuration error: {}", e.what());
    return eitsim::kExitConfigError;
  } catch (const YAML::Exception& e) {
    spdlog::error("configuration error: {}", e.what());
    return eitsim::kExitConfigError;
  } catch (const std::invalid_argument& e) {
    spdlog::error("invalid parameters: {}", e.what());
    return eitsim::kExitConfigError;
  } catch (const std::exception& e) {
    spdlog::error("numerical failure: {}", e.what());
    return eitsim::kExitNumericalFailure;
  }
}
