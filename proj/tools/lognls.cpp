#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "lognls/harness.hpp"

using lognls::harness::Json;

namespace {

struct ConfigConflict {
  std::string message;
};

// A flag fills a missing key; a flag that disagrees with the config is an error.
void merge(Json& cfg, const std::string& pointer, const Json& value, const std::string& flag) {
  const Json::json_pointer ptr(pointer);
  if (cfg.contains(ptr) && cfg[ptr] != value) {
    throw ConfigConflict{flag + " conflicts with " + pointer.substr(1) + " in the config"};
  }
  cfg[ptr] = value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Logarithmic NLS experiments"};
  std::string config_path, experiment, family, out_dir;
  std::optional<double> lambda, omega, half_width, dt, t_final;
  std::optional<int> n;
  bool quiet = false;
  app.add_option("-c,--config", config_path, "JSON experiment config");
  app.add_option("-e,--experiment", experiment, "experiment name");
  app.add_option("--family", family, "cubic_log_2d, quintic_log_1d or pure_cubic_2d");
  app.add_option("--lambda", lambda);
  app.add_option("--omega", omega);
  app.add_option("--n", n, "grid points per axis");
  app.add_option("--half-width", half_width, "domain is [-L, L) per axis");
  app.add_option("--dt", dt);
  app.add_option("--t-final", t_final);
  app.add_option("-o,--out", out_dir, "directory for default output files");
  app.add_flag("-q,--quiet", quiet, "do not print the summary");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : lognls::harness::kConfigError;
  }

  Json cfg = Json::object();
  try {
    if (!config_path.empty()) cfg = lognls::harness::load_config(config_path);
    if (!cfg.is_object()) throw ConfigConflict{"config must be a JSON object"};
    if (!experiment.empty()) merge(cfg, "/experiment", experiment, "--experiment");
    if (!family.empty()) merge(cfg, "/model/family", family, "--family");
    if (lambda) merge(cfg, "/model/lambda", *lambda, "--lambda");
    if (omega) merge(cfg, "/model/omega", *omega, "--omega");
    if (n) merge(cfg, "/grid/n", *n, "--n");
    if (half_width) merge(cfg, "/grid/half_width", *half_width, "--half-width");
    if (dt) merge(cfg, "/time/dt", *dt, "--dt");
    if (t_final) merge(cfg, "/time/t_final", *t_final, "--t-final");
    if (!out_dir.empty()) {
      if (cfg.contains("outputs")) throw ConfigConflict{"--out conflicts with outputs in the config"};
      const std::string name = cfg.value("experiment", "run");
      cfg["outputs"]["summary_json_path"] = out_dir + "/summary.json";
      cfg["outputs"]["csv_path"] = out_dir + "/" + name + ".csv";
    }
  } catch (const ConfigConflict& e) {
    std::cerr << "config error: " << e.message << "\n";
    return lognls::harness::kConfigError;
  } catch (const lognls::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return lognls::harness::kConfigError;
  }

  const auto outcome = lognls::harness::run(cfg);
  if (!quiet) std::cout << outcome.summary.dump(2) << "\n";
  if (outcome.summary.contains("error")) {
    std::cerr << outcome.summary["error"].value("message", "") << "\n";
  }
  return outcome.exit_code;
}
