// Experiment runner: integrates the damped inertial dynamics or runs the
// discrete schemes from a JSON config, evaluates the requested claims, and
// writes trajectory/constants/analysis artifacts.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "inertia/experiment.hpp"

namespace {

void write_error_json(const std::string& out_dir, const std::string& kind,
                      const std::string& message) {
  try {
    std::filesystem::create_directories(out_dir);
    std::ofstream os(out_dir + "/error.json");
    os << inertia::json{{"error", kind}, {"message", message}}.dump(2) << "\n";
  } catch (...) {
    // stderr still carries the message
  }
}

int execute(const inertia::json& config, const std::string& out_dir) {
  try {
    const auto result = inertia::run_experiment(config, out_dir);
    for (const auto& claim : result.claims)
      std::cout << (claim.pass ? "[pass] " : "[FAIL] ") << claim.id << " "
                << claim.details.dump() << "\n";
    std::cout << (result.all_pass ? "all claims passed" : "some claims FAILED") << "\n";
    return result.all_pass ? 0 : 1;
  } catch (const inertia::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    write_error_json(out_dir, "config", e.what());
    return 2;
  } catch (const inertia::IntegrationError& e) {
    std::cerr << "integration error: " << e.what() << "\n";
    write_error_json(out_dir, "integration", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    write_error_json(out_dir, "runtime", e.what());
    return 4;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for inertial gradient dynamics"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
  run->add_option("config", config_path, "path to the config file")->required();
  run->add_option("--out", out_dir, "output directory (default: out)");

  std::string preset_name, preset_out;
  auto* preset = app.add_subcommand("preset", "run a named preset");
  preset->add_option("name", preset_name, "preset name (see list-presets)")->required();
  preset->add_option("--out", preset_out, "output directory (default: out/<name>)");

  app.add_subcommand("list-presets", "list available presets");

  std::uint64_t seed = 1;
  int trials = 10000;
  auto* lemmas = app.add_subcommand("verify-lemmas", "randomized inequality checks");
  lemmas->add_option("--seed", seed, "RNG seed")->required();
  lemmas->add_option("--trials", trials, "number of trials")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "cannot open config: " << config_path << "\n";
      return 2;
    }
    inertia::json config;
    try {
      in >> config;
    } catch (const std::exception& e) {
      std::cerr << "config parse error: " << e.what() << "\n";
      write_error_json(out_dir, "parse", e.what());
      return 2;
    }
    return execute(config, out_dir);
  }

  if (preset->parsed()) {
    try {
      const auto config = inertia::preset_config(preset_name);
      const std::string dir = preset_out.empty() ? "out/" + preset_name : preset_out;
      return execute(config, dir);
    } catch (const inertia::ConfigError& e) {
      std::cerr << e.what() << "\n";
      return 2;
    }
  }

  if (app.get_subcommand("list-presets")->parsed()) {
    for (const auto& [name, blurb] : inertia::preset_catalog())
      std::cout << name << "\t" << blurb << "\n";
    return 0;
  }

  if (lemmas->parsed()) {
    const auto report = inertia::check_inequality_lemmas(seed, trials);
    std::cout << "trials: " << report.trials << "\nviolations: " << report.violations << "\n";
    if (!report.ok()) std::cout << "first failure: " << report.first_failure << "\n";
    return report.ok() ? 0 : 1;
  }
  return 0;
}
