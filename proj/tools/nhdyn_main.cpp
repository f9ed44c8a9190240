#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "nhdyn/errors.hpp"
#include "nhdyn/scenario.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

int run_command(const std::string& config_path, const std::string& out_dir,
                std::optional<std::uint64_t> seed, bool exploratory) {
  nhdyn::ScenarioConfig cfg = nhdyn::load_config(config_path, nhdyn::max_dim_from_env());
  if (seed) cfg.seed = *seed;
  if (exploratory) cfg.exploratory = true;
  const nhdyn::RunReport report = nhdyn::run(cfg, out_dir);
  for (const auto& a : report.artifacts) {
    std::cout << (std::filesystem::path(out_dir) / a).string() << '\n';
  }
  if (report.exit_status != 0) {
    std::cerr << "nhdyn: one or more tasks failed numerically; see report.json\n";
  }
  return report.exit_status;
}

int validate_command(const std::string& config_path) {
  const nhdyn::ScenarioConfig cfg = nhdyn::load_config(config_path, nhdyn::max_dim_from_env());
  std::cout << cfg.echo().dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nhdyn: Heisenberg-picture dynamics for non-Hermitian Hamiltonians"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "nhdyn_out";
  std::optional<std::uint64_t> seed;
  bool exploratory = false;

  CLI::App* run = app.add_subcommand("run", "Execute the tasks of a scenario config");
  run->add_option("--config", config_path, "Path to the JSON config")->required();
  run->add_option("--out-dir", out_dir, "Directory for CSV artifacts and report.json");
  run->add_option("--seed", seed, "Override the config seed");
  run->add_flag("--exploratory", exploratory,
                "Add the time-independent generator probe to the classify task");

  std::string validate_path;
  CLI::App* validate = app.add_subcommand("validate", "Parse a config and print it with defaults filled in");
  validate->add_option("--config", validate_path, "Path to the JSON config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*run) return run_command(config_path, out_dir, seed, exploratory);
    return validate_command(validate_path);
  } catch (const nhdyn::ValidationError& e) {
    std::cerr << "nhdyn: invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const nhdyn::Error& e) {
    std::cerr << "nhdyn: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "nhdyn: unexpected failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}
