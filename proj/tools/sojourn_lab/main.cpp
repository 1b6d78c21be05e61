#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "app.hpp"

int main(int argc, char** argv) {
  CLI::App cli{"sojourn-lab: sojourn times, energy widths and golden-rule widths on model Hamiltonians"};
  std::string scenario, config, out_dir = ".";
  std::optional<std::uint64_t> seed;
  cli.add_option("scenario", scenario,
                 "width | sojourn | fgr-sweep | floquet | ac-stark | multistate | verify")
      ->required();
  cli.add_option("--config", config, "JSON scenario config (optional for verify)");
  cli.add_option("--out", out_dir, "output directory for the report and tables")
      ->capture_default_str();
  cli.add_option("--seed", seed, "seed for randomized suites, overrides the config");
  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : lab::kConfigError;
  }
  const std::optional<std::string> cfg = config.empty() ? std::nullopt : std::optional(config);
  return lab::execute(scenario, cfg, out_dir, seed, std::cout, std::cerr);
}
