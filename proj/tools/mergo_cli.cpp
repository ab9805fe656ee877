#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mergo/runner.hpp"
#include "mergo/selfcheck.hpp"

int main(int argc, char **argv) {
  CLI::App app{"Martingale-ergodic and ergodic-martingale processes on finite spaces"};
  app.set_version_flag("--version", mergo::library_version());
  app.require_subcommand(1);

  auto *run = app.add_subcommand("run", "Run an experiment config and write its outputs");
  std::string config;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  run->add_option("--config", config, "Experiment config (JSON); a manifest.json also works")
      ->required();
  run->add_option("--out", out_dir, "Output directory (default: output_dir from the config, else ./out)");
  run->add_option("--seed", seed, "Override the config seed");

  auto *check = app.add_subcommand("selfcheck", "Run the invariant and inequality suites");
  std::size_t budget = 100;
  check->add_option("--budget", budget, "Random instances per suite")->check(CLI::Range(1, 1000000));

  auto *gen = app.add_subcommand("gen", "Print a random config fragment");
  std::string kind;
  std::uint64_t gen_seed = 0;
  std::size_t size = 8;
  gen->add_option("--kind", kind, "space, map, filtration or observable")
      ->required()
      ->check(CLI::IsMember({"space", "map", "filtration", "observable"}));
  gen->add_option("--seed", gen_seed, "Generator seed")->required();
  gen->add_option("--size", size, "Number of points")->check(CLI::Range(1, 100000));

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const &e) {
    int const code = app.exit(e);
    return code == 0 ? 0 : mergo::exit_code::validation;
  }

  if (*run)
    return mergo::run_command(config, out_dir, seed, std::cout, std::cerr);
  if (*check)
    return mergo::selfcheck_command(budget, std::cout);
  return mergo::gen_command(kind, gen_seed, size, std::cout, std::cerr);
}
