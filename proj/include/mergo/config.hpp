#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mergo/error.hpp"
#include "mergo/inequality_lab.hpp"
#include "mergo/processes.hpp"

namespace mergo {

/// Validation failure inside an experiment config. `path` addresses the
/// offending entry, e.g. "checks[0].p".
class ConfigError : public Error {
public:
  ConfigError(std::string path, std::string const &message)
      : Error(path + ": " + message), path_(std::move(path)) {}
  std::string const &path() const { return path_; }

private:
  std::string path_;
};

enum class CheckType { dominant, maximal };

struct CheckConfig {
  CheckType type = CheckType::dominant;
  double p = 2.0;
  std::vector<double> epsilons;  // maximal checks only
  std::optional<SupBox> box;     // default_box when absent
  unsigned orlicz_order = 1;
};

struct GridConfig {
  std::optional<std::vector<std::size_t>> n1;
  std::optional<std::vector<std::size_t>> n2;
  double p = 2.0;
};

struct ExperimentConfig {
  nlohmann::json source;  // the parsed document with the effective seed filled in
  std::uint64_t seed = 0;
  ProcessSpec spec;
  std::vector<CheckConfig> checks;
  GridConfig grid;
  std::optional<std::string> output_dir;
};

/// Builds and validates every component. A manifest.json written by `run`
/// is accepted as well: its embedded config is used.
ExperimentConfig parse_config(nlohmann::json const &doc,
                              std::optional<std::uint64_t> seed_override = std::nullopt);
ExperimentConfig load_config(std::filesystem::path const &path,
                             std::optional<std::uint64_t> seed_override = std::nullopt);

/// Random fragments for the `gen` subcommand: "space", "map", "filtration"
/// or "observable".
nlohmann::json generate_fragment(std::string const &kind, std::uint64_t seed,
                                 std::size_t size = 8);

} // namespace mergo
