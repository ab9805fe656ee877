#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mergo/config.hpp"
#include "mergo/inequality_lab.hpp"
#include "mergo/processes.hpp"

namespace mergo {

namespace exit_code {
inline constexpr int success = 0;
inline constexpr int validation = 1;
inline constexpr int failure = 2;
} // namespace exit_code

char const *library_version();

/// %.17g, enough digits to round-trip a double.
std::string format_double(double x);

nlohmann::ordered_json to_json(SupBox const &box);
nlohmann::ordered_json to_json(InequalityReport const &r);
std::string trace_csv(ConvergenceTrace const &trace);

struct RunOutputs {
  ConvergenceTrace trace;
  std::vector<InequalityReport> reports;
  std::string trace_csv;
  std::string reports_json;
  std::string manifest_json;
  bool all_satisfied = true;
};

/// Everything `run` computes, kept in memory.
RunOutputs run_experiment(ExperimentConfig const &config);

/// Writes trace.csv, reports.json and manifest.json into `dir`. Each file is
/// written under a temporary name first and renamed once all three exist.
void write_outputs(RunOutputs const &outputs, std::filesystem::path const &dir);

/// The `run` subcommand. Returns an exit code; messages go to `err`.
int run_command(std::filesystem::path const &config_path, std::optional<std::string> const &out_dir,
                std::optional<std::uint64_t> seed, std::ostream &out, std::ostream &err);

/// The `gen` subcommand.
int gen_command(std::string const &kind, std::uint64_t seed, std::size_t size, std::ostream &out,
                std::ostream &err);

} // namespace mergo
