#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mergo {

struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  /// Largest lhs / rhs seen by an inequality suite.
  std::optional<double> worst_ratio;
  /// One line per failure: property and the seed that reproduces it.
  std::vector<std::string> messages;
  bool passed() const { return failures == 0; }
};

struct SelfcheckResult {
  std::vector<SuiteResult> suites;
  bool passed() const;
};

/// Invariant suites for the operators, averages and processes, then one suite
/// per inequality: pinned constants, a brute-force lhs on pinned instances,
/// and `budget` random instances.
SelfcheckResult selfcheck(std::size_t budget = 100);

void print_selfcheck(SelfcheckResult const &result, std::ostream &out);

/// The `selfcheck` subcommand: prints the table, returns an exit code.
int selfcheck_command(std::size_t budget, std::ostream &out);

} // namespace mergo
