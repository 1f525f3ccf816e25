#pragma once

#include <string>
#include <vector>

namespace qecml::validate {

// One registry entry of the self-check suite behind the CLI `validate`
// subcommand: fast, deterministic invariant and oracle checks.
struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  // one-line summary or the failure message
  double seconds = 0.0;
};

std::vector<std::string> check_names();

// Runs one named check; throws std::invalid_argument for unknown names.
CheckResult run_check(const std::string& name);

// Runs every check whose name contains `filter` (all when empty), in
// registry order. Failures are captured, not thrown.
std::vector<CheckResult> run_all(const std::string& filter = "");

}  // namespace qecml::validate
