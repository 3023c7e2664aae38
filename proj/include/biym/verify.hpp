#pragma once

#include <string>
#include <vector>

#include "biym/config.hpp"

namespace biym {

struct IdentityResult {
  std::string name;
  double max_residual;
  double tolerance;
  bool pass;
};

// Runs every variational identity over seeded random inputs. Tolerances
// come from the built-in defaults unless the config overrides them.
std::vector<IdentityResult> run_verify(const RunConfig& cfg);

std::string format_verify_table(const std::vector<IdentityResult>& results);
std::string format_verify_csv(const std::vector<IdentityResult>& results);

}  // namespace biym
